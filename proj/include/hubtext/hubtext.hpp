/* Copyright 2026 The hubtext Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include "hubtext/beam_search.hpp"
#include "hubtext/candidates.hpp"
#include "hubtext/caption_eval.hpp"
#include "hubtext/embedding.hpp"
#include "hubtext/encoder.hpp"
#include "hubtext/error.hpp"
#include "hubtext/hub.hpp"
#include "hubtext/remote_encoder.hpp"
#include "hubtext/retrieval.hpp"
#include "hubtext/worker_pool.hpp"
