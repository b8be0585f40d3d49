/*
 * Copyright 2026 The miet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/// Everything in one include.

#pragma once

#include "miet/bounds.hpp"
#include "miet/config.hpp"
#include "miet/csv.hpp"
#include "miet/error.hpp"
#include "miet/integrator.hpp"
#include "miet/linalg.hpp"
#include "miet/plant.hpp"
#include "miet/repro.hpp"
#include "miet/sim.hpp"
#include "miet/toml_lite.hpp"
#include "miet/trigger.hpp"
