// Copyright 2026 The nehari-dp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Umbrella header for the nehari-dp library.

#include "nehari/common.hpp"
#include "nehari/config.hpp"
#include "nehari/doublephase.hpp"
#include "nehari/fibering.hpp"
#include "nehari/field_io.hpp"
#include "nehari/manifold.hpp"
#include "nehari/orlicz.hpp"
#include "nehari/properties.hpp"
#include "nehari/random.hpp"
#include "nehari/report.hpp"
#include "nehari/sampling.hpp"
#include "nehari/solver.hpp"
