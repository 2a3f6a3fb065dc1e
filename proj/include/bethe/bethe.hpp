// Copyright 2026 The Bethe Solver Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Umbrella header.

#include "bethe/badmm.hpp"
#include "bethe/belief_propagation.hpp"
#include "bethe/benchmark.hpp"
#include "bethe/entropy_ot.hpp"
#include "bethe/exact.hpp"
#include "bethe/generators.hpp"
#include "bethe/hermitian.hpp"
#include "bethe/io.hpp"
#include "bethe/model.hpp"
#include "bethe/numeric.hpp"
#include "bethe/quantum.hpp"
#include "bethe/rng.hpp"
#include "bethe/solver_config.hpp"
