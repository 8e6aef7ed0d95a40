// Copyright 2026 The Manna Authors
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

// Umbrella header.

#pragma once

#include "manna/augmenting.hpp"
#include "manna/certificate.hpp"
#include "manna/enumerate.hpp"
#include "manna/errors.hpp"
#include "manna/io.hpp"
#include "manna/kkm.hpp"
#include "manna/leveling.hpp"
#include "manna/model.hpp"
#include "manna/oracles.hpp"
#include "manna/parallel.hpp"
#include "manna/preprocess.hpp"
#include "manna/pricing.hpp"
#include "manna/rational.hpp"
#include "manna/solver.hpp"
