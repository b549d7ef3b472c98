// SPDX-License-Identifier: Apache-2.0
//
// fdmimo: elevation beamforming simulator for full-dimension MIMO arrays
// Copyright (C) 2026 the fdmimo contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef FDMIMO_FDMIMO_HPP
#define FDMIMO_FDMIMO_HPP

#include "fdmimo/array.hpp"
#include "fdmimo/beamforming.hpp"
#include "fdmimo/channel.hpp"
#include "fdmimo/config.hpp"
#include "fdmimo/correlation.hpp"
#include "fdmimo/csv.hpp"
#include "fdmimo/harness.hpp"
#include "fdmimo/pattern_analysis.hpp"
#include "fdmimo/quadrature.hpp"
#include "fdmimo/rng.hpp"
#include "fdmimo/sdb.hpp"
#include "fdmimo/spectra.hpp"
#include "fdmimo/txru.hpp"

#endif
