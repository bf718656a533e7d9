// chartpilot - channel-charting pilot assignment simulator for multi-sector massive MIMO
// Copyright (C) 2026 chartpilot contributors
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

#pragma once

#include <vector>

#include "chartpilot/config.hpp"
#include "chartpilot/rng.hpp"
#include "chartpilot/types.hpp"

namespace chartpilot {

/// One uniform linear array of the multi-sector BS.
struct SectorArray {
    double boresight = 0.0; // global azimuth, radians
    int antennas = 0;       // M
    double spacing = 0.5;   // in wavelengths
};

/// S sector arrays spaced 2*pi/S apart, the first pointing north (pi/2).
std::vector<SectorArray> make_sectors(const SystemConfig& cfg);

struct Ue {
    int id = -1;
    double x = 0.0, y = 0.0;              // m, BS at origin
    double distance = 0.0;                // d_n >= min_bs_distance
    double mean_angle = 0.0;              // global azimuth from the BS, (-pi, pi]
    std::vector<double> sector_offset;    // mean angle relative to each boresight, (-pi, pi]
};

/// Uniform deployment over the square cell; draws with d < min_bs_distance
/// are resampled. Deterministic for a given rng state.
std::vector<Ue> deploy_ues(const SystemConfig& cfg, Rng& rng);

} // namespace chartpilot
