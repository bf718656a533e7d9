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

#include "chartpilot/config.hpp"

#include <stdexcept>

namespace chartpilot {

bool is_power_of_two(int v) { return v >= 1 && (v & (v - 1)) == 0; }

void SystemConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };

    if (n_ues < 1) fail("n_ues must be >= 1");
    if (n_active < 1 || n_active > n_ues) fail("n_active must satisfy 1 <= n_active <= n_ues");
    if (pilot_len < 1) fail("pilot_len must be >= 1");
    if (!is_power_of_two(pilot_len)) fail("pilot_len must be a power of two");
    if (antennas_per_sector < 1) fail("antennas_per_sector must be >= 1");
    if (n_sectors < 1) fail("n_sectors must be >= 1");
    if (n_paths < 1) fail("n_paths must be >= 1");
    if (angular_std <= 0.0) fail("angular_std must be > 0");
    if (wavelength <= 0.0) fail("wavelength must be > 0");
    if (min_bs_distance <= 0.0) fail("min_bs_distance must be > 0");
    if (cell_side <= 2.0 * min_bs_distance) fail("cell_side must exceed 2*min_bs_distance");
    if (antenna_spacing <= 0.0) fail("antenna_spacing must be > 0");
    if (beamwidth_3db <= 0.0) fail("beamwidth_3db must be > 0");
    if (atten_max_db < 0.0) fail("atten_max_db must be >= 0");
    if (pilot_power <= 0.0) fail("pilot_power must be > 0");
    if (noise_power <= 0.0) fail("noise_power must be > 0");
    if (eps <= 0.0) fail("eps must be > 0");
    if (xi <= 0.0) fail("xi must be > 0");
    if (knn < 1) fail("knn must be >= 1");
    // Single-UE setups never build a chart; the coupling constraint applies otherwise.
    if (n_ues >= 2 && knn > n_ues - 1) fail("knn must satisfy knn <= n_ues-1");
    if (quadrature_points < 1) fail("quadrature_points must be >= 1");
    if (chart_dim_max == 0 || chart_dim_max > n_ues - 1)
        fail("chart_dim_max must be negative (auto) or in [1, n_ues-1]");
}

} // namespace chartpilot
