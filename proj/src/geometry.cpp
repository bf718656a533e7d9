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

#include "chartpilot/geometry.hpp"

#include <cmath>

namespace chartpilot {

std::vector<SectorArray> make_sectors(const SystemConfig& cfg) {
    std::vector<SectorArray> sectors(cfg.n_sectors);
    for (int s = 0; s < cfg.n_sectors; ++s) {
        sectors[s].boresight = wrap_angle(kPi / 2.0 + kTwoPi * s / cfg.n_sectors);
        sectors[s].antennas = cfg.antennas_per_sector;
        sectors[s].spacing = cfg.antenna_spacing;
    }
    return sectors;
}

std::vector<Ue> deploy_ues(const SystemConfig& cfg, Rng& rng) {
    const auto sectors = make_sectors(cfg);
    const double half = cfg.cell_side / 2.0;
    std::vector<Ue> ues(cfg.n_ues);
    for (int n = 0; n < cfg.n_ues; ++n) {
        Ue& ue = ues[n];
        ue.id = n;
        do {
            ue.x = rng.uniform(-half, half);
            ue.y = rng.uniform(-half, half);
            ue.distance = std::hypot(ue.x, ue.y);
        } while (ue.distance < cfg.min_bs_distance);
        ue.mean_angle = std::atan2(ue.y, ue.x);
        ue.sector_offset.resize(sectors.size());
        for (std::size_t s = 0; s < sectors.size(); ++s)
            ue.sector_offset[s] = wrap_angle(ue.mean_angle - sectors[s].boresight);
    }
    return ues;
}

} // namespace chartpilot
