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

#include <cstdint>
#include <string>

#include "chartpilot/types.hpp"

namespace chartpilot {

/// Full system parameterization. Defaults reproduce the reference
/// 512-UE / 3-sector / 64-antenna setup; experiments override fields.
/// Angles are stored in radians, powers in linear units.
struct SystemConfig {
    double cell_side = 1000.0;       // m, square cell, BS at the center
    double min_bs_distance = 10.0;   // m, UE draws closer than this are resampled
    int n_ues = 512;                 // N
    int n_active = 64;               // K
    int n_sectors = 3;               // S
    int antennas_per_sector = 64;    // M
    double wavelength = 0.05;        // m (6 GHz carrier)
    int n_paths = 200;               // L
    double antenna_spacing = 0.5;    // element spacing in wavelengths
    double angular_std = deg2rad(10.0);   // sigma_theta
    double gain_max_db = 0.0;        // G_A,max
    double atten_max_db = 30.0;      // A_max
    double beamwidth_3db = deg2rad(65.0); // theta_3dB
    int pilot_len = 64;              // tau, power of two
    double pilot_power = 1.0;        // p_u
    double noise_power = 0.1;        // sigma_n^2, must be > 0
    double data_power = -1.0;        // data-phase power; <= 0 means "same as pilot_power"
    double eps = 1e-4;               // residual-variance threshold
    double xi = 1e-4;                // residual-variance delta threshold
    int knn = 15;                    // nu, Isomap neighbor count
    int chart_dim_max = -1;          // C cap; <= 0 means min(N-1, 16)
    int quadrature_points = 256;     // midpoint nodes per covariance block
    std::uint64_t seed = 1;

    int compound_dim() const { return antennas_per_sector * n_sectors; } // M*S
    double effective_data_power() const { return data_power > 0.0 ? data_power : pilot_power; }
    int effective_chart_dim_max() const {
        return chart_dim_max > 0 ? chart_dim_max : std::min(n_ues - 1, 16);
    }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

bool is_power_of_two(int v);

} // namespace chartpilot
