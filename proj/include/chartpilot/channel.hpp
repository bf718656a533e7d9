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

#include <utility>
#include <vector>

#include "chartpilot/geometry.hpp"

namespace chartpilot {

/// ULA response a_r(theta), element m = exp(-j 2 pi m spacing cos(theta)).
VecC array_response(double theta, int antennas, double spacing);

/// Directional element gain in dB: gain_max - min(12 (off/bw)^2, atten_max).
/// `theta_off` is measured from the sector boresight.
double antenna_gain_db(double theta_off, const SystemConfig& cfg);

/// Free-space large-scale gain: 10^(gain_db/10) * (lambda / (4 pi d))^2.
double path_gain(double distance, double gain_db, double wavelength);

/// Uniform AoA support around the mean offset: [mean - sqrt(3) s, mean + sqrt(3) s].
std::pair<double, double> aoa_interval(double mean_offset, double angular_std);

/// One small-scale realization of the per-sector channel (length M). Path
/// angles and gains are redrawn on every call.
VecC draw_channel(const Ue& ue, int sector, const SystemConfig& cfg, Rng& rng);

/// Stacked channel over all S sectors (length M*S), sector draws independent.
VecC draw_compound_channel(const Ue& ue, const SystemConfig& cfg, Rng& rng);

/// Long-term covariance of one UE. Cross-sector correlation is zero, so only
/// the S diagonal blocks (each M x M Hermitian PSD) are stored.
struct UeCovariance {
    std::vector<MatC> block; // size S, each M x M

    /// Materialize the full block-diagonal M*S x M*S matrix.
    MatC full() const;
    double trace() const;
    double frob_norm() const;
};

/// Deterministic midpoint-rule quadrature of E_theta[beta a a^H] over the
/// per-sector AoA interval; `cfg.quadrature_points` nodes per block.
UeCovariance covariance(const Ue& ue, const SystemConfig& cfg);

struct CovarianceSet {
    std::vector<UeCovariance> R; // one entry per UE

    int size() const { return static_cast<int>(R.size()); }
    const UeCovariance& operator[](int n) const { return R[n]; }
};

/// Covariances for a whole deployment. OpenMP-parallel over UEs; every UE's
/// blocks are computed independently so results are identical to the serial
/// reference for any thread count.
CovarianceSet covariance_set(const std::vector<Ue>& ues, const SystemConfig& cfg);
CovarianceSet covariance_set_serial(const std::vector<Ue>& ues, const SystemConfig& cfg);

} // namespace chartpilot
