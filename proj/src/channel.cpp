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

#include "chartpilot/channel.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chartpilot {

VecC array_response(double theta, int antennas, double spacing) {
    if (antennas < 1) throw std::invalid_argument("array_response: antennas must be >= 1");
    VecC a(antennas);
    a(0) = cplx(1.0, 0.0);
    if (antennas == 1) return a;
    // Per-element phasor recurrence: element m carries exp(-j 2 pi m spacing cos theta).
    const double phi = -kTwoPi * spacing * std::cos(theta);
    const cplx step(std::cos(phi), std::sin(phi));
    for (int m = 1; m < antennas; ++m) a(m) = a(m - 1) * step;
    return a;
}

double antenna_gain_db(double theta_off, const SystemConfig& cfg) {
    const double ratio = theta_off / cfg.beamwidth_3db;
    return cfg.gain_max_db - std::min(12.0 * ratio * ratio, cfg.atten_max_db);
}

double path_gain(double distance, double gain_db, double wavelength) {
    if (distance <= 0.0) throw std::invalid_argument("path_gain: distance must be > 0");
    const double amp = wavelength / (4.0 * kPi * distance);
    return std::pow(10.0, gain_db / 10.0) * amp * amp;
}

std::pair<double, double> aoa_interval(double mean_offset, double angular_std) {
    if (angular_std <= 0.0) throw std::invalid_argument("aoa_interval: angular_std must be > 0");
    const double half = std::sqrt(3.0) * angular_std;
    return {mean_offset - half, mean_offset + half};
}

VecC draw_channel(const Ue& ue, int sector, const SystemConfig& cfg, Rng& rng) {
    const int M = cfg.antennas_per_sector;
    const auto [lo, hi] = aoa_interval(ue.sector_offset[sector], cfg.angular_std);
    VecC h = VecC::Zero(M);
    for (int l = 0; l < cfg.n_paths; ++l) {
        const double theta = wrap_angle(rng.uniform(lo, hi));
        const cplx alpha = rng.cgaussian(1.0);
        const double beta = path_gain(ue.distance, antenna_gain_db(theta, cfg), cfg.wavelength);
        h += (std::sqrt(beta) * alpha) * array_response(theta, M, cfg.antenna_spacing);
    }
    return h / std::sqrt(static_cast<double>(cfg.n_paths));
}

VecC draw_compound_channel(const Ue& ue, const SystemConfig& cfg, Rng& rng) {
    const int M = cfg.antennas_per_sector;
    VecC h(cfg.compound_dim());
    for (int s = 0; s < cfg.n_sectors; ++s)
        h.segment(static_cast<Eigen::Index>(s) * M, M) = draw_channel(ue, s, cfg, rng);
    return h;
}

MatC UeCovariance::full() const {
    const int S = static_cast<int>(block.size());
    const int M = static_cast<int>(block.empty() ? 0 : block[0].rows());
    MatC R = MatC::Zero(static_cast<Eigen::Index>(M) * S, static_cast<Eigen::Index>(M) * S);
    for (int s = 0; s < S; ++s)
        R.block(static_cast<Eigen::Index>(s) * M, static_cast<Eigen::Index>(s) * M, M, M) = block[s];
    return R;
}

double UeCovariance::trace() const {
    double t = 0.0;
    for (const auto& b : block) t += b.trace().real();
    return t;
}

double UeCovariance::frob_norm() const {
    double sq = 0.0;
    for (const auto& b : block) sq += b.squaredNorm();
    return std::sqrt(sq);
}

UeCovariance covariance(const Ue& ue, const SystemConfig& cfg) {
    const int M = cfg.antennas_per_sector;
    const int Q = cfg.quadrature_points;
    UeCovariance cov;
    cov.block.resize(cfg.n_sectors);
    for (int s = 0; s < cfg.n_sectors; ++s) {
        const auto [lo, hi] = aoa_interval(ue.sector_offset[s], cfg.angular_std);
        const double step = (hi - lo) / Q;
        MatC acc = MatC::Zero(M, M);
        for (int q = 0; q < Q; ++q) {
            const double theta = wrap_angle(lo + (q + 0.5) * step);
            const double beta = path_gain(ue.distance, antenna_gain_db(theta, cfg), cfg.wavelength);
            acc.selfadjointView<Eigen::Lower>().rankUpdate(
                array_response(theta, M, cfg.antenna_spacing), beta / Q);
        }
        cov.block[s] = acc.selfadjointView<Eigen::Lower>();
    }
    return cov;
}

CovarianceSet covariance_set_serial(const std::vector<Ue>& ues, const SystemConfig& cfg) {
    CovarianceSet set;
    set.R.resize(ues.size());
    for (std::size_t n = 0; n < ues.size(); ++n) set.R[n] = covariance(ues[n], cfg);
    return set;
}

CovarianceSet covariance_set(const std::vector<Ue>& ues, const SystemConfig& cfg) {
    CovarianceSet set;
    set.R.resize(ues.size());
    const int n = static_cast<int>(ues.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) set.R[i] = covariance(ues[i], cfg);
    return set;
}

} // namespace chartpilot
