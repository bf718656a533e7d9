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

#include "chartpilot/pilots.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <stdexcept>

namespace chartpilot {

PilotCodebook hadamard_codebook(int tau) {
    if (!is_power_of_two(tau))
        throw std::invalid_argument("hadamard_codebook: tau must be a power of two");
    MatR phi(1, 1);
    phi(0, 0) = 1.0;
    while (phi.rows() < tau) {
        const Eigen::Index n = phi.rows();
        MatR next(2 * n, 2 * n);
        next.topLeftCorner(n, n) = phi;
        next.topRightCorner(n, n) = phi;
        next.bottomLeftCorner(n, n) = phi;
        next.bottomRightCorner(n, n) = -phi;
        phi = std::move(next);
    }
    return PilotCodebook{std::move(phi)};
}

bool PilotAssignment::balanced(int tau) const {
    std::vector<int> count(tau, 0);
    for (int p : pilot) count.at(p)++;
    const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
    return *hi - *lo <= 1;
}

MatC synthesize_received(const MatC& H, const std::vector<int>& pilots_of_active,
                         const PilotCodebook& book, double pilot_power, double noise_power,
                         Rng& rng) {
    const Eigen::Index K = H.cols();
    const int tau = book.length();
    if (static_cast<Eigen::Index>(pilots_of_active.size()) != K)
        throw std::invalid_argument("synthesize_received: one pilot index per channel column");

    MatR psi(K, tau); // row k = sqrt(p_u) * phi_{pi_k}^T
    const double amp = std::sqrt(pilot_power);
    for (Eigen::Index k = 0; k < K; ++k) {
        const int p = pilots_of_active[k];
        if (p < 0 || p >= tau) throw std::invalid_argument("synthesize_received: pilot index out of range");
        psi.row(k) = amp * book.phi.col(p).transpose();
    }

    MatC Y = H * psi;
    for (Eigen::Index t = 0; t < tau; ++t)
        for (Eigen::Index i = 0; i < Y.rows(); ++i) Y(i, t) += rng.cgaussian(noise_power);
    return Y;
}

VecC despread(const MatC& Y, int pilot, const PilotCodebook& book, double pilot_power) {
    if (pilot_power <= 0.0) throw std::invalid_argument("despread: pilot_power must be > 0");
    const int tau = book.length();
    if (Y.cols() != tau) throw std::invalid_argument("despread: Y must have tau columns");
    // (1/(p_u tau)) Y psi* with psi = sqrt(p_u) phi.
    return Y * book.phi.col(pilot) / (std::sqrt(pilot_power) * tau);
}

UeCovariance q_matrix(int ue, const std::vector<int>& active, const PilotAssignment& assignment,
                      const CovarianceSet& covs, double noise_power, double pilot_power, int tau) {
    const int p = assignment[ue];
    const auto& blocks_k = covs[ue].block;
    const int S = static_cast<int>(blocks_k.size());
    const Eigen::Index M = blocks_k[0].rows();
    const double ridge = noise_power / (pilot_power * tau);

    UeCovariance Q;
    Q.block.resize(S);
    for (int s = 0; s < S; ++s) Q.block[s] = ridge * MatC::Identity(M, M);
    for (int j : active) {
        if (assignment[j] != p) continue;
        for (int s = 0; s < S; ++s) Q.block[s] += covs[j].block[s];
    }
    return Q;
}

namespace {

std::vector<Eigen::LLT<MatC>> factor_blocks(const UeCovariance& Q) {
    std::vector<Eigen::LLT<MatC>> llt;
    llt.reserve(Q.block.size());
    for (const auto& b : Q.block) {
        llt.emplace_back(b);
        if (llt.back().info() != Eigen::Success)
            throw std::runtime_error("lmmse: Q block is not positive definite (degenerate configuration)");
    }
    return llt;
}

} // namespace

VecC lmmse_estimate(const UeCovariance& R_k, const UeCovariance& Q_k, const VecC& despread_y) {
    const int S = static_cast<int>(R_k.block.size());
    const Eigen::Index M = R_k.block[0].rows();
    const auto llt = factor_blocks(Q_k);
    VecC h_hat(static_cast<Eigen::Index>(S) * M);
    for (int s = 0; s < S; ++s)
        h_hat.segment(s * M, M) = R_k.block[s] * llt[s].solve(despread_y.segment(s * M, M));
    return h_hat;
}

AnalyticMse analytic_mse(const UeCovariance& R_k, const UeCovariance& Q_k) {
    const int S = static_cast<int>(R_k.block.size());
    const auto llt = factor_blocks(Q_k);
    AnalyticMse out;
    out.error_cov.block.resize(S);
    for (int s = 0; s < S; ++s) {
        const MatC filtered = R_k.block[s] * llt[s].solve(R_k.block[s]);
        out.error_cov.block[s] = R_k.block[s] - filtered;
        out.mse += out.error_cov.block[s].trace().real();
    }
    return out;
}

double nmse_ce(const MatC& H_hat, const MatC& H) {
    const double den = H.squaredNorm();
    if (den == 0.0) throw std::invalid_argument("nmse_ce: reference channel has zero norm");
    return (H_hat - H).squaredNorm() / den;
}

EstimationResult estimate_all(const MatC& Y, const std::vector<int>& active,
                              const PilotAssignment& assignment, const CovarianceSet& covs,
                              const PilotCodebook& book, double pilot_power, double noise_power) {
    const int K = static_cast<int>(active.size());
    const int tau = book.length();
    const Eigen::Index MS = Y.rows();
    const int S = static_cast<int>(covs[active[0]].block.size());
    const Eigen::Index M = MS / S;

    EstimationResult res;
    res.h_hat.resize(MS, K);
    res.error_cov.resize(K);
    res.analytic.resize(K);

    // Group active UEs by pilot: one despread and one factorization per group.
    std::vector<std::vector<int>> group(tau); // positions within `active`
    for (int k = 0; k < K; ++k) group[assignment[active[k]]].push_back(k);

    const double ridge = noise_power / (pilot_power * tau);
    for (int p = 0; p < tau; ++p) {
        if (group[p].empty()) continue;
        const VecC y_p = despread(Y, p, book, pilot_power);

        std::vector<Eigen::LLT<MatC>> llt(S);
        for (int s = 0; s < S; ++s) {
            MatC Qs = ridge * MatC::Identity(M, M);
            for (int k : group[p]) Qs += covs[active[k]].block[s];
            llt[s].compute(Qs);
            if (llt[s].info() != Eigen::Success)
                throw std::runtime_error("estimate_all: Q block is not positive definite");
        }

        for (int k : group[p]) {
            const auto& Rk = covs[active[k]].block;
            auto& err = res.error_cov[k];
            err.block.resize(S);
            double mse = 0.0;
            for (int s = 0; s < S; ++s) {
                res.h_hat.col(k).segment(s * M, M) = Rk[s] * llt[s].solve(y_p.segment(s * M, M));
                err.block[s] = Rk[s] - Rk[s] * llt[s].solve(Rk[s]);
                mse += err.block[s].trace().real();
            }
            res.analytic(k) = mse;
        }
    }
    return res;
}

} // namespace chartpilot
