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

#include "chartpilot/detection.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace chartpilot {

namespace {

/// B = sum_j h_hat_j h_hat_j^H + blockdiag(sum_p Rerr_p) + (sigma^2/p) I.
MatC combiner_gram(const MatC& H_hat, const std::vector<UeCovariance>& error_covs,
                   double noise_power, double data_power) {
    const Eigen::Index MS = H_hat.rows();
    MatC B = (noise_power / data_power) * MatC::Identity(MS, MS);
    for (Eigen::Index k = 0; k < H_hat.cols(); ++k)
        B.selfadjointView<Eigen::Lower>().rankUpdate(H_hat.col(k), 1.0);
    B = B.selfadjointView<Eigen::Lower>();
    for (const auto& err : error_covs) {
        const int S = static_cast<int>(err.block.size());
        const Eigen::Index M = err.block.empty() ? 0 : err.block[0].rows();
        for (int s = 0; s < S; ++s) B.block(s * M, s * M, M, M) += err.block[s];
    }
    return B;
}

} // namespace

CombinerResult robust_combiner(const MatC& H_hat, const std::vector<UeCovariance>& error_covs,
                               double noise_power, double data_power) {
    if (noise_power <= 0.0 || data_power <= 0.0)
        throw std::invalid_argument("robust_combiner: powers must be > 0");
    const Eigen::Index K = H_hat.cols();

    const MatC B = combiner_gram(H_hat, error_covs, noise_power, data_power);
    Eigen::LLT<MatC> llt(B);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("robust_combiner: gram matrix not positive definite");

    CombinerResult res;
    res.W.resize(H_hat.rows(), K);
    res.gamma.resize(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        // Rank-one downdate of the k-inclusive inverse:
        // (B - h h^H)^{-1} h = B^{-1} h / (1 - h^H B^{-1} h).
        const VecC t = llt.solve(H_hat.col(k));
        const double q = H_hat.col(k).dot(t).real();
        const double denom = 1.0 - q;
        res.W.col(k) = t / denom;
        res.gamma(k) = q / denom;
    }
    return res;
}

double sinr(int k, const MatC& H_hat, const std::vector<UeCovariance>& error_covs,
            double noise_power, double data_power) {
    MatC A = combiner_gram(H_hat, error_covs, noise_power, data_power);
    A.selfadjointView<Eigen::Lower>().rankUpdate(H_hat.col(k), -1.0);
    A = A.selfadjointView<Eigen::Lower>();
    Eigen::LLT<MatC> llt(A);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("sinr: interference matrix not positive definite");
    return H_hat.col(k).dot(llt.solve(H_hat.col(k))).real();
}

double rate(double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("rate: gamma must be >= 0");
    return std::log2(1.0 + gamma);
}

VecC draw_qpsk(int count, Rng& rng) {
    static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    VecC s(count);
    for (int k = 0; k < count; ++k) {
        const std::uint64_t bits = rng.next_u64();
        s(k) = cplx((bits & 1) ? inv_sqrt2 : -inv_sqrt2, (bits & 2) ? inv_sqrt2 : -inv_sqrt2);
    }
    return s;
}

cplx qpsk_decision(cplx value) {
    static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return {value.real() >= 0.0 ? inv_sqrt2 : -inv_sqrt2,
            value.imag() >= 0.0 ? inv_sqrt2 : -inv_sqrt2};
}

DetectionSample detect_symbols(const MatC& W, const MatC& H, const VecC& symbols,
                               double noise_power, double data_power, Rng& rng) {
    const Eigen::Index K = H.cols();
    if (symbols.size() != K) throw std::invalid_argument("detect_symbols: symbol count mismatch");
    const double amp = std::sqrt(data_power);

    VecC y = amp * (H * symbols);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += rng.cgaussian(noise_power);

    DetectionSample out;
    out.s_hat = W.adjoint() * y / amp;
    out.mse_sd = (out.s_hat - symbols).squaredNorm() / static_cast<double>(K);
    int errors = 0;
    for (Eigen::Index k = 0; k < K; ++k)
        if (qpsk_decision(out.s_hat(k)) != symbols(k)) ++errors;
    out.ser = static_cast<double>(errors) / static_cast<double>(K);
    return out;
}

} // namespace chartpilot
