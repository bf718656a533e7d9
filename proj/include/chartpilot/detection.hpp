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

#include "chartpilot/channel.hpp"

namespace chartpilot {

/// Robust MMSE combiner and per-UE SINR. Column k of W is
///   (sum_{j != k} h_hat_j h_hat_j^H + sum_p Rerr_p + (sigma_n^2/p) I)^{-1} h_hat_k
/// and gamma_k is the quadratic form of h_hat_k with the same inverse.
/// One factorization of the k-inclusive matrix B serves every UE through a
/// rank-one downdate; tests cross-check against per-UE direct inversion.
struct CombinerResult {
    MatC W;     // (M*S) x K
    VecR gamma; // per-UE SINR, nonnegative
};

CombinerResult robust_combiner(const MatC& H_hat, const std::vector<UeCovariance>& error_covs,
                               double noise_power, double data_power);

/// Single-UE SINR evaluated straight from the definition (independent route).
double sinr(int k, const MatC& H_hat, const std::vector<UeCovariance>& error_covs,
            double noise_power, double data_power);

/// Achievable rate log2(1 + gamma) of one UE.
double rate(double gamma);

/// Unit-power QPSK alphabet {(+-1 +- j)/sqrt(2)}.
VecC draw_qpsk(int count, Rng& rng);
cplx qpsk_decision(cplx value);

/// One data slot: y = sqrt(p) H s + n, s_hat = W^H y / sqrt(p).
struct DetectionSample {
    VecC s_hat;
    double mse_sd = 0.0; // ||s_hat - s||^2 / K
    double ser = 0.0;    // fraction of wrong nearest-alphabet decisions
};

DetectionSample detect_symbols(const MatC& W, const MatC& H, const VecC& symbols,
                               double noise_power, double data_power, Rng& rng);

} // namespace chartpilot
