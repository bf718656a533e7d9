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

/// tau x tau Sylvester-Hadamard book; columns are the BPSK pilot sequences,
/// mutually orthogonal with squared norm tau (exact in integer arithmetic).
struct PilotCodebook {
    MatR phi;
    int length() const { return static_cast<int>(phi.rows()); }
};

PilotCodebook hadamard_codebook(int tau); // throws unless tau is a power of two

/// Pilot index per UE, 0-based internally, covering all N UEs.
struct PilotAssignment {
    std::vector<int> pilot; // values in [0, tau)
    int size() const { return static_cast<int>(pilot.size()); }
    int operator[](int n) const { return pilot[n]; }

    /// Multiset balance check: max per-pilot count minus min count <= 1.
    bool balanced(int tau) const;
};

/// Uplink training observation Y = H Psi + noise, Y is (M*S) x tau.
/// `pilots_of_active[k]` is the pilot of the UE behind column k of H.
MatC synthesize_received(const MatC& H, const std::vector<int>& pilots_of_active,
                         const PilotCodebook& book, double pilot_power, double noise_power,
                         Rng& rng);

/// Correlate Y with pilot p and rescale: h_k + sum of co-pilot channels + noise.
VecC despread(const MatC& Y, int pilot, const PilotCodebook& book, double pilot_power);

/// Covariance of the despread observation for UE `ue` given the active set:
/// sum of co-pilot covariances plus the noise ridge sigma_n^2/(p_u tau).
UeCovariance q_matrix(int ue, const std::vector<int>& active, const PilotAssignment& assignment,
                      const CovarianceSet& covs, double noise_power, double pilot_power, int tau);

/// LMMSE filter R_k Q_k^{-1} applied to the despread vector, block by block.
VecC lmmse_estimate(const UeCovariance& R_k, const UeCovariance& Q_k, const VecC& despread_y);

/// Error covariance R_k - R_k Q_k^{-1} R_k and its trace.
struct AnalyticMse {
    UeCovariance error_cov;
    double mse = 0.0;
};
AnalyticMse analytic_mse(const UeCovariance& R_k, const UeCovariance& Q_k);

/// ||H_hat - H||_F^2 / ||H||_F^2 for one realization; callers that average
/// over trials must accumulate numerator and denominator separately.
double nmse_ce(const MatC& H_hat, const MatC& H);

/// Batched per-trial estimation: channels of the active UEs are estimated
/// group-by-group (all UEs sharing a pilot see the same despread vector and
/// the same Q), which the per-operation functions above are tested against.
struct EstimationResult {
    MatC h_hat;                          // (M*S) x K, column order follows `active`
    std::vector<UeCovariance> error_cov; // per active UE
    VecR analytic;                       // per active UE, trace of error_cov
};

EstimationResult estimate_all(const MatC& Y, const std::vector<int>& active,
                              const PilotAssignment& assignment, const CovarianceSet& covs,
                              const PilotCodebook& book, double pilot_power, double noise_power);

} // namespace chartpilot
