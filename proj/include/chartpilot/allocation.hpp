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

#include <functional>
#include <string>

#include "chartpilot/charting.hpp"
#include "chartpilot/pilots.hpp"

namespace chartpilot {

/// Average pairwise contamination of an assignment,
/// (2 / (N (N-1))) * sum over co-pilot pairs of spatial_correlation.
/// With an orthogonal codebook the pilot inner product reduces to an
/// indicator, so tau cancels from the normalized objective.
double contamination_objective(const PilotAssignment& assignment, const CovarianceSet& covs,
                               int tau);

/// Same objective over a precomputed correlation matrix delta = 1 - F.
double contamination_objective(const PilotAssignment& assignment, const MatR& delta);

MatR delta_matrix(const CovarianceSet& covs); // pairwise spatial correlations, unit diagonal

/// Greedy nearest-neighbor allocation: pilots are handed out in cyclic order
/// 1..tau, each to the unassigned UE closest to the previously assigned one.
/// `dist(a, b)` is any nonnegative dissimilarity; ties break toward the
/// lower UE index. Counts are balanced by construction.
PilotAssignment nn_greedy_allocate(int n_ues, int tau, int start_ue,
                                   const std::function<double(int, int)>& dist);

/// Algorithm input conveniences for the three coordinate flavors.
PilotAssignment chart_allocate(const ChartEmbedding& chart, int tau, int start_ue);
PilotAssignment cmd_allocate(const MatR& F, int tau, int start_ue);
PilotAssignment real_position_allocate(const std::vector<Ue>& ues, int tau, int start_ue);

/// Balanced multiset of pilot indices in random order.
PilotAssignment random_allocate(int n_ues, int tau, Rng& rng);

struct ExhaustiveResult {
    PilotAssignment assignment;
    double objective = 0.0;
};

/// Global minimizer of the contamination objective. Pilot-relabel symmetry
/// is pruned by forcing first occurrences of pilot indices into ascending
/// order; branch-and-bound keeps only strictly worse branches out, so the
/// returned assignment is the lexicographically smallest optimum.
/// Guarded to n_ues <= 12 and tau <= 6.
ExhaustiveResult exhaustive_search(const CovarianceSet& covs, int tau);
ExhaustiveResult exhaustive_search(const MatR& delta, int tau);

/// CSV dump: header "ue_id,pilot_index", pilot indices 1-based.
void write_assignment_csv(const std::string& path, const PilotAssignment& assignment);

} // namespace chartpilot
