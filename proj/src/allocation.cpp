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

#include "chartpilot/allocation.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace chartpilot {

MatR delta_matrix(const CovarianceSet& covs) {
    const int n = covs.size();
    MatR delta = MatR::Ones(n, n);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) delta(i, j) = spatial_correlation(covs[i], covs[j]);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) delta(i, j) = delta(j, i);
    return delta;
}

double contamination_objective(const PilotAssignment& assignment, const MatR& delta) {
    const int n = assignment.size();
    if (delta.rows() != n) throw std::invalid_argument("contamination_objective: size mismatch");
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (assignment[i] == assignment[j]) sum += delta(i, j);
    return sum * 2.0 / (static_cast<double>(n) * (n - 1));
}

double contamination_objective(const PilotAssignment& assignment, const CovarianceSet& covs,
                               int tau) {
    (void)tau; // cancels for orthogonal codebooks; kept for the call-site contract
    return contamination_objective(assignment, delta_matrix(covs));
}

PilotAssignment nn_greedy_allocate(int n_ues, int tau, int start_ue,
                                   const std::function<double(int, int)>& dist) {
    if (start_ue < 0 || start_ue >= n_ues)
        throw std::invalid_argument("nn_greedy_allocate: start UE out of range");
    PilotAssignment out;
    out.pilot.assign(n_ues, -1);

    out.pilot[start_ue] = 0;
    int prev = start_ue;
    int next_pilot = 1;
    for (int assigned = 1; assigned < n_ues; ++assigned) {
        if (next_pilot == tau) next_pilot = 0; // pilot pool exhausted, reuse from the top
        int best = -1;
        double best_d = 0.0;
        for (int cand = 0; cand < n_ues; ++cand) {
            if (out.pilot[cand] >= 0) continue;
            const double d = dist(cand, prev);
            if (best < 0 || d < best_d) { // strict '<' keeps ties on the lower index
                best = cand;
                best_d = d;
            }
        }
        out.pilot[best] = next_pilot;
        prev = best;
        ++next_pilot;
    }
    return out;
}

PilotAssignment chart_allocate(const ChartEmbedding& chart, int tau, int start_ue) {
    const MatR& Z = chart.Z;
    return nn_greedy_allocate(static_cast<int>(Z.cols()), tau, start_ue,
                              [&Z](int a, int b) { return (Z.col(a) - Z.col(b)).squaredNorm(); });
}

PilotAssignment cmd_allocate(const MatR& F, int tau, int start_ue) {
    return nn_greedy_allocate(static_cast<int>(F.rows()), tau, start_ue,
                              [&F](int a, int b) { return F(a, b); });
}

PilotAssignment real_position_allocate(const std::vector<Ue>& ues, int tau, int start_ue) {
    // Unit-circle placement by azimuth; chordal distance orders pairs the
    // same way as circular angular distance.
    std::vector<double> cx(ues.size()), cy(ues.size());
    for (std::size_t n = 0; n < ues.size(); ++n) {
        cx[n] = std::cos(ues[n].mean_angle);
        cy[n] = std::sin(ues[n].mean_angle);
    }
    return nn_greedy_allocate(static_cast<int>(ues.size()), tau, start_ue, [&](int a, int b) {
        const double dx = cx[a] - cx[b];
        const double dy = cy[a] - cy[b];
        return dx * dx + dy * dy;
    });
}

PilotAssignment random_allocate(int n_ues, int tau, Rng& rng) {
    PilotAssignment out;
    out.pilot.reserve(n_ues);
    for (int n = 0; n < n_ues; ++n) out.pilot.push_back(n % tau);
    rng.shuffle(out.pilot);
    return out;
}

namespace {

struct ExhaustiveState {
    const MatR* delta = nullptr;
    int n = 0;
    int tau = 0;
    std::vector<int> current;
    std::vector<int> best;
    double best_cost = std::numeric_limits<double>::infinity();

    void search(int ue, int used_pilots, double cost) {
        if (cost > best_cost) return; // all pair costs are nonnegative
        if (ue == n) {
            if (cost < best_cost || (cost == best_cost && current < best)) {
                best_cost = cost;
                best = current;
            }
            return;
        }
        // Canonical labeling: a fresh pilot index may only follow all lower ones.
        const int limit = std::min(used_pilots + 1, tau);
        for (int p = 0; p < limit; ++p) {
            double added = 0.0;
            for (int j = 0; j < ue; ++j)
                if (current[j] == p) added += (*delta)(j, ue);
            current[ue] = p;
            search(ue + 1, std::max(used_pilots, p + 1), cost + added);
        }
        current[ue] = -1;
    }
};

} // namespace

ExhaustiveResult exhaustive_search(const MatR& delta, int tau) {
    const int n = static_cast<int>(delta.rows());
    if (n > 12 || tau > 6)
        throw std::invalid_argument("exhaustive_search: instance too large (need N <= 12, tau <= 6)");
    if (n < 1) throw std::invalid_argument("exhaustive_search: empty instance");

    ExhaustiveState state;
    state.delta = &delta;
    state.n = n;
    state.tau = tau;
    state.current.assign(n, -1);
    state.search(0, 0, 0.0);

    ExhaustiveResult res;
    res.assignment.pilot = state.best;
    res.objective = n > 1 ? state.best_cost * 2.0 / (static_cast<double>(n) * (n - 1)) : 0.0;
    return res;
}

ExhaustiveResult exhaustive_search(const CovarianceSet& covs, int tau) {
    return exhaustive_search(delta_matrix(covs), tau);
}

void write_assignment_csv(const std::string& path, const PilotAssignment& assignment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_assignment_csv: cannot open " + path);
    out << "ue_id,pilot_index\n";
    for (int n = 0; n < assignment.size(); ++n) out << n << "," << assignment[n] + 1 << "\n";
}

} // namespace chartpilot
