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

// Timing harness for the OpenMP kernels against their serial references.
// Each pair must agree bitwise; the table reports wall times and speedup.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "chartpilot/charting.hpp"
#include "chartpilot/experiment.hpp"

using namespace chartpilot;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-22s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   %s\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "bitwise-identical" : "MISMATCH");
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; both columns run serially\n");
#endif

    SystemConfig cfg;
    cfg.n_ues = 192;
    cfg.n_active = 32;
    cfg.antennas_per_sector = 32;
    cfg.pilot_len = 16;

    Rng rng(7);
    const auto ues = deploy_ues(cfg, rng);

    // Covariance synthesis (quadrature over the AoA interval per UE/sector).
    auto t0 = std::chrono::steady_clock::now();
    const CovarianceSet covs_serial = covariance_set_serial(ues, cfg);
    const double cov_serial_ms = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    const CovarianceSet covs = covariance_set(ues, cfg);
    const double cov_parallel_ms = ms_since(t0);
    bool cov_same = true;
    for (int n = 0; n < covs.size(); ++n)
        for (int s = 0; s < cfg.n_sectors; ++s)
            cov_same = cov_same && covs[n].block[s] == covs_serial[n].block[s];
    report("covariance_set", cov_serial_ms, cov_parallel_ms, cov_same);

    // Pairwise dissimilarity matrix.
    t0 = std::chrono::steady_clock::now();
    const MatR F_serial = feature_matrix_serial(covs);
    const double feat_serial_ms = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    const MatR F = feature_matrix(covs);
    const double feat_parallel_ms = ms_since(t0);
    report("feature_matrix", feat_serial_ms, feat_parallel_ms, F == F_serial);

    // Geodesic distances across the neighbor graph.
    const KnnGraph graph = knn_graph(F, cfg.knn);
    t0 = std::chrono::steady_clock::now();
    const MatR geo_serial = shortest_paths_serial(graph);
    const double fw_serial_ms = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    const MatR geo = shortest_paths(graph);
    const double fw_parallel_ms = ms_since(t0);
    report("shortest_paths", fw_serial_ms, fw_parallel_ms, geo == geo_serial);

    // Monte Carlo trial loop through the full pipeline.
    ExperimentSpec spec;
    spec.name = "bench";
    spec.methods = {Method::Cc, Method::Random};
    spec.axis = Axis::SnrDb;
    spec.values = {10.0};
    spec.trials = 64;
    spec.deployments = 1;
    spec.base = cfg;

    RunOptions opts;
    opts.seed = 7;
    opts.threads = 1;
    t0 = std::chrono::steady_clock::now();
    const RunResult serial_run = run_experiment(spec, opts);
    const double run_serial_ms = ms_since(t0);
    opts.threads = 0;
#ifdef _OPENMP
    omp_set_num_threads(omp_get_num_procs());
#endif
    t0 = std::chrono::steady_clock::now();
    const RunResult parallel_run = run_experiment(spec, opts);
    const double run_parallel_ms = ms_since(t0);
    bool runs_same = serial_run.records.size() == parallel_run.records.size();
    for (std::size_t i = 0; runs_same && i < serial_run.records.size(); ++i) {
        const auto& a = serial_run.records[i];
        const auto& b = parallel_run.records[i];
        runs_same = a.seed == b.seed && a.nmse_num == b.nmse_num && a.mse_sd == b.mse_sd &&
                    a.sum_rate == b.sum_rate && a.ser == b.ser;
    }
    report("monte_carlo_trials", run_serial_ms, run_parallel_ms, runs_same);
    return 0;
}
