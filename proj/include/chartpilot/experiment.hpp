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
#include <optional>
#include <string>
#include <vector>

#include "chartpilot/allocation.hpp"
#include "chartpilot/detection.hpp"

namespace chartpilot {

enum class Method { Random, Cmd, Cc, RealPosition, Exhaustive, PerfectCsiBound };
enum class Axis { SnrDb, Tau, SigmaThetaDeg, Eps, AntennasPerSector };

std::string method_name(Method m);
Method method_from_name(const std::string& name);
std::string axis_name(Axis a);
Axis axis_from_name(const std::string& name);

/// One sweep: a method list evaluated over the axis values, Monte Carlo
/// averaged over `trials` coherence blocks per deployment.
struct ExperimentSpec {
    std::string name;
    std::vector<Method> methods;
    Axis axis = Axis::SnrDb;
    std::vector<double> values;
    int trials = 200;
    int deployments = 1;
    double snr_db = 10.0;  // received SNR target when the axis is not snr_db
    bool use_snr = true;   // false: take cfg.noise_power verbatim
    bool couple_xi = true; // eps axis: xi follows eps (0.1 -> 0.01, 0.5 -> 0.1)
    SystemConfig base;

    /// Throws std::invalid_argument on inconsistent sweeps (e.g. exhaustive
    /// search requested beyond its N <= 12, tau <= 6 guard).
    void validate() const;
};

/// Axis application: returns `base` with the swept field replaced.
SystemConfig apply_axis(const SystemConfig& base, Axis axis, double value, bool couple_xi);

/// xi companion value used by the eps sweep.
double coupled_xi(double eps);

/// Parsed configuration file: system defaults plus named experiments.
struct ConfigFile {
    SystemConfig system;
    std::vector<ExperimentSpec> experiments;
};

/// Strict JSON loader: unknown keys are rejected, parse errors carry the
/// line number, validation errors name the field.
ConfigFile load_config(const std::string& path);
ConfigFile parse_config(const std::string& text, const std::string& origin);

/// Built-in desk-scale sweeps fig3..fig8.
std::vector<ExperimentSpec> preset_experiments();
std::optional<ExperimentSpec> find_preset(const std::string& name);

/// One Monte Carlo outcome row.
struct MetricsRecord {
    std::string experiment;
    Method method = Method::Random;
    double axis_value = 0.0;
    int deployment = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double nmse_num = 0.0; // ||H_hat - H||_F^2
    double nmse_den = 0.0; // ||H||_F^2
    double nmse_ce = 0.0;  // per-trial ratio
    double mse_sd = 0.0;
    double ser = 0.0;
    double sum_rate = 0.0;  // bits/channel use summed over active UEs
    double objective = 0.0; // contamination objective of the assignment used
    int chart_dim = 0;      // 0 for methods that do not build a chart
    double residual = 0.0;
};

struct SummaryRow {
    std::string experiment;
    Method method = Method::Random;
    double axis_value = 0.0;
    int n = 0;
    double nmse_ce = 0.0; // ratio of means, Monte Carlo estimate of the NMSE
    double mse_sd_mean = 0.0, mse_sd_std = 0.0;
    double ser_mean = 0.0, ser_std = 0.0;
    double sum_rate_mean = 0.0, sum_rate_std = 0.0;
    double objective_mean = 0.0, objective_std = 0.0;
    double chart_dim_mean = 0.0;
    double residual_mean = 0.0;
};

std::vector<SummaryRow> emit_summary(const std::vector<MetricsRecord>& records);

struct RunOptions {
    std::uint64_t seed = 1;
    int trials_override = -1;     // > 0 replaces spec.trials
    int deployments_override = -1;
    int threads = 0;              // > 0 pins the OpenMP thread count
    std::string out_dir;          // empty: no files written
    bool dump_charts = false;
    bool dump_assignments = false;
};

struct RunResult {
    std::vector<MetricsRecord> records;
    std::vector<SummaryRow> summary;
    std::string raw_csv_path, summary_csv_path, manifest_path;
};

/// Full pipeline: deploy, covariances, chart, allocate, then Monte Carlo
/// trials (channel draw, training, LMMSE, combining, QPSK slot). Trials run
/// in parallel; outputs are identical for any thread count.
RunResult run_experiment(const ExperimentSpec& spec, const RunOptions& opts);

void write_raw_csv(const std::string& path, const std::vector<MetricsRecord>& records);
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);

} // namespace chartpilot
