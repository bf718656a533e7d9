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

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "chartpilot/experiment.hpp"

using namespace chartpilot;

int main(int argc, char** argv) {
    CLI::App app{"chartpilot: channel-charting pilot reuse simulator"};

    std::string config_path;
    std::string experiment_name;
    std::string out_dir = "results";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int trials = -1;
    int deployments = -1;
    int threads = 0;
    bool dump_charts = false;
    bool dump_assignments = false;
    bool list_only = false;

    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--experiment", experiment_name,
                   "experiment name (from the config file or a fig3..fig8 preset)");
    app.add_option("--seed", seed, "base seed for the run")->each([&](const std::string&) {
        seed_given = true;
    });
    app.add_option("--trials", trials, "override the per-deployment trial count");
    app.add_option("--deployments", deployments, "override the deployment count");
    app.add_option("--out", out_dir, "output directory for CSV/JSON results");
    app.add_option("--threads", threads, "OpenMP thread count (0 = runtime default)");
    app.add_flag("--dump-charts", dump_charts, "write per-deployment chart CSVs");
    app.add_flag("--dump-assignments", dump_assignments, "write per-method assignment CSVs");
    app.add_flag("--list", list_only, "list available experiments and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        std::vector<ExperimentSpec> available;
        if (!config_path.empty()) {
            const ConfigFile file = load_config(config_path);
            available = file.experiments;
        }
        for (auto& p : preset_experiments()) {
            const bool shadowed =
                std::any_of(available.begin(), available.end(),
                            [&p](const ExperimentSpec& e) { return e.name == p.name; });
            if (!shadowed) available.push_back(p);
        }

        if (list_only) {
            for (const auto& e : available) {
                std::printf("%-12s axis=%-16s values=%zu methods=", e.name.c_str(),
                            axis_name(e.axis).c_str(), e.values.size());
                for (std::size_t i = 0; i < e.methods.size(); ++i)
                    std::printf("%s%s", i ? "," : "", method_name(e.methods[i]).c_str());
                std::printf(" trials=%d deployments=%d\n", e.trials, e.deployments);
            }
            return 0;
        }
        if (experiment_name.empty())
            throw std::invalid_argument("--experiment is required (see --list)");

        const auto it = std::find_if(available.begin(), available.end(),
                                     [&](const ExperimentSpec& e) { return e.name == experiment_name; });
        if (it == available.end())
            throw std::invalid_argument("unknown experiment '" + experiment_name +
                                        "' (see --list)");

        RunOptions opts;
        opts.seed = seed_given ? seed : it->base.seed;
        opts.trials_override = trials;
        opts.deployments_override = deployments;
        opts.threads = threads;
        opts.out_dir = out_dir;
        opts.dump_charts = dump_charts;
        opts.dump_assignments = dump_assignments;

        const RunResult result = run_experiment(*it, opts);
        std::printf("wrote %s\n", result.raw_csv_path.c_str());
        std::printf("wrote %s\n", result.summary_csv_path.c_str());
        std::printf("wrote %s\n", result.manifest_path.c_str());
        std::printf("%-18s %-10s %12s %12s %12s %10s\n", "method", "axis", "nmse_ce", "mse_sd",
                    "sum_rate", "ser");
        for (const auto& row : result.summary)
            std::printf("%-18s %-10g %12.5g %12.5g %12.5g %10.4g\n",
                        method_name(row.method).c_str(), row.axis_value, row.nmse_ce,
                        row.mse_sd_mean, row.sum_rate_mean, row.ser_mean);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
