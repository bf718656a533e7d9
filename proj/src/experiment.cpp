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

#include "chartpilot/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chartpilot {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

const std::map<std::string, Method> kMethodNames = {
    {"random", Method::Random},
    {"cmd", Method::Cmd},
    {"cc", Method::Cc},
    {"real_position", Method::RealPosition},
    {"exhaustive", Method::Exhaustive},
    {"perfect_csi_bound", Method::PerfectCsiBound},
};

const std::map<std::string, Axis> kAxisNames = {
    {"snr_db", Axis::SnrDb},
    {"tau", Axis::Tau},
    {"sigma_theta_deg", Axis::SigmaThetaDeg},
    {"eps", Axis::Eps},
    {"M", Axis::AntennasPerSector},
};

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

std::string method_name(Method m) {
    for (const auto& [name, method] : kMethodNames)
        if (method == m) return name;
    return "?";
}

Method method_from_name(const std::string& name) {
    const auto it = kMethodNames.find(name);
    if (it == kMethodNames.end()) throw std::invalid_argument("unknown method: " + name);
    return it->second;
}

std::string axis_name(Axis a) {
    for (const auto& [name, axis] : kAxisNames)
        if (axis == a) return name;
    return "?";
}

Axis axis_from_name(const std::string& name) {
    const auto it = kAxisNames.find(name);
    if (it == kAxisNames.end()) throw std::invalid_argument("unknown axis: " + name);
    return it->second;
}

double coupled_xi(double eps) {
    if (eps >= 0.5) return 0.1;
    if (eps >= 0.1) return 0.01;
    return eps;
}

SystemConfig apply_axis(const SystemConfig& base, Axis axis, double value, bool couple_xi) {
    SystemConfig cfg = base;
    switch (axis) {
    case Axis::SnrDb:
        break; // realized through noise calibration, not a config field
    case Axis::Tau:
        cfg.pilot_len = static_cast<int>(value);
        break;
    case Axis::SigmaThetaDeg:
        cfg.angular_std = deg2rad(value);
        break;
    case Axis::Eps:
        cfg.eps = value;
        if (couple_xi) cfg.xi = coupled_xi(value);
        break;
    case Axis::AntennasPerSector:
        cfg.antennas_per_sector = static_cast<int>(value);
        break;
    }
    return cfg;
}

void ExperimentSpec::validate() const {
    auto fail = [this](const std::string& msg) {
        throw std::invalid_argument("experiment '" + name + "': " + msg);
    };
    if (name.empty()) fail("name must not be empty");
    if (methods.empty()) fail("methods must not be empty");
    if (values.empty()) fail("axis values must not be empty");
    if (trials < 1) fail("trials must be >= 1");
    if (deployments < 1) fail("deployments must be >= 1");

    const bool wants_exhaustive =
        std::find(methods.begin(), methods.end(), Method::Exhaustive) != methods.end();
    for (double v : values) {
        const SystemConfig cfg = apply_axis(base, axis, v, couple_xi);
        cfg.validate();
        if (wants_exhaustive && (cfg.n_ues > 12 || cfg.pilot_len > 6))
            fail("exhaustive search needs n_ues <= 12 and pilot_len <= 6");
    }
}

// ---------------------------------------------------------------------------
// Configuration file
// ---------------------------------------------------------------------------

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                         const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find_if(known.begin(), known.end(),
                         [&key](const char* k) { return key == k; }) == known.end())
            throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
    }
}

void apply_system_json(SystemConfig& cfg, const json& obj, const std::string& where) {
    reject_unknown_keys(obj,
                        {"cell_side", "min_bs_distance", "n_ues", "n_active", "n_sectors",
                         "antennas_per_sector", "wavelength", "n_paths", "antenna_spacing",
                         "angular_std_deg", "gain_max_db", "atten_max_db", "beamwidth_3db_deg",
                         "pilot_len", "pilot_power", "noise_power", "data_power", "eps", "xi",
                         "knn", "chart_dim_max", "quadrature_points", "seed"},
                        where);
    auto get = [&obj](const char* key, auto& field) {
        if (obj.contains(key)) field = obj.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("cell_side", cfg.cell_side);
    get("min_bs_distance", cfg.min_bs_distance);
    get("n_ues", cfg.n_ues);
    get("n_active", cfg.n_active);
    get("n_sectors", cfg.n_sectors);
    get("antennas_per_sector", cfg.antennas_per_sector);
    get("wavelength", cfg.wavelength);
    get("n_paths", cfg.n_paths);
    get("antenna_spacing", cfg.antenna_spacing);
    if (obj.contains("angular_std_deg")) cfg.angular_std = deg2rad(obj.at("angular_std_deg").get<double>());
    get("gain_max_db", cfg.gain_max_db);
    get("atten_max_db", cfg.atten_max_db);
    if (obj.contains("beamwidth_3db_deg")) cfg.beamwidth_3db = deg2rad(obj.at("beamwidth_3db_deg").get<double>());
    get("pilot_len", cfg.pilot_len);
    get("pilot_power", cfg.pilot_power);
    get("noise_power", cfg.noise_power);
    get("data_power", cfg.data_power);
    get("eps", cfg.eps);
    get("xi", cfg.xi);
    get("knn", cfg.knn);
    get("chart_dim_max", cfg.chart_dim_max);
    get("quadrature_points", cfg.quadrature_points);
    get("seed", cfg.seed);
}

ExperimentSpec parse_experiment_json(const json& obj, const SystemConfig& system) {
    reject_unknown_keys(obj,
                        {"name", "methods", "axis", "values", "trials", "deployments", "snr_db",
                         "use_snr", "couple_xi_to_eps", "overrides"},
                        "experiment");
    ExperimentSpec spec;
    spec.base = system;
    spec.name = obj.at("name").get<std::string>();
    for (const auto& m : obj.at("methods")) spec.methods.push_back(method_from_name(m.get<std::string>()));
    spec.axis = axis_from_name(obj.at("axis").get<std::string>());
    for (const auto& v : obj.at("values")) spec.values.push_back(v.get<double>());
    if (obj.contains("trials")) spec.trials = obj.at("trials").get<int>();
    if (obj.contains("deployments")) spec.deployments = obj.at("deployments").get<int>();
    if (obj.contains("snr_db")) spec.snr_db = obj.at("snr_db").get<double>();
    if (obj.contains("use_snr")) spec.use_snr = obj.at("use_snr").get<bool>();
    if (obj.contains("couple_xi_to_eps")) spec.couple_xi = obj.at("couple_xi_to_eps").get<bool>();
    if (obj.contains("overrides")) apply_system_json(spec.base, obj.at("overrides"), "overrides");
    spec.validate();
    return spec;
}

} // namespace

ConfigFile parse_config(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into a line number.
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " + e.what());
    }

    reject_unknown_keys(root, {"system", "experiments"}, "top level");
    ConfigFile file;
    if (root.contains("system")) apply_system_json(file.system, root.at("system"), "system");
    file.system.validate();
    if (root.contains("experiments"))
        for (const auto& e : root.at("experiments"))
            file.experiments.push_back(parse_experiment_json(e, file.system));
    return file;
}

ConfigFile load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

SystemConfig desk_config() {
    SystemConfig cfg;
    cfg.n_ues = 128;
    cfg.n_active = 32;
    cfg.antennas_per_sector = 16;
    cfg.pilot_len = 16;
    return cfg;
}

SystemConfig toy_config() {
    SystemConfig cfg;
    cfg.n_ues = 10;
    cfg.n_active = 10;
    cfg.antennas_per_sector = 16;
    cfg.pilot_len = 4;
    cfg.knn = 5;
    return cfg;
}

const std::vector<Method> kBaselineMethods = {Method::Random, Method::Cmd, Method::Cc,
                                              Method::RealPosition};

} // namespace

std::vector<ExperimentSpec> preset_experiments() {
    std::vector<ExperimentSpec> presets;

    ExperimentSpec fig3;
    fig3.name = "fig3";
    fig3.methods = {Method::Cc};
    fig3.axis = Axis::Eps;
    fig3.values = {0.5, 0.1, 1e-2, 1e-4};
    fig3.trials = 200;
    fig3.deployments = 3;
    fig3.base = desk_config();
    presets.push_back(fig3);

    ExperimentSpec fig4;
    fig4.name = "fig4";
    fig4.methods = kBaselineMethods;
    fig4.axis = Axis::SigmaThetaDeg;
    fig4.values = {4.0, 8.0, 12.0, 16.0};
    fig4.trials = 200;
    fig4.deployments = 3;
    fig4.base = desk_config();
    presets.push_back(fig4);

    ExperimentSpec fig5;
    fig5.name = "fig5";
    fig5.methods = {Method::Random, Method::Cmd, Method::Cc, Method::RealPosition,
                    Method::PerfectCsiBound};
    fig5.axis = Axis::Tau;
    fig5.values = {8, 16, 32};
    fig5.trials = 200;
    fig5.deployments = 3;
    fig5.base = desk_config();
    presets.push_back(fig5);

    ExperimentSpec fig6;
    fig6.name = "fig6";
    fig6.methods = kBaselineMethods;
    fig6.axis = Axis::AntennasPerSector;
    fig6.values = {8, 16, 32};
    fig6.trials = 200;
    fig6.deployments = 3;
    fig6.base = desk_config();
    presets.push_back(fig6);

    ExperimentSpec fig7; // sum-rate view over the pilot length
    fig7.name = "fig7";
    fig7.methods = kBaselineMethods;
    fig7.axis = Axis::Tau;
    fig7.values = {8, 16, 32};
    fig7.trials = 200;
    fig7.deployments = 3;
    fig7.base = desk_config();
    presets.push_back(fig7);

    ExperimentSpec fig8; // toy setup small enough for exhaustive search
    fig8.name = "fig8";
    fig8.methods = {Method::Random, Method::Cmd, Method::Cc, Method::RealPosition,
                    Method::Exhaustive, Method::PerfectCsiBound};
    fig8.axis = Axis::SnrDb;
    fig8.values = {0, 5, 10, 15, 20};
    fig8.trials = 200;
    fig8.deployments = 3;
    fig8.base = toy_config();
    presets.push_back(fig8);

    for (const auto& p : presets) p.validate();
    return presets;
}

std::optional<ExperimentSpec> find_preset(const std::string& name) {
    for (auto& p : preset_experiments())
        if (p.name == name) return p;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kDeployTag = 0xDE91;
constexpr std::uint64_t kStartTag = 0x57A7;
constexpr std::uint64_t kAllocTag = 0xA110C;

std::uint64_t method_id(Method m) { return static_cast<std::uint64_t>(m); }

/// Everything fixed for one (axis value, deployment): geometry, statistics,
/// chart, and the per-method pilot maps.
struct DeploymentContext {
    SystemConfig cfg;
    std::vector<Ue> ues;
    CovarianceSet covs;
    MatR feature;             // F
    MatR delta;               // 1 - F off the diagonal
    ChartEmbedding chart;     // only when cc is requested
    bool has_chart = false;
    double noise_power = 0.0; // calibrated sigma_n^2 for this deployment
    PilotCodebook book;
    std::vector<PilotAssignment> assignment; // per method index
    std::vector<double> objective;           // per method index
};

DeploymentContext build_context(const ExperimentSpec& spec, const SystemConfig& cfg,
                                double axis_value, int deployment, std::uint64_t seed) {
    DeploymentContext ctx;
    ctx.cfg = cfg;

    // UE positions are shared across axis values and methods.
    Rng deploy_rng(mix_seed({seed, kDeployTag, static_cast<std::uint64_t>(deployment)}));
    ctx.ues = deploy_ues(cfg, deploy_rng);
    ctx.covs = covariance_set(ctx.ues, cfg);

    // Received-SNR calibration: noise such that p_u / sigma_n^2 matches the
    // requested SNR at the deployment's mean per-antenna channel power.
    const double snr_db = spec.axis == Axis::SnrDb ? axis_value : spec.snr_db;
    if (spec.use_snr || spec.axis == Axis::SnrDb) {
        double mean_power = 0.0;
        for (const auto& R : ctx.covs.R) mean_power += R.trace();
        mean_power /= static_cast<double>(cfg.n_ues) * cfg.compound_dim();
        ctx.noise_power = cfg.pilot_power * mean_power * std::pow(10.0, -snr_db / 10.0);
    } else {
        ctx.noise_power = cfg.noise_power;
    }

    ctx.feature = feature_matrix(ctx.covs);
    ctx.delta = MatR::Ones(cfg.n_ues, cfg.n_ues) - ctx.feature;
    ctx.book = hadamard_codebook(cfg.pilot_len);

    const bool wants_cc =
        std::find(spec.methods.begin(), spec.methods.end(), Method::Cc) != spec.methods.end();
    if (wants_cc) {
        ctx.chart = adaptive_chart(ctx.feature, cfg.eps, cfg.xi, cfg.effective_chart_dim_max(),
                                   cfg.knn);
        ctx.has_chart = true;
    }

    ctx.assignment.resize(spec.methods.size());
    ctx.objective.resize(spec.methods.size());
    for (std::size_t m = 0; m < spec.methods.size(); ++m) {
        const Method method = spec.methods[m];
        const std::uint64_t mid = method_id(method);
        Rng start_rng(mix_seed({seed, kStartTag, static_cast<std::uint64_t>(deployment), mid}));
        const int start = static_cast<int>(start_rng.uniform_index(cfg.n_ues));
        switch (method) {
        case Method::Random:
        case Method::PerfectCsiBound: {
            Rng alloc_rng(mix_seed({seed, kAllocTag, static_cast<std::uint64_t>(deployment), mid}));
            ctx.assignment[m] = random_allocate(cfg.n_ues, cfg.pilot_len, alloc_rng);
            break;
        }
        case Method::Cmd:
            ctx.assignment[m] = cmd_allocate(ctx.feature, cfg.pilot_len, start);
            break;
        case Method::Cc:
            ctx.assignment[m] = chart_allocate(ctx.chart, cfg.pilot_len, start);
            break;
        case Method::RealPosition:
            ctx.assignment[m] = real_position_allocate(ctx.ues, cfg.pilot_len, start);
            break;
        case Method::Exhaustive:
            ctx.assignment[m] = exhaustive_search(ctx.delta, cfg.pilot_len).assignment;
            break;
        }
        ctx.objective[m] = contamination_objective(ctx.assignment[m], ctx.delta);
    }
    return ctx;
}

MetricsRecord run_trial(const ExperimentSpec& spec, const DeploymentContext& ctx, Method method,
                        std::size_t method_idx, double axis_value, int deployment, int trial,
                        std::uint64_t base_seed) {
    const SystemConfig& cfg = ctx.cfg;
    const std::uint64_t seed = mix_seed({base_seed, method_id(method), double_bits(axis_value),
                                         static_cast<std::uint64_t>(deployment),
                                         static_cast<std::uint64_t>(trial)});
    Rng rng(seed);

    const std::vector<int> active = rng.sample_without_replacement(cfg.n_ues, cfg.n_active);
    const int K = cfg.n_active;
    MatC H(cfg.compound_dim(), K);
    for (int k = 0; k < K; ++k) H.col(k) = draw_compound_channel(ctx.ues[active[k]], cfg, rng);

    MetricsRecord rec;
    rec.experiment = spec.name;
    rec.method = method;
    rec.axis_value = axis_value;
    rec.deployment = deployment;
    rec.trial = trial;
    rec.seed = seed;
    rec.objective = ctx.objective[method_idx];
    if (method == Method::Cc) {
        rec.chart_dim = ctx.chart.dims;
        rec.residual = ctx.chart.residual;
    }

    const double p_d = cfg.effective_data_power();
    MatC h_hat;
    std::vector<UeCovariance> error_covs;
    if (method == Method::PerfectCsiBound) {
        h_hat = H;
        rec.nmse_num = 0.0;
    } else {
        const auto& assignment = ctx.assignment[method_idx];
        std::vector<int> pilots_of_active(K);
        for (int k = 0; k < K; ++k) pilots_of_active[k] = assignment[active[k]];
        const MatC Y = synthesize_received(H, pilots_of_active, ctx.book, cfg.pilot_power,
                                           ctx.noise_power, rng);
        EstimationResult est = estimate_all(Y, active, assignment, ctx.covs, ctx.book,
                                            cfg.pilot_power, ctx.noise_power);
        h_hat = std::move(est.h_hat);
        error_covs = std::move(est.error_cov);
        rec.nmse_num = (h_hat - H).squaredNorm();
    }
    rec.nmse_den = H.squaredNorm();
    rec.nmse_ce = rec.nmse_num / rec.nmse_den;

    const CombinerResult comb = robust_combiner(h_hat, error_covs, ctx.noise_power, p_d);
    double sum_rate = 0.0;
    for (int k = 0; k < K; ++k) sum_rate += rate(comb.gamma(k));
    rec.sum_rate = sum_rate;

    const VecC symbols = draw_qpsk(K, rng);
    const DetectionSample det = detect_symbols(comb.W, H, symbols, ctx.noise_power, p_d, rng);
    rec.mse_sd = det.mse_sd;
    rec.ser = det.ser;
    return rec;
}

} // namespace

std::vector<SummaryRow> emit_summary(const std::vector<MetricsRecord>& records) {
    if (records.empty()) throw std::invalid_argument("emit_summary: no records");

    // Group in first-appearance order of (method, axis value).
    std::vector<SummaryRow> rows;
    std::vector<std::vector<const MetricsRecord*>> groups;
    for (const auto& rec : records) {
        std::size_t g = 0;
        for (; g < rows.size(); ++g)
            if (rows[g].method == rec.method && rows[g].axis_value == rec.axis_value) break;
        if (g == rows.size()) {
            SummaryRow row;
            row.experiment = rec.experiment;
            row.method = rec.method;
            row.axis_value = rec.axis_value;
            rows.push_back(row);
            groups.emplace_back();
        }
        groups[g].push_back(&rec);
    }

    for (std::size_t g = 0; g < rows.size(); ++g) {
        SummaryRow& row = rows[g];
        const auto& group = groups[g];
        row.n = static_cast<int>(group.size());
        double num = 0.0, den = 0.0;
        auto mean_std = [&group](auto field, double& mean, double& stdev) {
            double sum = 0.0;
            for (const auto* r : group) sum += r->*field;
            mean = sum / static_cast<double>(group.size());
            double ss = 0.0;
            for (const auto* r : group) ss += (r->*field - mean) * (r->*field - mean);
            stdev = group.size() > 1 ? std::sqrt(ss / static_cast<double>(group.size() - 1)) : 0.0;
        };
        for (const auto* r : group) {
            num += r->nmse_num;
            den += r->nmse_den;
        }
        row.nmse_ce = num / den; // ratio of means, not mean of ratios
        mean_std(&MetricsRecord::mse_sd, row.mse_sd_mean, row.mse_sd_std);
        mean_std(&MetricsRecord::ser, row.ser_mean, row.ser_std);
        mean_std(&MetricsRecord::sum_rate, row.sum_rate_mean, row.sum_rate_std);
        mean_std(&MetricsRecord::objective, row.objective_mean, row.objective_std);
        double dummy = 0.0;
        double dim_mean = 0.0;
        for (const auto* r : group) dim_mean += r->chart_dim;
        row.chart_dim_mean = dim_mean / static_cast<double>(group.size());
        mean_std(&MetricsRecord::residual, row.residual_mean, dummy);
    }
    return rows;
}

void write_raw_csv(const std::string& path, const std::vector<MetricsRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_raw_csv: cannot open " + path);
    out << "experiment,method,axis_value,deployment,trial,seed,nmse_ce,nmse_num,nmse_den,"
           "mse_sd,ser,sum_rate,objective,chart_dim,residual\n";
    for (const auto& r : records) {
        out << r.experiment << ',' << method_name(r.method) << ',' << fmt_double(r.axis_value)
            << ',' << r.deployment << ',' << r.trial << ',' << r.seed << ','
            << fmt_double(r.nmse_ce) << ',' << fmt_double(r.nmse_num) << ','
            << fmt_double(r.nmse_den) << ',' << fmt_double(r.mse_sd) << ',' << fmt_double(r.ser)
            << ',' << fmt_double(r.sum_rate) << ',' << fmt_double(r.objective) << ','
            << r.chart_dim << ',' << fmt_double(r.residual) << '\n';
    }
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_summary_csv: cannot open " + path);
    out << "experiment,method,axis_value,n,nmse_ce,mse_sd_mean,mse_sd_std,ser_mean,ser_std,"
           "sum_rate_mean,sum_rate_std,objective_mean,objective_std,chart_dim_mean,"
           "residual_mean\n";
    for (const auto& r : rows) {
        out << r.experiment << ',' << method_name(r.method) << ',' << fmt_double(r.axis_value)
            << ',' << r.n << ',' << fmt_double(r.nmse_ce) << ',' << fmt_double(r.mse_sd_mean)
            << ',' << fmt_double(r.mse_sd_std) << ',' << fmt_double(r.ser_mean) << ','
            << fmt_double(r.ser_std) << ',' << fmt_double(r.sum_rate_mean) << ','
            << fmt_double(r.sum_rate_std) << ',' << fmt_double(r.objective_mean) << ','
            << fmt_double(r.objective_std) << ',' << fmt_double(r.chart_dim_mean) << ','
            << fmt_double(r.residual_mean) << '\n';
    }
}

RunResult run_experiment(const ExperimentSpec& spec_in, const RunOptions& opts) {
    ExperimentSpec spec = spec_in;
    if (opts.trials_override > 0) spec.trials = opts.trials_override;
    if (opts.deployments_override > 0) spec.deployments = opts.deployments_override;
    spec.validate();

#ifdef _OPENMP
    if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif

    if (!opts.out_dir.empty()) std::filesystem::create_directories(opts.out_dir);

    const auto t_begin = std::chrono::steady_clock::now();
    const std::size_t n_methods = spec.methods.size();
    const std::size_t n_values = spec.values.size();
    const std::size_t rows_per_value =
        n_methods * static_cast<std::size_t>(spec.deployments) * spec.trials;

    RunResult result;
    result.records.resize(n_values * rows_per_value);

    json axis_report = json::array();
    for (std::size_t vi = 0; vi < n_values; ++vi) {
        const double value = spec.values[vi];
        const SystemConfig cfg = apply_axis(spec.base, spec.axis, value, spec.couple_xi);
        const auto t_axis = std::chrono::steady_clock::now();

        std::vector<DeploymentContext> contexts;
        contexts.reserve(spec.deployments);
        for (int d = 0; d < spec.deployments; ++d)
            contexts.push_back(build_context(spec, cfg, value, d, opts.seed));

        // Flattened trial loop; each iteration owns exactly one output slot.
        const int n_tasks = static_cast<int>(rows_per_value);
#pragma omp parallel for schedule(dynamic, 8)
        for (int task = 0; task < n_tasks; ++task) {
            const int trial = task % spec.trials;
            const int d = (task / spec.trials) % spec.deployments;
            const std::size_t m = static_cast<std::size_t>(task) / spec.trials / spec.deployments;
            result.records[vi * rows_per_value + task] =
                run_trial(spec, contexts[d], spec.methods[m], m, value, d, trial, opts.seed);
        }

        const double axis_ms = std::chrono::duration<double, std::milli>(
                                   std::chrono::steady_clock::now() - t_axis)
                                   .count();
        json entry;
        entry["value"] = value;
        entry["wall_time_ms"] = axis_ms;
        double dim_sum = 0.0, res_sum = 0.0;
        bool any_chart = false;
        for (const auto& ctx : contexts)
            if (ctx.has_chart) {
                dim_sum += ctx.chart.dims;
                res_sum += ctx.chart.residual;
                any_chart = true;
            }
        if (any_chart) {
            entry["avg_chart_dim"] = dim_sum / spec.deployments;
            entry["avg_chart_residual"] = res_sum / spec.deployments;
        }
        json noise = json::array();
        for (const auto& ctx : contexts) noise.push_back(ctx.noise_power);
        entry["noise_power"] = noise;
        axis_report.push_back(entry);

        if (!opts.out_dir.empty() && (opts.dump_charts || opts.dump_assignments)) {
            for (int d = 0; d < spec.deployments; ++d) {
                const std::string stem = opts.out_dir + "/" + spec.name + "_v" +
                                         std::to_string(vi) + "_d" + std::to_string(d);
                if (opts.dump_charts && contexts[d].has_chart)
                    write_chart_csv(stem + "_chart.csv", contexts[d].chart);
                if (opts.dump_assignments)
                    for (std::size_t m = 0; m < n_methods; ++m)
                        write_assignment_csv(stem + "_assignment_" +
                                                 method_name(spec.methods[m]) + ".csv",
                                             contexts[d].assignment[m]);
            }
        }
    }

    result.summary = emit_summary(result.records);

    if (!opts.out_dir.empty()) {
        result.raw_csv_path = opts.out_dir + "/" + spec.name + "_raw.csv";
        result.summary_csv_path = opts.out_dir + "/" + spec.name + "_summary.csv";
        result.manifest_path = opts.out_dir + "/" + spec.name + "_manifest.json";
        write_raw_csv(result.raw_csv_path, result.records);
        write_summary_csv(result.summary_csv_path, result.summary);

        json manifest;
        manifest["generator"] = std::string("chartpilot ") + kVersion;
        manifest["experiment"] = spec.name;
        manifest["seed"] = opts.seed;
        manifest["trials"] = spec.trials;
        manifest["deployments"] = spec.deployments;
        manifest["axis"] = axis_name(spec.axis);
        manifest["values"] = spec.values;
        json methods = json::array();
        for (Method m : spec.methods) methods.push_back(method_name(m));
        manifest["methods"] = methods;
        json sys;
        sys["n_ues"] = spec.base.n_ues;
        sys["n_active"] = spec.base.n_active;
        sys["n_sectors"] = spec.base.n_sectors;
        sys["antennas_per_sector"] = spec.base.antennas_per_sector;
        sys["pilot_len"] = spec.base.pilot_len;
        sys["n_paths"] = spec.base.n_paths;
        sys["cell_side"] = spec.base.cell_side;
        sys["min_bs_distance"] = spec.base.min_bs_distance;
        sys["wavelength"] = spec.base.wavelength;
        sys["antenna_spacing"] = spec.base.antenna_spacing;
        sys["angular_std_deg"] = rad2deg(spec.base.angular_std);
        sys["gain_max_db"] = spec.base.gain_max_db;
        sys["atten_max_db"] = spec.base.atten_max_db;
        sys["beamwidth_3db_deg"] = rad2deg(spec.base.beamwidth_3db);
        sys["pilot_power"] = spec.base.pilot_power;
        sys["data_power"] = spec.base.effective_data_power();
        sys["eps"] = spec.base.eps;
        sys["xi"] = spec.base.xi;
        sys["knn"] = spec.base.knn;
        sys["chart_dim_max"] = spec.base.effective_chart_dim_max();
        sys["quadrature_points"] = spec.base.quadrature_points;
        manifest["system"] = sys;
        if (spec.axis == Axis::SnrDb)
            manifest["snr_db"] = "swept";
        else if (spec.use_snr)
            manifest["snr_db"] = spec.snr_db;
        else
            manifest["snr_db"] = nullptr; // raw noise_power used verbatim
        std::uint64_t hash = 0xcbf29ce484222325ULL; // FNV-1a over the config dump
        for (char c : sys.dump()) hash = (hash ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
        manifest["config_hash"] = hash;
        manifest["axis_points"] = axis_report;
        manifest["rows"] = result.records.size();
        manifest["wall_time_ms"] = std::chrono::duration<double, std::milli>(
                                       std::chrono::steady_clock::now() - t_begin)
                                       .count();
        std::ofstream mf(result.manifest_path, std::ios::binary);
        if (!mf) throw std::runtime_error("run_experiment: cannot open " + result.manifest_path);
        mf << manifest.dump(2) << "\n";
    }
    return result;
}

} // namespace chartpilot
