#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "heliid/butterworth.hpp"
#include "heliid/csv_log.hpp"
#include "heliid/error.hpp"
#include "heliid/excitation.hpp"
#include "heliid/fitness.hpp"
#include "heliid/identify.hpp"
#include "heliid/parameters.hpp"
#include "heliid/rng.hpp"
#include "heliid/search_space.hpp"
#include "heliid/statistics.hpp"
#include "heliid/synthetic.hpp"
#include "heliid/time_series.hpp"

namespace heliid {

enum class Method { iwo, ga, pem };

inline std::string method_name(Method m)
{
    switch (m) {
    case Method::iwo: return "iwo";
    case Method::ga: return "ga";
    case Method::pem: return "pem";
    }
    return "?";
}

inline Method parse_method(std::string_view name)
{
    if (name == "iwo") return Method::iwo;
    if (name == "ga") return Method::ga;
    if (name == "pem") return Method::pem;
    throw InputError("unknown method '" + std::string(name) + "' (expected iwo, ga or pem)");
}

/// Synthetic benchmark: reference hover truth, 30 s at 100 Hz, alternating
/// lateral/longitudinal 3-2-1-1 trains, 1 % noise.
inline SyntheticSpec benchmark_spec()
{
    SyntheticSpec spec;
    spec.model.flap_sign_symmetric = true;
    return spec;
}

struct ExperimentConfig {
    /// CSV log to identify from; the synthetic spec is used when empty.
    std::string data_path;
    SyntheticSpec synthetic = benchmark_spec();
    ParameterSet truth = table2_parameters();

    /// Zero-phase low-pass applied to the whole record before the split.
    std::optional<double> filter_cutoff_hz = 5.0;
    int filter_order = 2;
    double train_fraction = 0.5;

    Method method = Method::iwo;
    /// Overrides iter_max (IWO) and generations (GA).
    int iterations = 200;
    IwoConfig iwo;
    GaConfig ga;
    PemConfig pem;
    /// Redraw budget for divergent initial candidates; 0 disables the redraw.
    std::size_t iwo_init_draws = 2000;
    std::size_t ga_init_draws = 8000;

    HelicopterBoundsOptions bounds;
    FitnessConfig fitness = [] {
        FitnessConfig f;
        f.model.flap_sign_symmetric = true;
        return f;
    }();

    int trials = 10;
    std::uint64_t seed = 42;
    /// Give every trial the master seed instead of a derived one.
    bool same_seed_per_trial = false;
    unsigned threads = 1;

    void validate() const
    {
        if (trials < 1) throw InputError("trials must be at least 1");
        if (iterations < 0) throw InputError("iterations must be non-negative");
        if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InputError("train fraction must lie in (0, 1)");
        if (filter_cutoff_hz && !(*filter_cutoff_hz > 0.0)) throw InputError("filter cutoff must be positive");
    }
};

/// Seed of trial `k` under master seed `master`.
inline std::uint64_t trial_seed(std::uint64_t master, std::size_t k)
{
    return master + static_cast<std::uint64_t>(k) * Rng::kStreamOffset;
}

struct ParameterEstimate {
    std::string name;
    double best = 0.0;
    ConfidenceInterval ci;
};

struct TrialResult {
    std::uint64_t seed = 0;
    ParameterSet best;
    /// Correlation cost on the training split.
    double training_cost = 0.0;
    /// The optimizer's own objective (equal to training_cost except for PEM).
    double objective = 0.0;
    std::size_t evaluations = 0;
    std::vector<double> cost_trace;
};

struct TrialReport {
    Method method = Method::iwo;
    std::uint64_t master_seed = 0;
    std::vector<TrialResult> trials;
    std::size_t best_trial = 0;
    std::vector<ParameterEstimate> parameters;  // canonical order
    FitnessReport training;
    FitnessReport validation;
    std::size_t train_samples = 0;
    std::size_t validation_samples = 0;
    /// Seconds per trial. Kept out of the JSON report.
    std::vector<double> wall_clock_s;

    const ParameterSet& best() const { return trials.at(best_trial).best; }
};

/// Data split used by an experiment, after optional filtering.
struct PreparedData {
    TimeSeriesLog full;
    TimeSeriesLog train;
    TimeSeriesLog validate;
};

inline TimeSeriesLog load_experiment_data(const ExperimentConfig& cfg)
{
    if (!cfg.data_path.empty()) return load_log_file(cfg.data_path);
    return synthesize(cfg.truth, cfg.synthetic);
}

inline PreparedData prepare_data(const ExperimentConfig& cfg, TimeSeriesLog log)
{
    if (cfg.filter_cutoff_hz) log = butterworth_filter(log, *cfg.filter_cutoff_hz, cfg.filter_order);
    auto [train, validate] = split_train_validate(log, cfg.train_fraction);
    return {std::move(log), std::move(train), std::move(validate)};
}

inline TrialResult run_trial(const ExperimentConfig& cfg, const SearchSpace& space,
                             const std::shared_ptr<const FitnessEvaluator>& train_eval, const TimeSeriesLog& train,
                             std::uint64_t seed)
{
    OptimizerResult r;
    switch (cfg.method) {
    case Method::iwo: {
        IwoConfig c = cfg.iwo;
        c.iter_max = cfg.iterations;
        c.rng_seed = seed;
        c.threads = cfg.threads;
        if (!c.init.reject_at && cfg.iwo_init_draws > 0) {
            c.init.reject_at = train_eval->ceiling();
            c.init.max_draws = cfg.iwo_init_draws;
        }
        r = run_iwo(correlation_cost(train_eval), space, c);
        break;
    }
    case Method::ga: {
        GaConfig c = cfg.ga;
        c.generations = cfg.iterations;
        c.rng_seed = seed;
        c.threads = cfg.threads;
        if (!c.init.reject_at && cfg.ga_init_draws > 0) {
            c.init.reject_at = train_eval->ceiling();
            c.init.max_draws = cfg.ga_init_draws;
        }
        r = run_ga(correlation_cost(train_eval), space, c);
        break;
    }
    case Method::pem: {
        PemConfig c = cfg.pem;
        c.rng_seed = seed;
        r = run_pem(train, space, c, cfg.fitness.model);
        break;
    }
    }
    TrialResult t;
    t.seed = seed;
    t.best = ParameterSet::unflatten(r.best);
    t.objective = r.best_cost;
    t.training_cost = cfg.method == Method::pem ? train_eval->cost(t.best) : r.best_cost;
    t.evaluations = r.evaluations;
    t.cost_trace = std::move(r.cost_trace);
    return t;
}

/// Runs `trials` independent optimizations on the training split, keeps the
/// trial with the lowest training cost, and scores it on the validation split.
inline TrialReport run_experiment(const ExperimentConfig& cfg, const PreparedData& data)
{
    cfg.validate();
    const auto space = helicopter_search_space(table2_parameters(), cfg.bounds);
    auto train_eval = std::make_shared<const FitnessEvaluator>(data.train, cfg.fitness);
    const FitnessEvaluator validate_eval(data.validate, cfg.fitness);

    TrialReport report;
    report.method = cfg.method;
    report.master_seed = cfg.seed;
    report.train_samples = data.train.size();
    report.validation_samples = data.validate.size();
    for (int k = 0; k < cfg.trials; ++k) {
        const auto seed = cfg.same_seed_per_trial ? cfg.seed : trial_seed(cfg.seed, static_cast<std::size_t>(k));
        const auto t0 = std::chrono::steady_clock::now();
        report.trials.push_back(run_trial(cfg, space, train_eval, data.train, seed));
        report.wall_clock_s.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }

    for (std::size_t k = 1; k < report.trials.size(); ++k) {
        if (report.trials[k].training_cost < report.trials[report.best_trial].training_cost) report.best_trial = k;
    }

    std::vector<double> column(report.trials.size());
    for (std::size_t i = 0; i < kNumParams; ++i) {
        for (std::size_t k = 0; k < report.trials.size(); ++k) column[k] = report.trials[k].best.at(i);
        report.parameters.push_back({std::string(kParamNames[i]), report.best().at(i), t_interval(column)});
    }
    report.training = train_eval->evaluate(report.best());
    report.validation = validate_eval.evaluate(report.best());
    return report;
}

inline TrialReport run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    return run_experiment(cfg, prepare_data(cfg, load_experiment_data(cfg)));
}

inline constexpr std::array<State, 4> kAttitudeStates = {State::p, State::q, State::phi, State::theta};

/// Validation correlation per state (rows) and method (columns).
struct ComparisonTable {
    std::vector<std::string> methods;
    std::vector<State> states;
    std::vector<std::vector<std::optional<double>>> rho;  // [state][method]
    std::vector<TrialReport> reports;

    std::string to_csv() const
    {
        std::ostringstream out;
        out << "state";
        for (const auto& m : methods) out << ',' << m;
        out << '\n';
        for (std::size_t s = 0; s < states.size(); ++s) {
            out << state_name(states[s]);
            for (const auto& v : rho[s]) out << ',' << (v ? csv_detail::format_double(*v) : std::string("nan"));
            out << '\n';
        }
        return out.str();
    }

    std::string to_text() const
    {
        std::ostringstream out;
        out << std::left << std::setw(8) << "state";
        for (const auto& m : methods) out << std::right << std::setw(10) << m;
        out << '\n';
        for (std::size_t s = 0; s < states.size(); ++s) {
            out << std::left << std::setw(8) << state_name(states[s]);
            for (const auto& v : rho[s]) {
                std::ostringstream cell;
                if (v) cell << std::fixed << std::setprecision(4) << *v;
                else cell << "n/a";
                out << std::right << std::setw(10) << cell.str();
            }
            out << '\n';
        }
        return out.str();
    }
};

/// Runs the same experiment once per method on identical data.
inline ComparisonTable compare_methods(const ExperimentConfig& base, const std::vector<Method>& methods)
{
    if (methods.empty()) throw InputError("no methods to compare");
    base.validate();
    const auto data = prepare_data(base, load_experiment_data(base));
    ComparisonTable table;
    table.states.assign(kAttitudeStates.begin(), kAttitudeStates.end());
    table.rho.assign(table.states.size(), {});
    for (Method m : methods) {
        ExperimentConfig cfg = base;
        cfg.method = m;
        table.reports.push_back(run_experiment(cfg, data));
        table.methods.push_back(method_name(m));
        for (std::size_t s = 0; s < table.states.size(); ++s) {
            table.rho[s].push_back(table.reports.back().validation.rho(table.states[s]));
        }
    }
    return table;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

/// One CSV per scored state in `out_dir`, named <state>.csv, with columns
/// t, measured, simulated. Returns the written paths.
inline std::vector<std::filesystem::path> export_timeseries(const ParameterSet& params, const TimeSeriesLog& data,
                                                            const std::filesystem::path& out_dir,
                                                            const FitnessConfig& fitness = {})
{
    const FitnessEvaluator eval(data, fitness);
    const auto detail = eval.detail(params);
    if (detail.trajectory.divergent) throw DataError("model diverges on the data; nothing to export");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create '" + out_dir.string() + "': " + ec.message());

    std::vector<std::filesystem::path> written;
    for (State s : eval.scored_states()) {
        const auto name = state_name(s);
        const auto measured = data.channel(name);
        std::ostringstream csv;
        csv << "t,measured,simulated\n";
        for (std::size_t k = 0; k < data.size(); ++k) {
            csv << csv_detail::format_double(data.time(k)) << ',' << csv_detail::format_double(measured[k]) << ','
                << csv_detail::format_double(detail.trajectory.states[k](static_cast<Eigen::Index>(idx(s)))) << '\n';
        }
        const auto path = out_dir / (name + ".csv");
        write_text_file(path, csv.str());
        written.push_back(path);
    }
    return written;
}

}  // namespace heliid
