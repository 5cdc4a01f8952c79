// Command-line front end: synth, identify, compare, export.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "heliid/csv_log.hpp"
#include "heliid/experiment.hpp"
#include "heliid/report.hpp"
#include "heliid/synthetic.hpp"

namespace fs = std::filesystem;
using namespace heliid;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

ParameterSet load_parameters(const std::string& source)
{
    if (source == "builtin:table2") return table2_parameters();
    std::ifstream in(source);
    if (!in) throw DataError("cannot open parameter file '" + source + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("'" + source + "' is not valid JSON: " + e.what());
    }
    try {
        return parameters_from_json(j);
    } catch (const InputError& e) {
        throw DataError("'" + source + "': " + e.what());
    }
}

bool symmetric_flaps(const std::string& mode) { return mode == "symmetric"; }

void write_json(const fs::path& path, const nlohmann::ordered_json& j) { write_text_file(path, j.dump(2) + "\n"); }

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create '" + dir.string() + "': " + ec.message());
}

struct CommonOptions {
    std::string data;
    std::uint64_t seed = 42;
    int trials = 10;
    int iters = 200;
    double cutoff = 5.0;
    bool no_filter = false;
    std::string flaps = "symmetric";
    bool free_forward_flight = false;
    bool parent_rescue = false;
    unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--data", o.data, "CSV flight log (default: built-in synthetic benchmark)");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--trials", o.trials, "Independent trials")->check(CLI::PositiveNumber);
    cmd->add_option("--iters", o.iters, "IWO iterations / GA generations")->check(CLI::NonNegativeNumber);
    cmd->add_option("--cutoff", o.cutoff, "Low-pass cutoff in Hz")->check(CLI::PositiveNumber);
    cmd->add_flag("--no-filter", o.no_filter, "Skip the low-pass filter");
    cmd->add_option("--flap-signs", o.flaps, "Flap-row sign convention")
        ->check(CLI::IsMember({"symmetric", "printed"}));
    cmd->add_flag("--free-forward-flight", o.free_forward_flight, "Search the hover-zero derivatives too");
    cmd->add_flag("--parent-rescue", o.parent_rescue, "IWO keeps parents of top-quartile seeds");
    cmd->add_option("--threads", o.threads, "Parallel cost evaluations")->check(CLI::PositiveNumber);
}

ExperimentConfig make_config(const CommonOptions& o)
{
    ExperimentConfig cfg;
    if (!o.data.empty() && o.data != "builtin:benchmark") cfg.data_path = o.data;
    cfg.seed = o.seed;
    cfg.trials = o.trials;
    cfg.iterations = o.iters;
    cfg.filter_cutoff_hz = o.no_filter ? std::nullopt : std::optional<double>(o.cutoff);
    cfg.fitness.model.flap_sign_symmetric = symmetric_flaps(o.flaps);
    cfg.synthetic.model.flap_sign_symmetric = symmetric_flaps(o.flaps);
    cfg.bounds.free_forward_flight = o.free_forward_flight;
    cfg.iwo.parent_rescue = o.parent_rescue;
    cfg.threads = o.threads;
    return cfg;
}

void write_timing(const fs::path& path, const TrialReport& r)
{
    std::ostringstream out;
    out << "trial,seed,seconds\n";
    for (std::size_t k = 0; k < r.trials.size(); ++k) {
        out << k << ',' << r.trials[k].seed << ',' << csv_detail::format_double(r.wall_clock_s[k]) << '\n';
    }
    write_text_file(path, out.str());
}

void print_summary(const TrialReport& r)
{
    std::printf("best trial %zu of %zu, training cost %.6g, validation cost %.6g\n", r.best_trial + 1,
                r.trials.size(), r.training.cost, r.validation.cost);
    for (const auto& sc : r.validation.per_state_rho) {
        if (sc.rho) std::printf("  %-6s rho %.4f\n", state_name(sc.state).c_str(), *sc.rho);
        else std::printf("  %-6s rho n/a\n", state_name(sc.state).c_str());
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hover model identification for small unmanned helicopters"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "Generate a 3-2-1-1 synthetic data set");
    std::string truth = "builtin:table2";
    SyntheticSpec spec = benchmark_spec();
    std::string synth_out;
    std::string synth_flaps = "symmetric";
    synth->add_option("--truth", truth, "Parameter JSON or builtin:table2");
    synth->add_option("--noise", spec.noise_fraction, "Noise std as a fraction of channel RMS")
        ->check(CLI::NonNegativeNumber);
    synth->add_option("--duration", spec.duration_s, "Seconds")->check(CLI::PositiveNumber);
    synth->add_option("--rate", spec.sample_rate_hz, "Sample rate in Hz")->check(CLI::PositiveNumber);
    synth->add_option("--amplitude", spec.amplitude, "Pulse amplitude")->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", spec.seed, "Noise seed");
    synth->add_flag("--full-state", spec.full_state, "Record r_fb, c and d too");
    synth->add_option("--flap-signs", synth_flaps, "Flap-row sign convention")
        ->check(CLI::IsMember({"symmetric", "printed"}));
    synth->add_option("--out", synth_out, "Output CSV")->required();

    auto* identify = app.add_subcommand("identify", "Identify a model from data");
    CommonOptions id_opts;
    std::string method = "iwo";
    std::string id_out;
    add_common(identify, id_opts);
    identify->add_option("--method", method, "iwo, ga or pem")->check(CLI::IsMember({"iwo", "ga", "pem"}));
    identify->add_option("--out", id_out, "Output directory")->required();

    auto* compare = app.add_subcommand("compare", "Compare methods on the same data");
    CommonOptions cmp_opts;
    std::vector<std::string> methods = {"iwo", "ga", "pem"};
    std::string cmp_out;
    add_common(compare, cmp_opts);
    compare->add_option("--methods", methods, "Methods to compare")
        ->delimiter(',')
        ->check(CLI::IsMember({"iwo", "ga", "pem"}));
    compare->add_option("--out", cmp_out, "Output directory")->required();

    auto* exporter = app.add_subcommand("export", "Write measured vs simulated series per state");
    std::string model_path;
    std::string export_data;
    std::string export_out;
    std::string export_flaps = "symmetric";
    exporter->add_option("--model", model_path, "Parameter JSON (model.json from identify)")->required();
    exporter->add_option("--data", export_data, "CSV flight log")->required();
    exporter->add_option("--out", export_out, "Output directory")->required();
    exporter->add_option("--flap-signs", export_flaps, "Flap-row sign convention")
        ->check(CLI::IsMember({"symmetric", "printed"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*synth) {
            spec.model.flap_sign_symmetric = symmetric_flaps(synth_flaps);
            const auto log = synthesize(load_parameters(truth), spec);
            save_log_file(log, synth_out);
            std::printf("wrote %zu samples to %s\n", log.size(), synth_out.c_str());
        } else if (*identify) {
            auto cfg = make_config(id_opts);
            cfg.method = parse_method(method);
            const auto report = run_experiment(cfg);
            const fs::path dir(id_out);
            ensure_dir(dir);
            write_json(dir / "report.json", to_json(report, cfg));
            write_json(dir / "model.json", to_json(report.best()));
            write_timing(dir / "timing.csv", report);
            print_summary(report);
        } else if (*compare) {
            auto cfg = make_config(cmp_opts);
            std::vector<Method> ms;
            for (const auto& m : methods) ms.push_back(parse_method(m));
            const auto table = compare_methods(cfg, ms);
            const fs::path dir(cmp_out);
            ensure_dir(dir);
            write_text_file(dir / "comparison.csv", table.to_csv());
            write_text_file(dir / "comparison.txt", table.to_text());
            for (std::size_t i = 0; i < ms.size(); ++i) {
                cfg.method = ms[i];
                write_json(dir / (table.methods[i] + ".json"), to_json(table.reports[i], cfg));
            }
            std::fputs(table.to_text().c_str(), stdout);
        } else if (*exporter) {
            const auto params = load_parameters(model_path);
            const auto data = load_log_file(export_data);
            FitnessConfig fc;
            fc.model.flap_sign_symmetric = symmetric_flaps(export_flaps);
            const auto files = export_timeseries(params, data, export_out, fc);
            std::printf("wrote %zu files to %s\n", files.size(), export_out.c_str());
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
