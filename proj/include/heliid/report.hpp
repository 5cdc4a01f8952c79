#pragma once

#include <string>

#include <json.hpp>

#include "heliid/experiment.hpp"

namespace heliid {

inline nlohmann::ordered_json to_json(const ParameterSet& p)
{
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < kNumParams; ++i) j[std::string(kParamNames[i])] = p.at(i);
    return j;
}

/// Reads a parameter object keyed by the canonical names. Every name must be
/// present; unknown keys are rejected.
inline ParameterSet parameters_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw InputError("parameter set must be a JSON object");
    const auto& obj = j.contains("parameters") && j["parameters"].is_object() ? j["parameters"] : j;
    std::vector<double> v(kNumParams, 0.0);
    std::vector<bool> seen(kNumParams, false);
    for (const auto& [key, value] : obj.items()) {
        const auto i = param_index(key);
        if (!i) throw InputError("unknown parameter '" + key + "'");
        if (!value.is_number()) throw InputError("parameter '" + key + "' is not a number");
        v[*i] = value.get<double>();
        seen[*i] = true;
    }
    for (std::size_t i = 0; i < kNumParams; ++i) {
        if (!seen[i]) throw InputError("missing parameter '" + std::string(kParamNames[i]) + "'");
    }
    auto p = ParameterSet::unflatten(v);
    p.validate();
    return p;
}

inline nlohmann::ordered_json to_json(const FitnessReport& r)
{
    nlohmann::ordered_json j;
    j["cost"] = r.cost;
    j["divergent"] = r.divergent;
    nlohmann::ordered_json rho = nlohmann::ordered_json::object();
    for (const auto& sc : r.per_state_rho) {
        rho[state_name(sc.state)] = sc.rho ? nlohmann::ordered_json(*sc.rho) : nlohmann::ordered_json(nullptr);
    }
    j["rho"] = rho;
    return j;
}

inline nlohmann::ordered_json config_json(const ExperimentConfig& cfg)
{
    nlohmann::ordered_json j;
    if (cfg.data_path.empty()) {
        const auto& s = cfg.synthetic;
        j["data"] = {{"source", "synthetic"},
                     {"duration_s", s.duration_s},
                     {"sample_rate_hz", s.sample_rate_hz},
                     {"amplitude", s.amplitude},
                     {"noise_fraction", s.noise_fraction},
                     {"seed", s.seed},
                     {"full_state", s.full_state},
                     {"flap_sign_symmetric", s.model.flap_sign_symmetric}};
    } else {
        j["data"] = {{"source", "file"}, {"path", cfg.data_path}};
    }
    j["filter_cutoff_hz"] = cfg.filter_cutoff_hz ? nlohmann::ordered_json(*cfg.filter_cutoff_hz)
                                                 : nlohmann::ordered_json(nullptr);
    j["filter_order"] = cfg.filter_order;
    j["train_fraction"] = cfg.train_fraction;
    j["method"] = method_name(cfg.method);
    j["iterations"] = cfg.iterations;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["same_seed_per_trial"] = cfg.same_seed_per_trial;
    j["flap_sign_symmetric"] = cfg.fitness.model.flap_sign_symmetric;
    j["free_forward_flight"] = cfg.bounds.free_forward_flight;
    switch (cfg.method) {
    case Method::iwo:
        j["iwo"] = {{"pop_initial", cfg.iwo.pop_initial}, {"pop_max", cfg.iwo.pop_max},
                    {"seeds_min", cfg.iwo.seeds_min},     {"seeds_max", cfg.iwo.seeds_max},
                    {"sigma_initial", cfg.iwo.sigma_initial}, {"sigma_final", cfg.iwo.sigma_final},
                    {"n", cfg.iwo.n},                     {"parent_rescue", cfg.iwo.parent_rescue},
                    {"init_draws", cfg.iwo_init_draws}};
        break;
    case Method::ga:
        j["ga"] = {{"pop_size", cfg.ga.pop_size},          {"tournament_k", cfg.ga.tournament_k},
                   {"crossover_rate", cfg.ga.crossover_rate}, {"blend_alpha", cfg.ga.blend_alpha},
                   {"mutation_rate", cfg.ga.mutation_rate}, {"mutation_sigma", cfg.ga.mutation_sigma},
                   {"elitism", cfg.ga.elitism},            {"init_draws", cfg.ga_init_draws}};
        break;
    case Method::pem:
        j["pem"] = {{"max_evaluations", cfg.pem.max_evaluations},
                    {"restarts", cfg.pem.restarts},
                    {"initial_step", cfg.pem.initial_step}};
        break;
    }
    return j;
}

/// Full experiment report. Wall-clock times are left out so equal inputs
/// give byte-identical files.
inline nlohmann::ordered_json to_json(const TrialReport& r, const ExperimentConfig& cfg)
{
    nlohmann::ordered_json j;
    j["config"] = config_json(cfg);
    j["train_samples"] = r.train_samples;
    j["validation_samples"] = r.validation_samples;
    j["best_trial"] = r.best_trial;
    nlohmann::ordered_json params = nlohmann::ordered_json::array();
    for (const auto& p : r.parameters) {
        params.push_back({{"name", p.name},
                          {"best", p.best},
                          {"mean", p.ci.mean},
                          {"ci_lower", p.ci.lower},
                          {"ci_upper", p.ci.upper}});
    }
    j["parameters"] = params;
    j["best_parameters"] = to_json(r.best());
    j["training"] = to_json(r.training);
    j["validation"] = to_json(r.validation);
    nlohmann::ordered_json trials = nlohmann::ordered_json::array();
    for (const auto& t : r.trials) {
        trials.push_back({{"seed", t.seed},
                          {"training_cost", t.training_cost},
                          {"objective", t.objective},
                          {"evaluations", t.evaluations}});
    }
    j["trials"] = trials;
    return j;
}

}  // namespace heliid
