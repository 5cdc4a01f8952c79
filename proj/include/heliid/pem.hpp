#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "heliid/error.hpp"
#include "heliid/model.hpp"
#include "heliid/nelder_mead.hpp"
#include "heliid/parameters.hpp"
#include "heliid/time_series.hpp"

namespace heliid {

/// Mean squared one-step-ahead prediction error. The state at sample k is
/// rebuilt from the measured channels (unmeasured ones read as zero) and
/// propagated one RK4 step; the residual is taken over measured channels.
class OneStepPredictionError {
public:
    OneStepPredictionError(const TimeSeriesLog& data, ModelOptions model = {}) : model_(model)
    {
        data.validate();
        if (!has_all_controls(data)) {
            throw DataError("data must contain delta_lat, delta_lon, delta_ped and delta_col");
        }
        states_.assign(data.size(), StateVector::Zero());
        for (std::size_t s = 0; s < kNumStates; ++s) {
            const std::string name(kStateNames[s]);
            if (!data.has(name) || !data.is_measured(name)) continue;
            measured_.push_back(static_cast<Eigen::Index>(s));
            auto ch = data.channel(name);
            for (std::size_t k = 0; k < ch.size(); ++k) states_[k](static_cast<Eigen::Index>(s)) = ch[k];
        }
        if (measured_.empty()) throw DataError("data has no measured state channel");
        inputs_ = control_inputs(data);
        dt_ = data.dt();
    }

    double operator()(const ParameterSet& params) const
    {
        const Rk4Propagator prop(build_matrices(params, model_), dt_);
        double sum = 0.0;
        for (std::size_t k = 0; k + 1 < states_.size(); ++k) {
            const StateVector predicted = prop.step(states_[k], inputs_[k]);
            for (auto s : measured_) {
                const double e = states_[k + 1](s) - predicted(s);
                sum += e * e;
            }
        }
        return sum / static_cast<double>((states_.size() - 1) * measured_.size());
    }

private:
    ModelOptions model_;
    std::vector<StateVector> states_;
    std::vector<ControlInput> inputs_;
    std::vector<Eigen::Index> measured_;
    double dt_ = 0.01;
};

struct PemConfig {
    std::size_t max_evaluations = 12000;
    int restarts = 1;
    double initial_step = 0.1;
    std::uint64_t rng_seed = 0;
};

inline NelderMeadConfig to_nelder_mead(const PemConfig& cfg)
{
    NelderMeadConfig nm;
    nm.max_evaluations = cfg.max_evaluations;
    nm.restarts = cfg.restarts;
    nm.initial_step = cfg.initial_step;
    nm.rng_seed = cfg.rng_seed;
    return nm;
}

}  // namespace heliid
