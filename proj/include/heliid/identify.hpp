#pragma once

#include <memory>
#include <span>

#include "heliid/fitness.hpp"
#include "heliid/ga.hpp"
#include "heliid/iwo.hpp"
#include "heliid/nelder_mead.hpp"
#include "heliid/optimizer.hpp"
#include "heliid/parameters.hpp"
#include "heliid/pem.hpp"
#include "heliid/search_space.hpp"
#include "heliid/time_series.hpp"

namespace heliid {

/// Correlation cost of a flat parameter vector on `evaluator`'s data.
inline CostFunction correlation_cost(std::shared_ptr<const FitnessEvaluator> evaluator)
{
    return [evaluator](std::span<const double> x) { return evaluator->cost(ParameterSet::unflatten(x)); };
}

inline void require_parameter_space(const SearchSpace& space)
{
    if (space.dims() != kNumParams) throw InputError("helicopter search space must have 40 dimensions");
}

/// IWO on the correlation cost of the training data.
inline OptimizerResult run_iwo(const TimeSeriesLog& data, const SearchSpace& space, const IwoConfig& cfg,
                               const FitnessConfig& fitness = {})
{
    require_parameter_space(space);
    auto evaluator = std::make_shared<const FitnessEvaluator>(data, fitness);
    return run_iwo(correlation_cost(evaluator), space, cfg);
}

/// Real-coded GA on the correlation cost of the training data.
inline OptimizerResult run_ga(const TimeSeriesLog& data, const SearchSpace& space, const GaConfig& cfg,
                              const FitnessConfig& fitness = {})
{
    require_parameter_space(space);
    auto evaluator = std::make_shared<const FitnessEvaluator>(data, fitness);
    return run_ga(correlation_cost(evaluator), space, cfg);
}

/// Prediction-error baseline: Nelder-Mead on the one-step prediction MSE,
/// started from the middle of the search space. `best_cost` and the trace
/// are in MSE units, not correlation cost.
inline OptimizerResult run_pem(const TimeSeriesLog& data, const SearchSpace& space, const PemConfig& cfg,
                               const ModelOptions& model = {})
{
    require_parameter_space(space);
    auto pe = std::make_shared<const OneStepPredictionError>(data, model);
    CostFunction cost = [pe](std::span<const double> x) { return (*pe)(ParameterSet::unflatten(x)); };
    return run_nelder_mead(cost, space, space.midpoint(), to_nelder_mead(cfg));
}

}  // namespace heliid
