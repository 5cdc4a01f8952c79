#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heliid/error.hpp"
#include "heliid/model.hpp"
#include "heliid/parameters.hpp"
#include "heliid/time_series.hpp"

namespace heliid {

/// Below this population standard deviation a series counts as flat and its
/// correlation is undefined.
inline constexpr double kFlatSeriesSigma = 1e-12;

/// Population Pearson correlation of two equal-length series (N >= 2).
/// Returns nullopt when either series is flat.
inline std::optional<double> pearson(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) throw InputError("pearson: series lengths differ");
    const std::size_t n = a.size();
    if (n < 2) throw InputError("pearson: need at least 2 observations");

    double mean_a = 0.0;
    double mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);

    double saa = 0.0;
    double sbb = 0.0;
    double sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    const double sigma_a = std::sqrt(saa / static_cast<double>(n));
    const double sigma_b = std::sqrt(sbb / static_cast<double>(n));
    if (sigma_a < kFlatSeriesSigma || sigma_b < kFlatSeriesSigma) return std::nullopt;
    const double rho = sab / std::sqrt(saa * sbb);
    return std::clamp(rho, -1.0, 1.0);
}

struct StateCorrelation {
    State state;
    std::optional<double> rho;
};

struct FitnessReport {
    double cost = 0.0;
    std::vector<StateCorrelation> per_state_rho;
    bool divergent = false;
    /// Initial state the simulation started from.
    StateVector initial_state = StateVector::Zero();

    /// Larger is better; the reproduction law ranks on this.
    double fitness() const { return -cost; }

    std::optional<double> rho(State s) const
    {
        for (const auto& sc : per_state_rho) {
            if (sc.state == s) return sc.rho;
        }
        return std::nullopt;
    }
};

/// Where each simulation starts.
enum class InitialState {
    /// Weighted least-squares fit of the model's free response to the
    /// measured channels (all 13 states estimated).
    least_squares,
    /// First sample of each measured channel, zero for the rest.
    first_sample,
};

struct FitnessConfig {
    ModelOptions model;
    /// States to score. Empty means every measured state channel in the data.
    std::vector<State> scored;
    InitialState initial_state = InitialState::least_squares;
};

/// Cost contribution of one state: (1 - rho)^2, with an undefined rho
/// scored as 0.
inline double correlation_penalty(std::optional<double> rho)
{
    const double r = rho.value_or(0.0);
    return (1.0 - r) * (1.0 - r);
}

/// Weighted observability Gramian sum_{k<n} (Phi^k)^T W Phi^k, built by
/// repeated doubling in O(log n) matrix products.
inline StateMatrix observability_gramian(const StateMatrix& phi, const StateVector& weights, std::size_t n)
{
    StateMatrix block_pow = phi;
    StateMatrix block_gram = weights.asDiagonal();
    StateMatrix acc_pow = StateMatrix::Identity();
    StateMatrix acc_gram = StateMatrix::Zero();
    while (n > 0) {
        if (n & 1U) {
            acc_gram += acc_pow.transpose() * block_gram * acc_pow;
            acc_pow = block_pow * acc_pow;
        }
        n >>= 1U;
        if (n > 0) {
            block_gram += block_pow.transpose() * block_gram * block_pow;
            block_pow = block_pow * block_pow;
        }
    }
    return acc_gram;
}

/// Simulation and correlation of one candidate against one trajectory.
struct FitnessDetail {
    FitnessReport report;
    Trajectory trajectory;
};

/// Correlation cost of candidate models against one recorded data set.
/// Holds the inputs, the measured series and the initial state so each
/// evaluation only simulates and correlates. Evaluation is const and shares
/// no mutable state, so concurrent calls are safe.
class FitnessEvaluator {
public:
    FitnessEvaluator(const TimeSeriesLog& data, FitnessConfig config) : config_(std::move(config))
    {
        data.validate();
        if (!has_all_controls(data)) {
            throw DataError("data must contain delta_lat, delta_lon, delta_ped and delta_col");
        }
        if (config_.scored.empty()) {
            for (std::size_t s = 0; s < kNumStates; ++s) {
                const std::string name(kStateNames[s]);
                if (data.has(name) && data.is_measured(name)) config_.scored.push_back(static_cast<State>(s));
            }
        }
        if (config_.scored.empty()) throw DataError("data has no measured state channel to score");
        for (State s : config_.scored) {
            const auto name = state_name(s);
            if (!data.has(name) || !data.is_measured(name)) {
                throw DataError("scored state '" + name + "' is not measured in the data");
            }
            auto ch = data.channel(name);
            measured_.emplace_back(ch.begin(), ch.end());
            double mean_sq = 0.0;
            for (double v : ch) mean_sq += v * v;
            mean_sq /= static_cast<double>(ch.size());
            weights_(static_cast<Eigen::Index>(idx(s))) = mean_sq > 0.0 ? 1.0 / mean_sq : 1.0;
        }
        inputs_ = control_inputs(data);
        first_sample_ = initial_state_from(data);
        dt_ = data.dt();
    }

    const std::vector<State>& scored_states() const { return config_.scored; }
    const FitnessConfig& config() const { return config_; }
    double ceiling() const { return 4.0 * static_cast<double>(config_.scored.size()); }
    std::size_t samples() const { return inputs_.size(); }
    double dt() const { return dt_; }
    std::span<const ControlInput> inputs() const { return inputs_; }

    /// Full evaluation, keeping the simulated trajectory.
    FitnessDetail detail(const ParameterSet& params) const
    {
        const auto mats = build_matrices(params, config_.model);
        FitnessDetail out;
        auto& report = out.report;

        const auto x0 = initial_state_for(mats);
        if (x0) {
            report.initial_state = *x0;
            out.trajectory = simulate(mats, *x0, inputs_, dt_);
        } else {
            out.trajectory.divergent = true;
        }
        if (out.trajectory.divergent) {
            report.divergent = true;
            report.cost = ceiling();
            for (State s : config_.scored) report.per_state_rho.push_back({s, std::nullopt});
            return out;
        }
        std::vector<double> simulated(out.trajectory.states.size());
        for (std::size_t i = 0; i < config_.scored.size(); ++i) {
            const auto row = static_cast<Eigen::Index>(idx(config_.scored[i]));
            for (std::size_t k = 0; k < simulated.size(); ++k) simulated[k] = out.trajectory.states[k](row);
            const auto rho = pearson(measured_[i], simulated);
            report.per_state_rho.push_back({config_.scored[i], rho});
            report.cost += correlation_penalty(rho);
        }
        return out;
    }

    FitnessReport evaluate(const ParameterSet& params) const { return detail(params).report; }

    double cost(const ParameterSet& params) const { return evaluate(params).cost; }

private:
    /// nullopt when the model cannot produce a bounded start (forced
    /// response diverges or the fit is not finite).
    std::optional<StateVector> initial_state_for(const SystemMatrices& mats) const
    {
        if (config_.initial_state == InitialState::first_sample) return first_sample_;

        // Response = forced part (zero start) + Phi^k x0. Minimize
        // sum_k sum_s w_s (y_s[k] - forced_s[k] - (Phi^k x0)_s)^2 through the
        // normal equations: Gramian on the left, an adjoint sweep on the right.
        const auto forced = simulate(mats, StateVector::Zero(), inputs_, dt_);
        if (forced.divergent) return std::nullopt;
        const Rk4Propagator prop(mats, dt_);
        const std::size_t n = forced.states.size();

        StateVector lambda = StateVector::Zero();
        const StateMatrix phi_t = prop.phi.transpose();
        for (std::size_t k = n; k-- > 0;) {
            StateVector g = StateVector::Zero();
            for (std::size_t i = 0; i < config_.scored.size(); ++i) {
                const auto row = static_cast<Eigen::Index>(idx(config_.scored[i]));
                g(row) = weights_(row) * (measured_[i][k] - forced.states[k](row));
            }
            lambda = phi_t * lambda + g;
        }
        StateVector w = StateVector::Zero();
        for (State s : config_.scored) w(static_cast<Eigen::Index>(idx(s))) = weights_(static_cast<Eigen::Index>(idx(s)));
        StateMatrix gram = observability_gramian(prop.phi, w, n);
        if (!gram.allFinite() || !lambda.allFinite()) return std::nullopt;

        const double ridge = 1e-12 * gram.trace() / static_cast<double>(kNumStates) + 1e-300;
        gram.diagonal().array() += ridge;
        StateVector x0 = gram.ldlt().solve(lambda);
        if (!x0.allFinite()) return std::nullopt;
        return x0;
    }

    FitnessConfig config_;
    std::vector<std::vector<double>> measured_;
    StateVector weights_ = StateVector::Zero();
    std::vector<ControlInput> inputs_;
    StateVector first_sample_ = StateVector::Zero();
    double dt_ = 0.01;
};

/// Simulates `params` on `data` and sums (1 - rho_i)^2 over the scored
/// states. Divergent runs score the ceiling
/// 4 x (number of scored states).
inline FitnessReport evaluate(const ParameterSet& params, const TimeSeriesLog& data, const FitnessConfig& config = {})
{
    return FitnessEvaluator(data, config).evaluate(params);
}

}  // namespace heliid
