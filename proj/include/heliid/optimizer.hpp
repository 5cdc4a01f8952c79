#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <limits>
#include <span>
#include <thread>
#include <vector>

namespace heliid {

/// Objective to minimize over a decision vector.
using CostFunction = std::function<double(std::span<const double>)>;

struct OptimizerResult {
    std::vector<double> best;
    double best_cost = 0.0;
    /// Best-so-far cost: entry 0 after initialization, then one per iteration.
    std::vector<double> cost_trace;
    std::size_t evaluations = 0;
    std::uint64_t rng_seed = 0;
    /// Population at termination (population-based methods only).
    std::vector<std::vector<double>> final_population;
};

/// Non-finite costs rank as the largest finite value.
inline double sanitize_cost(double c)
{
    return std::isfinite(c) ? c : std::numeric_limits<double>::max();
}

/// Scores a batch of candidates, splitting the work across `threads`
/// workers. Results are stored by candidate index, so the outcome does not
/// depend on scheduling.
inline std::vector<double> evaluate_batch(const CostFunction& cost, const std::vector<std::vector<double>>& xs,
                                          unsigned threads = 1)
{
    std::vector<double> out(xs.size());
    const std::size_t workers = std::min<std::size_t>(std::max(1U, threads), xs.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = sanitize_cost(cost(xs[i]));
        return out;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < xs.size(); i += workers) out[i] = sanitize_cost(cost(xs[i]));
        });
    }
    pool.clear();
    return out;
}

/// Rejection rule for the starting population. Draws whose cost is at or
/// above `reject_at` are discarded and redrawn, up to `max_draws` draws in
/// total; if the budget runs out, the best rejected draws fill the gap.
struct FeasibleInit {
    std::optional<double> reject_at;
    std::size_t max_draws = 0;
};

struct ScoredBatch {
    std::vector<std::vector<double>> xs;
    std::vector<double> costs;
    std::size_t evaluations = 0;
};

/// Draws `count` starting points with `draw`, applying `rule`.
template <typename Draw>
ScoredBatch initial_population(const CostFunction& cost, std::size_t count, Draw&& draw, const FeasibleInit& rule,
                               unsigned threads)
{
    ScoredBatch out;
    for (std::size_t i = 0; i < count; ++i) out.xs.push_back(draw());
    out.costs = evaluate_batch(cost, out.xs, threads);
    out.evaluations = count;
    if (!rule.reject_at) return out;

    const double limit = *rule.reject_at;
    ScoredBatch accepted;
    ScoredBatch rejected;
    auto sort_in = [&](ScoredBatch& from) {
        for (std::size_t i = 0; i < from.xs.size(); ++i) {
            auto& bin = from.costs[i] < limit ? accepted : rejected;
            bin.xs.push_back(std::move(from.xs[i]));
            bin.costs.push_back(from.costs[i]);
        }
    };
    sort_in(out);
    std::size_t draws = count;
    while (accepted.xs.size() < count && draws < rule.max_draws) {
        const std::size_t batch = std::min(count - accepted.xs.size(), rule.max_draws - draws);
        ScoredBatch more;
        for (std::size_t i = 0; i < batch; ++i) more.xs.push_back(draw());
        more.costs = evaluate_batch(cost, more.xs, threads);
        draws += batch;
        sort_in(more);
    }
    if (accepted.xs.size() < count) {
        std::vector<std::size_t> order(rejected.xs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return rejected.costs[a] < rejected.costs[b]; });
        for (std::size_t i = 0; accepted.xs.size() < count; ++i) {
            accepted.xs.push_back(std::move(rejected.xs[order[i]]));
            accepted.costs.push_back(rejected.costs[order[i]]);
        }
    }
    accepted.xs.resize(count);
    accepted.costs.resize(count);
    accepted.evaluations = draws;
    return accepted;
}

}  // namespace heliid
