#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "heliid/error.hpp"
#include "heliid/optimizer.hpp"
#include "heliid/rng.hpp"
#include "heliid/search_space.hpp"

namespace heliid {

/// Real-coded genetic algorithm settings.
struct GaConfig {
    int generations = 200;
    int pop_size = 40;
    int tournament_k = 2;
    double crossover_rate = 0.9;
    double blend_alpha = 0.5;
    double mutation_rate = 0.1;
    double mutation_sigma = 0.05;  // fraction of range
    int elitism = 1;
    std::uint64_t rng_seed = 1;
    FeasibleInit init;
    unsigned threads = 1;
    /// Optional starting population; drawn uniformly when empty.
    std::vector<std::vector<double>> initial_population;

    void validate() const
    {
        if (generations < 0) throw InputError("generations must be non-negative");
        if (pop_size < 2) throw InputError("GA population needs at least 2 individuals");
        if (tournament_k < 1) throw InputError("tournament size must be positive");
        if (elitism < 0 || elitism > pop_size) throw InputError("elitism must lie in [0, pop_size]");
        if (crossover_rate < 0.0 || crossover_rate > 1.0 || mutation_rate < 0.0 || mutation_rate > 1.0) {
            throw InputError("rates must lie in [0, 1]");
        }
        if (!initial_population.empty() && initial_population.size() != static_cast<std::size_t>(pop_size)) {
            throw InputError("initial population size must equal pop_size");
        }
    }
};

/// Tournament selection, BLX-alpha crossover, per-gene Gaussian mutation
/// and elitist replacement. Offspring are clamped into the space.
inline OptimizerResult run_ga(const CostFunction& cost, const SearchSpace& space, const GaConfig& cfg)
{
    cfg.validate();
    Rng rng(cfg.rng_seed);
    OptimizerResult result;
    result.rng_seed = cfg.rng_seed;
    const auto pop_size = static_cast<std::size_t>(cfg.pop_size);

    std::vector<std::vector<double>> pop = cfg.initial_population;
    std::vector<double> costs;
    if (pop.empty()) {
        auto start = initial_population(
            cost, pop_size, [&] { return space.sample_uniform(rng); }, cfg.init, cfg.threads);
        pop = std::move(start.xs);
        costs = std::move(start.costs);
        result.evaluations += start.evaluations;
    } else {
        for (auto& x : pop) {
            if (x.size() != space.dims()) throw InputError("initial individual has wrong dimension");
            space.clamp(x);
        }
        costs = evaluate_batch(cost, pop, cfg.threads);
        result.evaluations += pop.size();
    }

    std::size_t best_idx = static_cast<std::size_t>(std::min_element(costs.begin(), costs.end()) - costs.begin());
    result.best = pop[best_idx];
    result.best_cost = costs[best_idx];
    result.cost_trace.push_back(result.best_cost);

    auto tournament = [&]() -> std::size_t {
        std::size_t winner = rng.below(pop_size);
        for (int t = 1; t < cfg.tournament_k; ++t) {
            const std::size_t challenger = rng.below(pop_size);
            if (costs[challenger] < costs[winner]) winner = challenger;
        }
        return winner;
    };

    for (int gen = 0; gen < cfg.generations; ++gen) {
        std::vector<std::size_t> order(pop_size);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });

        std::vector<std::vector<double>> next;
        std::vector<double> next_costs;
        for (int e = 0; e < cfg.elitism; ++e) {
            next.push_back(pop[order[static_cast<std::size_t>(e)]]);
            next_costs.push_back(costs[order[static_cast<std::size_t>(e)]]);
        }

        std::vector<std::vector<double>> children;
        while (next.size() + children.size() < pop_size) {
            const auto& p1 = pop[tournament()];
            const auto& p2 = pop[tournament()];
            std::vector<double> child = p1;
            if (rng.uniform() < cfg.crossover_rate) {
                for (std::size_t d = 0; d < space.dims(); ++d) {
                    const double lo = std::min(p1[d], p2[d]);
                    const double hi = std::max(p1[d], p2[d]);
                    const double spread = cfg.blend_alpha * (hi - lo);
                    child[d] = rng.uniform(lo - spread, hi + spread);
                }
            }
            for (std::size_t d = 0; d < space.dims(); ++d) {
                if (rng.uniform() < cfg.mutation_rate) child[d] += rng.normal(0.0, cfg.mutation_sigma * space.range(d));
            }
            space.clamp(child);
            children.push_back(std::move(child));
        }
        const auto child_costs = evaluate_batch(cost, children, cfg.threads);
        result.evaluations += children.size();
        for (std::size_t i = 0; i < children.size(); ++i) {
            next.push_back(std::move(children[i]));
            next_costs.push_back(child_costs[i]);
        }
        pop = std::move(next);
        costs = std::move(next_costs);

        best_idx = static_cast<std::size_t>(std::min_element(costs.begin(), costs.end()) - costs.begin());
        if (costs[best_idx] < result.best_cost) {
            result.best = pop[best_idx];
            result.best_cost = costs[best_idx];
        }
        result.cost_trace.push_back(result.best_cost);
    }
    result.final_population = std::move(pop);
    return result;
}

}  // namespace heliid
