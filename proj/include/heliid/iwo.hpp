#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "heliid/error.hpp"
#include "heliid/optimizer.hpp"
#include "heliid/rng.hpp"
#include "heliid/search_space.hpp"

namespace heliid {

/// Invasive Weed Optimization settings. Dispersal widths are fractions of
/// each dimension's range.
struct IwoConfig {
    int iter_max = 1000;
    int pop_initial = 10;
    int pop_max = 25;
    int seeds_min = 0;
    int seeds_max = 5;
    double sigma_initial = 0.1;
    double sigma_final = 0.001;
    double n = 3.0;  // nonlinear modulation index
    std::uint64_t rng_seed = 1;
    /// Keep a parent that lost its place when one of its seeds ranks in the
    /// top quartile.
    bool parent_rescue = false;
    FeasibleInit init;
    unsigned threads = 1;

    void validate() const
    {
        if (iter_max < 0) throw InputError("iter_max must be non-negative");
        if (pop_initial < 1 || pop_max < pop_initial) throw InputError("need 1 <= pop_initial <= pop_max");
        if (seeds_min < 0 || seeds_max < seeds_min) throw InputError("need 0 <= seeds_min <= seeds_max");
        if (!(sigma_final > 0.0) || sigma_initial < sigma_final) {
            throw InputError("need 0 < sigma_final <= sigma_initial");
        }
        if (!(n > 0.0)) throw InputError("modulation index must be positive");
    }
};

/// Dispersal width at iteration `iter`:
///   sigma = ((iter_max - iter) / iter_max)^n (sigma_initial - sigma_final) + sigma_final
/// It starts at sigma_initial and decays nonlinearly to sigma_final.
inline double sigma_schedule(const IwoConfig& cfg, int iter)
{
    if (cfg.iter_max <= 0) return cfg.sigma_final;
    const int clamped = std::clamp(iter, 0, cfg.iter_max);
    const double remaining = static_cast<double>(cfg.iter_max - clamped) / static_cast<double>(cfg.iter_max);
    return std::pow(remaining, cfg.n) * (cfg.sigma_initial - cfg.sigma_final) + cfg.sigma_final;
}

/// Seeds per plant, linear in fitness between seeds_min (worst) and
/// seeds_max (best). A population with no fitness spread gets seeds_min
/// everywhere.
inline std::vector<int> reproduce(std::span<const double> fitnesses, const IwoConfig& cfg)
{
    if (fitnesses.empty()) throw InputError("reproduce: empty population");
    const auto [lo, hi] = std::minmax_element(fitnesses.begin(), fitnesses.end());
    const double worst = *lo;
    const double best = *hi;
    std::vector<int> seeds(fitnesses.size(), cfg.seeds_min);
    if (!(best > worst)) return seeds;
    const double span = static_cast<double>(cfg.seeds_max - cfg.seeds_min);
    for (std::size_t i = 0; i < fitnesses.size(); ++i) {
        const double frac = (fitnesses[i] - worst) / (best - worst);
        seeds[i] = cfg.seeds_min + static_cast<int>(std::lround(frac * span));
    }
    return seeds;
}

/// Normally distributed seed around `parent` (std dev sigma_fraction x
/// range per dimension), clamped back into the space.
inline std::vector<double> disperse(std::span<const double> parent, double sigma_fraction, const SearchSpace& space,
                                    Rng& rng)
{
    std::vector<double> child(parent.begin(), parent.end());
    for (std::size_t d = 0; d < space.dims(); ++d) {
        if (space.frozen(d)) continue;
        child[d] += rng.normal(0.0, sigma_fraction * space.range(d));
    }
    space.clamp(child);
    return child;
}

struct Plant {
    std::vector<double> x;
    double cost = 0.0;
    int born = 0;             // iteration the plant appeared in
    std::size_t id = 0;       // insertion order, unique per run
    std::size_t parent = std::numeric_limits<std::size_t>::max();
};

/// Ranks by cost, then age (older first), then insertion order.
inline bool ranks_before(const Plant& a, const Plant& b)
{
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.born != b.born) return a.born < b.born;
    return a.id < b.id;
}

/// Caps the population at pop_max by keeping the best-ranked plants of the
/// parents-plus-seeds union. With `parent_rescue`, an excluded parent
/// whose seed made the top quartile displaces the worst unprotected survivor.
inline std::vector<Plant> competitive_exclusion(std::vector<Plant> population, std::size_t pop_max,
                                                bool parent_rescue = false)
{
    if (population.size() <= pop_max) return population;
    std::sort(population.begin(), population.end(), ranks_before);
    if (!parent_rescue || pop_max == 0) {
        population.resize(pop_max);
        return population;
    }

    const std::size_t quartile = std::max<std::size_t>(1, pop_max / 4);
    std::vector<Plant> kept(population.begin(), population.begin() + static_cast<std::ptrdiff_t>(pop_max));
    std::vector<bool> protect(pop_max, false);
    for (std::size_t i = 0; i < quartile; ++i) protect[i] = true;

    for (std::size_t e = pop_max; e < population.size(); ++e) {
        const Plant& candidate = population[e];
        bool seed_in_top = false;
        for (std::size_t i = 0; i < quartile && !seed_in_top; ++i) seed_in_top = kept[i].parent == candidate.id;
        if (!seed_in_top) continue;
        std::size_t victim = pop_max;
        for (std::size_t i = pop_max; i-- > 0;) {
            if (!protect[i]) {
                victim = i;
                break;
            }
        }
        if (victim == pop_max) break;
        kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(victim));
        protect.erase(protect.begin() + static_cast<std::ptrdiff_t>(victim));
        kept.push_back(candidate);
        protect.push_back(true);
    }
    std::sort(kept.begin(), kept.end(), ranks_before);
    return kept;
}

/// Minimizes `cost` over `space`: random initial colony, then
/// reproduce -> disperse -> exclude for iter_max iterations. Deterministic
/// for a given rng_seed regardless of `threads`.
inline OptimizerResult run_iwo(const CostFunction& cost, const SearchSpace& space, const IwoConfig& cfg)
{
    cfg.validate();
    Rng rng(cfg.rng_seed);
    OptimizerResult result;
    result.rng_seed = cfg.rng_seed;

    std::size_t next_id = 0;
    auto start = initial_population(
        cost, static_cast<std::size_t>(cfg.pop_initial), [&] { return space.sample_uniform(rng); }, cfg.init,
        cfg.threads);
    result.evaluations += start.evaluations;
    std::vector<std::vector<double>> xs = std::move(start.xs);
    std::vector<double> costs = std::move(start.costs);

    std::vector<Plant> colony;
    for (std::size_t i = 0; i < xs.size(); ++i) colony.push_back({std::move(xs[i]), costs[i], 0, next_id++});

    auto best_of = [](const std::vector<Plant>& plants) {
        return *std::min_element(plants.begin(), plants.end(), ranks_before);
    };
    Plant best = best_of(colony);
    result.cost_trace.push_back(best.cost);

    for (int iter = 0; iter < cfg.iter_max; ++iter) {
        const double sigma = sigma_schedule(cfg, iter);
        std::vector<double> fitness(colony.size());
        for (std::size_t i = 0; i < colony.size(); ++i) fitness[i] = -colony[i].cost;
        const auto seeds = reproduce(fitness, cfg);

        xs.clear();
        std::vector<std::size_t> parents;
        for (std::size_t i = 0; i < colony.size(); ++i) {
            for (int s = 0; s < seeds[i]; ++s) {
                xs.push_back(disperse(colony[i].x, sigma, space, rng));
                parents.push_back(colony[i].id);
            }
        }
        costs = evaluate_batch(cost, xs, cfg.threads);
        result.evaluations += xs.size();
        for (std::size_t i = 0; i < xs.size(); ++i) {
            colony.push_back({std::move(xs[i]), costs[i], iter + 1, next_id++, parents[i]});
        }
        colony = competitive_exclusion(std::move(colony), static_cast<std::size_t>(cfg.pop_max), cfg.parent_rescue);

        const Plant& gen_best = best_of(colony);
        if (gen_best.cost < best.cost) best = gen_best;
        result.cost_trace.push_back(best.cost);
    }

    result.best = best.x;
    result.best_cost = best.cost;
    for (auto& p : colony) result.final_population.push_back(std::move(p.x));
    return result;
}

}  // namespace heliid
