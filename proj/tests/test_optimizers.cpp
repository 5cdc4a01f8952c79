#include <cmath>
#include <mutex>
#include <vector>

#include <gtest/gtest.h>

#include "heliid/ga.hpp"
#include "heliid/identify.hpp"
#include "heliid/iwo.hpp"
#include "heliid/nelder_mead.hpp"
#include "heliid/pem.hpp"
#include "heliid/search_space.hpp"
#include "heliid/synthetic.hpp"

using namespace heliid;

namespace {

double sphere(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

void expect_non_increasing(const std::vector<double>& trace)
{
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1]) << i;
}

// Records every point a cost function is asked about.
struct Recorder {
    SearchSpace space;
    std::mutex mu;
    std::size_t outside = 0;
    std::size_t calls = 0;

    CostFunction wrap(CostFunction f)
    {
        return [this, f](std::span<const double> x) {
            {
                std::lock_guard lock(mu);
                ++calls;
                if (!space.contains(x)) ++outside;
            }
            return f(x);
        };
    }
};

}  // namespace

TEST(SigmaSchedule, Endpoints)
{
    IwoConfig cfg;
    cfg.iter_max = 200;
    cfg.sigma_initial = 0.1;
    cfg.sigma_final = 0.001;
    cfg.n = 3;
    EXPECT_EQ(sigma_schedule(cfg, 0), cfg.sigma_initial);
    EXPECT_EQ(sigma_schedule(cfg, cfg.iter_max), cfg.sigma_final);
    EXPECT_DOUBLE_EQ(sigma_schedule(cfg, 100), 0.001 + 0.125 * 0.099);
}

TEST(SigmaSchedule, StrictlyDecreasing)
{
    IwoConfig cfg;
    cfg.iter_max = 1000;
    for (int i = 0; i < cfg.iter_max; ++i) EXPECT_GT(sigma_schedule(cfg, i), sigma_schedule(cfg, i + 1)) << i;
    for (double n : {1.0, 2.0, 5.0}) {
        cfg.n = n;
        for (int i = 0; i < cfg.iter_max; ++i) EXPECT_GE(sigma_schedule(cfg, i), sigma_schedule(cfg, i + 1));
    }
}

TEST(Reproduce, LinearSeedCounts)
{
    IwoConfig cfg;
    cfg.seeds_min = 0;
    cfg.seeds_max = 5;
    EXPECT_EQ(reproduce(std::vector<double>{-1, -3}, cfg), (std::vector<int>{5, 0}));
    cfg.seeds_max = 4;
    EXPECT_EQ(reproduce(std::vector<double>{-1, -2, -3}, cfg), (std::vector<int>{4, 2, 0}));
    cfg.seeds_min = 1;
    EXPECT_EQ(reproduce(std::vector<double>{-2, -2, -2}, cfg), (std::vector<int>{1, 1, 1}));
    EXPECT_THROW(reproduce(std::vector<double>{}, cfg), InputError);
}

TEST(Disperse, ZeroSigmaAndFrozen)
{
    const SearchSpace space({-5, -5, 0}, {5, 5, 0}, {false, false, true});
    Rng rng(1);
    const std::vector<double> parent{1.0, -2.0, 0.0};
    EXPECT_EQ(disperse(parent, 0.0, space, rng), parent);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(disperse(parent, 0.5, space, rng)[2], 0.0);
}

TEST(Disperse, SampleStatistics)
{
    const auto space = SearchSpace::cube(3, 10.0);
    Rng rng(99);
    const std::vector<double> parent{0.5, -1.0, 2.0};
    const double sigma_frac = 0.01;
    const double target = sigma_frac * 20.0;
    const int n = 10000;
    std::vector<double> sum(3, 0.0), sum_sq(3, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto c = disperse(parent, sigma_frac, space, rng);
        for (std::size_t d = 0; d < 3; ++d) {
            sum[d] += c[d];
            sum_sq[d] += c[d] * c[d];
        }
    }
    for (std::size_t d = 0; d < 3; ++d) {
        const double mean = sum[d] / n;
        const double sd = std::sqrt(sum_sq[d] / n - mean * mean);
        EXPECT_LT(std::abs(mean - parent[d]), 4.0 * target / std::sqrt(n));
        EXPECT_NEAR(sd, target, 0.05 * target);
    }
}

TEST(Disperse, ClampsToBounds)
{
    const auto space = SearchSpace::cube(4, 1.0);
    Rng rng(3);
    for (int i = 0; i < 500; ++i) EXPECT_TRUE(space.contains(disperse(std::vector<double>{0.9, -0.9, 0, 1}, 2.0, space, rng)));
}

namespace {

std::vector<Plant> plants(const std::vector<double>& costs)
{
    std::vector<Plant> out;
    for (std::size_t i = 0; i < costs.size(); ++i) out.push_back({{static_cast<double>(i)}, costs[i], 0, i});
    return out;
}

}  // namespace

TEST(CompetitiveExclusion, AtCapacityUnchanged)
{
    const auto pop = plants({5, 1, 3});
    const auto out = competitive_exclusion(pop, 3);
    ASSERT_EQ(out.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(out[i].id, pop[i].id);
}

TEST(CompetitiveExclusion, KeepsBestHalf)
{
    const auto out = competitive_exclusion(plants({8, 3, 6, 1, 7, 2, 5, 4}), 4);
    ASSERT_EQ(out.size(), 4u);
    std::vector<double> kept;
    for (const auto& p : out) kept.push_back(p.cost);
    EXPECT_EQ(kept, (std::vector<double>{1, 2, 3, 4}));
}

TEST(CompetitiveExclusion, TiesPreferOlderThenInsertion)
{
    std::vector<Plant> pop = {
        {{0}, 1.0, 0, 0}, {{1}, 2.0, 3, 1}, {{2}, 2.0, 1, 2}, {{3}, 2.0, 1, 3}, {{4}, 9.0, 0, 4},
    };
    const auto out = competitive_exclusion(pop, 3);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0].id, 0u);
    EXPECT_EQ(out[1].id, 2u);
    EXPECT_EQ(out[2].id, 3u);
}

TEST(CompetitiveExclusion, ParentRescue)
{
    // Parent 5 ranks outside the cap but its seed 6 is the best plant.
    std::vector<Plant> pop = {
        {{0}, 1.0, 0, 0}, {{1}, 2.0, 0, 1}, {{2}, 3.0, 0, 2}, {{3}, 4.0, 0, 3},
        {{4}, 5.0, 0, 4}, {{5}, 9.0, 0, 5}, {{6}, 0.5, 1, 6, 5},
    };
    const auto plain = competitive_exclusion(pop, 4);
    const auto rescued = competitive_exclusion(pop, 4, true);
    auto has = [](const std::vector<Plant>& v, std::size_t id) {
        return std::any_of(v.begin(), v.end(), [&](const Plant& p) { return p.id == id; });
    };
    EXPECT_FALSE(has(plain, 5));
    EXPECT_TRUE(has(rescued, 5));
    EXPECT_EQ(rescued.size(), 4u);
    EXPECT_TRUE(has(rescued, 6));
    EXPECT_FALSE(has(rescued, 2));
}

TEST(Iwo, SphereBenchmark)
{
    const auto space = SearchSpace::cube(5, 5.0);
    int solved = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        IwoConfig cfg;
        cfg.iter_max = 200;
        cfg.pop_max = 25;
        cfg.rng_seed = seed;
        const auto r = run_iwo(sphere, space, cfg);
        solved += r.best_cost < 1e-3;
    }
    EXPECT_GE(solved, 9);
}

TEST(Iwo, ZeroIterationsReturnsInitialBest)
{
    IwoConfig cfg;
    cfg.iter_max = 0;
    const auto r = run_iwo(sphere, SearchSpace::cube(3, 1.0), cfg);
    EXPECT_EQ(r.cost_trace.size(), 1u);
    EXPECT_EQ(r.evaluations, static_cast<std::size_t>(cfg.pop_initial));
    EXPECT_EQ(r.best_cost, r.cost_trace.back());
}

TEST(Iwo, InvariantsAndDeterminism)
{
    Recorder rec{SearchSpace::cube(6, 2.0)};
    IwoConfig cfg;
    cfg.iter_max = 60;
    cfg.rng_seed = 17;
    const auto a = run_iwo(rec.wrap(sphere), rec.space, cfg);
    expect_non_increasing(a.cost_trace);
    EXPECT_EQ(a.best_cost, a.cost_trace.back());
    EXPECT_EQ(a.cost_trace.size(), 61u);
    EXPECT_EQ(rec.outside, 0u);
    EXPECT_EQ(rec.calls, a.evaluations);
    EXPECT_LE(a.final_population.size(), static_cast<std::size_t>(cfg.pop_max));
    EXPECT_EQ(a.rng_seed, 17u);

    cfg.threads = 3;
    const auto b = run_iwo(sphere, rec.space, cfg);
    EXPECT_EQ(a.best, b.best);
    EXPECT_EQ(a.cost_trace, b.cost_trace);
    EXPECT_EQ(a.final_population, b.final_population);
}

TEST(Iwo, FeasibleInitRedrawsBadStarts)
{
    // Everything outside the unit ball scores a flat ceiling.
    CostFunction walled = [](std::span<const double> x) {
        const double s = sphere(x);
        return s < 1.0 ? s : 100.0;
    };
    IwoConfig cfg;
    cfg.iter_max = 0;
    cfg.init.reject_at = 100.0;
    cfg.init.max_draws = 10000;
    const auto r = run_iwo(walled, SearchSpace::cube(4, 2.0), cfg);
    EXPECT_LT(r.best_cost, 1.0);
    EXPECT_GT(r.evaluations, static_cast<std::size_t>(cfg.pop_initial));
    for (const auto& x : r.final_population) EXPECT_LT(sphere(x), 1.0);
}

TEST(Iwo, RejectsBadConfig)
{
    IwoConfig cfg;
    cfg.pop_initial = 30;
    EXPECT_THROW(run_iwo(sphere, SearchSpace::cube(2, 1.0), cfg), InputError);
    cfg = {};
    cfg.sigma_final = 0.5;
    EXPECT_THROW(run_iwo(sphere, SearchSpace::cube(2, 1.0), cfg), InputError);
}

TEST(Ga, SphereBenchmark)
{
    const auto space = SearchSpace::cube(5, 5.0);
    int solved = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GaConfig cfg;
        cfg.rng_seed = seed;
        const auto r = run_ga(sphere, space, cfg);
        solved += r.best_cost < 1e-2;
    }
    EXPECT_GE(solved, 9);
}

TEST(Ga, FrozenPopulationStaysPut)
{
    GaConfig cfg;
    cfg.generations = 20;
    cfg.pop_size = 6;
    cfg.crossover_rate = 0.0;
    cfg.mutation_rate = 0.0;
    cfg.initial_population.assign(6, {0.3, -0.2});
    const auto r = run_ga(sphere, SearchSpace::cube(2, 1.0), cfg);
    for (const auto& x : r.final_population) EXPECT_EQ(x, (std::vector<double>{0.3, -0.2}));
    EXPECT_EQ(r.best, (std::vector<double>{0.3, -0.2}));
}

TEST(Ga, InvariantsAndDeterminism)
{
    Recorder rec{SearchSpace::cube(6, 2.0)};
    GaConfig cfg;
    cfg.generations = 50;
    cfg.rng_seed = 5;
    const auto a = run_ga(rec.wrap(sphere), rec.space, cfg);
    expect_non_increasing(a.cost_trace);
    EXPECT_EQ(a.best_cost, a.cost_trace.back());
    EXPECT_EQ(rec.outside, 0u);
    cfg.threads = 2;
    const auto b = run_ga(sphere, rec.space, cfg);
    EXPECT_EQ(a.best, b.best);
    EXPECT_EQ(a.cost_trace, b.cost_trace);
}

TEST(NelderMead, QuadraticBowl)
{
    const std::vector<double> centre{1.5, -0.5, 2.0, 0.25};
    CostFunction bowl = [&](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * (x[i] - centre[i]) * (x[i] - centre[i]);
        return s;
    };
    Recorder rec{SearchSpace::cube(4, 5.0)};
    const auto r = run_nelder_mead(rec.wrap(bowl), rec.space, std::vector<double>(4, 0.0), {});
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.best[i], centre[i], 1e-4);
    expect_non_increasing(r.cost_trace);
    EXPECT_EQ(rec.outside, 0u);
}

TEST(NelderMead, StartAtOptimumKeepsCost)
{
    const auto r = run_nelder_mead(sphere, SearchSpace::cube(3, 1.0), std::vector<double>(3, 0.0), {});
    EXPECT_EQ(r.best_cost, 0.0);
    EXPECT_EQ(r.best, std::vector<double>(3, 0.0));
}

TEST(NelderMead, FrozenDimensionsStayFixed)
{
    const SearchSpace space({-2, 0, -2}, {2, 0, 2}, {false, true, false});
    const auto r = run_nelder_mead(sphere, space, {1.0, 0.0, -1.0}, {});
    EXPECT_EQ(r.best[1], 0.0);
    EXPECT_LT(r.best_cost, 1e-8);
}

TEST(SearchSpace, HelicopterBounds)
{
    const auto space = helicopter_search_space();
    EXPECT_EQ(space.dims(), kNumParams);
    EXPECT_DOUBLE_EQ(space.upper(index_of(Param::L_b)), 3.0 * 133.6111);
    EXPECT_DOUBLE_EQ(space.lower(index_of(Param::L_u)), -1.0);
    for (Param p : kForwardFlightParams) {
        EXPECT_TRUE(space.frozen(index_of(p)));
        EXPECT_EQ(space.lower(index_of(p)), 0.0);
        EXPECT_EQ(space.upper(index_of(p)), 0.0);
    }
    EXPECT_TRUE(space.contains(table2_parameters().flatten()));
    const auto freed = helicopter_search_space(table2_parameters(), {.free_forward_flight = true});
    EXPECT_FALSE(freed.frozen(index_of(Param::L_w)));
    EXPECT_EQ(freed.upper(index_of(Param::L_w)), 1.0);
}

TEST(SearchSpace, RejectsInvertedBounds)
{
    EXPECT_THROW(SearchSpace({1.0}, {0.0}, {false}), InputError);
}

namespace {

TimeSeriesLog small_benchmark(double noise, bool full_state = false)
{
    SyntheticSpec spec;
    spec.full_state = full_state;
    spec.model.flap_sign_symmetric = true;
    spec.noise_fraction = noise;
    spec.duration_s = 10.0;
    spec.period_s = 4.5;
    return synthesize(table2_parameters(), spec);
}

}  // namespace

TEST(Pem, OneStepErrorVanishesAtTruth)
{
    const OneStepPredictionError full(small_benchmark(0.0, true), {.flap_sign_symmetric = true});
    EXPECT_LT(full(table2_parameters()), 1e-20);
    EXPECT_GT(full(ParameterSet{}), 1e-8);
    // With r_fb, c and d unmeasured they read as zero and the truth is no
    // longer exact.
    const OneStepPredictionError partial(small_benchmark(0.0), {.flap_sign_symmetric = true});
    EXPECT_GT(partial(table2_parameters()), 1e-8);
}

TEST(Pem, RunsFromMidpointWithinBounds)
{
    const auto log = small_benchmark(0.01);
    const auto space = helicopter_search_space();
    PemConfig cfg;
    cfg.max_evaluations = 2000;
    const auto r = run_pem(log, space, cfg, {.flap_sign_symmetric = true});
    EXPECT_TRUE(space.contains(r.best));
    EXPECT_LE(r.evaluations, cfg.max_evaluations + 1);
    expect_non_increasing(r.cost_trace);
    const auto again = run_pem(log, space, cfg, {.flap_sign_symmetric = true});
    EXPECT_EQ(r.best, again.best);
}

TEST(Identify, IwoOnHelicopterIsDeterministic)
{
    const auto log = small_benchmark(0.01);
    const auto space = helicopter_search_space();
    IwoConfig cfg;
    cfg.iter_max = 5;
    cfg.rng_seed = 3;
    FitnessConfig fc;
    fc.model.flap_sign_symmetric = true;
    const auto a = run_iwo(log, space, cfg, fc);
    const auto b = run_iwo(log, space, cfg, fc);
    EXPECT_EQ(a.best, b.best);
    EXPECT_EQ(a.cost_trace, b.cost_trace);
    EXPECT_TRUE(space.contains(a.best));
    EXPECT_THROW(run_iwo(log, SearchSpace::cube(3, 1.0), cfg, fc), InputError);
}
