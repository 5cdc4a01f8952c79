#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "heliid/excitation.hpp"
#include "heliid/fitness.hpp"
#include "heliid/rng.hpp"
#include "heliid/synthetic.hpp"

using namespace heliid;

namespace {

// Population Pearson coefficient evaluated term by term in extended precision.
double pearson_oracle(const std::vector<double>& a, const std::vector<double>& b)
{
    const auto n = static_cast<long double>(a.size());
    long double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    long double va = 0, vb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    const long double sa = std::sqrt(va / n);
    const long double sb = std::sqrt(vb / n);
    long double sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - ma) / sa * ((b[i] - mb) / sb);
    return static_cast<double>(sum / n);
}

SyntheticSpec symmetric_spec(double noise)
{
    SyntheticSpec spec;
    spec.model.flap_sign_symmetric = true;
    spec.noise_fraction = noise;
    return spec;
}

FitnessConfig symmetric_config()
{
    FitnessConfig fc;
    fc.model.flap_sign_symmetric = true;
    return fc;
}

}  // namespace

TEST(Pearson, SelfAndAnti)
{
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{3, 2, 1};
    EXPECT_DOUBLE_EQ(*pearson(a, a), 1.0);
    EXPECT_DOUBLE_EQ(*pearson(a, b), -1.0);
}

TEST(Pearson, HandComputed)
{
    // Means 2.5 and 2.75; centered products sum to 3.5; sums of squares 5
    // and 8.75.
    const std::vector<double> a{1, 2, 4, 3};
    const std::vector<double> b{2, 1, 3, 5};
    EXPECT_NEAR(*pearson(a, b), 3.5 / std::sqrt(5.0 * 8.75), 1e-15);
}

TEST(Pearson, MatchesBruteForceOracle)
{
    Rng rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = static_cast<std::size_t>(2 + rng.below(200));
        std::vector<double> a(n), b(n);
        const double scale = std::pow(10.0, rng.uniform(-3, 3));
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = scale * rng.normal() + rng.uniform(-5, 5);
            b[i] = 0.5 * a[i] + rng.normal();
        }
        const auto rho = pearson(a, b);
        ASSERT_TRUE(rho.has_value());
        EXPECT_NEAR(*rho, pearson_oracle(a, b), 1e-12);
    }
}

TEST(Pearson, SymmetryAndAffineInvariance)
{
    Rng rng(5);
    std::vector<double> a(64), b(64), pos(64), neg(64);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.normal();
        b[i] = a[i] + rng.normal();
        pos[i] = 3.0 * a[i] + 7.0;
        neg[i] = -2.0 * a[i] + 1.0;
    }
    EXPECT_NEAR(*pearson(a, b), *pearson(b, a), 1e-15);
    EXPECT_NEAR(*pearson(pos, b), *pearson(a, b), 1e-13);
    EXPECT_NEAR(*pearson(neg, b), -*pearson(a, b), 1e-13);
}

TEST(Pearson, FlatSeriesUndefined)
{
    const std::vector<double> flat(10, 2.0);
    std::vector<double> ramp(10);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
    EXPECT_FALSE(pearson(flat, ramp).has_value());
    EXPECT_FALSE(pearson(ramp, flat).has_value());
}

TEST(Pearson, Rejections)
{
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{1, 2};
    const std::vector<double> one{1};
    EXPECT_THROW(pearson(a, b), InputError);
    EXPECT_THROW(pearson(one, one), InputError);
}

TEST(Evaluate, NoiselessTruthIsPerfect)
{
    const auto log = synthesize(table2_parameters(), symmetric_spec(0.0));
    const auto rep = evaluate(table2_parameters(), log, symmetric_config());
    EXPECT_LT(rep.cost, 1e-6);
    EXPECT_FALSE(rep.divergent);
    EXPECT_EQ(rep.per_state_rho.size(), 10u);
    auto fs = symmetric_config();
    fs.initial_state = InitialState::first_sample;
    EXPECT_LT(evaluate(table2_parameters(), log, fs).cost, 1e-6);
}

TEST(Evaluate, DivergentScoresCeiling)
{
    const auto log = synthesize(table2_parameters(), symmetric_spec(0.0));
    auto p = table2_parameters();
    p[Param::Z_w] = 60.0;
    const auto rep = evaluate(p, log, symmetric_config());
    EXPECT_TRUE(rep.divergent);
    EXPECT_EQ(rep.cost, 40.0);
    EXPECT_EQ(rep.fitness(), -40.0);
}

TEST(Evaluate, NoisyTruthRegressionFixture)
{
    const auto log = synthesize(table2_parameters(), symmetric_spec(0.01));
    const auto [train, validate] = split_train_validate(log, 0.5);
    const double cost = evaluate(table2_parameters(), train, symmetric_config()).cost;
    EXPECT_NEAR(cost, 0.0085, 0.00085);
}

TEST(Evaluate, CostIsSumOfPenalties)
{
    Rng rng(8);
    const auto log = synthesize(table2_parameters(), symmetric_spec(0.01));
    const FitnessEvaluator eval(log, symmetric_config());
    for (int trial = 0; trial < 20; ++trial) {
        auto v = table2_parameters().flatten();
        for (auto& x : v) x *= 1.0 + 0.3 * rng.normal();
        const auto rep = eval.evaluate(ParameterSet::unflatten(v));
        EXPECT_GE(rep.cost, 0.0);
        EXPECT_LE(rep.cost, eval.ceiling());
        if (rep.divergent) continue;
        double sum = 0.0;
        for (const auto& sc : rep.per_state_rho) {
            const double term = correlation_penalty(sc.rho);
            EXPECT_GE(term, 0.0);
            EXPECT_LE(term, 4.0);
            sum += term;
        }
        EXPECT_DOUBLE_EQ(rep.cost, sum);
    }
}

TEST(Evaluate, UndefinedRhoCountsAsZero)
{
    EXPECT_EQ(correlation_penalty(std::nullopt), 1.0);
    EXPECT_EQ(correlation_penalty(1.0), 0.0);
    EXPECT_EQ(correlation_penalty(-1.0), 4.0);
}

TEST(Evaluate, TruthBeatsLargePerturbations)
{
    Rng rng(77);
    const auto log = synthesize(table2_parameters(), symmetric_spec(0.0));
    const FitnessEvaluator eval(log, symmetric_config());
    const double truth = eval.cost(table2_parameters());
    int violations = 0;
    for (int trial = 0; trial < 50; ++trial) {
        auto v = table2_parameters().flatten();
        for (auto& x : v) {
            const double mag = rng.uniform(0.5, 1.0);
            x *= 1.0 + (rng.uniform() < 0.5 ? -mag : mag);
        }
        if (eval.cost(ParameterSet::unflatten(v)) < truth) ++violations;
    }
    EXPECT_LE(violations, 2);
}

TEST(Evaluate, ScoresOnlyMeasuredStates)
{
    auto spec = symmetric_spec(0.0);
    spec.full_state = true;
    const auto log = synthesize(table2_parameters(), spec);
    const FitnessEvaluator all(log, symmetric_config());
    EXPECT_EQ(all.scored_states().size(), 13u);
    EXPECT_EQ(all.ceiling(), 52.0);

    auto subset = symmetric_config();
    subset.scored = {State::p, State::q};
    EXPECT_EQ(FitnessEvaluator(log, subset).evaluate(table2_parameters()).per_state_rho.size(), 2u);
}

TEST(Evaluate, LeastSquaresStartRecoversOffset)
{
    // Data that starts away from trim: the fitted start should reproduce it
    // where a zero start would not.
    auto mats = build_matrices(table2_parameters(), {.flap_sign_symmetric = true});
    const auto inputs = synthetic_inputs(symmetric_spec(0.0));
    StateVector x0 = StateVector::Zero();
    x0(idx(State::u)) = 0.4;
    x0(idx(State::theta)) = -0.02;
    x0(idx(State::c)) = 0.01;
    const auto sim = simulate(mats, x0, inputs);
    ASSERT_FALSE(sim.divergent);
    TimeSeriesLog log(inputs.sample_rate_hz());
    for (State s : kMeasurableStates) {
        auto ch = sim.log.channel(state_name(s));
        log.add_channel(state_name(s), {ch.begin(), ch.end()});
    }
    for (const auto& name : inputs.channel_names()) {
        auto ch = inputs.channel(name);
        log.add_channel(name, {ch.begin(), ch.end()});
    }
    const auto rep = evaluate(table2_parameters(), log, symmetric_config());
    EXPECT_LT(rep.cost, 1e-6);
    EXPECT_NEAR(rep.initial_state(idx(State::u)), 0.4, 1e-4);
}

TEST(Evaluate, RejectsMissingControls)
{
    TimeSeriesLog log(100.0);
    log.add_channel("p", {0.0, 1.0, 2.0});
    log.add_channel("delta_lat", {0.0, 0.0, 0.0});
    EXPECT_THROW(evaluate(table2_parameters(), log), DataError);
}

TEST(Evaluate, RejectsLogWithoutStates)
{
    ExcitationSpec spec;
    const auto log = generate_3211(spec, 100.0);
    EXPECT_THROW(evaluate(table2_parameters(), log), DataError);
}

TEST(Gramian, MatchesDirectSum)
{
    Rng rng(4);
    StateMatrix phi;
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi(i) = rng.uniform(-0.2, 0.2);
    StateVector w;
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(0, 1);
    for (std::size_t n : {1u, 2u, 7u, 64u, 100u}) {
        StateMatrix direct = StateMatrix::Zero();
        StateMatrix pk = StateMatrix::Identity();
        for (std::size_t k = 0; k < n; ++k) {
            direct += pk.transpose() * w.asDiagonal() * pk;
            pk = phi * pk;
        }
        EXPECT_TRUE(observability_gramian(phi, w, n).isApprox(direct, 1e-12)) << n;
    }
}
