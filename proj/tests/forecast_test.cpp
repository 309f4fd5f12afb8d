#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "edm/forecast.hpp"
#include "edm/systems.hpp"
#include "oracles.hpp"

namespace edm {
namespace {

TEST(SimplexWeights, Symmetric)
{
    const auto w = simplex_weights(std::vector<double>{1, 1, 1});
    for (double v : w.weights) {
        EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
    }
}

TEST(SimplexWeights, ZeroDistanceLimit)
{
    const auto w = simplex_weights(std::vector<double>{0, 0, 5});
    EXPECT_EQ(w.weights, (std::vector<double>{0.5, 0.5, 0.0}));
}

// Reference values: e^-1, e^-2, e^-3 normalised.
TEST(SimplexWeights, ExponentialDecay)
{
    const auto w = simplex_weights(std::vector<double>{1, 2, 3});
    const auto want = oracle::weights({1, 2, 3});
    ASSERT_EQ(w.weights.size(), 3u);
    EXPECT_NEAR(w.weights[0], 0.665241, 1e-6);
    EXPECT_NEAR(w.weights[1], 0.244728, 1e-6);
    EXPECT_NEAR(w.weights[2], 0.090031, 1e-6);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(w.weights[i], want[i], 1e-15);
    }
}

TEST(SimplexWeights, Errors)
{
    EXPECT_THROW(simplex_weights(std::vector<double>{}), DataError);
    EXPECT_THROW(simplex_weights(std::vector<double>{-1, 2}), DataError);
    EXPECT_THROW(simplex_weights(std::vector<double>{2, 1}), DataError);
}

// exp(-d/d1) underflows to 0 for far neighbours when d1 is tiny.
TEST(SimplexWeights, SumToOneAndNonNegative)
{
    std::mt19937_64 gen(9);
    std::exponential_distribution<double> ex(1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> d(2 + gen() % 10);
        for (auto& v : d) {
            v = ex(gen);
        }
        std::sort(d.begin(), d.end());
        const auto w = simplex_weights(d);
        EXPECT_NEAR(std::accumulate(w.weights.begin(), w.weights.end(), 0.0), 1.0, 1e-12);
        EXPECT_GT(w.weights[0], 0.0);
        for (double v : w.weights) {
            EXPECT_GE(v, 0.0);
        }
    }
}

TEST(SimplexForecast, ConstantSeriesPredictsConstant)
{
    const TimeSeries s("c", std::vector<double>(50, 0.7));
    const auto m = embed(s, {3, 1, 1});
    const std::vector<double> q{0.1, 0.4, 0.9};
    EXPECT_DOUBLE_EQ(simplex_forecast(m, q, std::nullopt, s, 1).value, 0.7);
}

TEST(SimplexForecast, ExactMatchDominates)
{
    const TimeSeries s("s", {0.0, 10.0, 20.0, 30.0, 40.0});
    const auto m = embed(s, {1, 1, 1});
    const std::vector<double> q{20.0};
    const auto p = simplex_forecast(m, q, std::nullopt, s, 1);
    EXPECT_DOUBLE_EQ(p.value, 30.0);
    EXPECT_EQ(p.weights.neighbor_times.front(), 2);
}

TEST(SimplexForecast, SkipsNeighboursWithoutFuture)
{
    const TimeSeries s("s", {0.0, 1.0, 2.0, 3.0});
    const auto m = embed(s, {1, 1, 1});
    const std::vector<double> q{3.0};
    const auto p = simplex_forecast(m, q, std::nullopt, s, 1);
    for (auto t : p.weights.neighbor_times) {
        EXPECT_LT(t, 3);
    }
    EXPECT_THROW(simplex_forecast(embed(TimeSeries("s", {0.0, 1.0}), {1, 1, 1}), q, std::nullopt,
                                  TimeSeries("s", {0.0, 1.0}), 1),
                 DataError);
}

// Forecast is a convex combination of the neighbour futures.
TEST(SimplexForecast, ConvexCombination)
{
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 200; ++trial) {
        const int e = 1 + static_cast<int>(gen() % 4);
        const auto v = oracle::white_noise(30 + gen() % 200, static_cast<unsigned>(trial));
        const TimeSeries s("s", v);
        const auto m = embed(s, {e, 1, 1});
        std::vector<double> q(static_cast<std::size_t>(e));
        for (auto& c : q) {
            c = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        }
        const auto p = simplex_forecast(m, q, std::nullopt, s, 1);
        ASSERT_EQ(p.weights.weights.size(), static_cast<std::size_t>(e) + 1);
        EXPECT_NEAR(std::accumulate(p.weights.weights.begin(), p.weights.weights.end(), 0.0), 1.0, 1e-12);
        double lo = 1e300, hi = -1e300, manual = 0.0;
        for (std::size_t i = 0; i < p.weights.neighbor_times.size(); ++i) {
            const double f = s.at_time(p.weights.neighbor_times[i] + 1);
            lo = std::min(lo, f);
            hi = std::max(hi, f);
            manual += p.weights.weights[i] * f;
        }
        EXPECT_GE(p.value, lo - 1e-12);
        EXPECT_LE(p.value, hi + 1e-12);
        EXPECT_NEAR(p.value, manual, 1e-12);
    }
}

TEST(LooSkill, LogisticMapIsPredictable)
{
    const TimeSeries s("x", oracle::logistic(502));
    const auto skill = loo_skill(s, {2, 1, 1});
    EXPECT_EQ(skill.n_pairs, 500u);
    EXPECT_GT(skill.rho, 0.99);
}

TEST(LooSkill, LinearTrend)
{
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 0.0);
    EXPECT_GT(loo_skill(TimeSeries("lin", v), {1, 1, 1}).rho, 0.99);
}

TEST(LooSkill, WhiteNoiseIsNot)
{
    EXPECT_LT(std::abs(loo_skill(TimeSeries("n", oracle::white_noise(500, 1)), {2, 1, 1}).rho), 0.2);
}

TEST(LooSkill, CoupledLogisticX)
{
    const auto xy = systems::coupled_logistic(1000);
    EXPECT_GT(loo_skill(xy[0], {2, 1, 1}).rho, 0.99);
}

TEST(LooSkill, TooShort)
{
    EXPECT_THROW(loo_skill(TimeSeries("s", {1, 2, 3, 4}), {3, 1, 1}), DataError);
}

TEST(LooSkill, InvariantUnderOffset)
{
    auto v = oracle::logistic(300);
    const auto base = loo_predictions(TimeSeries("x", v), {2, 1, 1});
    for (auto& x : v) {
        x += 5.0;
    }
    const auto shifted = loo_predictions(TimeSeries("x", v), {2, 1, 1});
    ASSERT_EQ(base.predicted.size(), shifted.predicted.size());
    for (std::size_t i = 0; i < base.predicted.size(); ++i) {
        EXPECT_NEAR(shifted.predicted[i], base.predicted[i] + 5.0, 1e-9);
    }
    const auto a = skill_stats(base.observed, base.predicted);
    const auto b = skill_stats(shifted.observed, shifted.predicted);
    EXPECT_NEAR(a.rho, b.rho, 1e-9);
    EXPECT_NEAR(a.mae, b.mae, 1e-9);
}

TEST(LooSkill, Deterministic)
{
    const TimeSeries s("x", oracle::white_noise(300, 4));
    const auto a = loo_predictions(s, {3, 1, 1});
    const auto b = loo_predictions(s, {3, 1, 1});
    EXPECT_EQ(a.predicted, b.predicted);
}

TEST(SplitSkill, TrainTestOnLogistic)
{
    const TimeSeries s("x", oracle::logistic(600));
    EXPECT_GT(split_skill(s, {2, 1, 1}, 0.5).rho, 0.99);
    EXPECT_THROW(split_skill(s, {2, 1, 1}, 1.0), DataError);
    EXPECT_THROW(split_skill(TimeSeries("x", {1, 2, 3, 4, 5}), {2, 1, 1}, 0.5), DataError);
}

TEST(SelectE, LogisticMap)
{
    const TimeSeries s("x", oracle::logistic(1000));
    const auto es = e_range(1, 10);
    const auto scan = select_embedding_dimension(s, es);
    ASSERT_EQ(scan.rows.size(), 10u);
    EXPECT_GE(scan.best_e, 1);
    EXPECT_LE(scan.best_e, 3);
    EXPECT_GT(scan.best().skill.rho, 0.99);
    for (const auto& r : scan.rows) {
        EXPECT_LE(r.skill.rho, scan.best().skill.rho);
    }
}

TEST(SelectE, ConstantSeriesIsDegenerate)
{
    const TimeSeries s("c", std::vector<double>(100, 1.5));
    const auto es = e_range(2, 5);
    const auto scan = select_embedding_dimension(s, es);
    EXPECT_EQ(scan.best_e, 2);
    for (const auto& r : scan.rows) {
        EXPECT_TRUE(r.skill.degenerate);
    }
}

TEST(SelectE, CoupledLogisticScan)
{
    const auto xy = systems::coupled_logistic(1000);
    const auto es = e_range(1, 10);
    const auto scan = select_embedding_dimension(xy[0], es);
    ASSERT_EQ(scan.rows.size(), 10u);
    for (const auto& r : scan.rows) {
        EXPECT_TRUE(r.available);
        EXPECT_TRUE(std::isfinite(r.skill.rho));
    }
    EXPECT_TRUE(std::any_of(scan.rows.begin(), scan.rows.end(), [&](const auto& r) { return r.e_dim == scan.best_e; }));
}

TEST(SelectE, ShortSeriesMarksRowsUnavailable)
{
    const TimeSeries s("x", oracle::logistic(8));
    const auto es = e_range(1, 6);
    const auto scan = select_embedding_dimension(s, es);
    EXPECT_TRUE(scan.rows.front().available);
    EXPECT_FALSE(scan.rows.back().available);
    EXPECT_FALSE(scan.rows.back().note.empty());
    EXPECT_THROW(select_embedding_dimension(TimeSeries("x", {1, 2}), es), DataError);
    EXPECT_THROW(select_embedding_dimension(s, std::vector<int>{}), DataError);
}

} // namespace
} // namespace edm
