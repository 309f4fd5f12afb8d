#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "edm/ccm.hpp"
#include "edm/systems.hpp"
#include "oracles.hpp"

namespace edm::systems {
namespace {

std::vector<double> values(const TimeSeries& s) { return {s.values().begin(), s.values().end()}; }

TEST(CoupledLogistic, FirstStep)
{
    const auto xy = coupled_logistic(2);
    EXPECT_DOUBLE_EQ(xy[0].values()[0], 0.2);
    EXPECT_DOUBLE_EQ(xy[1].values()[0], 0.5);
    EXPECT_NEAR(xy[0].values()[1], 0.606, 1e-12);
    EXPECT_NEAR(xy[1].values()[1], 0.942, 1e-12);
    EXPECT_EQ(xy[0].name(), "X");
    EXPECT_EQ(xy[1].name(), "Y");
}

TEST(UnidirectionalLogistic, FirstStep)
{
    const auto xy = unidirectional_logistic(2);
    EXPECT_NEAR(xy[0].values()[1], 0.606, 1e-12);
    EXPECT_NEAR(xy[1].values()[1], 0.91, 1e-12);
}

TEST(CoupledLogistic, DecouplesToLogisticMap)
{
    CoupledLogisticParams p;
    p.bxy = 0.0;
    p.byx = 0.0;
    const auto xy = coupled_logistic(300, p);
    EXPECT_EQ(values(xy[0]), oracle::logistic(300, 0.2));
    EXPECT_EQ(values(xy[1]), oracle::logistic(300, 0.5));
}

TEST(LaggedLogistic, ZeroCouplingIsIndependent)
{
    LaggedLogisticParams p;
    p.coupling = 0.0;
    const auto xy = lagged_logistic(300, p);
    EXPECT_EQ(values(xy[0]), oracle::logistic(300, 0.2));
    EXPECT_EQ(values(xy[1]), oracle::logistic(300, 0.5));
}

TEST(LaggedLogistic, UnitDelayIsOneStepDrive)
{
    LaggedLogisticParams p;
    p.delay = 1;
    const auto xy = lagged_logistic(200, p);
    std::vector<double> x{0.2}, y{0.5};
    for (int t = 0; t < 199; ++t) {
        x.push_back(3.8 * x[t] * (1 - x[t]));
        y.push_back(3.8 * y[t] * (1 - y[t]) - 0.1 * y[t] * x[t]);
    }
    EXPECT_EQ(values(xy[0]), x);
    EXPECT_EQ(values(xy[1]), y);
}

TEST(LaggedLogistic, DelayedDriver)
{
    const auto xy = lagged_logistic(50);
    const auto x = values(xy[0]);
    const auto y = values(xy[1]);
    // Before the driver exists it is held at x0.
    EXPECT_DOUBLE_EQ(y[1], 3.8 * y[0] * (1 - y[0]) - 0.1 * y[0] * 0.2);
    for (std::size_t t = 2; t < 49; ++t) {
        EXPECT_DOUBLE_EQ(y[t + 1], 3.8 * y[t] * (1 - y[t]) - 0.1 * y[t] * x[t - 1]);
    }
    LaggedLogisticParams bad;
    bad.delay = 0;
    EXPECT_THROW(lagged_logistic(10, bad), DataError);
}

TEST(Systems, StayInUnitInterval)
{
    for (const auto& s : {coupled_logistic(10000), unidirectional_logistic(10000), lagged_logistic(10000),
                          moran_fork(10000)}) {
        for (const auto& series : s) {
            for (double v : series.values()) {
                ASSERT_GE(v, 0.0);
                ASSERT_LE(v, 1.0);
            }
        }
    }
}

TEST(Systems, EscapingTrajectoryIsNumericalError)
{
    CoupledLogisticParams p;
    p.rx = 4.5;
    EXPECT_THROW(coupled_logistic(1000, p), NumericalError);
    p = {};
    p.x0 = 1.5;
    EXPECT_THROW(coupled_logistic(10, p), NumericalError);
}

TEST(Systems, Deterministic)
{
    EXPECT_EQ(coupled_logistic(500), coupled_logistic(500));
    EXPECT_EQ(moran_fork(500), moran_fork(500));
    EXPECT_EQ(lorenz(500), lorenz(500));
}

TEST(Systems, BurnInDropsLeadingSteps)
{
    const auto full = coupled_logistic(150);
    const auto cut = coupled_logistic(100, {}, 50);
    ASSERT_EQ(cut[0].size(), 100u);
    EXPECT_EQ(cut[0].values()[0], full[0].values()[50]);
    EXPECT_EQ(cut[1].values()[99], full[1].values()[149]);
    EXPECT_THROW(coupled_logistic(0), DataError);
}

TEST(Lorenz, FixedPointStaysPut)
{
    LorenzParams p;
    const double c = std::sqrt(p.beta * (p.rho - 1));
    p.initial = {c, c, p.rho - 1};
    const auto xyz = lorenz(1000, p);
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(xyz[k].values().back(), p.initial[k], 1e-9);
    }
}

TEST(Lorenz, StepHalvingAgrees)
{
    LorenzParams coarse;
    LorenzParams fine;
    fine.dt = coarse.dt / 2;
    const auto a = lorenz(101, coarse);
    const auto b = lorenz(201, fine);
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(a[k].values()[100], b[k].values()[200], 1e-4);
    }
}

// X and Z correlate with opposite signs on the two wings of the attractor.
TEST(Lorenz, WingDependentCorrelation)
{
    const auto xyz = lorenz(3000);
    const double left = windowed_pearson(xyz[0], xyz[2], 1100, 1149);
    const double right = windowed_pearson(xyz[0], xyz[2], 2000, 2049);
    EXPECT_LT(left, -0.5);
    EXPECT_GT(right, 0.5);
}

TEST(MoranFork, NoForcingNoCrossMap)
{
    MoranForkParams p;
    p.gamma = 0.0;
    const auto zab = moran_fork(1000, p);
    CcmConfig c;
    c.e_dim = 2;
    c.samples_per_size = 20;
    EXPECT_FALSE(ccm_curve(zab[0], zab[1], c).convergent());
    EXPECT_FALSE(ccm_curve(zab[1], zab[2], c).convergent());
}

TEST(Generate, ParsesKindsAndParams)
{
    EXPECT_EQ(parse_kind("moran-fork"), Kind::moran_fork);
    EXPECT_EQ(parse_kind("moran_fork"), Kind::moran_fork);
    EXPECT_STREQ(to_string(Kind::lagged_logistic), "lagged-logistic");
    EXPECT_THROW(parse_kind("henon"), DataError);

    GeneratorSpec spec;
    spec.kind = Kind::lagged_logistic;
    spec.steps = 100;
    spec.params = {{"delay", 4}};
    LaggedLogisticParams p;
    p.delay = 4;
    EXPECT_EQ(generate(spec), lagged_logistic(100, p));
    EXPECT_EQ(resolved_params(spec).at("delay"), 4.0);

    spec.params = {{"delay", 2.5}};
    EXPECT_THROW(generate(spec), DataError);
    spec.params = {{"gamma", 0.1}};
    EXPECT_THROW(generate(spec), DataError);
}

TEST(Generate, LorenzNames)
{
    GeneratorSpec spec;
    spec.kind = Kind::lorenz;
    spec.steps = 10;
    spec.burn_in = 5;
    const auto out = generate(spec);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[2].name(), "Z");
    EXPECT_EQ(out[0].size(), 10u);
}

} // namespace
} // namespace edm::systems
