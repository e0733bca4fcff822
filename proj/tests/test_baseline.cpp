#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "usplit/baseline.hpp"
#include "usplit/oracle.hpp"
#include "usplit/special.hpp"

using namespace usplit;

namespace {

ProblemSpec exp_sum(std::size_t n, double gamma)
{
    return ProblemSpec{std::vector<DistributionSpec>(n, Exponential(1.0)),
                       std::vector<Direction>(n, Direction::Increasing), SumImportance{}, gamma};
}

std::vector<double> table1_rates()
{
    std::vector<double> r;
    for (int i = 1; i <= 12; ++i)
        r.push_back(1.0 + 0.2 * (i - 1));
    return r;
}

std::vector<double> table1_weights()
{
    std::vector<double> w;
    for (int i = 1; i <= 12; ++i)
        w.push_back(i);
    return w;
}

} // namespace

TEST(NaiveMc, BelowSupportIsZero)
{
    auto const rep = naive_mc(exp_sum(3, -0.5), 10000, RngStream(1));
    EXPECT_EQ(rep.mean, 0.0);
    EXPECT_FALSE(rep.re.has_value());
}

TEST(NaiveMc, ExpSumMatchesIncompleteGamma)
{
    auto const rep = naive_mc(exp_sum(4, 1.5), 1000000, RngStream(2));
    double const exact = 0.06564245437845009;
    double const se = std::sqrt(exact * (1 - exact) / 1e6);
    EXPECT_NEAR(rep.mean, exact, 3.0 * se);
    EXPECT_EQ(rep.method, "naive");
    EXPECT_EQ(rep.m, 1000000u);
}

TEST(NaiveMc, ThreadCountDoesNotChangeResult)
{
    auto a = naive_mc(exp_sum(4, 1.5), 200000, RngStream(3), 1);
    auto b = naive_mc(exp_sum(4, 1.5), 200000, RngStream(3), 3);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.variance, b.variance);
}

TEST(NaiveMc, PoissonProblem)
{
    ProblemSpec const p{{Poisson(1), Poisson(1)},
                        {Direction::Increasing, Direction::Increasing},
                        WeightedSumImportance{{1, 2}},
                        2.0,
                        ProblemKind::PoissonNative};
    auto const rep = naive_mc(p, 100000, RngStream(4));
    double const exact = 3.5 * std::exp(-2.0);
    EXPECT_NEAR(rep.mean, exact, 3.0 * std::sqrt(exact * (1 - exact) / 1e5));
}

TEST(PoissonIs, ThetaArithmetic)
{
    auto const r = table1_rates();
    auto const w = table1_weights();
    EXPECT_NEAR(poisson_is_theta(r, w, 30.0), 0.15592515592515593, 1e-15);
    EXPECT_EQ(poisson_is_theta(r, w, 500.0), 1.0);
}

TEST(PoissonIs, UnitTiltIsNaiveMc)
{
    // gamma above the mean: theta = 1 and every weight is 1
    std::vector<double> const r{1.0, 1.0};
    std::vector<double> const w{1.0, 2.0};
    auto const is = poisson_is(r, w, 5.0, 50000, RngStream(6));
    ProblemSpec const p{{Poisson(1), Poisson(1)},
                        {Direction::Increasing, Direction::Increasing},
                        WeightedSumImportance{w},
                        5.0,
                        ProblemKind::PoissonNative};
    auto const naive = naive_mc(p, 50000, RngStream(6));
    EXPECT_EQ(is.mean, naive.mean);
    EXPECT_EQ(is.variance, naive.variance);
}

TEST(PoissonIs, SmallCaseMatchesEnumeration)
{
    std::vector<double> const r{1.0, 1.0};
    std::vector<double> const w{1.0, 2.0};
    auto const rep = poisson_is(r, w, 2.0, 100000, RngStream(7));
    double const exact = 0.4736734913281444;
    ASSERT_TRUE(rep.re.has_value());
    EXPECT_NEAR(rep.mean, exact, 3.0 * *rep.re * rep.mean);
    EXPECT_EQ(rep.method, "is");
}

TEST(PoissonIs, TableOneLowestThreshold)
{
    auto const rep = poisson_is(table1_rates(), table1_weights(), 30.0, 400000, RngStream(8));
    ASSERT_TRUE(rep.re.has_value());
    double const band = 3.0 * std::max(*rep.re, 0.0098) * 5.07e-7;
    EXPECT_NEAR(rep.mean, 5.07e-7, band);
    auto const exact = poisson_weighted_sum_cdf(table1_rates(), table1_weights(), 30.0);
    ASSERT_TRUE(exact.has_value());
    EXPECT_NEAR(rep.mean, *exact, 3.0 * *rep.re * rep.mean);
}

TEST(PoissonIs, RejectsBadInput)
{
    std::vector<double> const r{1.0, 1.0};
    EXPECT_THROW(poisson_is(r, std::vector<double>{1.0}, 2.0, 10, RngStream(1)),
                 std::invalid_argument);
    EXPECT_THROW(poisson_is(r, std::vector<double>{1.0, 1.0}, 0.0, 10, RngStream(1)),
                 std::invalid_argument);
    EXPECT_THROW(poisson_is(std::vector<double>{-1.0, 1.0}, r, 2.0, 10, RngStream(1)),
                 std::invalid_argument);
}

TEST(Oracle, Families)
{
    auto const a = oracle_exact(exp_sum(4, 0.1));
    ASSERT_TRUE(a.has_value());
    EXPECT_NEAR(*a, 3.846833925345058e-6, 1e-18);

    ProblemSpec pois{{Poisson(1), Poisson(1)},
                     {Direction::Increasing, Direction::Increasing},
                     WeightedSumImportance{{1, 2}},
                     2.0,
                     ProblemKind::PoissonNative};
    auto const b = oracle_exact(pois);
    ASSERT_TRUE(b.has_value());
    EXPECT_NEAR(*b, 0.4736734913281444, 1e-15);

    pois.gamma = 0.0;
    EXPECT_NEAR(*oracle_exact(pois), std::exp(-2.0), 1e-16);

    ProblemSpec const ratio{{Exponential(1), Exponential(1)},
                            {Direction::Increasing, Direction::Decreasing},
                            RatioImportance{0.5},
                            0.3};
    auto const c = oracle_exact(ratio);
    ASSERT_TRUE(c.has_value());
    EXPECT_NEAR(*c, 1.0 - std::exp(-0.15) / 1.3, 1e-12);

    ProblemSpec const weib{std::vector<DistributionSpec>(3, Weibull(0.5, 1.0)),
                           std::vector<Direction>(3, Direction::Increasing), SumImportance{}, 1.0};
    EXPECT_FALSE(oracle_exact(weib).has_value());
}

TEST(Oracle, LatticeBudget)
{
    EXPECT_FALSE(poisson_weighted_sum_cdf(table1_rates(), table1_weights(), 60.0, 1000).has_value());
}
