#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/weibull.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "usplit/dist.hpp"
#include "usplit/special.hpp"

using namespace usplit;

namespace {
double rel_diff(double a, double b)
{
    return std::fabs(a - b) / std::max(std::fabs(b), std::numeric_limits<double>::min());
}
} // namespace

TEST(Special, RegLowerIncGammaKnownValues)
{
    // values from a 50-digit mpmath evaluation
    EXPECT_NEAR(special::reg_lower_inc_gamma(1.0, 0.5), 0.3934693402873666, 1e-15);
    EXPECT_LT(rel_diff(special::reg_lower_inc_gamma(4.0, 0.5), 0.001751622556290824), 1e-12);
    EXPECT_LT(rel_diff(special::reg_lower_inc_gamma(4.0, 0.1), 3.846833925345058e-6), 1e-12);
    EXPECT_LT(rel_diff(special::reg_lower_inc_gamma(4.0, 1.5), 0.06564245437845009), 1e-12);
    EXPECT_LT(rel_diff(special::reg_lower_inc_gamma(0.05, 1e-6), 0.5148279545251782), 1e-12);
    EXPECT_EQ(special::reg_lower_inc_gamma(4.0, 0.0), 0.0);
}

TEST(Special, RegIncGammaAgreesWithBoostOnGrid)
{
    for (double a : {1e-3, 0.05, 0.5, 1.0, 2.5, 12.0, 80.0}) {
        for (double x : {1e-8, 1e-3, 0.1, 1.0, 3.0, 10.0, 50.0, 200.0}) {
            double const p = boost::math::gamma_p(a, x);
            double const q = boost::math::gamma_q(a, x);
            if (p > 1e-300)
                EXPECT_LT(rel_diff(special::reg_lower_inc_gamma(a, x), p), 1e-11) << a << " " << x;
            if (q > 1e-300)
                EXPECT_LT(rel_diff(special::reg_upper_inc_gamma(a, x), q), 1e-11) << a << " " << x;
        }
    }
}

TEST(Special, InverseRegIncGammaRoundTrip)
{
    for (double a : {0.01, 0.3, 1.0, 4.0, 30.0}) {
        for (double y : {1e-12, 1e-4, 0.1, 0.5, 0.9}) {
            double const x = special::inv_reg_inc_gamma(a, std::log(y), std::log1p(-y));
            EXPECT_LT(rel_diff(x, boost::math::gamma_p_inv(a, y)), 1e-9) << a << " " << y;
        }
    }
}

TEST(Special, NormalQuantileDeepTail)
{
    // upper-tail quantile at e^-50 (mpmath root of erfc)
    double const z = special::normal_quantile(special::log1mexp(50.0), -50.0);
    EXPECT_LT(rel_diff(z, 9.674825283612357), 1e-12);
    for (double p : {1e-300, 1e-20, 1e-5, 0.02, 0.3, 0.5, 0.8, 0.999}) {
        double const expect = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
        double const got = special::normal_quantile(std::log(p), std::log1p(-p));
        EXPECT_NEAR(got, expect, 1e-12 * std::max(1.0, std::fabs(expect))) << p;
    }
}

TEST(Special, PoissonCdfAt)
{
    EXPECT_NEAR(special::poisson_cdf_at(1.0, 0), std::exp(-1.0), 1e-15);
    EXPECT_NEAR(special::poisson_cdf_at(2.0, 2), 0.6766764161830634595, 1e-15);
    EXPECT_EQ(special::poisson_cdf_at(5.0, -1), 0.0);
}

TEST(Dist, ConstructorsRejectBadParameters)
{
    EXPECT_THROW(LogNormal(0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(LogNormal(0.0, -1.0), std::invalid_argument);
    EXPECT_THROW(Weibull(0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(Weibull(1.0, -2.0), std::invalid_argument);
    EXPECT_THROW(GeneralizedGamma(1.0, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(Gamma(-1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(Exponential(0.0), std::invalid_argument);
    EXPECT_THROW(Poisson(std::nan("")), std::invalid_argument);
    EXPECT_NO_THROW(GeneralizedGamma(2.0, 1.5, 0.7));
}

TEST(Dist, CdfExamples)
{
    EXPECT_NEAR(cdf(LogNormal(0, 2), 1.0), 0.5, 1e-15);
    EXPECT_NEAR(cdf(Weibull(0.5, 1), 1.0), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_NEAR(cdf(Poisson(2), 2.0), 0.6766764161830634595, 1e-15);
    EXPECT_EQ(cdf(Exponential(1), -1.0), 0.0);
    EXPECT_EQ(cdf(Poisson(2), -0.5), 0.0);
}

TEST(Dist, CdfAgreesWithBoost)
{
    boost::math::lognormal_distribution<> ln(0.3, 1.7);
    boost::math::weibull_distribution<> wb(0.8, 2.0);
    for (double x : {1e-4, 0.1, 0.9, 3.0, 40.0}) {
        EXPECT_NEAR(cdf(LogNormal(0.3, 1.7), x), boost::math::cdf(ln, x), 1e-14);
        EXPECT_NEAR(cdf(Weibull(0.8, 2.0), x), boost::math::cdf(wb, x), 1e-14);
        // Stacy form with d = p reduces to Weibull(p, a)
        EXPECT_NEAR(cdf(GeneralizedGamma(0.8, 0.8, 2.0), x), boost::math::cdf(wb, x), 1e-12);
        EXPECT_NEAR(cdf(Gamma(2.5, 3.0), x), boost::math::gamma_p(2.5, 3.0 * x), 1e-14);
    }
}

TEST(Dist, LogCcdfKeepsDeepTails)
{
    EXPECT_NEAR(log_ccdf(Exponential(2.0), 400.0), -800.0, 1e-9);
    EXPECT_NEAR(log_ccdf(Weibull(0.5, 1.0), 1e6), -1000.0, 1e-9);
    // log of the normal upper tail at 40 and 60 (mpmath, 40 digits)
    EXPECT_NEAR(log_ccdf(LogNormal(0, 1), std::exp(40.0)), -804.60844201375379, 1e-10);
    EXPECT_NEAR(special::normal_log_ccdf(60.0), -1805.0135606805671, 1e-10);
    EXPECT_NEAR(special::normal_log_ccdf(10.0), -53.231285150512471, 1e-11);
    // both branches agree at the switch point
    EXPECT_NEAR(special::normal_log_ccdf(8.0), special::normal_log_ccdf(8.0 + 1e-12), 1e-9);
}

TEST(Dist, QuantileExamples)
{
    EXPECT_NEAR(quantile(LogNormal(0, 2), 0.5), 1.0, 1e-14);
    EXPECT_NEAR(quantile(Weibull(0.5, 1), 1.0 - std::exp(-1.0)), 1.0, 1e-12);
    EXPECT_NEAR(quantile(Exponential(1), 0.3934693), 0.49999993357736399, 1e-13);
    EXPECT_EQ(quantile(Exponential(1), 0.0), 0.0);
    EXPECT_TRUE(std::isinf(quantile(Exponential(1), 1.0)));
    EXPECT_THROW(quantile(Exponential(1), 1.5), std::invalid_argument);
    EXPECT_THROW(quantile(Exponential(1), -0.1), std::invalid_argument);
    EXPECT_THROW(quantile(Poisson(1), 0.3), std::invalid_argument);
}

TEST(Dist, QuantileInvertsCdf)
{
    std::vector<DistributionSpec> laws{LogNormal(0.5, 2.0), Weibull(0.5, 1.0), Weibull(0.8, 3.0),
                                       GeneralizedGamma(2.0, 1.5, 0.7), Gamma(0.3, 2.0),
                                       Exponential(4.0)};
    for (auto const& d : laws)
        for (double p : {1e-10, 1e-3, 0.25, 0.5, 0.75, 0.999})
            EXPECT_LT(rel_diff(cdf(d, quantile(d, p)), p), 1e-9) << kind_name(d) << " " << p;
}

TEST(Dist, NegLogTailExamples)
{
    EXPECT_NEAR(quantile_from_neg_log_tail(Exponential(1), 3.7, Tail::Upper), 3.7, 1e-13);
    std::vector<DistributionSpec> laws{LogNormal(0.5, 2.0), Weibull(0.5, 1.0),
                                       GeneralizedGamma(2.0, 1.5, 0.7), Gamma(3.0, 2.0)};
    for (auto const& d : laws)
        EXPECT_LT(rel_diff(quantile_from_neg_log_tail(d, special::kLn2, Tail::Upper), quantile(d, 0.5)),
                  1e-12);
    double const x = quantile_from_neg_log_tail(LogNormal(0, 1), 50.0, Tail::Upper);
    EXPECT_LT(rel_diff(x, 15911.94372060539), 1e-10);
}

TEST(Dist, NegLogTailEdgeCases)
{
    EXPECT_EQ(quantile_from_neg_log_tail(Weibull(0.5, 1), 0.0, Tail::Upper), 0.0);
    EXPECT_TRUE(std::isinf(quantile_from_neg_log_tail(Weibull(0.5, 1), 0.0, Tail::Lower)));
    EXPECT_THROW(quantile_from_neg_log_tail(Exponential(1), -1.0, Tail::Upper),
                 std::invalid_argument);
    // lower tail: F^-1(e^-g); Exp(1) gives -log(1 - e^-g)
    EXPECT_NEAR(quantile_from_neg_log_tail(Exponential(1), special::kLn2, Tail::Lower), special::kLn2, 1e-14);
    EXPECT_NEAR(quantile_from_neg_log_tail(Exponential(1), 30.0, Tail::Lower), std::exp(-30.0),
                1e-25);
}

TEST(Dist, NegLogTailIsMonotone)
{
    std::vector<DistributionSpec> laws{LogNormal(0, 1), Weibull(0.8, 1.0), Gamma(0.5, 1.0)};
    for (auto const& d : laws) {
        double prev_up = 0.0;
        double prev_low = special::kInf;
        for (double g = 1e-6; g < 500.0; g *= 1.7) {
            double const up = quantile_from_neg_log_tail(d, g, Tail::Upper);
            double const low = quantile_from_neg_log_tail(d, g, Tail::Lower);
            EXPECT_GE(up, prev_up);
            EXPECT_LE(low, prev_low);
            prev_up = up;
            prev_low = low;
        }
    }
}

TEST(Dist, GeneralizedGammaSpecialCases)
{
    for (double x = 0.05; x < 20.0; x *= 1.5) {
        EXPECT_NEAR(cdf(GeneralizedGamma(0.7, 0.7, 1.3), x), cdf(Weibull(0.7, 1.3), x), 1e-10);
        EXPECT_NEAR(cdf(GeneralizedGamma(2.5, 1.0, 2.0), x), cdf(Gamma(2.5, 0.5), x), 1e-10);
    }
}
