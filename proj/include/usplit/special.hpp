#pragma once

// Special functions used by the marginal laws and the level heuristics:
// regularized incomplete gamma (log-space), its inverse, and the standard
// normal quantile with a log-probability tail branch.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace usplit {
namespace special {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = 0.693147180559945309417232121458;

/// log(1 - exp(-g)) for g > 0, accurate at both ends.
inline double log1mexp(double g)
{
    if (g <= 0.0)
        return -kInf;
    return g < kLn2 ? std::log(-std::expm1(-g)) : std::log1p(-std::exp(-g));
}

/// Pair (log P(a,x), log Q(a,x)) of the regularized lower/upper incomplete
/// gamma functions. Series for x < a+1, Lentz continued fraction otherwise.
inline std::pair<double, double> log_reg_inc_gamma(double a, double x)
{
    if (!(a > 0.0))
        throw std::invalid_argument("incomplete gamma: shape must be > 0");
    if (x <= 0.0)
        return {-kInf, 0.0};
    if (x == kInf)
        return {0.0, -kInf};

    constexpr double eps = 1e-16;
    constexpr int max_iter = 1000000;
    double const log_prefix = -x + a * std::log(x) - std::lgamma(a);

    if (x < a + 1.0) {
        double ap = a;
        double term = 1.0 / a;
        double sum = term;
        for (int i = 0; i < max_iter; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * eps)
                break;
        }
        double const log_p = log_prefix + std::log(sum);
        double const log_q = log_p < -kLn2 ? std::log1p(-std::exp(log_p))
                                           : std::log(-std::expm1(log_p));
        return {log_p, log_q};
    }

    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < max_iter; ++i) {
        double const an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        double const del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps)
            break;
    }
    double const log_q = log_prefix + std::log(h);
    double const log_p = log_q < -kLn2 ? std::log1p(-std::exp(log_q))
                                       : std::log(-std::expm1(log_q));
    return {log_p, log_q};
}

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
inline double reg_lower_inc_gamma(double a, double x)
{
    return std::exp(log_reg_inc_gamma(a, x).first);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double reg_upper_inc_gamma(double a, double x)
{
    return std::exp(log_reg_inc_gamma(a, x).second);
}

/// P[N <= k] for N ~ Poisson(lambda); stable for large lambda through the
/// identity P[N <= k] = Q(k + 1, lambda).
inline double poisson_cdf_at(double lambda, double k)
{
    if (!(lambda > 0.0))
        throw std::invalid_argument("poisson_cdf_at: rate must be > 0");
    double const kf = std::floor(k);
    if (kf < 0.0)
        return 0.0;
    return reg_upper_inc_gamma(kf + 1.0, lambda);
}

/// Solves P(a, y) = p for y, where the target is supplied as the pair
/// (log p, log(1 - p)). The smaller tail drives the equation so that
/// probabilities down to exp(-700) on either side are honoured.
inline double inv_reg_inc_gamma(double a, double log_lower, double log_upper)
{
    if (!(a > 0.0))
        throw std::invalid_argument("inverse incomplete gamma: shape must be > 0");
    if (log_lower == -kInf)
        return 0.0;
    if (log_upper == -kInf)
        return kInf;

    bool const use_lower = log_lower <= log_upper;
    double const target = use_lower ? log_lower : log_upper;
    double const lga = std::lgamma(a);

    // h(u) increasing in u = log y; zero at the solution.
    auto residual = [&](double u) {
        auto const [lp, lq] = log_reg_inc_gamma(a, std::exp(u));
        return use_lower ? lp - target : target - lq;
    };
    // d h / du = y f(y) / tail, with f the Gamma(a, 1) density.
    auto slope = [&](double u) {
        double const y = std::exp(u);
        auto const [lp, lq] = log_reg_inc_gamma(a, y);
        return std::exp(-y + a * u - lga - (use_lower ? lp : lq));
    };

    double u0;
    if (use_lower) {
        // P(a, y) ~ y^a / Gamma(a + 1) for small y
        u0 = (target + std::lgamma(a + 1.0)) / a;
        u0 = std::min(u0, std::log(a + 1.0));
    } else {
        // Q(a, y) ~ y^(a-1) e^-y / Gamma(a) for large y
        double const y = std::max(-target, 1.0);
        u0 = std::log(std::max(y + (a - 1.0) * std::log(y), a));
    }
    constexpr double u_min = -745.0;
    if (u0 < u_min)
        return 0.0;

    double lo = u0 - 0.5;
    double hi = u0 + 0.5;
    double step = 1.0;
    while (residual(lo) > 0.0) {
        lo -= step;
        step *= 2.0;
        if (lo < u_min)
            return 0.0;
    }
    step = 1.0;
    while (residual(hi) < 0.0) {
        hi += step;
        step *= 2.0;
    }

    double u = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        double const r = residual(u);
        if (r == 0.0)
            break;
        if (r < 0.0)
            lo = u;
        else
            hi = u;
        double next = u - r / slope(u);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::fabs(next - u) < 1e-15 * std::max(1.0, std::fabs(u))) {
            u = next;
            break;
        }
        u = next;
    }
    return std::exp(u);
}

/// Standard normal quantile (Wichura AS 241) from (log p, log(1 - p)).
inline double normal_quantile(double log_lower, double log_upper)
{
    if (log_lower == -kInf)
        return -kInf;
    if (log_upper == -kInf)
        return kInf;

    double const p = std::exp(log_lower);
    double const q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        double const r = 0.180625 - q * q;
        return q
               * (((((((2509.0809287301226727 * r + 33430.575583588128105) * r
                       + 67265.770927008700853)
                          * r
                      + 45921.953931549871457)
                         * r
                     + 13731.693765509461125)
                        * r
                    + 1971.5909503065514427)
                       * r
                   + 133.14166789178437745)
                      * r
                  + 3.387132872796366608)
               / (((((((5226.495278852545925 * r + 28729.085735721942674) * r
                       + 39307.89580009271061)
                          * r
                      + 21213.794301586595867)
                         * r
                     + 5394.1960214247511077)
                        * r
                    + 687.1870074920579083)
                       * r
                   + 42.313330701600911252)
                      * r
                  + 1.0);
    }

    bool const lower_tail = log_lower < log_upper;
    double r = std::sqrt(-(lower_tail ? log_lower : log_upper));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r
                    + 0.24178072517745061177)
                       * r
                   + 1.27045825245236838258)
                      * r
                  + 3.64784832476320460504)
                     * r
                 + 5.7694972214606914055)
                    * r
                + 4.6303378461565452959)
                   * r
               + 1.42343711074968357734)
              / (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r
                      + 0.0151986665636164571966)
                         * r
                     + 0.14810397642748007459)
                        * r
                    + 0.68976733498510000455)
                       * r
                   + 1.6763848301838038494)
                      * r
                  + 2.05319162663775882187)
                     * r
                 + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                    + 0.0012426609473880784386)
                       * r
                   + 0.026532189526576123093)
                      * r
                  + 0.29656057182850489123)
                     * r
                 + 1.7848265399172913358)
                    * r
                + 5.4637849111641143699)
                   * r
               + 6.6579046435011037772)
              / (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r
                      + 1.8463183175100546818e-5)
                         * r
                     + 7.868691311456132591e-4)
                        * r
                    + 0.0148753612908506148525)
                       * r
                   + 0.13692988092273580531)
                      * r
                  + 0.59983220655588793769)
                     * r
                 + 1.0);
    }
    return lower_tail ? -val : val;
}

/// Standard normal CDF.
inline double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

/// log of the standard normal upper tail, 1 - Phi(z).
/// Past z = 8 uses log phi(z) + log R(z), with the Mills ratio R from its
/// Laplace continued fraction 1/(z + 1/(z + 2/(z + ...))).
inline double normal_log_ccdf(double z)
{
    if (z <= 8.0)
        return std::log(0.5 * std::erfc(z / std::sqrt(2.0)));
    double tail = z;
    for (int k = 100; k >= 1; --k)
        tail = z + k / tail;
    return -0.5 * z * z - 0.918938533204672741780329736406 - std::log(tail);
}

} // namespace special
} // namespace usplit
