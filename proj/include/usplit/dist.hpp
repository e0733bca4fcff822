#pragma once

// Marginal laws: CDF, complementary log-CDF, quantile and the tail-stable
// quantile F^-1(1 - e^-g) / F^-1(e^-g) used by the Gamma-process embedding.

#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

#include "usplit/special.hpp"

namespace usplit {

namespace detail {
inline void require_positive(double v, char const* what)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(what) + " must be finite and > 0");
}
} // namespace detail

/// Log-normal law; mu and sigma are on the log scale.
struct LogNormal {
    double mu;
    double sigma;
    LogNormal(double mu_, double sigma_) : mu(mu_), sigma(sigma_)
    {
        if (!std::isfinite(mu))
            throw std::invalid_argument("lognormal mu must be finite");
        detail::require_positive(sigma, "lognormal sigma");
    }
};

/// Weibull law with shape alpha and scale eta.
struct Weibull {
    double alpha;
    double eta;
    Weibull(double alpha_, double eta_) : alpha(alpha_), eta(eta_)
    {
        detail::require_positive(alpha, "weibull alpha");
        detail::require_positive(eta, "weibull eta");
    }
};

/// Stacy generalized Gamma: density proportional to x^(d-1) exp(-(x/a)^p).
/// Reduces to Weibull(p, a) when d == p and to Gamma(d, 1/a) when p == 1.
struct GeneralizedGamma {
    double d;
    double p;
    double a;
    GeneralizedGamma(double d_, double p_, double a_) : d(d_), p(p_), a(a_)
    {
        detail::require_positive(d, "gengamma d");
        detail::require_positive(p, "gengamma p");
        detail::require_positive(a, "gengamma a");
    }
};

struct Gamma {
    double shape;
    double rate;
    Gamma(double shape_, double rate_) : shape(shape_), rate(rate_)
    {
        detail::require_positive(shape, "gamma shape");
        detail::require_positive(rate, "gamma rate");
    }
};

struct Exponential {
    double rate;
    explicit Exponential(double rate_) : rate(rate_)
    {
        detail::require_positive(rate, "exponential rate");
    }
};

struct Poisson {
    double lambda;
    explicit Poisson(double lambda_) : lambda(lambda_)
    {
        detail::require_positive(lambda, "poisson lambda");
    }
};

using DistributionSpec =
    std::variant<LogNormal, Weibull, GeneralizedGamma, Gamma, Exponential, Poisson>;

/// Which tail the embedding reads: Upper gives F^-1(1 - e^-g) (mass e^-g
/// above), Lower gives F^-1(e^-g).
enum class Tail { Upper, Lower };

inline bool is_continuous(DistributionSpec const& d)
{
    return !std::holds_alternative<Poisson>(d);
}

inline char const* kind_name(DistributionSpec const& d)
{
    return std::visit(
        [](auto const& law) -> char const* {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, LogNormal>)
                return "lognormal";
            else if constexpr (std::is_same_v<T, Weibull>)
                return "weibull";
            else if constexpr (std::is_same_v<T, GeneralizedGamma>)
                return "gengamma";
            else if constexpr (std::is_same_v<T, Gamma>)
                return "gamma";
            else if constexpr (std::is_same_v<T, Exponential>)
                return "exponential";
            else
                return "poisson";
        },
        d);
}

/// P[X <= x]. Poisson is evaluated at floor(x).
inline double cdf(DistributionSpec const& d, double x)
{
    return std::visit(
        [x](auto const& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Poisson>) {
                return special::poisson_cdf_at(law.lambda, std::floor(x));
            } else {
                if (x <= 0.0)
                    return 0.0;
                if (x == special::kInf)
                    return 1.0;
                if constexpr (std::is_same_v<T, LogNormal>)
                    return special::normal_cdf((std::log(x) - law.mu) / law.sigma);
                else if constexpr (std::is_same_v<T, Weibull>)
                    return -std::expm1(-std::pow(x / law.eta, law.alpha));
                else if constexpr (std::is_same_v<T, GeneralizedGamma>)
                    return special::reg_lower_inc_gamma(law.d / law.p,
                                                        std::pow(x / law.a, law.p));
                else if constexpr (std::is_same_v<T, Gamma>)
                    return special::reg_lower_inc_gamma(law.shape, law.rate * x);
                else
                    return -std::expm1(-law.rate * x);
            }
        },
        d);
}

/// log P[X > x], accurate deep in the upper tail.
inline double log_ccdf(DistributionSpec const& d, double x)
{
    return std::visit(
        [x](auto const& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Poisson>) {
                double const k = std::floor(x);
                if (k < 0.0)
                    return 0.0;
                return special::log_reg_inc_gamma(k + 1.0, law.lambda).first;
            } else {
                if (x <= 0.0)
                    return 0.0;
                if (x == special::kInf)
                    return -special::kInf;
                if constexpr (std::is_same_v<T, LogNormal>)
                    return special::normal_log_ccdf((std::log(x) - law.mu) / law.sigma);
                else if constexpr (std::is_same_v<T, Weibull>)
                    return -std::pow(x / law.eta, law.alpha);
                else if constexpr (std::is_same_v<T, GeneralizedGamma>)
                    return special::log_reg_inc_gamma(law.d / law.p,
                                                      std::pow(x / law.a, law.p))
                        .second;
                else if constexpr (std::is_same_v<T, Gamma>)
                    return special::log_reg_inc_gamma(law.shape, law.rate * x).second;
                else
                    return -law.rate * x;
            }
        },
        d);
}

namespace detail {

// Quantile at the probability p given as (log p, log(1 - p)).
inline double quantile_split(DistributionSpec const& d, double log_lower, double log_upper)
{
    return std::visit(
        [=](auto const& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Poisson>) {
                throw std::invalid_argument("quantile: Poisson marginals are not supported");
            } else {
                if (log_lower == -special::kInf)
                    return 0.0;
                if (log_upper == -special::kInf)
                    return special::kInf;
                if constexpr (std::is_same_v<T, LogNormal>) {
                    return std::exp(law.mu
                                    + law.sigma * special::normal_quantile(log_lower, log_upper));
                } else if constexpr (std::is_same_v<T, Weibull>) {
                    return law.eta * std::pow(-log_upper, 1.0 / law.alpha);
                } else if constexpr (std::is_same_v<T, GeneralizedGamma>) {
                    double const y =
                        special::inv_reg_inc_gamma(law.d / law.p, log_lower, log_upper);
                    return law.a * std::pow(y, 1.0 / law.p);
                } else if constexpr (std::is_same_v<T, Gamma>) {
                    return special::inv_reg_inc_gamma(law.shape, log_lower, log_upper)
                           / law.rate;
                } else {
                    return -log_upper / law.rate;
                }
            }
        },
        d);
}

} // namespace detail

/// Inverse CDF. quantile(d, 0) is 0 (the support infimum of every continuous
/// law here) and quantile(d, 1) is +inf.
inline double quantile(DistributionSpec const& d, double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("quantile: probability must lie in [0, 1]");
    double const log_lower = p == 0.0 ? -special::kInf : std::log(p);
    double const log_upper = p == 1.0 ? -special::kInf : std::log1p(-p);
    return detail::quantile_split(d, log_lower, log_upper);
}

/// F^-1(1 - e^-g) for Tail::Upper and F^-1(e^-g) for Tail::Lower, without
/// forming 1 - e^-g in floating point.
inline double quantile_from_neg_log_tail(DistributionSpec const& d, double g, Tail tail)
{
    if (!(g >= 0.0))
        throw std::invalid_argument("quantile_from_neg_log_tail: g must be >= 0");
    double const a = -g;
    double const b = special::log1mexp(g);
    return tail == Tail::Upper ? detail::quantile_split(d, b, a)
                               : detail::quantile_split(d, a, b);
}

} // namespace usplit
