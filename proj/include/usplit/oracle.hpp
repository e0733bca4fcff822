#pragma once

// Exact or quadrature reference values for the problem families where one
// is available; used by tests and the `verify` command.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "usplit/dist.hpp"
#include "usplit/model.hpp"
#include "usplit/special.hpp"

namespace usplit {

inline constexpr std::uint64_t kMaxLatticePoints = 100000000;

/// P[sum_j w_j K_j <= gamma] for independent K_j ~ Poisson(lambda_j) by
/// enumerating every admissible count vector. nullopt past the point budget.
inline std::optional<double> poisson_weighted_sum_cdf(std::vector<double> const& lambdas,
                                                      std::vector<double> const& weights,
                                                      double gamma,
                                                      std::uint64_t max_points = kMaxLatticePoints)
{
    if (gamma < 0.0)
        return 0.0;
    std::size_t const n = lambdas.size();
    std::vector<std::size_t> constrained;
    for (std::size_t j = 0; j < n; ++j)
        if (weights[j] > 0.0)
            constrained.push_back(j);

    std::uint64_t points = 0;
    bool overflow = false;
    auto log_pmf = [&](std::size_t j, double k) {
        return k * std::log(lambdas[j]) - lambdas[j] - std::lgamma(k + 1.0);
    };
    // depth-first over constrained coordinates with the remaining budget
    auto recurse = [&](auto&& self, std::size_t idx, double budget, double log_mass) -> double {
        if (idx == constrained.size()) {
            if (++points > max_points)
                overflow = true;
            return std::exp(log_mass);
        }
        std::size_t const j = constrained[idx];
        double total = 0.0;
        double const k_max = std::floor(budget / weights[j] + 1e-12);
        for (double k = 0.0; k <= k_max && !overflow; k += 1.0)
            total += self(self, idx + 1, budget - weights[j] * k, log_mass + log_pmf(j, k));
        return total;
    };
    double const value = recurse(recurse, 0, gamma, 0.0);
    if (overflow)
        return std::nullopt;
    return value;
}

/// Reference value of P[S(X) <= gamma] for:
///  - a plain sum of i.i.d. exponentials (regularized incomplete gamma),
///  - a nonnegative weighted sum of Poissons (lattice enumeration),
///  - a ratio with two continuous marginals (adaptive Gauss-Kronrod on
///    u -> F_1(gamma (F_2^-1(u) + eta))).
/// nullopt for anything else.
inline std::optional<double> oracle_exact(ProblemSpec const& problem)
{
    validate(problem);
    auto const& margs = problem.marginals;

    if (std::holds_alternative<SumImportance>(problem.importance)) {
        auto const* first = std::get_if<Exponential>(&margs.front());
        if (!first)
            return std::nullopt;
        for (auto const& m : margs) {
            auto const* e = std::get_if<Exponential>(&m);
            if (!e || e->rate != first->rate)
                return std::nullopt;
        }
        if (problem.gamma <= 0.0)
            return 0.0;
        return special::reg_lower_inc_gamma(static_cast<double>(margs.size()),
                                            first->rate * problem.gamma);
    }

    if (problem.kind == ProblemKind::PoissonNative) {
        std::vector<double> lambdas;
        for (auto const& m : margs)
            lambdas.push_back(std::get<Poisson>(m).lambda);
        auto const& w = std::get<WeightedSumImportance>(problem.importance).weights;
        return poisson_weighted_sum_cdf(lambdas, w, problem.gamma);
    }

    if (auto const* ratio = std::get_if<RatioImportance>(&problem.importance);
        ratio && margs.size() == 2) {
        if (problem.gamma < 0.0)
            return 0.0;
        auto integrand = [&](double u) {
            double const x2 = quantile(margs[1], u);
            return cdf(margs[0], problem.gamma * (x2 + ratio->eta));
        };
        return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0,
                                                                             20, 1e-13);
    }
    return std::nullopt;
}

} // namespace usplit
