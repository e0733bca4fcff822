#pragma once

// Level-selection heuristics targeting a per-level survival probability p_bar.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "usplit/dist.hpp"
#include "usplit/error.hpp"
#include "usplit/model.hpp"
#include "usplit/special.hpp"
#include "usplit/split.hpp"

namespace usplit {

/// Bracketed bisection for the root of a continuous function that changes
/// sign on [lo, hi]. Stops once the bracket is narrower than tol.
template<class F>
double bisect_root(F&& f, double lo, double hi, double tol)
{
    double f_lo = f(lo);
    if (f_lo == 0.0)
        return lo;
    if (double const f_hi = f(hi); f_hi == 0.0)
        return hi;
    else if ((f_lo < 0.0) == (f_hi < 0.0))
        throw std::invalid_argument("bisect_root: root is not bracketed");
    while (hi - lo > tol) {
        double const mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        double const f_mid = f(mid);
        if (f_mid == 0.0)
            return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// log of the product lower bound prod_j P[X_j(t) <= c_j] at time t.
class ProductLowerBound
{
  public:
    explicit ProductLowerBound(ProblemSpec const& problem) : poisson_(problem.kind == ProblemKind::PoissonNative)
    {
        validate(problem);
        std::size_t const n = problem.dimension();
        if (std::holds_alternative<RatioImportance>(problem.importance))
            throw std::invalid_argument(
                "lower_bound_schedule: not available for the ratio importance function; "
                "use the inverse complementary CDF heuristic");

        for (std::size_t j = 0; j < n; ++j) {
            auto const& marginal = problem.marginals[j];
            if (poisson_) {
                double const w = std::get<WeightedSumImportance>(problem.importance).weights[j];
                rates_.push_back(std::get<Poisson>(marginal).lambda);
                // zero weight leaves the coordinate unconstrained
                thresholds_.push_back(w > 0.0 ? std::floor(problem.gamma / (w * static_cast<double>(n)))
                                              : special::kInf);
            } else {
                double divisor = static_cast<double>(n);
                if (auto const* o = std::get_if<OrderedPartialSumImportance>(&problem.importance))
                    divisor = static_cast<double>(o->n_bar);
                if (auto const* w = std::get_if<WeightedSumImportance>(&problem.importance))
                    divisor = w->weights[j] > 0.0 ? w->weights[j] * static_cast<double>(n) : 0.0;
                double const c = divisor > 0.0 ? problem.gamma / divisor : special::kInf;
                // P[X_j(t) <= c] = P[G(t) <= -ln Fbar_j(c)]
                thresholds_.push_back(-log_ccdf(marginal, c));
            }
        }
    }

    double log_value(double t) const
    {
        double total = 0.0;
        for (std::size_t j = 0; j < thresholds_.size(); ++j) {
            double const c = thresholds_[j];
            if (poisson_) {
                if (c == special::kInf)
                    continue;
                if (c < 0.0)
                    return -special::kInf;
                total += special::log_reg_inc_gamma(c + 1.0, rates_[j] * t).second;
            } else {
                if (c == special::kInf)
                    continue;
                total += special::log_reg_inc_gamma(t, c).first;
            }
        }
        return total;
    }

    double value(double t) const { return std::exp(log_value(t)); }

  private:
    bool poisson_;
    std::vector<double> rates_;
    std::vector<double> thresholds_;
};

/// Levels from the product lower bound: t_i solves prod_j B_j(t_i) = p_bar^i,
/// generated until the root passes t_max, with the final level set to t_max.
inline LevelSchedule lower_bound_schedule(ProblemSpec const& problem, double p_bar = kDefaultPBar,
                                          double t_max = 1.0)
{
    if (!(p_bar > 0.0 && p_bar < 1.0))
        throw std::invalid_argument("lower_bound_schedule: p_bar must lie in (0, 1)");
    ProductLowerBound const bound(problem);

    constexpr double t_min = 1e-8;
    constexpr double t_tol = 1e-13;
    double const log_p_bar = std::log(p_bar);
    double const log_at_end = bound.log_value(t_max);

    LevelSchedule schedule;
    schedule.p_bar = p_bar;
    double lo = t_min;
    for (int i = 1;; ++i) {
        double const target = i * log_p_bar;
        if (log_at_end >= target)
            break;
        // product is strictly decreasing in t; residual goes + to -
        auto residual = [&](double t) { return bound.value(t) - std::exp(target); };
        if (residual(lo) <= 0.0)
            break;
        double const t = bisect_root(residual, lo, t_max, t_tol);
        if (t >= t_max)
            break;
        schedule.times.push_back(t);
        lo = t;
    }
    schedule.times.push_back(t_max);
    return schedule;
}

/// Inverts the piecewise-linear interpolant through (t_k, log Fbar_k) at the
/// targets p_bar^l. Knots start at (0, 0) and end at t = 1.
inline LevelSchedule inverse_ccdf_from_knots(std::vector<double> const& knot_t,
                                             std::vector<double> const& knot_v, double p_bar)
{
    if (knot_t.size() != knot_v.size() || knot_t.size() < 2 || knot_t.back() != 1.0)
        throw std::invalid_argument("inverse_ccdf_from_knots: malformed knots");

    LevelSchedule schedule;
    schedule.p_bar = p_bar;
    double const log_p_bar = std::log(p_bar);
    double const v_end = knot_v.back();
    std::size_t seg = 1;
    for (int l = 1;; ++l) {
        double const target = l * log_p_bar;
        if (target <= v_end)
            break;
        while (seg < knot_t.size() && knot_v[seg] > target)
            ++seg;
        double const t0 = knot_t[seg - 1];
        double const t1 = knot_t[seg];
        double const v0 = knot_v[seg - 1];
        double const v1 = knot_v[seg];
        double const t = t0 + (t1 - t0) * (target - v0) / (v1 - v0);
        if (t >= 1.0)
            break;
        if (schedule.times.empty() || t > schedule.times.back())
            schedule.times.push_back(t);
    }
    schedule.times.push_back(1.0);
    return schedule;
}

/// Levels from a pilot run on equally spaced times: the pilot's estimate of
/// P[tau > t] is interpolated linearly in (t, log P) and inverted at
/// p_bar, p_bar^2, ... until the interpolant's value at t = 1.
template<RandomStream Rng>
LevelSchedule inverse_ccdf_schedule(ProblemSpec const& problem, std::size_t pilot_levels,
                                    std::uint64_t s_pilot, double p_bar, Rng& rng)
{
    if (pilot_levels < 2)
        throw std::invalid_argument("inverse_ccdf_schedule: need at least 2 pilot levels");
    if (s_pilot < 100)
        throw std::invalid_argument("inverse_ccdf_schedule: pilot needs at least 100 samples");
    if (!(p_bar > 0.0 && p_bar < 1.0))
        throw std::invalid_argument("inverse_ccdf_schedule: p_bar must lie in (0, 1)");

    LevelSchedule pilot;
    pilot.p_bar = p_bar;
    for (std::size_t l = 1; l < pilot_levels; ++l)
        pilot.times.push_back(static_cast<double>(l) / static_cast<double>(pilot_levels));
    pilot.times.push_back(1.0);

    auto const run = run_splitting(problem, pilot, s_pilot, rng);
    if (run.extinct_at)
        throw EstimationError("inverse_ccdf_schedule: pilot run went extinct at level "
                              + std::to_string(*run.extinct_at) + " of "
                              + std::to_string(pilot_levels)
                              + "; increase the pilot sample size or reduce the pilot level count");

    std::vector<double> knot_t{0.0};
    std::vector<double> knot_v{0.0};
    double log_est = 0.0;
    for (std::size_t l = 0; l < pilot_levels; ++l) {
        log_est += std::log(static_cast<double>(run.survivor_counts[l]) / static_cast<double>(s_pilot));
        knot_t.push_back(pilot.times[l]);
        knot_v.push_back(log_est);
    }
    return inverse_ccdf_from_knots(knot_t, knot_v, p_bar);
}

} // namespace usplit
