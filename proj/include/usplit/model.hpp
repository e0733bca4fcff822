#pragma once

// Problem specification, the Gamma-process embedding and the four
// quasi-monotone importance functions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "usplit/dist.hpp"
#include "usplit/process.hpp"

namespace usplit {

/// Coordinate direction: Increasing coordinates grow with the Gamma level,
/// Decreasing ones shrink.
enum class Direction { Increasing, Decreasing };

struct SumImportance {};

/// x_1 / (x_2 + ... + x_n + eta)
struct RatioImportance {
    double eta;
};

/// Sum of the n_bar largest coordinates.
struct OrderedPartialSumImportance {
    std::size_t n_bar;
};

struct WeightedSumImportance {
    std::vector<double> weights;
};

using ImportanceSpec = std::variant<SumImportance, RatioImportance,
                                    OrderedPartialSumImportance, WeightedSumImportance>;

enum class ProblemKind { ContinuousEmbedded, PoissonNative };

/// Estimation target P[S(X) <= gamma].
struct ProblemSpec {
    std::vector<DistributionSpec> marginals;
    std::vector<Direction> directions;
    ImportanceSpec importance;
    double gamma = 0.0;
    ProblemKind kind = ProblemKind::ContinuousEmbedded;

    std::size_t dimension() const { return marginals.size(); }
    ProcessKind process_kind() const
    {
        return kind == ProblemKind::PoissonNative ? ProcessKind::Poisson : ProcessKind::Gamma;
    }
};

inline double importance(ImportanceSpec const& spec, std::span<double const> x);

/// True iff (spec, directions) is one of the sanctioned monotone
/// configurations: Sum / OrderedPartialSum / nonnegative WeightedSum with all
/// coordinates increasing, or Ratio with only the first coordinate increasing.
inline bool is_quasi_monotone_witness(ImportanceSpec const& spec,
                                      std::span<Direction const> directions)
{
    auto all_increasing = [&] {
        return std::all_of(directions.begin(), directions.end(),
                           [](Direction d) { return d == Direction::Increasing; });
    };
    if (std::holds_alternative<RatioImportance>(spec)) {
        if (directions.size() < 2 || directions[0] != Direction::Increasing)
            return false;
        return std::all_of(directions.begin() + 1, directions.end(),
                           [](Direction d) { return d == Direction::Decreasing; });
    }
    if (auto const* w = std::get_if<WeightedSumImportance>(&spec)) {
        if (std::any_of(w->weights.begin(), w->weights.end(), [](double v) { return v < 0.0; }))
            return false;
    }
    return all_increasing();
}

inline void validate(ImportanceSpec const& spec, std::size_t n)
{
    std::visit(
        [n](auto const& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RatioImportance>) {
                if (!(s.eta > 0.0) || !std::isfinite(s.eta))
                    throw std::invalid_argument("ratio importance: eta must be > 0");
                if (n < 2)
                    throw std::invalid_argument("ratio importance: needs n >= 2");
            } else if constexpr (std::is_same_v<T, OrderedPartialSumImportance>) {
                if (s.n_bar < 1 || s.n_bar > n)
                    throw std::invalid_argument("ordered partial sum: need 1 <= n_bar <= n");
            } else if constexpr (std::is_same_v<T, WeightedSumImportance>) {
                if (s.weights.size() != n)
                    throw std::invalid_argument("weighted sum: weight count must equal n");
                bool positive = false;
                for (double w : s.weights) {
                    if (!(w >= 0.0) || !std::isfinite(w))
                        throw std::invalid_argument("weighted sum: weights must be >= 0");
                    positive = positive || w > 0.0;
                }
                if (!positive)
                    throw std::invalid_argument("weighted sum: at least one weight must be > 0");
            }
        },
        spec);
}

inline void validate(ProblemSpec const& p)
{
    std::size_t const n = p.marginals.size();
    if (n == 0)
        throw std::invalid_argument("problem: no marginals");
    if (p.directions.size() != n)
        throw std::invalid_argument("problem: direction count must equal marginal count");
    if (!std::isfinite(p.gamma))
        throw std::invalid_argument("problem: gamma must be finite");
    validate(p.importance, n);
    if (!is_quasi_monotone_witness(p.importance, p.directions))
        throw std::invalid_argument(
            "problem: importance function and directions are not a monotone configuration");
    if (p.kind == ProblemKind::PoissonNative) {
        if (!std::holds_alternative<WeightedSumImportance>(p.importance))
            throw std::invalid_argument("poisson problem: importance must be a weighted sum");
        for (auto const& m : p.marginals)
            if (is_continuous(m))
                throw std::invalid_argument("poisson problem: all marginals must be Poisson");
    } else {
        for (auto const& m : p.marginals)
            if (!is_continuous(m))
                throw std::invalid_argument(
                    "continuous problem: Poisson marginals need the poisson kind");
    }
}

/// Maps Gamma levels to X(t): F^-1(1 - e^-g) for increasing coordinates and
/// F^-1(e^-g) for decreasing ones.
inline void embed(std::span<double const> g, std::span<DistributionSpec const> marginals,
                  std::span<Direction const> directions, std::span<double> out)
{
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] = quantile_from_neg_log_tail(
            marginals[i], g[i], directions[i] == Direction::Increasing ? Tail::Upper : Tail::Lower);
}

inline std::vector<double> embed(std::span<double const> g,
                                 std::span<DistributionSpec const> marginals,
                                 std::span<Direction const> directions)
{
    if (g.size() != marginals.size() || g.size() != directions.size())
        throw std::invalid_argument("embed: length mismatch");
    std::vector<double> x(g.size());
    embed(g, marginals, directions, x);
    return x;
}

namespace detail {
inline double ordered_partial_sum(std::span<double const> x, std::size_t n_bar,
                                  std::vector<double>& scratch)
{
    scratch.assign(x.begin(), x.end());
    if (n_bar < scratch.size())
        std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(n_bar),
                         scratch.end(), std::greater<>());
    return std::accumulate(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(n_bar),
                           0.0);
}

inline double importance_unchecked(ImportanceSpec const& spec, std::span<double const> x,
                                   std::vector<double>& scratch)
{
    return std::visit(
        [&](auto const& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, SumImportance>) {
                return std::accumulate(x.begin(), x.end(), 0.0);
            } else if constexpr (std::is_same_v<T, RatioImportance>) {
                double const denom = std::accumulate(x.begin() + 1, x.end(), 0.0) + s.eta;
                // Decreasing coordinates start at +inf; x_1 stays finite.
                if (std::isinf(denom))
                    return 0.0;
                return x[0] / denom;
            } else if constexpr (std::is_same_v<T, OrderedPartialSumImportance>) {
                return ordered_partial_sum(x, s.n_bar, scratch);
            } else {
                return std::inner_product(x.begin(), x.end(), s.weights.begin(), 0.0);
            }
        },
        spec);
}
} // namespace detail

/// S(x) for the given importance family.
inline double importance(ImportanceSpec const& spec, std::span<double const> x)
{
    if (auto const* w = std::get_if<WeightedSumImportance>(&spec); w && w->weights.size() != x.size())
        throw std::invalid_argument("importance: length mismatch with weights");
    if (auto const* o = std::get_if<OrderedPartialSumImportance>(&spec); o && o->n_bar > x.size())
        throw std::invalid_argument("importance: n_bar exceeds vector length");
    if (std::holds_alternative<RatioImportance>(spec) && x.empty())
        throw std::invalid_argument("importance: ratio needs at least one coordinate");
    std::vector<double> scratch;
    return detail::importance_unchecked(spec, x, scratch);
}

/// Evaluates S(X(t)) from a stored process state (Gamma levels or Poisson
/// counts). Holds scratch buffers; one instance per thread.
class ScoreEvaluator
{
  public:
    explicit ScoreEvaluator(ProblemSpec const& problem)
        : problem_(&problem), x_(problem.dimension()), scratch_(problem.dimension())
    {
    }

    double operator()(std::span<double const> state)
    {
        if (problem_->kind == ProblemKind::PoissonNative)
            return detail::importance_unchecked(problem_->importance, state, scratch_);
        embed(state, problem_->marginals, problem_->directions, x_);
        return detail::importance_unchecked(problem_->importance, x_, scratch_);
    }

    bool survives(std::span<double const> state) { return (*this)(state) <= problem_->gamma; }

  private:
    ProblemSpec const* problem_;
    std::vector<double> x_;
    std::vector<double> scratch_;
};

} // namespace usplit
