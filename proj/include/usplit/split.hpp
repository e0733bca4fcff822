#pragma once

// Fixed-effort multilevel splitting over a level schedule 0 < t_1 < ... < t_L = 1.

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "usplit/model.hpp"
#include "usplit/process.hpp"
#include "usplit/stats.hpp"

namespace usplit {

inline constexpr double kDefaultPBar = 0.1;

struct LevelSchedule {
    std::vector<double> times;
    double p_bar = kDefaultPBar;

    std::size_t size() const { return times.size(); }
};

/// Throws unless times are strictly increasing in (0, 1] and end at exactly 1.
inline void validate(LevelSchedule const& schedule)
{
    auto const& t = schedule.times;
    if (t.empty())
        throw std::invalid_argument("schedule: needs at least one level");
    if (!(t.front() > 0.0))
        throw std::invalid_argument("schedule: first time must be > 0");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            throw std::invalid_argument("schedule: times must be strictly increasing");
    if (t.back() != 1.0)
        throw std::invalid_argument("schedule: last time must be exactly 1");
    if (!(schedule.p_bar > 0.0 && schedule.p_bar < 1.0))
        throw std::invalid_argument("schedule: p_bar must lie in (0, 1)");
}

struct SplitRunResult {
    double estimate = 0.0;
    /// |X_l| for each level reached; ends with 0 on extinction.
    std::vector<std::uint64_t> survivor_counts;
    /// 1-based level at which no state survived.
    std::optional<std::size_t> extinct_at;
};

/// One run of the splitting estimator. Level 0 holds s copies of the zero
/// state; every level draws s parents uniformly with replacement from the
/// previous survivors, advances them by t_i - t_{i-1} and keeps those with
/// S(X(t_i)) <= gamma. Returns prod |X_l| / s^L, or 0 on extinction.
template<RandomStream Rng>
SplitRunResult run_splitting(ProblemSpec const& problem, LevelSchedule const& schedule,
                             std::uint64_t s, Rng& rng)
{
    if (s < 2)
        throw std::invalid_argument("run_splitting: s must be >= 2");
    validate(schedule);
    validate(problem);

    std::size_t const n = problem.dimension();
    bool const poisson = problem.kind == ProblemKind::PoissonNative;
    std::vector<double> rates;
    if (poisson)
        for (auto const& m : problem.marginals)
            rates.push_back(std::get<Poisson>(m).lambda);

    ScoreEvaluator score(problem);
    std::vector<double> parents(n, 0.0);
    std::vector<double> children(s * n);
    std::uint64_t n_parents = 1;

    SplitRunResult result;
    result.estimate = 1.0;
    double t_prev = 0.0;
    for (std::size_t level = 0; level < schedule.size(); ++level) {
        double const dt = schedule.times[level] - t_prev;
        std::uint64_t n_alive = 0;
        for (std::uint64_t k = 0; k < s; ++k) {
            double const* parent = parents.data() + rng.below(n_parents) * n;
            double* child = children.data() + n_alive * n;
            assert(level == 0 || score.survives({parent, n}));
            if (poisson)
                for (std::size_t i = 0; i < n; ++i)
                    child[i] = parent[i] + poisson_variate(rates[i] * dt, rng);
            else
                for (std::size_t i = 0; i < n; ++i)
                    child[i] = parent[i] + gamma_variate(dt, rng);
            if (score.survives({child, n}))
                ++n_alive;
        }
        result.survivor_counts.push_back(n_alive);
        if (n_alive == 0) {
            result.estimate = 0.0;
            result.extinct_at = level + 1;
            return result;
        }
        result.estimate *= static_cast<double>(n_alive) / static_cast<double>(s);
        parents.assign(children.begin(), children.begin() + static_cast<std::ptrdiff_t>(n_alive * n));
        n_parents = n_alive;
        t_prev = schedule.times[level];
    }
    return result;
}

/// Runs f(0..count-1) over up to `threads` workers; each index exactly once.
template<class F>
void parallel_for_index(std::uint64_t count, unsigned threads, F&& f)
{
    threads = std::max(1u, threads);
    if (threads == 1 || count < 2) {
        for (std::uint64_t i = 0; i < count; ++i)
            f(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> workers;
    auto const n_workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
    for (unsigned w = 0; w < n_workers; ++w)
        workers.emplace_back([&] {
            for (std::uint64_t i = next++; i < count; i = next++)
                f(i);
        });
}

/// m independent runs (replication r uses rng.substream(r)), aggregated in
/// replication order. Wall time covers the runs only; callers add schedule
/// construction time.
template<RandomStream Rng>
EstimateReport replicate(ProblemSpec const& problem, LevelSchedule const& schedule,
                         std::uint64_t s, std::uint64_t m, Rng const& rng, unsigned threads = 1)
{
    if (m < 2)
        throw std::invalid_argument("replicate: m must be >= 2");
    validate(schedule);
    validate(problem);

    Stopwatch clock;
    std::vector<SplitRunResult> runs(m);
    parallel_for_index(m, threads, [&](std::uint64_t r) {
        auto stream = rng.substream(r);
        runs[r] = run_splitting(problem, schedule, s, stream);
    });

    EstimateReport report;
    report.method = "split";
    report.m = m;
    report.s = s;
    report.levels = schedule.times;

    RunningMoments moments;
    std::vector<RunningMoments> survival(schedule.size());
    for (auto const& run : runs) {
        moments.add(run.estimate);
        for (std::size_t l = 0; l < run.survivor_counts.size(); ++l)
            survival[l].add(static_cast<double>(run.survivor_counts[l]) / static_cast<double>(s));
    }
    report.mean = moments.mean();
    report.variance = moments.variance();
    for (auto const& level : survival)
        report.per_level_survival.push_back(level.mean());
    report.wall_seconds = clock.seconds();
    report.finalize();
    return report;
}

} // namespace usplit
