#pragma once

// Comparison estimators: crude Monte Carlo and the rate-scaling importance
// sampler for weighted sums of Poisson variables.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "usplit/dist.hpp"
#include "usplit/model.hpp"
#include "usplit/process.hpp"
#include "usplit/split.hpp"
#include "usplit/stats.hpp"

namespace usplit {

/// Samples per RNG substream; fixes the aggregation order independent of
/// the thread count.
inline constexpr std::uint64_t kChunkSize = 1u << 16;

namespace detail {
template<RandomStream Rng, class Sample>
RunningMoments chunked_moments(std::uint64_t m, Rng const& rng, unsigned threads, Sample&& sample)
{
    std::uint64_t const n_chunks = (m + kChunkSize - 1) / kChunkSize;
    std::vector<RunningMoments> chunks(n_chunks);
    parallel_for_index(n_chunks, threads, [&](std::uint64_t c) {
        auto stream = rng.substream(c);
        std::uint64_t const begin = c * kChunkSize;
        std::uint64_t const end = std::min(m, begin + kChunkSize);
        auto state = sample.make_state();
        for (std::uint64_t i = begin; i < end; ++i)
            chunks[c].add(sample(state, stream));
    });
    RunningMoments total;
    for (auto const& c : chunks)
        total.merge(c);
    return total;
}
} // namespace detail

/// Crude Monte Carlo: fraction of m independent draws of X with S(X) <= gamma.
/// Continuous marginals by inverse transform, Poisson marginals natively.
template<RandomStream Rng>
EstimateReport naive_mc(ProblemSpec const& problem, std::uint64_t m, Rng const& rng,
                        unsigned threads = 1)
{
    if (m < 1)
        throw std::invalid_argument("naive_mc: m must be >= 1");
    validate(problem);

    struct Sampler {
        ProblemSpec const* problem;
        struct State {
            std::vector<double> x;
            std::vector<double> scratch;
        };
        State make_state() const
        {
            return {std::vector<double>(problem->dimension()),
                    std::vector<double>(problem->dimension())};
        }
        double operator()(State& st, Rng& r) const
        {
            auto const& margs = problem->marginals;
            for (std::size_t i = 0; i < margs.size(); ++i) {
                if (auto const* p = std::get_if<Poisson>(&margs[i]))
                    st.x[i] = poisson_variate(p->lambda, r);
                else
                    st.x[i] = quantile(margs[i], r.uniform());
            }
            return detail::importance_unchecked(problem->importance, st.x, st.scratch)
                           <= problem->gamma
                       ? 1.0
                       : 0.0;
        }
    };

    Stopwatch clock;
    auto const moments = detail::chunked_moments(m, rng, threads, Sampler{&problem});
    EstimateReport report;
    report.method = "naive";
    report.m = m;
    report.mean = moments.mean();
    report.variance = moments.variance();
    report.wall_seconds = clock.seconds();
    report.finalize();
    return report;
}

/// Tilt parameter gamma / sum_i w_i lambda_i, clamped to 1 (no tilt) when the
/// threshold is not below the mean of the weighted sum.
inline double poisson_is_theta(std::span<double const> lambdas, std::span<double const> weights,
                               double gamma)
{
    double const mean = std::inner_product(lambdas.begin(), lambdas.end(), weights.begin(), 0.0);
    if (!(mean > 0.0))
        throw std::invalid_argument("poisson_is: sum of w_i * lambda_i must be > 0");
    return std::min(1.0, gamma / mean);
}

/// Importance sampling with every Poisson rate scaled by theta. Each hit is
/// weighted by prod_j exp(-lambda_j (1 - theta)) theta^-X_j, accumulated in
/// log space.
template<RandomStream Rng>
EstimateReport poisson_is(std::span<double const> lambdas, std::span<double const> weights,
                          double gamma, std::uint64_t m, Rng const& rng, unsigned threads = 1)
{
    if (lambdas.size() != weights.size() || lambdas.empty())
        throw std::invalid_argument("poisson_is: rates and weights must have equal, nonzero length");
    if (!(gamma > 0.0))
        throw std::invalid_argument("poisson_is: gamma must be > 0");
    if (m < 1)
        throw std::invalid_argument("poisson_is: m must be >= 1");
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        if (!(lambdas[i] > 0.0) || !(weights[i] >= 0.0))
            throw std::invalid_argument("poisson_is: need rates > 0 and weights >= 0");

    double const theta = poisson_is_theta(lambdas, weights, gamma);
    if (theta >= 1.0)
        std::clog << "warning: poisson_is: gamma >= sum w_i lambda_i, using theta = 1 (crude MC)\n";

    double const log_theta = std::log(theta);
    double const log_base =
        -std::accumulate(lambdas.begin(), lambdas.end(), 0.0) * (1.0 - theta);

    struct Sampler {
        std::span<double const> lambdas;
        std::span<double const> weights;
        double gamma;
        double theta;
        double log_theta;
        double log_base;
        int make_state() const { return 0; }
        double operator()(int, Rng& r) const
        {
            double sum = 0.0;
            double total_count = 0.0;
            for (std::size_t j = 0; j < lambdas.size(); ++j) {
                double const k = poisson_variate(lambdas[j] * theta, r);
                sum += weights[j] * k;
                total_count += k;
            }
            if (sum > gamma)
                return 0.0;
            return std::exp(log_base - total_count * log_theta);
        }
    };

    Stopwatch clock;
    auto const moments = detail::chunked_moments(
        m, rng, threads, Sampler{lambdas, weights, gamma, theta, log_theta, log_base});
    EstimateReport report;
    report.method = "is";
    report.m = m;
    report.mean = moments.mean();
    report.variance = moments.variance();
    report.wall_seconds = clock.seconds();
    report.finalize();
    return report;
}

} // namespace usplit
