#pragma once

// Forward simulation of the multivariate Gamma process and the multivariate
// Poisson jump process through stationary independent increments.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "usplit/rng.hpp"

namespace usplit {

enum class ProcessKind { Gamma, Poisson };

/// Time plus coordinate levels: Gamma levels G_i(t) or Poisson counts
/// (stored as exact integers in double).
struct ProcessState {
    double t = 0.0;
    std::vector<double> values;
    ProcessKind kind = ProcessKind::Gamma;

    static ProcessState zero(std::size_t n, ProcessKind kind)
    {
        return ProcessState{0.0, std::vector<double>(n, 0.0), kind};
    }
};

/// Gamma(shape, 1) draw. Marsaglia-Tsang for shape >= 1; below 1 the draw is
/// boosted to shape + 1 and scaled by U^(1/shape) in log space. For shapes
/// around 1e-4 the true value is frequently below the smallest double and
/// then returns 0.
template<RandomStream Rng>
double gamma_variate(double shape, Rng& rng)
{
    if (!(shape > 0.0) || !std::isfinite(shape))
        throw std::invalid_argument("gamma_variate: shape must be > 0");

    double const boosted = shape < 1.0 ? shape + 1.0 : shape;
    double const d = boosted - 1.0 / 3.0;
    double const c = 1.0 / std::sqrt(9.0 * d);
    double x;
    for (;;) {
        double z;
        double v;
        do {
            z = rng.normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        double const u = rng.uniform();
        double const z2 = z * z;
        if (u < 1.0 - 0.0331 * z2 * z2 || std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) {
            x = d * v;
            break;
        }
    }
    if (boosted != shape)
        x *= std::exp(std::log(rng.uniform()) / shape);
    return x;
}

/// Poisson(mean) draw: sequential inversion for small means, Hormann's PTRS
/// transformed rejection otherwise.
template<RandomStream Rng>
double poisson_variate(double mean, Rng& rng)
{
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw std::invalid_argument("poisson_variate: mean must be >= 0");
    if (mean == 0.0)
        return 0.0;

    if (mean < 10.0) {
        double const u = rng.uniform();
        double p = std::exp(-mean);
        double cum = p;
        double k = 0.0;
        while (u > cum) {
            k += 1.0;
            p *= mean / k;
            double const next = cum + p;
            if (next == cum)
                break;
            cum = next;
        }
        return k;
    }

    double const slam = std::sqrt(mean);
    double const loglam = std::log(mean);
    double const b = 0.931 + 2.53 * slam;
    double const a = -0.059 + 0.02483 * b;
    double const invalpha = 1.1239 + 1.1328 / (b - 3.4);
    double const vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double const u = rng.uniform() - 0.5;
        double const v = rng.uniform();
        double const us = 0.5 - std::fabs(u);
        double const k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr)
            return k;
        if (k < 0.0 || (us < 0.013 && v > us))
            continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b)
            <= -mean + k * loglam - std::lgamma(k + 1.0))
            return k;
    }
}

namespace detail {
inline void check_advance(ProcessState const& state, double dt, ProcessKind expected)
{
    if (state.kind != expected)
        throw std::invalid_argument("advance: process kind mismatch");
    if (!(dt > 0.0))
        throw std::invalid_argument("advance: dt must be > 0");
    if (state.t + dt > 1.0 + 1e-12)
        throw std::invalid_argument("advance: time would exceed 1");
}
} // namespace detail

/// Adds independent Gamma(dt, 1) increments to every coordinate.
template<RandomStream Rng>
ProcessState advance_gamma(ProcessState const& state, double dt, Rng& rng)
{
    detail::check_advance(state, dt, ProcessKind::Gamma);
    ProcessState next = state;
    next.t = state.t + dt;
    for (double& g : next.values)
        g += gamma_variate(dt, rng);
    return next;
}

/// Adds independent Poisson(rate_i * dt) increments to coordinate i.
template<RandomStream Rng>
ProcessState advance_poisson(ProcessState const& state, double dt,
                             std::span<double const> rates, Rng& rng)
{
    detail::check_advance(state, dt, ProcessKind::Poisson);
    if (rates.size() != state.values.size())
        throw std::invalid_argument("advance_poisson: rate vector length mismatch");
    for (double r : rates)
        if (!(r > 0.0))
            throw std::invalid_argument("advance_poisson: rates must be > 0");
    ProcessState next = state;
    next.t = state.t + dt;
    for (std::size_t i = 0; i < rates.size(); ++i)
        next.values[i] += poisson_variate(rates[i] * dt, rng);
    return next;
}

} // namespace usplit
