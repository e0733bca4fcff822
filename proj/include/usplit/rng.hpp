#pragma once

#include <concepts>
#include <cstdint>
#include <random>

#include "usplit/special.hpp"

namespace usplit {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace detail

/// Deterministic pseudo-random stream. The engine (mt19937_64) and every
/// transformation below are fully specified, so a seed reproduces the same
/// draws bit-for-bit on any conforming platform. Substreams are keyed by
/// (seed, index) and do not depend on how many draws the parent has made.
class RngStream
{
  public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(detail::splitmix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    RngStream substream(std::uint64_t index) const
    {
        return RngStream(detail::splitmix64(seed_ ^ detail::splitmix64(index + 0x5851f42d4c957f2dULL)));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1).
    double uniform()
    {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n), n > 0 (Lemire's nearly-divisionless method).
    std::uint64_t below(std::uint64_t n)
    {
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            std::uint64_t const threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(engine_()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal by inversion.
    double normal()
    {
        double const u = uniform();
        return special::normal_quantile(std::log(u), std::log1p(-u));
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Requirements on a random source accepted by the samplers and estimators.
template<class R>
concept RandomStream = requires(R r, R const cr, std::uint64_t n) {
    { r.uniform() } -> std::same_as<double>;
    { r.below(n) } -> std::same_as<std::uint64_t>;
    { r.normal() } -> std::same_as<double>;
    { cr.substream(n) } -> std::same_as<R>;
};

static_assert(RandomStream<RngStream>);

} // namespace usplit
