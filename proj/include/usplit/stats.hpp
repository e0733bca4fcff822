#pragma once

// Replication statistics: relative error, work-normalized relative variance
// and the report value shared by every estimator.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace usplit {

/// Coefficient of variation of the replication mean:
/// sqrt(variance) / (mean * sqrt(m)). Absent when mean <= 0.
inline std::optional<double> relative_error(double mean, double variance, std::uint64_t m)
{
    if (!(mean > 0.0) || m == 0)
        return std::nullopt;
    return std::sqrt(variance) / (mean * std::sqrt(static_cast<double>(m)));
}

/// Work-normalized relative variance, RE^2 times wall-clock seconds.
inline double wnrv(double re, double wall_seconds)
{
    return re * re * wall_seconds;
}

struct EstimateReport {
    std::string method;
    double mean = 0.0;
    /// Sample variance of one replication (or one sample for naive / IS).
    double variance = 0.0;
    std::optional<double> re;
    std::optional<double> wnrv;
    /// Total wall time, schedule construction included.
    double wall_seconds = 0.0;
    /// Part of wall_seconds spent building the level schedule.
    double schedule_seconds = 0.0;
    std::uint64_t m = 0;
    std::uint64_t s = 0;
    std::vector<double> levels;
    std::vector<double> per_level_survival;
    std::uint64_t seed = 0;

    /// Recomputes re and wnrv from mean, variance, m and wall_seconds.
    void finalize()
    {
        re = relative_error(mean, variance, m);
        wnrv = re ? std::optional<double>(usplit::wnrv(*re, wall_seconds)) : std::nullopt;
    }

    bool operator==(EstimateReport const&) const = default;
};

/// Streaming mean / variance (Welford) with Chan's pairwise merge so that
/// chunked results combine in a fixed order.
class RunningMoments
{
  public:
    void add(double x)
    {
        ++count_;
        double const delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }

    void merge(RunningMoments const& other)
    {
        if (other.count_ == 0)
            return;
        if (count_ == 0) {
            *this = other;
            return;
        }
        double const n_a = static_cast<double>(count_);
        double const n_b = static_cast<double>(other.count_);
        double const delta = other.mean_ - mean_;
        double const total = n_a + n_b;
        mean_ += delta * n_b / total;
        m2_ += other.m2_ + delta * delta * n_a * n_b / total;
        count_ += other.count_;
    }

    std::uint64_t count() const { return count_; }
    double mean() const { return mean_; }
    /// Unbiased sample variance; 0 for fewer than two samples.
    double variance() const
    {
        return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
    }

  private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

class Stopwatch
{
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace usplit
