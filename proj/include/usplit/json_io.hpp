#pragma once

// JSON encoding of distributions, problems and reports. Reading reports the
// JSON path of the first offending field through ConfigError.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "usplit/dist.hpp"
#include "usplit/error.hpp"
#include "usplit/model.hpp"
#include "usplit/stats.hpp"

namespace usplit {

using Json = nlohmann::ordered_json;

/// How dB-valued Log-normal and noise parameters convert to natural units.
/// Power: x_dB = 10 log10(x). Amplitude: x_dB = 20 log10(x).
enum class DbConvention { Power, Amplitude };

inline double db_scale(DbConvention c)
{
    return std::log(10.0) / (c == DbConvention::Power ? 10.0 : 20.0);
}

namespace json_detail {

[[noreturn]] inline void fail(std::string const& path, std::string const& what)
{
    throw ConfigError(path + ": " + what);
}

inline Json const& member(Json const& obj, std::string const& key, std::string const& path)
{
    if (!obj.is_object())
        fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        fail(path + "." + key, "missing required field");
    return *it;
}

inline double number(Json const& obj, std::string const& key, std::string const& path)
{
    Json const& v = member(obj, key, path);
    if (!v.is_number())
        fail(path + "." + key, "expected a number");
    return v.get<double>();
}

inline bool has(Json const& obj, std::string const& key)
{
    return obj.is_object() && obj.contains(key);
}

template<class F>
auto construct(std::string const& path, F&& f)
{
    try {
        return f();
    } catch (std::invalid_argument const& e) {
        fail(path, e.what());
    }
}

} // namespace json_detail

inline Json to_json(DistributionSpec const& d)
{
    Json params = std::visit(
        [](auto const& law) -> Json {
            using T = std::decay_t<decltype(law)>;
            Json p;
            if constexpr (std::is_same_v<T, LogNormal>) {
                p["mu"] = law.mu;
                p["sigma"] = law.sigma;
            } else if constexpr (std::is_same_v<T, Weibull>) {
                p["alpha"] = law.alpha;
                p["eta"] = law.eta;
            } else if constexpr (std::is_same_v<T, GeneralizedGamma>) {
                p["d"] = law.d;
                p["p"] = law.p;
                p["a"] = law.a;
            } else if constexpr (std::is_same_v<T, Gamma>) {
                p["shape"] = law.shape;
                p["rate"] = law.rate;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                p["rate"] = law.rate;
            } else {
                p["lambda"] = law.lambda;
            }
            return p;
        },
        d);
    return Json{{"kind", kind_name(d)}, {"params", params}};
}

/// Reads {"kind": ..., "params": {...}}. Log-normal also accepts mu_db /
/// sigma_db, converted with the given convention.
inline DistributionSpec distribution_from_json(Json const& j, std::string const& path = "$",
                                               DbConvention db = DbConvention::Power)
{
    using namespace json_detail;
    Json const& kind_j = member(j, "kind", path);
    if (!kind_j.is_string())
        fail(path + ".kind", "expected a string");
    std::string const kind = kind_j.get<std::string>();
    Json const& p = member(j, "params", path);
    std::string const pp = path + ".params";

    if (kind == "lognormal") {
        double mu;
        double sigma;
        if (has(p, "mu_db") || has(p, "sigma_db")) {
            mu = number(p, "mu_db", pp) * db_scale(db);
            sigma = number(p, "sigma_db", pp) * db_scale(db);
        } else {
            mu = number(p, "mu", pp);
            sigma = number(p, "sigma", pp);
        }
        return construct(pp, [&] { return DistributionSpec{LogNormal(mu, sigma)}; });
    }
    if (kind == "weibull")
        return construct(pp, [&] {
            return DistributionSpec{Weibull(number(p, "alpha", pp), number(p, "eta", pp))};
        });
    if (kind == "gengamma")
        return construct(pp, [&] {
            return DistributionSpec{
                GeneralizedGamma(number(p, "d", pp), number(p, "p", pp), number(p, "a", pp))};
        });
    if (kind == "gamma")
        return construct(pp, [&] {
            return DistributionSpec{Gamma(number(p, "shape", pp), number(p, "rate", pp))};
        });
    if (kind == "exponential")
        return construct(pp, [&] { return DistributionSpec{Exponential(number(p, "rate", pp))}; });
    if (kind == "poisson")
        return construct(pp, [&] { return DistributionSpec{Poisson(number(p, "lambda", pp))}; });
    fail(path + ".kind", "unknown distribution kind '" + kind + "'");
}

inline Json to_json(ImportanceSpec const& spec)
{
    return std::visit(
        [](auto const& s) -> Json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, SumImportance>)
                return Json{{"kind", "sum"}};
            else if constexpr (std::is_same_v<T, RatioImportance>)
                return Json{{"kind", "ratio"}, {"eta", s.eta}};
            else if constexpr (std::is_same_v<T, OrderedPartialSumImportance>)
                return Json{{"kind", "ordered_partial_sum"}, {"n_bar", s.n_bar}};
            else
                return Json{{"kind", "weighted_sum"}, {"weights", s.weights}};
        },
        spec);
}

inline ImportanceSpec importance_from_json(Json const& j, std::string const& path = "$")
{
    using namespace json_detail;
    Json const& kind_j = member(j, "kind", path);
    if (!kind_j.is_string())
        fail(path + ".kind", "expected a string");
    std::string const kind = kind_j.get<std::string>();
    if (kind == "sum")
        return SumImportance{};
    if (kind == "ratio") {
        if (has(j, "eta_db")) {
            // noise variance is a power: always 10 log10
            double const eta_db = number(j, "eta_db", path);
            return RatioImportance{std::pow(10.0, eta_db / 10.0)};
        }
        return RatioImportance{number(j, "eta", path)};
    }
    if (kind == "ordered_partial_sum") {
        Json const& v = member(j, "n_bar", path);
        if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
            fail(path + ".n_bar", "expected a positive integer");
        return OrderedPartialSumImportance{v.get<std::size_t>()};
    }
    if (kind == "weighted_sum") {
        Json const& v = member(j, "weights", path);
        if (!v.is_array())
            fail(path + ".weights", "expected an array");
        std::vector<double> w;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                fail(path + ".weights[" + std::to_string(i) + "]", "expected a number");
            w.push_back(v[i].get<double>());
        }
        return WeightedSumImportance{std::move(w)};
    }
    fail(path + ".kind", "unknown importance kind '" + kind + "'");
}

inline Json to_json(ProblemSpec const& p)
{
    Json margs = Json::array();
    for (auto const& m : p.marginals)
        margs.push_back(to_json(m));
    Json dirs = Json::array();
    for (auto d : p.directions)
        dirs.push_back(d == Direction::Increasing ? "I" : "D");
    return Json{{"marginals", margs},
                {"directions", dirs},
                {"importance", to_json(p.importance)},
                {"gamma", p.gamma},
                {"kind", p.kind == ProblemKind::PoissonNative ? "poisson" : "continuous"}};
}

/// Reads the problem part of a scenario and validates it.
inline ProblemSpec problem_from_json(Json const& j, std::string const& path = "$",
                                     DbConvention db = DbConvention::Power)
{
    using namespace json_detail;
    ProblemSpec p;
    Json const& margs = member(j, "marginals", path);
    if (!margs.is_array() || margs.empty())
        fail(path + ".marginals", "expected a non-empty array");
    for (std::size_t i = 0; i < margs.size(); ++i)
        p.marginals.push_back(
            distribution_from_json(margs[i], path + ".marginals[" + std::to_string(i) + "]", db));

    if (has(j, "directions")) {
        Json const& dirs = j.at("directions");
        if (!dirs.is_array())
            fail(path + ".directions", "expected an array");
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            std::string const dp = path + ".directions[" + std::to_string(i) + "]";
            if (!dirs[i].is_string())
                fail(dp, "expected \"I\" or \"D\"");
            auto const s = dirs[i].get<std::string>();
            if (s == "I")
                p.directions.push_back(Direction::Increasing);
            else if (s == "D")
                p.directions.push_back(Direction::Decreasing);
            else
                fail(dp, "expected \"I\" or \"D\"");
        }
    } else {
        fail(path + ".directions", "missing required field");
    }

    p.importance = importance_from_json(member(j, "importance", path), path + ".importance");
    p.gamma = number(j, "gamma", path);

    std::string kind = "continuous";
    if (has(j, "kind")) {
        if (!j.at("kind").is_string())
            fail(path + ".kind", "expected a string");
        kind = j.at("kind").get<std::string>();
    }
    if (kind == "poisson")
        p.kind = ProblemKind::PoissonNative;
    else if (kind == "continuous")
        p.kind = ProblemKind::ContinuousEmbedded;
    else
        fail(path + ".kind", "expected \"continuous\" or \"poisson\"");

    try {
        validate(p);
    } catch (std::invalid_argument const& e) {
        fail(path, e.what());
    }
    return p;
}

inline Json optional_number(std::optional<double> const& v)
{
    return v ? Json(*v) : Json(nullptr);
}

inline Json to_json(EstimateReport const& r)
{
    return Json{{"method", r.method},
                {"mean", r.mean},
                {"variance", r.variance},
                {"re", optional_number(r.re)},
                {"wnrv", optional_number(r.wnrv)},
                {"wall_seconds", r.wall_seconds},
                {"schedule_seconds", r.schedule_seconds},
                {"m", r.m},
                {"s", r.s},
                {"levels", r.levels},
                {"per_level_survival", r.per_level_survival},
                {"seed", r.seed}};
}

inline EstimateReport report_from_json(Json const& j)
{
    using namespace json_detail;
    EstimateReport r;
    r.method = member(j, "method", "$").get<std::string>();
    r.mean = number(j, "mean", "$");
    r.variance = number(j, "variance", "$");
    auto opt = [&](char const* key) -> std::optional<double> {
        Json const& v = member(j, key, "$");
        return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
    };
    r.re = opt("re");
    r.wnrv = opt("wnrv");
    r.wall_seconds = number(j, "wall_seconds", "$");
    r.schedule_seconds = has(j, "schedule_seconds") ? number(j, "schedule_seconds", "$") : 0.0;
    r.m = member(j, "m", "$").get<std::uint64_t>();
    r.s = member(j, "s", "$").get<std::uint64_t>();
    r.levels = member(j, "levels", "$").get<std::vector<double>>();
    r.per_level_survival = member(j, "per_level_survival", "$").get<std::vector<double>>();
    r.seed = member(j, "seed", "$").get<std::uint64_t>();
    return r;
}

} // namespace usplit
