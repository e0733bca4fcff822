#pragma once

// Scenario files and the end-to-end estimation pipeline behind the CLI:
// schedule construction, estimation and report emission.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "usplit/baseline.hpp"
#include "usplit/error.hpp"
#include "usplit/json_io.hpp"
#include "usplit/model.hpp"
#include "usplit/rng.hpp"
#include "usplit/sched.hpp"
#include "usplit/split.hpp"
#include "usplit/stats.hpp"

namespace usplit {

enum class LevelsMethod { LowerBound, InverseCcdf };

struct RunSettings {
    std::uint64_t s = 3000;
    std::uint64_t m = 200;
    double p_bar = kDefaultPBar;
    LevelsMethod levels_method = LevelsMethod::LowerBound;
    std::size_t pilot_levels = 12;
    /// 0 means "same as s"
    std::uint64_t pilot_s = 0;
    std::uint64_t naive_m = 6000000;
    std::uint64_t is_m = 6000000;
    unsigned threads = 1;
};

/// Published figures carried alongside a preset for side-by-side output.
struct PublishedReference {
    double gamma;
    std::string method;
    double mean;
    double re_percent;
    std::optional<double> wnrv;
};

struct Scenario {
    std::string name;
    ProblemSpec problem;
    DbConvention db_convention = DbConvention::Power;
    std::vector<double> gammas;
    std::vector<std::string> methods{"split"};
    RunSettings settings;
    std::vector<PublishedReference> published;
};

/// Parses a scenario document: the problem fields at top level plus the
/// optional "name", "db_convention", "protocol" and "published".
inline Scenario scenario_from_json(Json const& j)
{
    using namespace json_detail;
    Scenario sc;
    if (!j.is_object())
        fail("$", "expected an object");
    if (has(j, "name"))
        sc.name = j.at("name").get<std::string>();
    if (has(j, "db_convention")) {
        auto const c = j.at("db_convention");
        if (c == "power")
            sc.db_convention = DbConvention::Power;
        else if (c == "amplitude")
            sc.db_convention = DbConvention::Amplitude;
        else
            fail("$.db_convention", "expected \"power\" or \"amplitude\"");
    }
    sc.problem = problem_from_json(j, "$", sc.db_convention);
    sc.gammas = {sc.problem.gamma};

    if (has(j, "protocol")) {
        Json const& p = j.at("protocol");
        std::string const pp = "$.protocol";
        if (!p.is_object())
            fail(pp, "expected an object");
        auto count = [&](char const* key, std::uint64_t& out) {
            if (!has(p, key))
                return;
            Json const& v = p.at(key);
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
                fail(pp + "." + key, "expected a nonnegative integer");
            out = v.get<std::uint64_t>();
        };
        if (has(p, "gammas")) {
            Json const& g = p.at("gammas");
            if (!g.is_array() || g.empty())
                fail(pp + ".gammas", "expected a non-empty array");
            sc.gammas.clear();
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (!g[i].is_number())
                    fail(pp + ".gammas[" + std::to_string(i) + "]", "expected a number");
                sc.gammas.push_back(g[i].get<double>());
            }
        }
        if (has(p, "methods"))
            sc.methods = p.at("methods").get<std::vector<std::string>>();
        count("s", sc.settings.s);
        count("m", sc.settings.m);
        count("pilot_s", sc.settings.pilot_s);
        count("naive_m", sc.settings.naive_m);
        count("is_m", sc.settings.is_m);
        std::uint64_t pilot_levels = sc.settings.pilot_levels;
        count("pilot_levels", pilot_levels);
        sc.settings.pilot_levels = pilot_levels;
        if (has(p, "p_bar"))
            sc.settings.p_bar = number(p, "p_bar", pp);
        if (has(p, "levels_method")) {
            auto const lm = p.at("levels_method");
            if (lm == "lb")
                sc.settings.levels_method = LevelsMethod::LowerBound;
            else if (lm == "iccdf")
                sc.settings.levels_method = LevelsMethod::InverseCcdf;
            else
                fail(pp + ".levels_method", "expected \"lb\" or \"iccdf\"");
        }
    }

    if (has(j, "published")) {
        Json const& refs = j.at("published");
        for (std::size_t i = 0; i < refs.size(); ++i) {
            std::string const rp = "$.published[" + std::to_string(i) + "]";
            Json const& r = refs[i];
            PublishedReference ref{number(r, "gamma", rp), member(r, "method", rp).get<std::string>(),
                               number(r, "mean", rp), number(r, "re_percent", rp), std::nullopt};
            if (has(r, "wnrv") && !r.at("wnrv").is_null())
                ref.wnrv = number(r, "wnrv", rp);
            sc.published.push_back(ref);
        }
    }
    return sc;
}

inline Scenario parse_scenario_text(std::string const& text)
{
    Json j;
    try {
        j = Json::parse(text);
    } catch (Json::parse_error const& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return scenario_from_json(j);
}

/// Reads and parses a scenario file.
inline Scenario parse_scenario(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

inline ProblemSpec with_gamma(ProblemSpec problem, double gamma)
{
    problem.gamma = gamma;
    return problem;
}

// Stream reserved for the pilot run; replications use substreams 0..m-1.
inline constexpr std::uint64_t kPilotStream = ~std::uint64_t{0};

/// Builds the level schedule according to the settings.
inline LevelSchedule build_schedule(ProblemSpec const& problem, RunSettings const& settings,
                                    std::uint64_t seed)
{
    if (settings.levels_method == LevelsMethod::LowerBound)
        return lower_bound_schedule(problem, settings.p_bar);
    auto pilot = RngStream(seed).substream(kPilotStream);
    std::uint64_t const pilot_s = settings.pilot_s ? settings.pilot_s : settings.s;
    return inverse_ccdf_schedule(problem, settings.pilot_levels, pilot_s, settings.p_bar, pilot);
}

/// Runs one estimator ("split", "naive" or "is") on the problem.
inline EstimateReport run_method(ProblemSpec const& problem, std::string const& method,
                                 RunSettings const& settings, std::uint64_t seed)
{
    RngStream const rng(seed);
    EstimateReport report;
    if (method == "split") {
        Stopwatch clock;
        auto const schedule = build_schedule(problem, settings, seed);
        double const schedule_seconds = clock.seconds();
        report = replicate(problem, schedule, settings.s, settings.m, rng, settings.threads);
        report.schedule_seconds = schedule_seconds;
        report.wall_seconds += schedule_seconds;
    } else if (method == "naive") {
        report = naive_mc(problem, settings.naive_m, rng, settings.threads);
    } else if (method == "is") {
        if (problem.kind != ProblemKind::PoissonNative)
            throw ConfigError("method 'is' requires a Poisson weighted-sum scenario");
        std::vector<double> lambdas;
        for (auto const& m : problem.marginals)
            lambdas.push_back(std::get<Poisson>(m).lambda);
        auto const& w = std::get<WeightedSumImportance>(problem.importance).weights;
        report = poisson_is(lambdas, w, problem.gamma, settings.is_m, rng, settings.threads);
    } else {
        throw ConfigError("unknown method '" + method + "'");
    }
    report.seed = seed;
    report.finalize();
    return report;
}

/// Zeroes every wall-clock-dependent field so repeated runs serialize
/// identically.
inline void strip_timing(EstimateReport& report)
{
    report.wall_seconds = 0.0;
    report.schedule_seconds = 0.0;
    report.wnrv.reset();
}

inline std::string format_number(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::string format_optional(std::optional<double> const& v, double scale = 1.0)
{
    return v ? format_number(*v * scale) : std::string();
}

inline constexpr char const* kCsvHeader = "gamma,method,mean,re_percent,wnrv,wall_seconds,seed";

/// One CSV row in the fixed column order of kCsvHeader.
inline std::string csv_row(double gamma, EstimateReport const& r)
{
    return format_number(gamma) + "," + r.method + "," + format_number(r.mean) + ","
           + format_optional(r.re, 100.0) + "," + format_optional(r.wnrv) + ","
           + format_number(r.wall_seconds) + "," + std::to_string(r.seed);
}

} // namespace usplit
