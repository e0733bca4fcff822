#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "usplit/pipeline.hpp"

using namespace usplit;

namespace {

std::string config_error(std::string const& text)
{
    try {
        parse_scenario_text(text);
    } catch (ConfigError const& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(JsonIo, LognormalDb)
{
    auto const d = distribution_from_json(
        Json::parse(R"({"kind":"lognormal","params":{"mu_db":0,"sigma_db":4}})"));
    auto const& ln = std::get<LogNormal>(d);
    EXPECT_EQ(ln.mu, 0.0);
    EXPECT_NEAR(ln.sigma, 0.92103403719761827, 1e-15);

    auto const amp = distribution_from_json(
        Json::parse(R"({"kind":"lognormal","params":{"mu_db":0,"sigma_db":4}})"), "$",
        DbConvention::Amplitude);
    EXPECT_NEAR(std::get<LogNormal>(amp).sigma, 0.92103403719761827 / 2.0, 1e-15);
}

TEST(JsonIo, Weibull)
{
    auto const d =
        distribution_from_json(Json::parse(R"({"kind":"weibull","params":{"alpha":0.5,"eta":1}})"));
    EXPECT_EQ(std::get<Weibull>(d).alpha, 0.5);
    EXPECT_EQ(std::get<Weibull>(d).eta, 1.0);
}

TEST(JsonIo, RatioEtaDb)
{
    auto const spec = importance_from_json(Json::parse(R"({"kind":"ratio","eta_db":-10})"));
    EXPECT_NEAR(std::get<RatioImportance>(spec).eta, 0.1, 1e-16);
}

TEST(JsonIo, ProblemRoundTrip)
{
    ProblemSpec const p{{LogNormal(0.1, 2.0), Weibull(0.5, 1.0), GeneralizedGamma(1, 2, 3),
                         Gamma(2, 3), Exponential(4)},
                        std::vector<Direction>(5, Direction::Increasing),
                        OrderedPartialSumImportance{3},
                        0.7};
    auto const q = problem_from_json(to_json(p));
    EXPECT_EQ(to_json(q), to_json(p));
}

TEST(JsonIo, ReportRoundTrip)
{
    EstimateReport r;
    r.method = "split";
    r.mean = 3.97e-6;
    r.variance = 1e-12;
    r.m = 200;
    r.s = 3000;
    r.wall_seconds = 1.5;
    r.levels = {0.5, 1.0};
    r.per_level_survival = {0.1, 0.2};
    r.seed = 9;
    r.finalize();
    EXPECT_EQ(report_from_json(to_json(r)), r);

    EstimateReport z;
    z.method = "naive";
    z.m = 5;
    z.finalize();
    auto const j = to_json(z);
    EXPECT_TRUE(j.at("re").is_null());
    EXPECT_EQ(report_from_json(j), z);
}

TEST(JsonIo, ErrorsCarryPath)
{
    EXPECT_NE(config_error("{").find("invalid JSON"), std::string::npos);
    EXPECT_NE(config_error(R"({"marginals":[{"kind":"weibull","params":{"alpha":-1,"eta":1}}],
                              "directions":["I"],"importance":{"kind":"sum"},"gamma":1})")
                  .find("$.marginals[0].params"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"marginals":[{"kind":"cauchy","params":{}}],
                              "directions":["I"],"importance":{"kind":"sum"},"gamma":1})")
                  .find("$.marginals[0].kind"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"marginals":[{"kind":"exponential","params":{"rate":1}}],
                              "directions":["X"],"importance":{"kind":"sum"},"gamma":1})")
                  .find("$.directions[0]"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"marginals":[{"kind":"exponential","params":{"rate":1}}],
                              "directions":["I"],"importance":{"kind":"sum"}})")
                  .find("$.gamma"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"marginals":[{"kind":"exponential","params":{"rate":1}}],
                              "directions":["D"],"importance":{"kind":"sum"},"gamma":1})"),
              "");
}

TEST(Scenario, ProtocolBlock)
{
    auto const sc = parse_scenario_text(R"({
        "name": "demo",
        "marginals": [{"kind":"exponential","params":{"rate":1}},
                      {"kind":"exponential","params":{"rate":1}}],
        "directions": ["I","I"],
        "importance": {"kind":"sum"},
        "gamma": 0.5,
        "protocol": {"gammas": [0.5, 0.1], "methods": ["split","naive"], "s": 500, "m": 20,
                     "levels_method": "iccdf", "pilot_levels": 6, "p_bar": 0.2}
    })");
    EXPECT_EQ(sc.name, "demo");
    EXPECT_EQ(sc.gammas, (std::vector<double>{0.5, 0.1}));
    EXPECT_EQ(sc.methods, (std::vector<std::string>{"split", "naive"}));
    EXPECT_EQ(sc.settings.s, 500u);
    EXPECT_EQ(sc.settings.m, 20u);
    EXPECT_EQ(sc.settings.pilot_levels, 6u);
    EXPECT_EQ(sc.settings.p_bar, 0.2);
    EXPECT_EQ(sc.settings.levels_method, LevelsMethod::InverseCcdf);
}

TEST(Scenario, PresetsParse)
{
    for (int i = 1; i <= 6; ++i) {
        auto const path = std::string(USPLIT_PRESET_DIR) + "/table" + std::to_string(i) + ".json";
        auto const sc = parse_scenario(path);
        EXPECT_FALSE(sc.gammas.empty()) << path;
        EXPECT_FALSE(sc.published.empty()) << path;
    }
    EXPECT_THROW(parse_scenario("/nonexistent/scenario.json"), ConfigError);
}

TEST(Pipeline, CsvRow)
{
    EstimateReport r;
    r.method = "split";
    r.mean = 0.5;
    r.variance = 0.0;
    r.m = 10;
    r.seed = 3;
    r.finalize();
    EXPECT_EQ(csv_row(0.25, r), "0.25,split,0.5,0,0,0,3");
    r.mean = 0.0;
    r.finalize();
    EXPECT_EQ(csv_row(0.25, r), "0.25,split,0,,,0,3");
}

TEST(Pipeline, RunMethodRejectsUnknown)
{
    ProblemSpec const p{{Exponential(1)}, {Direction::Increasing}, SumImportance{}, 0.5};
    EXPECT_THROW(run_method(p, "bogus", RunSettings{}, 1), ConfigError);
    EXPECT_THROW(run_method(p, "is", RunSettings{}, 1), ConfigError);
}
