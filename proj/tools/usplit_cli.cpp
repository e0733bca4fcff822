// usplit: command-line front end for the splitting estimator.
//
//   usplit run       --scenario FILE|--preset NAME [--method split|naive|is] ...
//   usplit levels    --scenario FILE|--preset NAME [--levels-method lb|iccdf] ...
//   usplit reproduce --table I..VI [--out FILE.csv]
//   usplit verify    --scenario FILE|--preset NAME
//   usplit preset    NAME            (print a built-in scenario)
//
// Exit codes: 0 success, 2 configuration error, 3 estimation error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "usplit/usplit.hpp"
#include "usplit_presets.hpp"

namespace {

using namespace usplit;

constexpr int kExitConfig = 2;
constexpr int kExitEstimation = 3;

struct ScenarioArgs {
    std::string scenario_path;
    std::string preset;
    std::optional<double> gamma;
    std::optional<std::uint64_t> s;
    std::optional<std::uint64_t> m;
    std::optional<std::uint64_t> naive_m;
    std::optional<double> p_bar;
    std::string levels_method;
    std::optional<std::size_t> pilot_levels;
    std::optional<std::uint64_t> pilot_s;
    unsigned threads = 1;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
    bool reproducible = false;
};

std::string preset_text(std::string const& name)
{
    auto const& presets = embedded_presets();
    auto it = presets.find(name);
    if (it == presets.end())
        throw ConfigError("unknown preset '" + name + "'");
    return it->second;
}

std::string table_to_preset(std::string table)
{
    static std::map<std::string, std::string> const ids{{"I", "table1"},  {"II", "table2"},
                                                        {"III", "table3"}, {"IV", "table4"},
                                                        {"V", "table5"},   {"VI", "table6"}};
    auto it = ids.find(table);
    if (it == ids.end())
        throw ConfigError("unknown table '" + table + "' (expected I, II, III, IV, V or VI)");
    return it->second;
}

Scenario load_scenario(ScenarioArgs const& a)
{
    if (a.scenario_path.empty() == a.preset.empty())
        throw ConfigError("exactly one of --scenario or --preset is required");
    Scenario sc = a.preset.empty() ? parse_scenario(a.scenario_path)
                                   : parse_scenario_text(preset_text(a.preset));
    if (a.gamma)
        sc.problem.gamma = *a.gamma;
    if (a.s)
        sc.settings.s = *a.s;
    if (a.p_bar)
        sc.settings.p_bar = *a.p_bar;
    if (a.pilot_levels)
        sc.settings.pilot_levels = *a.pilot_levels;
    if (a.pilot_s)
        sc.settings.pilot_s = *a.pilot_s;
    if (a.levels_method == "lb")
        sc.settings.levels_method = LevelsMethod::LowerBound;
    else if (a.levels_method == "iccdf")
        sc.settings.levels_method = LevelsMethod::InverseCcdf;
    sc.settings.threads = a.threads;
    return sc;
}

void write_output(std::string const& path, std::string const& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot open output file '" + path + "'");
    out << text;
}

void add_scenario_options(CLI::App& cmd, ScenarioArgs& a)
{
    cmd.add_option("--scenario", a.scenario_path, "Scenario JSON file");
    cmd.add_option("--preset", a.preset, "Built-in scenario (table1 .. table6)");
    cmd.add_option("--gamma", a.gamma, "Threshold, overrides the scenario");
    cmd.add_option("--s", a.s, "Samples per level");
    cmd.add_option("--pbar", a.p_bar, "Target per-level survival probability");
    cmd.add_option("--levels-method", a.levels_method, "Level heuristic")
        ->check(CLI::IsMember({"lb", "iccdf"}));
    cmd.add_option("--pilot-levels", a.pilot_levels, "Equally spaced pilot levels (iccdf)");
    cmd.add_option("--pilot-s", a.pilot_s, "Pilot samples per level (iccdf, default --s)");
    cmd.add_option("--seed", a.seed, "Master seed");
    cmd.add_option("--threads", a.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd.add_option("--out", a.out, "Output file (default stdout)");
    cmd.add_option("--format", a.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

int cmd_run(ScenarioArgs const& a, std::string const& method)
{
    Scenario sc = load_scenario(a);
    if (a.m) {
        sc.settings.m = *a.m;
        sc.settings.naive_m = *a.m;
        sc.settings.is_m = *a.m;
    }
    EstimateReport report = run_method(sc.problem, method, sc.settings, a.seed);
    if (a.reproducible)
        strip_timing(report);
    if (a.format == "csv")
        write_output(a.out, std::string(kCsvHeader) + "\n" + csv_row(sc.problem.gamma, report) + "\n");
    else
        write_output(a.out, to_json(report).dump(2) + "\n");
    return 0;
}

int cmd_levels(ScenarioArgs const& a)
{
    Scenario const sc = load_scenario(a);
    LevelSchedule const schedule = build_schedule(sc.problem, sc.settings, a.seed);
    std::vector<double> targets;
    for (std::size_t l = 1; l <= schedule.size(); ++l)
        targets.push_back(std::pow(schedule.p_bar, static_cast<double>(l)));

    if (a.format == "csv") {
        std::ostringstream os;
        os << "level,time,target\n";
        for (std::size_t l = 0; l < schedule.size(); ++l)
            os << l + 1 << "," << format_number(schedule.times[l]) << ","
               << format_number(targets[l]) << "\n";
        write_output(a.out, os.str());
    } else {
        Json j{{"gamma", sc.problem.gamma},
               {"p_bar", schedule.p_bar},
               {"method", sc.settings.levels_method == LevelsMethod::LowerBound ? "lb" : "iccdf"},
               {"levels", schedule.times},
               {"targets", targets},
               {"seed", a.seed}};
        write_output(a.out, j.dump(2) + "\n");
    }
    return 0;
}

struct ReproduceArgs {
    std::string table;
    std::string out;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> s;
    std::optional<std::uint64_t> m;
    std::optional<std::uint64_t> naive_m;
    std::optional<std::uint64_t> is_m;
    unsigned threads = 1;
    bool reproducible = false;
};

int cmd_reproduce(ReproduceArgs const& a)
{
    Scenario sc = parse_scenario_text(preset_text(table_to_preset(a.table)));
    if (a.s)
        sc.settings.s = *a.s;
    if (a.m)
        sc.settings.m = *a.m;
    if (a.naive_m)
        sc.settings.naive_m = *a.naive_m;
    if (a.is_m)
        sc.settings.is_m = *a.is_m;
    sc.settings.threads = a.threads;

    auto find_ref = [&](double gamma, std::string const& method) -> PublishedReference const* {
        for (auto const& r : sc.published)
            if (r.gamma == gamma && r.method == method)
                return &r;
        return nullptr;
    };
    auto ref_columns = [](PublishedReference const* r) {
        if (!r)
            return std::string(",,");
        return format_number(r->mean) + "," + format_number(r->re_percent) + ","
               + format_optional(r->wnrv);
    };

    std::ostringstream os;
    os << kCsvHeader << ",published_mean,published_re_percent,published_wnrv\n";
    for (std::size_t row = 0; row < sc.gammas.size(); ++row) {
        double const gamma = sc.gammas[row];
        ProblemSpec const problem = with_gamma(sc.problem, gamma);
        std::uint64_t const seed = a.seed + row;
        for (auto const& method : sc.methods) {
            EstimateReport report = run_method(problem, method, sc.settings, seed);
            if (a.reproducible)
                strip_timing(report);
            os << csv_row(gamma, report) << "," << ref_columns(find_ref(gamma, method)) << "\n";
            std::clog << "table " << a.table << " gamma=" << format_number(gamma) << " " << method
                      << ": mean=" << report.mean << "\n";
        }
        // published columns for estimators that are not run here
        for (auto const& r : sc.published) {
            if (r.gamma != gamma)
                continue;
            bool run_here = false;
            for (auto const& m : sc.methods)
                run_here = run_here || m == r.method;
            if (!run_here)
                os << format_number(gamma) << "," << r.method << ",,,,,," << ref_columns(&r) << "\n";
        }
    }
    write_output(a.out, os.str());
    return 0;
}

int cmd_verify(ScenarioArgs const& a)
{
    Scenario const sc = load_scenario(a);
    auto const exact = oracle_exact(sc.problem);
    if (!exact)
        throw ConfigError("no reference oracle for this problem family");

    Json j{{"gamma", sc.problem.gamma}, {"oracle", *exact}};
    Json results = Json::array();
    std::vector<std::string> methods{"split", "naive"};
    if (sc.problem.kind == ProblemKind::PoissonNative)
        methods.push_back("is");
    RunSettings settings = sc.settings;
    if (a.m)
        settings.m = *a.m;
    settings.naive_m = a.naive_m.value_or(1000000);
    settings.is_m = settings.naive_m;
    bool all_ok = true;
    for (auto const& method : methods) {
        auto report = run_method(sc.problem, method, settings, a.seed);
        double const se = report.re ? *report.re * report.mean : 0.0;
        double const z = se > 0.0 ? (report.mean - *exact) / se : 0.0;
        bool const ok = se > 0.0 ? std::fabs(z) <= 3.0 : report.mean == *exact;
        all_ok = all_ok && ok;
        results.push_back(Json{{"method", method},
                               {"mean", report.mean},
                               {"re", optional_number(report.re)},
                               {"z", z},
                               {"within_3se", ok}});
    }
    j["results"] = results;
    write_output(a.out, j.dump(2) + "\n");
    return all_ok ? 0 : kExitEstimation;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multilevel splitting estimator for static rare-event probabilities"};
    app.require_subcommand(1);

    ScenarioArgs run_args;
    std::string method = "split";
    auto* run = app.add_subcommand("run", "Estimate P[S(X) <= gamma] for a scenario");
    add_scenario_options(*run, run_args);
    run->add_option("--method", method, "Estimator")->check(CLI::IsMember({"split", "naive", "is"}));
    run->add_option("--m", run_args.m, "Replications (split) or samples (naive, is)");
    run->add_flag("--reproducible", run_args.reproducible, "Zero all wall-clock fields");

    ScenarioArgs level_args;
    auto* levels = app.add_subcommand("levels", "Print the level schedule");
    add_scenario_options(*levels, level_args);

    ReproduceArgs rep_args;
    auto* reproduce = app.add_subcommand("reproduce", "Run every row of a built-in table");
    reproduce->add_option("--table", rep_args.table, "I, II, III, IV, V or VI")->required();
    reproduce->add_option("--out", rep_args.out, "CSV output file (default stdout)");
    reproduce->add_option("--seed", rep_args.seed, "Base seed; row i uses seed + i");
    reproduce->add_option("--s", rep_args.s, "Samples per level");
    reproduce->add_option("--m", rep_args.m, "Splitting replications");
    reproduce->add_option("--naive-m", rep_args.naive_m, "Naive Monte Carlo samples");
    reproduce->add_option("--is-m", rep_args.is_m, "Importance sampling samples");
    reproduce->add_option("--threads", rep_args.threads, "Worker threads")->check(CLI::PositiveNumber);
    reproduce->add_flag("--reproducible", rep_args.reproducible, "Zero all wall-clock fields");

    ScenarioArgs verify_args;
    auto* verify = app.add_subcommand("verify", "Compare estimators against an exact oracle");
    add_scenario_options(*verify, verify_args);
    verify->add_option("--m", verify_args.m, "Splitting replications");
    verify->add_option("--naive-m", verify_args.naive_m, "Naive and IS samples (default 1e6)");

    std::string preset_name;
    auto* preset = app.add_subcommand("preset", "Print a built-in scenario");
    preset->add_option("name", preset_name, "table1 .. table6")->required();

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const& e) {
        return app.exit(e);
    } catch (CLI::CallForAllHelp const& e) {
        return app.exit(e);
    } catch (CLI::ParseError const& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run)
            return cmd_run(run_args, method);
        if (*levels)
            return cmd_levels(level_args);
        if (*reproduce)
            return cmd_reproduce(rep_args);
        if (*verify)
            return cmd_verify(verify_args);
        if (*preset) {
            std::cout << preset_text(preset_name);
            return 0;
        }
    } catch (ConfigError const& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (std::invalid_argument const& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (std::exception const& e) {
        std::cerr << "estimation error: " << e.what() << "\n";
        return kExitEstimation;
    }
    return 0;
}
