#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "reinit/cli.hpp"
#include "reinit/field_io.hpp"

using namespace reinit;
using Catch::Matchers::ContainsSubstring;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult cli(std::initializer_list<std::string> args) {
    std::vector<std::string> owned{"reinit_cli"};
    owned.insert(owned.end(), args);
    std::vector<const char*> argv;
    argv.reserve(owned.size());
    for (const std::string& a : owned) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliResult r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string write_config(const std::string& name, const nlohmann::json& j) {
    const std::string path = tmp_path(name);
    std::ofstream f(path, std::ios::binary);
    REQUIRE(f);
    f << j.dump(2) << '\n';
    return path;
}

// 41x41 circle: fast enough to solve in-process many times per test run
nlohmann::json small_circle() {
    return nlohmann::json{
        {"problem", {{"u0", "x^2 + y^2 - 1"}, {"delta", 0.1}}},
        {"grid", {{"bounds", {{-2.0, 2.0}, {-2.0, 2.0}}}, {"points", {41, 41}}}},
        {"run", {{"t_final", 2.0}, {"snapshot_stride", 10}}},
        {"analysis",
         {{"mask", {{"kind", "annulus"}, {"r_lo", 0.3}, {"r_hi", 1.4}}}}},
        {"output", {{"directory", tmp_path("reinit_cli_out")}, {"emit", nlohmann::json::array()}}}};
}

}  // namespace

TEST_CASE("cli audit reports and honors --check") {
    const std::string cfg = write_config("cli_audit.json", small_circle());
    const CliResult r = cli({"audit", "--config", cfg, "--check"});
    INFO(r.err);
    CHECK(r.code == 0);
    const nlohmann::json report = nlohmann::json::parse(r.out);
    CHECK(report.at("pass") == true);
    CHECK(report.at("g4").at("grad_floor").get<double>() > 0.0);
}

TEST_CASE("cli run produces a full report") {
    const std::string cfg = write_config("cli_run.json", small_circle());
    const CliResult r = cli({"run", "--config", cfg});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const nlohmann::json report = nlohmann::json::parse(r.out);
    for (const char* key :
         {"h", "audit", "solve", "mask", "error", "drift", "gradient",
          "barriers", "apriori", "checks"})
        CHECK(report.contains(key));

    // the distance-convergence checks must hold on this easy problem;
    // the apriori twolip count is asserted only by the acceptance suite
    for (const auto& c : report.at("checks")) {
        const std::string name = c.at("name");
        if (name == "sup_error" || name == "interface_drift" ||
            name == "barrier_sandwich" || name == "apriori_onelip") {
            INFO(name);
            CHECK(c.at("pass") == true);
        }
    }
    CHECK(report.at("error").at("time").get<double>() == 2.0);
}

TEST_CASE("cli rejects data without an interface") {
    nlohmann::json j = small_circle();
    j["problem"]["u0"] = "x^2 + y^2 + 1";
    const std::string cfg = write_config("cli_nointerface.json", j);
    const CliResult r = cli({"run", "--config", cfg, "--check"});
    CHECK(r.code == 2);
    const nlohmann::json err = nlohmann::json::parse(r.err);
    CHECK(err.at("error").at("type") == "config");
    CHECK_THAT(err.at("error").at("message").get<std::string>(),
               ContainsSubstring("no interface in domain"));
}

TEST_CASE("cli config errors exit 2") {
    SECTION("unknown key") {
        nlohmann::json j = small_circle();
        j["problem"]["typo"] = 1;
        const std::string cfg = write_config("cli_badkey.json", j);
        const CliResult r = cli({"audit", "--config", cfg});
        CHECK(r.code == 2);
        CHECK_THAT(r.err, ContainsSubstring("unknown key 'typo'"));
    }
    SECTION("missing file") {
        const CliResult r =
            cli({"audit", "--config", tmp_path("reinit_nope.json")});
        CHECK(r.code == 2);
        CHECK(nlohmann::json::parse(r.err).at("error").at("type") == "config");
    }
    SECTION("config is not json") {
        const std::string cfg = tmp_path("cli_notjson.json");
        std::ofstream(cfg) << "{oops";
        const CliResult r = cli({"audit", "--config", cfg});
        CHECK(r.code == 2);
        CHECK_THAT(r.err, ContainsSubstring("not valid JSON"));
    }
    SECTION("unknown flag") {
        const CliResult r = cli({"audit", "--nope"});
        CHECK(r.code == 2);
    }
    SECTION("unknown subcommand") {
        const CliResult r = cli({"paint"});
        CHECK(r.code == 2);
    }
    SECTION("missing required --config") {
        const CliResult r = cli({"audit"});
        CHECK(r.code == 2);
    }
}

TEST_CASE("guarded commands map numerical failures to exit 3") {
    std::ostringstream out, err;
    const int code = guarded_command(
        []() -> CommandOutcome { throw NumericalError("blow-up detected"); },
        false, out, err);
    CHECK(code == 3);
    const nlohmann::json e = nlohmann::json::parse(err.str());
    CHECK(e.at("error").at("type") == "numerical");
    CHECK_THAT(e.at("error").at("message").get<std::string>(),
               ContainsSubstring("blow-up"));
}

TEST_CASE("cli --check failure exits 4 with the report on stdout") {
    // a single oversized witness scale: 0.9 * max ||grad u0|| > 1, so no
    // scanned scale certifies a strict subsolution and the audit fails
    nlohmann::json j = small_circle();
    j["analysis"]["c_grid"] = {0.9};
    const std::string cfg = write_config("cli_flataudit.json", j);
    const CliResult r = cli({"audit", "--config", cfg, "--check"});
    CHECK(r.code == 4);
    const nlohmann::json report = nlohmann::json::parse(r.out);
    CHECK(report.at("pass") == false);
    CHECK(report.at("h4").at("pass") == false);
    CHECK(report.at("h4").at("witness_alpha").get<double>() > 0.0);

    // without --check the same command reports and exits 0
    CHECK(cli({"audit", "--config", cfg}).code == 0);

    // the gated subcommands refuse to solve on a failing audit
    const CliResult gated = cli({"run", "--config", cfg});
    CHECK(gated.code == 2);
    CHECK_THAT(gated.err, ContainsSubstring("audit"));
}

TEST_CASE("cli output is deterministic") {
    const std::string cfg = write_config("cli_det.json", small_circle());
    const CliResult a = cli({"oracle", "--config", cfg});
    const CliResult b = cli({"oracle", "--config", cfg});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("cli --seed overrides the configured seed") {
    const std::string cfg = write_config("cli_seed.json", small_circle());
    const CliResult r = cli({"oracle", "--config", cfg, "--seed", "7"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).at("seed") == 7);

    const CliResult d = cli({"oracle", "--config", cfg});
    CHECK(nlohmann::json::parse(d.out).at("seed") == 2026);
}

TEST_CASE("cli writes the requested artifacts") {
    const std::string dir = tmp_path("reinit_cli_artifacts");
    std::filesystem::remove_all(dir);
    nlohmann::json j = small_circle();
    j["output"]["emit"] = {"report", "fields", "interface", "curves"};
    const std::string cfg = write_config("cli_artifacts.json", j);
    const CliResult r = cli({"run", "--config", cfg, "--output-dir", dir});
    INFO(r.err);
    REQUIRE(r.code == 0);

    for (const char* name :
         {"report.json", "u0.csv", "final.csv", "distance.csv",
          "interface_initial.csv", "interface_final.csv", "sup_error.csv",
          "residual.csv"})
        CHECK(std::filesystem::exists(std::filesystem::path(dir) / name));

    // round-trippable field artifact on the configured grid
    const ScalarField final_field =
        read_field_csv((std::filesystem::path(dir) / "final.csv").string());
    CHECK(final_field.grid().points(0) == 41);
    CHECK(final_field.grid().points(1) == 41);

    // the written report matches what the command printed
    std::ifstream f(std::filesystem::path(dir) / "report.json");
    std::ostringstream file_text;
    file_text << f.rdbuf();
    CHECK(file_text.str() == r.out);
}

TEST_CASE("cli refinement study reports a halving ladder") {
    nlohmann::json j = small_circle();
    j["run"]["t_final"] = 1.5;
    j["analysis"]["resolutions"] = {21, 41, 81};
    const std::string cfg = write_config("cli_refine.json", j);
    const CliResult r = cli({"study-refine", "--config", cfg});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const nlohmann::json report = nlohmann::json::parse(r.out);
    const auto& rows = report.at("rows");
    REQUIRE(rows.size() == 3);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double ratio = rows[k - 1].at("h").get<double>() /
                             rows[k].at("h").get<double>();
        CHECK(std::abs(ratio - 2.0) <= 0.2);
    }
    CHECK(rows[2].at("sup_error").get<double>() <
          rows[0].at("sup_error").get<double>());
}

TEST_CASE("cli rescale study runs and rejects short horizons") {
    nlohmann::json j = small_circle();
    j["run"]["t_final"] = 2.2;
    j["run"]["snapshot_stride"] = 2;
    j["analysis"]["epsilons"] = {1.0, 0.5};
    const std::string cfg = write_config("cli_rescale.json", j);
    const CliResult r = cli({"study-rescale", "--config", cfg});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const nlohmann::json report = nlohmann::json::parse(r.out);
    const auto& rows = report.at("rows");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].at("epsilon").get<double>() == 1.0);
    CHECK(rows[0].at("lookup_time").get<double>() == 1.0);
    CHECK(rows[1].at("lookup_time").get<double>() == 2.0);

    j["analysis"]["epsilons"] = {0.125};
    const std::string short_cfg = write_config("cli_rescale_short.json", j);
    const CliResult s = cli({"study-rescale", "--config", short_cfg});
    CHECK(s.code == 2);
    CHECK_THAT(s.err, ContainsSubstring("needs t_final >= 8"));
}

TEST_CASE("cli help exits 0") {
    const CliResult r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("reinitialization"));
}
