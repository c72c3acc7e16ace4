#pragma once

#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reinit/experiment.hpp"

namespace reinit {
namespace detail {

inline nlohmann::json error_object(const char* type, const std::string& message) {
    return {{"error", {{"type", type}, {"message", message}}}};
}

}  // namespace detail

inline void write_artifacts(const CommandOutcome& oc, const OutputConfig& cfg) {
    auto enabled = [&cfg](const char* what) {
        return std::find(cfg.emit.begin(), cfg.emit.end(), what) !=
               cfg.emit.end();
    };
    if (cfg.emit.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(cfg.directory, ec);
    if (ec)
        throw ConfigError("cannot create output directory '" + cfg.directory +
                          "': " + ec.message());
    const std::string dir = cfg.directory + "/";
    if (enabled("report"))
        detail::write_text_file(dir + "report.json", oc.report.dump(2) + "\n");
    if (enabled("fields"))
        for (const auto& [name, field] : oc.fields)
            write_field_csv(field, dir + name + ".csv");
    if (enabled("interface"))
        for (const auto& [name, mesh] : oc.meshes)
            write_mesh_csv(mesh, dir + name + ".csv");
    if (enabled("curves"))
        for (const auto& curve : oc.curves)
            write_curve_csv(dir + curve.name + ".csv", curve.x, curve.y,
                            curve.rows);
}

// Shared exception-to-exit-code policy: 0 success, 2 config error,
// 3 numerical failure, 4 failed --check. Errors land on the diagnostic
// stream as machine-readable JSON objects.
inline int guarded_command(const std::function<CommandOutcome()>& body,
                           bool check, std::ostream& out, std::ostream& err) {
    try {
        const CommandOutcome oc = body();
        out << oc.report.dump(2) << '\n';
        return check && !oc.checks_ok ? 4 : 0;
    } catch (const ConfigError& e) {
        err << detail::error_object("config", e.what()).dump(2) << '\n';
        return 2;
    } catch (const NumericalError& e) {
        err << detail::error_object("numerical", e.what()).dump(2) << '\n';
        return 3;
    }
}

inline int run_cli(int argc, const char* const* argv,
                   std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"signed-distance reinitialization workbench"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    bool check = false;
    std::uint64_t seed = 0;
    bool seed_given = false;

    const char* names[] = {"audit", "oracle", "run", "study-refine",
                           "study-rescale"};
    const char* blurbs[] = {
        "measure the structural hypotheses on the configured problem",
        "cross-check the two distance oracles and their Lipschitz certificates",
        "solve, then run barriers, drift, error, and a priori analysis",
        "rerun the pipeline across the configured resolution ladder",
        "tabulate the rescaled-family error against the distance oracle"};
    for (int k = 0; k < 5; ++k) {
        CLI::App* sub = app.add_subcommand(names[k], blurbs[k]);
        sub->add_option("--config", config_path, "experiment config (JSON)")
            ->required();
        sub->add_option("--output-dir", output_dir,
                        "override the configured artifact directory");
        sub->add_flag("--check", check,
                      "exit 4 unless the report's checks all pass");
        sub->add_option("--seed", seed, "override the configured seed");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << detail::error_object("config", e.what()).dump(2) << '\n';
        return 2;
    }
    CLI::App* active = app.get_subcommands().front();
    const std::string command = active->get_name();
    seed_given = active->count("--seed") > 0;

    return guarded_command(
        [&]() {
            ExperimentConfig cfg = load_config(config_path);
            if (seed_given) cfg.seed = seed;
            if (!output_dir.empty()) cfg.output.directory = output_dir;
            const OutputConfig out_cfg = cfg.output;

            CommandOutcome oc;
            if (command == "study-refine")
                oc = study_refine_command(cfg);
            else if (command == "audit")
                oc = audit_command(make_context(std::move(cfg)));
            else if (command == "oracle")
                oc = oracle_command(make_context(std::move(cfg)));
            else if (command == "run")
                oc = run_command(make_context(std::move(cfg)));
            else
                oc = study_rescale_command(make_context(std::move(cfg)));
            write_artifacts(oc, out_cfg);
            return oc;
        },
        check, out, err);
}

}  // namespace reinit
