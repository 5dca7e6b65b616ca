// nmbloch — non-Markovian optical Bloch engine for a driven two-level atom in a
// structured reservoir.
//
// Subcommands:
//   run <config>            execute a scenario file
//   preset <name> [--out d] run a canned figure scenario (fig1..fig5)
//   validate <config>       parse and resolve a scenario, report the outcome
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 CP violation detected under strict_cp.

#include "nmbloch/config.hpp"
#include "nmbloch/presets.hpp"
#include "nmbloch/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

namespace {

int execute(const nmbloch::cli::ScenarioConfig& cfg, const std::string& out_dir) {
    const auto man = nmbloch::cli::run(cfg, out_dir);
    std::printf("wrote %zu file(s) to %s\n", man.files.size(), man.out_dir.c_str());
    for (const auto& w : man.warnings) std::printf("warning: %s\n", w.c_str());
    if (man.cp_violated) {
        std::printf("complete positivity violated (see manifest)\n");
        if (man.strict_cp) return 3;
    }
    return 0;
}

int validate(const std::string& path) {
    const auto cfg = nmbloch::cli::ScenarioConfig::from_file(path);
    const auto cells = nmbloch::cli::sweep_cells(cfg);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto sc = nmbloch::cli::resolve_cell(cfg, cells[i]);
        const std::string s_part =
            sc.regime.s ? ", s = " + nmbloch::csv::format_double(*sc.regime.s) : std::string();
        std::printf("cell %zu: p = %g%s, regime = %s, %zu sample(s)\n", i, sc.regime.p,
                    s_part.c_str(), nmbloch::to_string(sc.regime.regime), sc.grid.size());
        for (const auto& w : sc.warnings) std::printf("  warning: %s\n", w.c_str());
    }
    std::printf("ok: %s\n", path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"non-Markovian optical Bloch engine"};
    app.require_subcommand(1);

    std::string run_config;
    auto* cmd_run = app.add_subcommand("run", "execute a scenario file");
    cmd_run->add_option("config", run_config, "scenario file")->required();
    std::string run_out;
    cmd_run->add_option("--out", run_out, "output directory override");

    std::string preset_name, preset_out;
    auto* cmd_preset = app.add_subcommand("preset", "run a canned figure scenario");
    cmd_preset->add_option("name", preset_name, "fig1..fig5")->required();
    cmd_preset->add_option("--out", preset_out, "output directory override");

    std::string validate_config;
    auto* cmd_validate = app.add_subcommand("validate", "check a scenario file");
    cmd_validate->add_option("config", validate_config, "scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            return execute(nmbloch::cli::ScenarioConfig::from_file(run_config), run_out);
        }
        if (cmd_preset->parsed()) {
            return execute(nmbloch::cli::figure_presets(preset_name), preset_out);
        }
        return validate(validate_config);
    } catch (const nmbloch::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    }
}
