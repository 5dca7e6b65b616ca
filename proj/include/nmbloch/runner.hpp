// runner.hpp — executes a scenario (with sweeps) and collects CSV / SVG / manifest
// output. Cells run concurrently; all file contents are assembled in memory and
// written by a single collector in cell order, so repeated runs are byte-identical.

#pragma once

#include "nmbloch/bloch.hpp"
#include "nmbloch/config.hpp"
#include "nmbloch/cp.hpp"
#include "nmbloch/csv.hpp"
#include "nmbloch/parallel.hpp"
#include "nmbloch/rates.hpp"
#include "nmbloch/svg.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace nmbloch::cli {

struct CellResult {
    std::string id;
    std::map<std::string, double> overrides;
    double p = 0.0;
    std::optional<double> s;
    std::string regime;
    std::vector<std::string> warnings;
    std::vector<std::string> assumptions;
    std::vector<std::string> negative_rate_channels;  // reversed-flow diagnostic
    std::vector<std::pair<std::string, std::string>> files;  // name suffix -> contents
    std::vector<svg::Panel> panels;
    bool cp_violated = false;
    double cp_violation_time = 0.0;
};

struct RunManifest {
    std::string label;
    std::string out_dir;
    std::vector<std::string> files;
    std::vector<std::string> warnings;
    bool cp_violated = false;
    bool strict_cp = false;
    nlohmann::ordered_json json;
};

namespace detail {

inline double coupling_scale(const SpectralModel& m) {
    if (const auto* l = std::get_if<Lorentzian>(&m)) return l->alpha_sq;
    if (const auto* o = std::get_if<Ohmic>(&m)) return o->alpha * o->alpha;
    return 1.0;
}

inline std::string cell_title(const CellResult& c) {
    std::string t = "p=" + csv::format_double(c.p);
    if (c.s) t += ", s=" + csv::format_double(*c.s);
    return t;
}

inline svg::Series make_series(const std::string& label, const std::vector<double>& t,
                               double scale, const std::vector<double>& y, double ynorm) {
    svg::Series s;
    s.label = label;
    s.x.reserve(t.size());
    s.y.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        s.x.push_back(t[i] * scale);
        s.y.push_back(y[i] / ynorm);
    }
    return s;
}

inline std::vector<svg::Series> clip_to(const std::vector<svg::Series>& in, double x_max) {
    std::vector<svg::Series> out;
    for (const auto& s : in) {
        svg::Series c;
        c.label = s.label;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (s.x[i] <= x_max) {
                c.x.push_back(s.x[i]);
                c.y.push_back(s.y[i]);
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

inline CellResult run_cell(const Scenario& sc) {
    CellResult res;
    res.p = sc.regime.p;
    res.s = sc.regime.s;
    res.regime = to_string(sc.regime.regime);
    res.warnings = sc.warnings;
    res.assumptions = sc.assumptions;

    const double tscale = dimensionless_time_scale(sc.spectrum);
    const bool need_rates =
        sc.outputs.count("rates") || sc.outputs.count("cp") || sc.plot == PlotKind::rates;
    const bool need_bloch = sc.outputs.count("bloch") || sc.outputs.count("cp") ||
                            sc.plot == PlotKind::bloch_z || sc.plot == PlotKind::bloch_xy;

    std::optional<RateTrajectory> rates;
    if (need_rates) {
        rates = sample_trajectory(sc.spectrum, sc.basis, sc.system, sc.grid, {1});
        if (sc.outputs.count("rates")) {
            res.files.emplace_back("rates.csv", rates_csv(*rates).to_string());
        }
        // memory-induced reversed flow shows up as negative rate excursions; probe
        // the memory window densely, not just the output grid
        const char* names[3] = {"minus", "zero", "plus"};
        const bool tabulated = std::holds_alternative<Tabulated>(sc.spectrum);
        const RateFunction fn(sc.spectrum, sc.basis, sc.system);
        const double probe_max =
            tabulated ? 0.0 : std::min(sc.grid.back(), 50.0 / dimensionless_time_scale(sc.spectrum));
        for (int c = 0; c < 3; ++c) {
            bool negative = false;
            for (const auto& smp : rates->samples) negative |= smp.gamma[c] < 0.0;
            for (int i = 1; i <= 2000 && !negative; ++i) {
                negative = fn.channel(probe_max * i / 2000.0, c).gamma < 0.0;
            }
            if (negative) res.negative_rate_channels.push_back(names[c]);
        }
    }

    std::optional<BlochTrajectory> traj;
    if (need_bloch) {
        IntegrateOptions opt;
        opt.include_lamb_shift = sc.lamb_shift;
        traj = integrate(sc.spectrum, sc.basis, sc.system, sc.r0, sc.grid, sc.secular_mode, opt);
        if (sc.outputs.count("bloch")) {
            res.files.emplace_back("bloch.csv", bloch_csv(*traj, sc.basis).to_string());
        }
    }

    if (sc.outputs.count("cp")) {
        const CPReport rep = sc.secular_mode
                                 ? secular_cp_check(*traj, *rates, sc.regime.regime)
                                 : nonsecular_cp_check(*traj, &*rates, sc.regime.regime);
        res.files.emplace_back("cp.csv", cp_csv(rep).to_string());
        for (const auto& w : rep.warnings) res.warnings.push_back(w);
        if (!rep.cp_holds) {
            res.cp_violated = true;
            res.cp_violation_time = rep.violation_time;
            res.warnings.push_back("CP violated at t = " +
                                   csv::format_double(rep.violation_time));
        }
    }

    if (sc.outputs.count("markov_summary")) {
        const RateFunction fn(sc.spectrum, sc.basis, sc.system);
        const MarkovLimits ml = fn.markov();
        const MarkovSummary ms = markov_summary(sc.basis, ml);
        csv::Table t;
        t.header = {"tau_R", "tau_D", "z_inf", "gammaM_minus", "gammaM_0", "gammaM_plus",
                    "lambM_minus", "lambM_0", "lambM_plus"};
        t.add_row({ms.tau_R, ms.tau_D, ms.z_inf, ml.gamma[0], ml.gamma[1], ml.gamma[2],
                   ml.lamb[0], ml.lamb[1], ml.lamb[2]});
        res.files.emplace_back("markov.csv", t.to_string());
    }

    // plot panels (dimensionless time on the x axis)
    if (sc.plot == PlotKind::rates && rates) {
        svg::Panel panel;
        panel.title = cell_title(res);
        panel.xlabel = "T";
        panel.ylabel = "gamma/alpha^2";
        const double norm = coupling_scale(sc.spectrum);
        std::vector<double> g[3];
        for (const auto& smp : rates->samples) {
            for (int c = 0; c < 3; ++c) g[c].push_back(smp.gamma[c]);
        }
        panel.series = {make_series("gamma_-", rates->grid, tscale, g[0], norm),
                        make_series("gamma_0", rates->grid, tscale, g[1], norm),
                        make_series("gamma_+", rates->grid, tscale, g[2], norm)};
        if (sc.inset_samples > 0) {
            panel.inset = clip_to(panel.series, sc.inset_t_max * tscale);
        }
        res.panels.push_back(std::move(panel));
    } else if ((sc.plot == PlotKind::bloch_z || sc.plot == PlotKind::bloch_xy) && traj) {
        svg::Panel panel;
        panel.title = cell_title(res);
        panel.xlabel = "T";
        std::vector<double> x, y, z;
        for (const auto& r : traj->states) {
            x.push_back(r[0]);
            y.push_back(r[1]);
            z.push_back(r[2]);
        }
        if (sc.plot == PlotKind::bloch_z) {
            panel.ylabel = "R_z";
            panel.series = {make_series("R_z", traj->grid, tscale, z, 1.0)};
        } else {
            panel.ylabel = "R_x, R_y";
            panel.series = {make_series("R_x", traj->grid, tscale, x, 1.0),
                            make_series("R_y", traj->grid, tscale, y, 1.0)};
        }
        if (sc.inset_samples > 0) {
            panel.inset = clip_to(panel.series, sc.inset_t_max * tscale);
        }
        res.panels.push_back(std::move(panel));
    }
    return res;
}

} // namespace detail

// Output directory resolution: NMBLOCH_OUT_DIR overrides the config value,
// an explicit argument overrides both.
inline std::string resolve_out_dir(const ScenarioConfig& cfg, const std::string& explicit_dir) {
    if (!explicit_dir.empty()) return explicit_dir;
    if (const char* env = std::getenv("NMBLOCH_OUT_DIR"); env && *env) return env;
    return cfg.out_dir;
}

inline RunManifest run(const ScenarioConfig& cfg, const std::string& out_dir_override = "") {
    const auto t_start = std::chrono::steady_clock::now();
    const auto cells = sweep_cells(cfg);
    std::vector<Scenario> scenarios(cells.size());
    std::vector<CellResult> results(cells.size());

    // resolve up front so configuration errors surface before any work is done
    for (std::size_t i = 0; i < cells.size(); ++i) {
        scenarios[i] = resolve_cell(cfg, cells[i]);
    }
    parallel_for(cells.size(), cfg.workers, [&](std::size_t i) {
        const std::string id = cells.size() == 1
                                   ? cfg.label
                                   : cfg.label + "_cell" + (i < 10 ? "0" : "") + std::to_string(i);
        try {
            results[i] = detail::run_cell(scenarios[i]);
        } catch (const std::exception& e) {
            throw std::runtime_error(id + " (p = " + csv::format_double(scenarios[i].regime.p) +
                                     "): " + e.what());
        }
        results[i].overrides = cells[i];
        results[i].id = id;
    });

    RunManifest man;
    man.label = cfg.label;
    man.out_dir = resolve_out_dir(cfg, out_dir_override);
    man.strict_cp = scenarios.front().strict_cp;
    std::filesystem::create_directories(man.out_dir);

    nlohmann::ordered_json j;
    j["label"] = cfg.label;
    j["cells"] = nlohmann::ordered_json::array();

    std::vector<svg::Panel> panels;
    for (const auto& r : results) {
        nlohmann::ordered_json jc;
        jc["id"] = r.id;
        jc["overrides"] = r.overrides;
        jc["p"] = r.p;
        if (r.s) jc["s"] = *r.s;
        jc["regime"] = r.regime;
        jc["warnings"] = r.warnings;
        if (!r.negative_rate_channels.empty()) {
            jc["negative_rate_channels"] = r.negative_rate_channels;
        }
        jc["files"] = nlohmann::ordered_json::array();
        for (const auto& [suffix, contents] : r.files) {
            const std::string name = r.id + "_" + suffix;
            csv::write_file((std::filesystem::path(man.out_dir) / name).string(), contents);
            man.files.push_back(name);
            jc["files"].push_back(name);
        }
        if (r.cp_violated) {
            man.cp_violated = true;
            jc["cp_violated_at"] = r.cp_violation_time;
        }
        for (const auto& w : r.warnings) man.warnings.push_back(r.id + ": " + w);
        j["cells"].push_back(jc);
        for (const auto& p : r.panels) panels.push_back(p);
    }

    if (!panels.empty()) {
        int cols = 1;
        if (cfg.sweeps.size() == 2) {
            cols = static_cast<int>(cfg.sweeps[1].values.size());
        } else {
            cols = static_cast<int>(std::min<std::size_t>(panels.size(), 3));
        }
        const std::string name = cfg.label + "_plot.svg";
        csv::write_file((std::filesystem::path(man.out_dir) / name).string(),
                        svg::render_grid(panels, cols));
        man.files.push_back(name);
        j["plot"] = name;
    }

    std::vector<std::string> assumptions = scenarios.front().assumptions;
    if (cfg.raw.has("note")) assumptions.push_back(cfg.raw.get_string("note"));
    j["assumptions"] = assumptions;
    j["files"] = man.files;
    j["cp_violated"] = man.cp_violated;
    j["duration_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t_start)
                           .count();
    man.json = j;
    csv::write_file((std::filesystem::path(man.out_dir) / (cfg.label + "_manifest.json")).string(),
                    j.dump(2) + "\n");
    return man;
}

} // namespace nmbloch::cli
