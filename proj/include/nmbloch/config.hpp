// config.hpp — flat key-value scenario files and their resolution into typed runs
//
// Format: one `key = value` per line, dotted section names, '#' comments.
// Sweeps (sweep.field/sweep.values, optionally sweep2.*) expand to the cross
// product of cells; each cell overrides the named field and re-resolves.

#pragma once

#include "nmbloch/dressed.hpp"
#include "nmbloch/spectral.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace nmbloch::cli {

inline std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

struct RawConfig {
    std::map<std::string, std::string> values;

    static RawConfig parse_string(const std::string& text) {
        RawConfig c;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value, got '" + line + "'");
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            }
            c.values[key] = val;
        }
        return c;
    }

    static RawConfig parse_file(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open config file: " + path);
        std::stringstream ss;
        ss << f.rdbuf();
        return parse_string(ss.str());
    }

    bool has(const std::string& key) const { return values.count(key) > 0; }

    std::string get_string(const std::string& key) const {
        const auto it = values.find(key);
        if (it == values.end()) throw ConfigError(key + ": required field missing");
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }

    double get_double(const std::string& key) const {
        const std::string s = get_string(key);
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(key + ": not a number: '" + s + "'");
        }
    }

    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    std::optional<double> get_optional(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return get_double(key);
    }

    long get_long(const std::string& key, long fallback) const {
        if (!has(key)) return fallback;
        const double v = get_double(key);
        if (v != std::floor(v)) throw ConfigError(key + ": expected an integer");
        return static_cast<long>(v);
    }

    bool get_bool(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const std::string s = get_string(key);
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw ConfigError(key + ": expected a boolean, got '" + s + "'");
    }

    std::vector<double> get_list(const std::string& key) const {
        std::vector<double> out;
        std::string s = get_string(key);
        std::replace(s.begin(), s.end(), ',', ' ');
        std::istringstream in(s);
        double v;
        while (in >> v) out.push_back(v);
        if (out.empty()) throw ConfigError(key + ": expected a list of numbers");
        return out;
    }
};

enum class PlotKind { none, rates, bloch_z, bloch_xy };

struct Scenario {
    SpectralModel spectrum{Lorentzian{}};
    SystemParams system;
    DressedBasis basis;
    BlochVector r0{0.0, 0.0, 1.0};
    std::vector<double> grid;
    std::size_t inset_samples = 0;  // leading dense-grid portion, for plot insets
    double inset_t_max = 0.0;
    bool secular_mode = true;
    std::set<std::string> outputs;
    bool lamb_shift = false;
    bool strict_cp = false;
    PlotKind plot = PlotKind::none;
    RegimeParams regime;
    std::vector<std::string> warnings;
    std::vector<std::string> assumptions;
};

struct SweepAxis {
    std::string field;
    std::vector<double> values;
};

struct ScenarioConfig {
    RawConfig raw;
    std::vector<SweepAxis> sweeps;
    unsigned workers = 0;
    std::string out_dir = "out";
    std::string label = "run";

    static ScenarioConfig from_raw(RawConfig r) {
        static const std::set<std::string> sweepable = {
            "spectrum.alpha_sq", "spectrum.lambda", "spectrum.omega0", "spectrum.s",
            "spectrum.alpha",    "spectrum.omega_c", "system.delta",   "system.rabi",
            "system.omega_a",    "system.omega_l",   "initial.x",      "initial.y",
            "initial.z",         "horizon.t_max",    "horizon.T_max"};
        ScenarioConfig c;
        c.workers = static_cast<unsigned>(r.get_long("workers", 0));
        c.out_dir = r.get_string("out_dir", "out");
        c.label = r.get_string("label", "run");
        for (const std::string prefix : {"sweep", "sweep2"}) {
            if (r.has(prefix + ".field") || r.has(prefix + ".values")) {
                SweepAxis ax;
                ax.field = r.get_string(prefix + ".field");
                if (!sweepable.count(ax.field)) {
                    throw ConfigError(prefix + ".field: '" + ax.field + "' is not sweepable");
                }
                ax.values = r.get_list(prefix + ".values");
                c.sweeps.push_back(std::move(ax));
            }
        }
        c.raw = std::move(r);
        return c;
    }

    static ScenarioConfig from_file(const std::string& path) {
        return from_raw(RawConfig::parse_file(path));
    }
};

namespace detail {

inline SpectralModel resolve_spectrum(const RawConfig& r, std::vector<std::string>& assumptions,
                                      std::optional<double>& synthesized_omega_l) {
    const std::string kind = r.get_string("spectrum.kind");
    if (kind == "lorentzian") {
        Lorentzian l;
        l.alpha_sq = r.get_double("spectrum.alpha_sq");
        l.lambda = r.get_double("spectrum.lambda");
        if (r.has("spectrum.omega0") == r.has("spectrum.s")) {
            throw ConfigError("spectrum: give exactly one of spectrum.omega0 or spectrum.s");
        }
        if (r.has("spectrum.omega0")) {
            l.omega0 = r.get_double("spectrum.omega0");
        } else {
            // Only omega0 - omega_L enters the Lorentzian dynamics; anchor the
            // laser high when the config leaves it open.
            const double s = r.get_double("spectrum.s");
            double wl;
            if (r.has("system.omega_l")) {
                wl = r.get_double("system.omega_l");
            } else {
                wl = 1e4 * std::max({l.lambda, std::abs(r.get_double("system.rabi", 1.0)),
                                     std::abs(r.get_double("system.delta", 0.0)), 1.0});
                synthesized_omega_l = wl;
                assumptions.push_back("omega_L anchored at " + std::to_string(wl) +
                                      " (only omega0 - omega_L is physical here)");
            }
            l.omega0 = wl + s * l.lambda;
        }
        SpectralModel m{l};
        validate(m);
        return m;
    }
    if (kind == "ohmic") {
        Ohmic o;
        o.alpha = r.get_double("spectrum.alpha");
        o.omega_c = r.get_double("spectrum.omega_c");
        SpectralModel m{o};
        validate(m);
        return m;
    }
    if (kind == "tabulated") {
        return SpectralModel{load_tabulated_csv(r.get_string("spectrum.table"))};
    }
    throw ConfigError("spectrum.kind: unknown kind '" + kind + "'");
}

} // namespace detail

inline Scenario resolve_scenario(const RawConfig& r) {
    Scenario sc;
    std::optional<double> synthesized_omega_l;
    sc.spectrum = detail::resolve_spectrum(r, sc.assumptions, synthesized_omega_l);

    std::optional<double> omega_l = r.get_optional("system.omega_l");
    if (!omega_l) omega_l = synthesized_omega_l;
    sc.system = make_system_params(r.get_optional("system.delta"), r.get_double("system.rabi"),
                                   r.get_optional("system.omega_a"), omega_l,
                                   r.get_double("system.validity_threshold", 0.1));
    sc.basis = dressed_basis(sc.system);
    for (auto& w : model_validity_warnings(sc.system)) sc.warnings.push_back(std::move(w));

    RegimeThresholds thresholds;
    thresholds.secular_min_p = r.get_double("regime.secular_min_p", thresholds.secular_min_p);
    thresholds.nonsecular_max_p =
        r.get_double("regime.nonsecular_max_p", thresholds.nonsecular_max_p);
    sc.regime = regime_params(sc.spectrum, sc.basis, sc.system, thresholds);
    for (auto& w : sc.regime.warnings) sc.warnings.push_back(std::move(w));

    const BlochVector r_in{r.get_double("initial.x", 0.0), r.get_double("initial.y", 0.0),
                           r.get_double("initial.z", 1.0)};
    const std::string frame = r.get_string("initial.basis", "dressed");
    if (frame == "dressed") {
        sc.r0 = r_in;
    } else if (frame == "bare") {
        sc.r0 = to_dressed_frame(r_in, sc.basis);
    } else {
        throw ConfigError("initial.basis: expected dressed or bare, got '" + frame + "'");
    }

    const double scale = dimensionless_time_scale(sc.spectrum);
    double t_max;
    if (r.has("horizon.t_max") == r.has("horizon.T_max")) {
        throw ConfigError("horizon: give exactly one of horizon.t_max or horizon.T_max");
    }
    t_max = r.has("horizon.t_max") ? r.get_double("horizon.t_max")
                                   : r.get_double("horizon.T_max") / scale;
    if (!(t_max > 0.0)) throw ConfigError("horizon.t_max: must be > 0");
    const long samples = r.get_long("horizon.samples", 400);
    if (samples < 2) throw ConfigError("horizon.samples: need at least 2");
    for (long i = 0; i < samples; ++i) {
        sc.grid.push_back(t_max * static_cast<double>(i) / static_cast<double>(samples - 1));
    }
    if (r.has("horizon.inset_T_max") || r.has("horizon.inset_samples")) {
        sc.inset_t_max = r.get_double("horizon.inset_T_max") / scale;
        const long n = r.get_long("horizon.inset_samples", 200);
        if (!(sc.inset_t_max > 0.0) || sc.inset_t_max > t_max || n < 2) {
            throw ConfigError("horizon.inset_T_max: must lie inside (0, T_max]");
        }
        for (long i = 0; i < n; ++i) {
            sc.grid.push_back(sc.inset_t_max * static_cast<double>(i) /
                              static_cast<double>(n - 1));
        }
        std::sort(sc.grid.begin(), sc.grid.end());
        sc.grid.erase(std::unique(sc.grid.begin(), sc.grid.end()), sc.grid.end());
        sc.inset_samples = static_cast<std::size_t>(n);
    }

    const std::string mode = r.get_string("mode", "secular");
    if (mode == "secular") {
        sc.secular_mode = true;
    } else if (mode == "full") {
        sc.secular_mode = false;
    } else {
        throw ConfigError("mode: expected secular or full, got '" + mode + "'");
    }

    std::string outs = r.get_string("outputs", "rates");
    std::replace(outs.begin(), outs.end(), ',', ' ');
    std::istringstream oin(outs);
    std::string tok;
    while (oin >> tok) {
        if (tok != "rates" && tok != "bloch" && tok != "cp" && tok != "markov_summary") {
            throw ConfigError("outputs: unknown output '" + tok + "'");
        }
        sc.outputs.insert(tok);
    }

    sc.lamb_shift = r.get_bool("lamb_shift", false);
    sc.strict_cp = r.get_bool("strict_cp", false);

    const std::string plot = r.get_string("plot.kind", "none");
    if (plot == "none") sc.plot = PlotKind::none;
    else if (plot == "rates") sc.plot = PlotKind::rates;
    else if (plot == "bloch_z") sc.plot = PlotKind::bloch_z;
    else if (plot == "bloch_xy") sc.plot = PlotKind::bloch_xy;
    else throw ConfigError("plot.kind: unknown kind '" + plot + "'");

    return sc;
}

// Cross product of sweep cells in declaration order (first axis outermost).
inline std::vector<std::map<std::string, double>> sweep_cells(const ScenarioConfig& c) {
    std::vector<std::map<std::string, double>> cells{{}};
    for (const auto& ax : c.sweeps) {
        if (ax.values.empty()) throw ConfigError("sweep: empty value list for " + ax.field);
        std::vector<std::map<std::string, double>> next;
        for (const auto& cell : cells) {
            for (double v : ax.values) {
                auto m = cell;
                m[ax.field] = v;
                next.push_back(std::move(m));
            }
        }
        cells = std::move(next);
    }
    return cells;
}

inline Scenario resolve_cell(const ScenarioConfig& c,
                             const std::map<std::string, double>& overrides) {
    RawConfig r = c.raw;
    for (const auto& [k, v] : overrides) r.values[k] = csv::format_double(v);
    return resolve_scenario(r);
}

} // namespace nmbloch::cli
