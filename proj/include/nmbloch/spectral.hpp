// spectral.hpp — reservoir spectral densities and the (p, s) regime parameters
//
// Lorentzian J is defined on the whole real line; its full-line integral is
// alpha_sq * lambda / 2 and the peak value alpha_sq / (2 pi). Ohmic J lives on
// [0, inf) with an exponential cutoff. Tabulated densities interpolate linearly
// and vanish outside the grid.

#pragma once

#include "nmbloch/csv.hpp"
#include "nmbloch/dressed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace nmbloch {

struct Lorentzian {
    double alpha_sq = 1.0;  // coupling, frequency units
    double lambda = 1.0;    // width; tau_C = 1/lambda
    double omega0 = 1.0;    // peak frequency
};

struct Ohmic {
    double alpha = 0.1;     // dimensionless coupling
    double omega_c = 1.0;   // cutoff; tau_C = 1/omega_c
};

struct Tabulated {
    std::vector<double> freq;     // strictly increasing
    std::vector<double> density;  // >= 0
};

using SpectralModel = std::variant<Lorentzian, Ohmic, Tabulated>;

inline void validate(const SpectralModel& m) {
    if (const auto* l = std::get_if<Lorentzian>(&m)) {
        if (!(l->lambda > 0.0)) throw ConfigError("lorentzian: lambda must be > 0");
        if (!(l->omega0 > 0.0)) throw ConfigError("lorentzian: omega0 must be > 0");
        if (!(l->alpha_sq > 0.0)) throw ConfigError("lorentzian: alpha_sq must be > 0");
    } else if (const auto* o = std::get_if<Ohmic>(&m)) {
        if (!(o->alpha > 0.0)) throw ConfigError("ohmic: alpha must be > 0");
        if (!(o->omega_c > 0.0)) throw ConfigError("ohmic: omega_c must be > 0");
    } else {
        const auto& t = std::get<Tabulated>(m);
        if (t.freq.size() != t.density.size() || t.freq.size() < 2) {
            throw ConfigError("tabulated: need >= 2 (frequency, density) pairs");
        }
        for (std::size_t i = 0; i < t.freq.size(); ++i) {
            if (t.freq[i] < 0.0) throw ConfigError("tabulated: frequencies must be >= 0");
            if (t.density[i] < 0.0) throw ConfigError("tabulated: densities must be >= 0");
            if (i > 0 && !(t.freq[i] > t.freq[i - 1])) {
                throw ConfigError("tabulated: frequencies must be strictly increasing");
            }
        }
    }
}

// Spectral density J(omega_tilde).
inline double evaluate(const SpectralModel& m, double w) {
    if (const auto* l = std::get_if<Lorentzian>(&m)) {
        const double d = w - l->omega0;
        return l->alpha_sq / (2.0 * M_PI) * l->lambda * l->lambda /
               (d * d + l->lambda * l->lambda);
    }
    if (const auto* o = std::get_if<Ohmic>(&m)) {
        if (w < 0.0) return 0.0;
        return o->alpha * o->alpha * w * std::exp(-w / o->omega_c);
    }
    const auto& t = std::get<Tabulated>(m);
    if (w <= t.freq.front() || w >= t.freq.back()) {
        return (w == t.freq.front()) ? t.density.front()
             : (w == t.freq.back()) ? t.density.back()
                                    : 0.0;
    }
    const auto it = std::upper_bound(t.freq.begin(), t.freq.end(), w);
    const std::size_t i = static_cast<std::size_t>(it - t.freq.begin());
    const double x0 = t.freq[i - 1], x1 = t.freq[i];
    const double f = (w - x0) / (x1 - x0);
    return (1.0 - f) * t.density[i - 1] + f * t.density[i];
}

inline double correlation_time(const SpectralModel& m) {
    if (const auto* l = std::get_if<Lorentzian>(&m)) return 1.0 / l->lambda;
    if (const auto* o = std::get_if<Ohmic>(&m)) return 1.0 / o->omega_c;
    return 1.0;  // tabulated densities have no closed-form correlation time
}

// Time scale mapping t to the dimensionless T used on plot axes (lambda or omega_c).
inline double dimensionless_time_scale(const SpectralModel& m) {
    if (const auto* l = std::get_if<Lorentzian>(&m)) return l->lambda;
    if (const auto* o = std::get_if<Ohmic>(&m)) return o->omega_c;
    return 1.0;
}

enum class Regime { Secular, Intermediate, Nonsecular };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::Secular: return "secular";
        case Regime::Nonsecular: return "nonsecular";
        default: return "intermediate";
    }
}

struct RegimeParams {
    double p = 0.0;                 // tau_C / tau_S
    std::optional<double> s;        // spectral detuning (absent for tabulated)
    Regime regime = Regime::Intermediate;
    std::vector<std::string> warnings;
};

struct RegimeThresholds {
    double secular_min_p = 10.0;
    double nonsecular_max_p = 0.1;
};

inline RegimeParams regime_params(const SpectralModel& m, const DressedBasis& basis,
                                  const SystemParams& params,
                                  const RegimeThresholds& thr = {}) {
    RegimeParams r;
    if (const auto* l = std::get_if<Lorentzian>(&m)) {
        r.p = basis.omega / l->lambda;
        if (params.omega_laser) {
            r.s = (l->omega0 - *params.omega_laser) / l->lambda;
        }
    } else if (const auto* o = std::get_if<Ohmic>(&m)) {
        r.p = basis.omega / o->omega_c;
        if (!params.omega_laser) {
            throw ConfigError("ohmic: omega_L is required (s = omega_L/omega_c)");
        }
        r.s = *params.omega_laser / o->omega_c;
        if (r.p >= *r.s) {
            r.warnings.push_back("model validity: ohmic requires p << s, got p = " +
                                 std::to_string(r.p) + ", s = " + std::to_string(*r.s));
        }
        if (o->alpha > 0.1) {
            r.warnings.push_back("model validity: ohmic coupling alpha = " +
                                 std::to_string(o->alpha) + " exceeds 0.1");
        }
    } else {
        r.p = basis.omega * correlation_time(m);
    }
    r.regime = (r.p >= thr.secular_min_p)    ? Regime::Secular
             : (r.p <= thr.nonsecular_max_p) ? Regime::Nonsecular
                                             : Regime::Intermediate;
    return r;
}

// Two-column CSV (frequency, density); a non-numeric first line is treated as a header.
inline Tabulated load_tabulated_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("tabulated: cannot open " + path);
    Tabulated t;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        auto fields = csv::split_fields(line);
        if (fields.empty()) continue;
        try {
            const double w = std::stod(fields.at(0));
            const double j = std::stod(fields.at(1));
            t.freq.push_back(w);
            t.density.push_back(j);
        } catch (const std::exception&) {
            if (first) { first = false; continue; }  // header row
            throw ConfigError("tabulated: malformed line in " + path + ": " + line);
        }
        first = false;
    }
    validate(SpectralModel{t});
    return t;
}

} // namespace nmbloch
