// presets.hpp — canned scenario configurations for the reference figure set

#pragma once

#include "nmbloch/config.hpp"

#include <string>

namespace nmbloch::cli {

inline ScenarioConfig figure_presets(const std::string& name) {
    std::string text;
    if (name == "fig1") {
        // Lorentzian rate panels over the 3x3 (p, s) grid, gamma/alpha_sq vs T
        text = "label = fig1\n"
               "spectrum.kind = lorentzian\n"
               "spectrum.alpha_sq = 1\n"
               "spectrum.lambda = 1\n"
               "spectrum.omega0 = 10000.1\n"
               "system.delta = 0\n"
               "system.rabi = 0.01\n"
               "system.omega_a = 10000\n"
               "system.omega_l = 10000\n"
               "horizon.T_max = 30\n"
               "horizon.samples = 400\n"
               "horizon.inset_T_max = 1.5\n"
               "horizon.inset_samples = 150\n"
               "mode = secular\n"
               "outputs = rates\n"
               "plot.kind = rates\n"
               "sweep.field = system.rabi\n"
               "sweep.values = 0.01, 1, 100\n"
               "sweep2.field = spectrum.omega0\n"
               "sweep2.values = 10000.1, 10001, 10010\n";
    } else if (name == "fig2") {
        // Ohmic rate panels for p in {0.01, 1, 5}; s_O defaults to 10 and the
        // p = 5 cell intentionally carries the model-validity warning
        text = "label = fig2\n"
               "spectrum.kind = ohmic\n"
               "spectrum.alpha = 0.1\n"
               "spectrum.omega_c = 1\n"
               "system.delta = 0\n"
               "system.rabi = 0.01\n"
               "system.omega_a = 10\n"
               "system.omega_l = 10\n"
               "horizon.T_max = 30\n"
               "horizon.samples = 400\n"
               "horizon.inset_T_max = 2\n"
               "horizon.inset_samples = 200\n"
               "mode = secular\n"
               "outputs = rates\n"
               "plot.kind = rates\n"
               "sweep.field = system.rabi\n"
               "sweep.values = 0.01, 1, 5\n"
               "note = s_O defaults to 10 (omega_L = 10 omega_c)\n";
    } else if (name == "fig3") {
        text = "label = fig3\n"
               "spectrum.kind = lorentzian\n"
               "spectrum.alpha_sq = 0.01\n"
               "spectrum.lambda = 1e-4\n"
               "spectrum.omega0 = 1.00001\n"
               "system.delta = 0\n"
               "system.rabi = 0.01\n"
               "system.omega_a = 1\n"
               "system.omega_l = 1\n"
               "initial.z = 1\n"
               "horizon.T_max = 2000\n"
               "horizon.samples = 2000\n"
               "horizon.inset_T_max = 3\n"
               "horizon.inset_samples = 600\n"
               "mode = secular\n"
               "outputs = rates, bloch, cp, markov_summary\n"
               "plot.kind = bloch_z\n"
               "note = secular-regime run (p = 100); z relaxes toward the stationary value\n";
    } else if (name == "fig4" || name == "fig5") {
        text = "label = " + name + "\n" +
               "spectrum.kind = lorentzian\n"
               "spectrum.alpha_sq = 0.01\n"
               "spectrum.lambda = 1\n"
               "spectrum.omega0 = 1.1\n"
               "system.delta = 0\n"
               "system.rabi = 0.01\n"
               "system.omega_a = 1\n"
               "system.omega_l = 1\n"
               "initial.z = 1\n"
               "horizon.T_max = 40000\n"
               "horizon.samples = 2000\n"
               "horizon.inset_T_max = 30\n"
               "horizon.inset_samples = 600\n"
               "mode = full\n"
               "sweep.field = spectrum.omega0\n"
               "sweep.values = 1.1, 11\n"
               "note = initial state (0,0,1) taken in the dressed basis; coupling read as "
               "alpha_sq = 0.01 omega_A\n";
        text += (name == "fig4") ? "outputs = bloch, cp\nplot.kind = bloch_z\n"
                                 : "outputs = bloch\nplot.kind = bloch_xy\n";
    } else {
        throw ConfigError("unknown preset '" + name +
                          "' (available: fig1, fig2, fig3, fig4, fig5)");
    }
    return ScenarioConfig::from_raw(RawConfig::parse_string(text));
}

} // namespace nmbloch::cli
