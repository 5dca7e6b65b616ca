// dressed.hpp — laser-atom parameters and the dressed-state coefficient algebra
//
// Conventions: C_pm = (Delta ± omega)/(2 omega) with omega = sqrt(Delta^2 + Omega^2),
// C_0 = Omega/(2 omega). C_minus is kept as the signed algebraic value (negative
// whenever Delta < omega); every dynamical expression downstream uses it verbatim.
// theta = atan2(Omega, Delta), so the resonant case Delta = 0 lands exactly on pi/2.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nmbloch {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SystemParams {
    double delta = 0.0;   // detuning omega_A - omega_L
    double rabi = 0.0;    // Rabi frequency Omega (>= 0)
    // Absolute frequencies are optional: only the combination (delta, rabi) and,
    // for Ohmic spectra, omega_L enter the dynamics. Model-validity warnings are
    // emitted only when omega_A is known.
    std::optional<double> omega_atom;
    std::optional<double> omega_laser;
    double validity_threshold = 0.1;
};

// Build SystemParams from any consistent subset of {delta, omega_atom, omega_laser}.
// Supplying all three with delta != omega_A - omega_L (beyond 1e-9 relative) is
// rejected rather than silently reinterpreted.
inline SystemParams make_system_params(std::optional<double> delta,
                                       double rabi,
                                       std::optional<double> omega_atom = {},
                                       std::optional<double> omega_laser = {},
                                       double validity_threshold = 0.1) {
    SystemParams p;
    p.rabi = rabi;
    p.omega_atom = omega_atom;
    p.omega_laser = omega_laser;
    p.validity_threshold = validity_threshold;
    if (!(rabi >= 0.0)) throw ConfigError("system: Rabi frequency must be >= 0");
    if (omega_atom && !(*omega_atom > 0.0)) throw ConfigError("system: omega_A must be > 0");
    if (omega_laser && !(*omega_laser > 0.0)) throw ConfigError("system: omega_L must be > 0");
    if (omega_atom && omega_laser) {
        const double derived = *omega_atom - *omega_laser;
        if (delta) {
            const double scale = std::max({std::abs(*delta), std::abs(derived), 1.0});
            if (std::abs(*delta - derived) > 1e-9 * scale) {
                throw ConfigError("system: delta inconsistent with omega_A - omega_L (" +
                                  std::to_string(*delta) + " vs " + std::to_string(derived) + ")");
            }
        }
        p.delta = derived;
    } else if (delta) {
        p.delta = *delta;
        if (omega_laser) p.omega_atom = *omega_laser + p.delta;
        if (omega_atom) p.omega_laser = *omega_atom - p.delta;
    } else {
        throw ConfigError("system: need delta or both omega_A and omega_L");
    }
    if (p.omega_laser && !(*p.omega_laser > 0.0)) throw ConfigError("system: omega_L must be > 0");
    if (p.omega_atom && !(*p.omega_atom > 0.0)) throw ConfigError("system: omega_A must be > 0");
    return p;
}

// Near-resonance / weak-driving validity flags; informational, never fatal.
inline std::vector<std::string> model_validity_warnings(const SystemParams& p) {
    std::vector<std::string> w;
    if (!p.omega_atom) return w;
    const double wa = *p.omega_atom;
    if (std::abs(p.delta) / wa > p.validity_threshold) {
        w.push_back("model validity: |Delta|/omega_A = " + std::to_string(std::abs(p.delta) / wa) +
                    " exceeds " + std::to_string(p.validity_threshold));
    }
    if (p.rabi / wa > p.validity_threshold) {
        w.push_back("model validity: Omega/omega_A = " + std::to_string(p.rabi / wa) +
                    " exceeds " + std::to_string(p.validity_threshold));
    }
    return w;
}

struct DressedBasis {
    double omega = 0.0;    // dressed splitting sqrt(Delta^2 + Omega^2)
    double c_plus = 0.0;
    double c_minus = 0.0;
    double c_zero = 0.0;
    double theta = 0.0;    // bare-basis rotation angle, in [0, pi]
};

inline DressedBasis dressed_basis(const SystemParams& p) {
    const double w = std::hypot(p.delta, p.rabi);
    if (w == 0.0) {
        throw std::domain_error("dressed_basis: degenerate system (Delta = Omega = 0)");
    }
    DressedBasis b;
    b.omega = w;
    b.c_plus = (p.delta + w) / (2.0 * w);
    b.c_minus = (p.delta - w) / (2.0 * w);
    b.c_zero = p.rabi / (2.0 * w);
    b.theta = std::atan2(p.rabi, p.delta);
    return b;
}

using BlochVector = Eigen::Vector3d;

// Rotation taking dressed-basis Bloch components to the bare basis.
inline Eigen::Matrix3d bare_rotation(const DressedBasis& b) {
    const double c = std::cos(b.theta), s = std::sin(b.theta);
    Eigen::Matrix3d r;
    r << c, 0.0, -s,
         0.0, 1.0, 0.0,
         s, 0.0, c;
    return r;
}

inline BlochVector to_bare_frame(const BlochVector& r, const DressedBasis& b) {
    return bare_rotation(b) * r;
}

inline BlochVector to_dressed_frame(const BlochVector& r_bare, const DressedBasis& b) {
    return bare_rotation(b).transpose() * r_bare;
}

} // namespace nmbloch
