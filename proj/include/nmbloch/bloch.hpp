// bloch.hpp — the optical Bloch equations in the dressed basis: affine generator
// assembly, numerical integration, and the analytic secular and Markovian
// solutions.
//
// The damping matrices are hard-coded from the rate-weighted dissipator algebra;
// generator_from_master_equation rebuilds them independently by applying the
// dissipators to the Pauli basis with exact 2x2 arithmetic and serves as the
// cross-check oracle for build_generator.

#pragma once

#include "nmbloch/csv.hpp"
#include "nmbloch/dressed.hpp"
#include "nmbloch/ode.hpp"
#include "nmbloch/pauli.hpp"
#include "nmbloch/quadrature.hpp"
#include "nmbloch/rates.hpp"
#include "nmbloch/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace nmbloch {

struct GeneratorMatrices {
    Eigen::Matrix3d d_sec = Eigen::Matrix3d::Zero();      // D(t), includes the omega rotation
    Eigen::Matrix3d d_nonsec = Eigen::Matrix3d::Zero();   // D'(t)
    Eigen::Vector3d drift_sec = Eigen::Vector3d::Zero();  // d(t)
    Eigen::Vector3d drift_nonsec = Eigen::Vector3d::Zero();
};

// Effective rotation frequency: the dressed splitting, optionally shifted by the
// sigma_z part of the Lamb-shift Hamiltonian.
inline double rotation_frequency(const DressedBasis& b, const RateSample& s,
                                 bool include_lamb_shift) {
    double w = b.omega;
    if (include_lamb_shift) {
        w += s.lamb[2] * b.c_plus * b.c_plus - s.lamb[0] * b.c_minus * b.c_minus;
    }
    return w;
}

inline GeneratorMatrices build_generator(const DressedBasis& b, const RateSample& s,
                                         bool secular_only,
                                         bool include_lamb_shift = false) {
    const double cp2 = b.c_plus * b.c_plus;
    const double cm2 = b.c_minus * b.c_minus;
    const double c02 = b.c_zero * b.c_zero;
    const double gm = s.gamma[0], g0 = s.gamma[1], gp = s.gamma[2];
    const double lm = s.lamb[0], l0 = s.lamb[1], lp = s.lamb[2];
    const double w = rotation_frequency(b, s, include_lamb_shift);

    GeneratorMatrices g;
    const double h = 0.5 * (cp2 * gp + cm2 * gm + 4.0 * c02 * g0);
    g.d_sec << -h, -w, 0.0,
               w, -h, 0.0,
               0.0, 0.0, -(cm2 * gm + cp2 * gp);
    g.drift_sec << 0.0, 0.0, cm2 * gm - cp2 * gp;

    if (!secular_only) {
        const double cp = b.c_plus, cm = b.c_minus, c0 = b.c_zero;
        const double cpcm = cp * cm;
        g.d_nonsec << 0.5 * cpcm * (gp + gm), cpcm * (lm - lp), c0 * (cm * gm + cp * gp),
                      cpcm * (lm - lp), -0.5 * cpcm * (gp + gm), 2.0 * c0 * (cm * lm - cp * lp),
                      c0 * (cp + cm) * g0, 2.0 * c0 * (cp - cm) * l0, 0.0;
        g.drift_nonsec << c0 * (cp * (g0 + gp) - cm * (g0 + gm)),
                          2.0 * c0 * (cm * (l0 - lm) + cp * (l0 - lp)),
                          0.0;
    }
    return g;
}

// ---------------------- master-equation route (oracle) ----------------------

struct LiouvilleOptions {
    bool secular_only = false;
    bool include_unitary = true;
    bool include_lamb_shift = false;
};

// Applies the full time-local generator to an arbitrary 2x2 operator.
inline pauli::Mat2 apply_liouvillian(const pauli::Mat2& rho, const DressedBasis& b,
                                     const RateSample& s, const LiouvilleOptions& opt = {}) {
    using cplx = std::complex<double>;
    const pauli::Mat2 sp = pauli::sigma_plus();
    const pauli::Mat2 sm = pauli::sigma_minus();
    const pauli::Mat2 sz = pauli::sigma_z();
    const double cp = b.c_plus, cm = b.c_minus, c0 = b.c_zero;
    const double gm = s.gamma[0], g0 = s.gamma[1], gp = s.gamma[2];
    const double lm = s.lamb[0], l0 = s.lamb[1], lp = s.lamb[2];

    pauli::Mat2 out = pauli::Mat2::Zero();
    if (opt.include_unitary) {
        pauli::Mat2 h = 0.5 * b.omega * sz;
        if (opt.include_lamb_shift) {
            h += lm * cm * cm * (sm * sp) + lp * cp * cp * (sp * sm) +
                 l0 * c0 * c0 * (sz * sz);
        }
        out += -cplx(0, 1) * (h * rho - rho * h);
    }

    // rate-weighted jump channels
    out += cp * cp * gp * (sm * rho * sp - 0.5 * (sp * sm * rho + rho * sp * sm));
    out += cm * cm * gm * (sp * rho * sm - 0.5 * (sm * sp * rho + rho * sm * sp));
    out += c0 * c0 * g0 * (sz * rho * sz - rho);

    if (!opt.secular_only) {
        const cplx c_minus(0.5 * gm, -lm);
        const cplx c_plus(0.5 * gp, -lp);
        const cplx c_zero(0.5 * g0, -l0);
        pauli::Mat2 x = pauli::Mat2::Zero();
        x += c_minus * (cm * c0 * (sp * rho * sz - sz * sp * rho) +
                        cp * cm * (sp * rho * sp - sp * sp * rho));
        x += c_plus * (cp * c0 * (sm * rho * sz - sz * sm * rho) +
                       cp * cm * (sm * rho * sm - sm * sm * rho));
        x += c_zero * (cm * c0 * (sz * rho * sm - sm * sz * rho) +
                       cp * c0 * (sz * rho * sp - sp * sz * rho));
        out += x + x.adjoint().eval();
    }
    return out;
}

// Projects the generator onto the affine Bloch form via L_ij = Tr[s_i L(s_j)]/2.
inline GeneratorMatrices generator_from_master_equation(const DressedBasis& b,
                                                        const RateSample& s,
                                                        bool include_lamb_shift = false) {
    const auto& sig = pauli::basis();
    auto project = [&](bool secular_only, Eigen::Matrix3d& m, Eigen::Vector3d& v) {
        LiouvilleOptions opt;
        opt.secular_only = secular_only;
        opt.include_lamb_shift = include_lamb_shift;
        for (int j = 0; j < 3; ++j) {
            const pauli::Mat2 lj = apply_liouvillian(sig[j + 1], b, s, opt);
            for (int i = 0; i < 3; ++i) {
                m(i, j) = 0.5 * (sig[i + 1] * lj).trace().real();
            }
        }
        const pauli::Mat2 li = apply_liouvillian(0.5 * sig[0], b, s, opt);
        for (int i = 0; i < 3; ++i) v(i) = (sig[i + 1] * li).trace().real();
    };
    GeneratorMatrices g;
    Eigen::Matrix3d m_sec, m_full;
    Eigen::Vector3d v_sec, v_full;
    project(true, m_sec, v_sec);
    project(false, m_full, v_full);
    g.d_sec = m_sec;
    g.drift_sec = v_sec;
    g.d_nonsec = m_full - m_sec;
    g.drift_nonsec = v_full - v_sec;
    return g;
}

// ------------------------------- integration ---------------------------------

struct BlochTrajectory {
    std::vector<double> grid;
    std::vector<BlochVector> states;
    std::vector<double> Gamma;   // accumulated transverse exponent
    std::vector<double> Lambda;  // accumulated longitudinal exponent
    double time_scale = 1.0;
};

struct IntegrateOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    bool include_lamb_shift = false;
    double stiff_p_threshold = 1e3;  // cap steps at 2 pi/(20 omega) beyond this p
};

inline BlochTrajectory integrate(const SpectralModel& model, const DressedBasis& basis,
                                 const SystemParams& params, const BlochVector& r0,
                                 std::vector<double> grid, bool secular_only,
                                 const IntegrateOptions& opt = {}) {
    check_grid(grid);
    if (!r0.allFinite()) throw std::invalid_argument("integrate: initial state must be finite");
    const RateFunction fn(model, basis, params);
    const double cp2 = basis.c_plus * basis.c_plus;
    const double cm2 = basis.c_minus * basis.c_minus;
    const double c02 = basis.c_zero * basis.c_zero;

    using Vec5 = Eigen::Matrix<double, 5, 1>;
    auto rhs = [&](double t, const Vec5& y) {
        const RateSample s = fn(t);
        const GeneratorMatrices g =
            build_generator(basis, s, secular_only, opt.include_lamb_shift);
        const Eigen::Vector3d r = y.head<3>();
        Vec5 dy;
        dy.head<3>() = (g.d_sec + g.d_nonsec) * r + g.drift_sec + g.drift_nonsec;
        dy[3] = 0.5 * (cp2 * s.gamma[2] + cm2 * s.gamma[0] + 4.0 * c02 * s.gamma[1]);
        dy[4] = cp2 * s.gamma[2] + cm2 * s.gamma[0];
        return dy;
    };

    ode::Options oopt;
    oopt.rel_tol = opt.rel_tol;
    oopt.abs_tol = opt.abs_tol;
    const double p = basis.omega * correlation_time(model);
    if (p >= opt.stiff_p_threshold && basis.omega > 0.0) {
        oopt.max_step = 2.0 * M_PI / (20.0 * basis.omega);
    }

    Vec5 y0;
    y0 << r0[0], r0[1], r0[2], 0.0, 0.0;
    const auto sol = ode::integrate_dense<5>(rhs, grid, y0, oopt);

    BlochTrajectory traj;
    traj.time_scale = fn.time_scale();
    traj.grid = std::move(grid);
    traj.states.reserve(traj.grid.size());
    traj.Gamma.reserve(traj.grid.size());
    traj.Lambda.reserve(traj.grid.size());
    for (const auto& y : sol.states) {
        traj.states.push_back(y.head<3>());
        traj.Gamma.push_back(y[3]);
        traj.Lambda.push_back(y[4]);
    }
    return traj;
}

// --------------------------- secular analytic form ---------------------------

// Damped precession for (x, y) with envelope exp(-Gamma); the z component uses
// the exact per-interval update z_k = exp(-dLambda) z_{k-1} + int exp(Lambda(s)
// - Lambda_k) g_z(s) ds, which keeps every exponent non-positive.
class SecularSolution {
  public:
    SecularSolution(const DressedBasis& basis, const RateFunction& rates, BlochVector r0,
                    std::vector<double> grid, quad::Options accum = {1e-13, 1e-10, 20000})
        : basis_(basis), rates_(rates), r0_(std::move(r0)), grid_(std::move(grid)),
          accum_(accum) {
        check_grid(grid_);
        const std::size_t n = grid_.size();
        Gamma_.assign(n, 0.0);
        Lambda_.assign(n, 0.0);
        z_.assign(n, r0_[2]);
        for (std::size_t k = 1; k < n; ++k) {
            const double dG = quad::integrate([&](double t) { return gamma_rate(t); },
                                              grid_[k - 1], grid_[k], accum_).value;
            const double dL = quad::integrate([&](double t) { return lambda_rate(t); },
                                              grid_[k - 1], grid_[k], accum_).value;
            Gamma_[k] = Gamma_[k - 1] + dG;
            Lambda_[k] = Lambda_[k - 1] + dL;
            z_[k] = step_z(z_[k - 1], grid_[k - 1], grid_[k], Lambda_[k - 1], Lambda_[k]);
        }
    }

    BlochVector at_index(std::size_t k) const {
        return assemble(grid_[k], Gamma_[k], z_[k]);
    }

    // Arbitrary time between grid points; accumulates the partial increments.
    BlochVector at(double t) const {
        if (t < grid_.front() || t > grid_.back()) {
            throw std::invalid_argument("secular solution: t outside the prepared grid");
        }
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
        const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
        if (grid_[k] == t) return at_index(k);
        const double dG = quad::integrate([&](double u) { return gamma_rate(u); },
                                          grid_[k], t, accum_).value;
        const double dL = quad::integrate([&](double u) { return lambda_rate(u); },
                                          grid_[k], t, accum_).value;
        const double z = step_z(z_[k], grid_[k], t, Lambda_[k], Lambda_[k] + dL);
        return assemble(t, Gamma_[k] + dG, z);
    }

    BlochTrajectory trajectory() const {
        BlochTrajectory t;
        t.grid = grid_;
        t.time_scale = rates_.time_scale();
        t.Gamma = Gamma_;
        t.Lambda = Lambda_;
        t.states.reserve(grid_.size());
        for (std::size_t k = 0; k < grid_.size(); ++k) t.states.push_back(at_index(k));
        return t;
    }

    const std::vector<double>& Gamma() const { return Gamma_; }
    const std::vector<double>& Lambda() const { return Lambda_; }

  private:
    double gamma_rate(double t) const {
        const RateSample s = rates_(t);
        return 0.5 * (basis_.c_plus * basis_.c_plus * s.gamma[2] +
                      basis_.c_minus * basis_.c_minus * s.gamma[0] +
                      4.0 * basis_.c_zero * basis_.c_zero * s.gamma[1]);
    }
    double lambda_rate(double t) const {
        const RateSample s = rates_(t);
        return basis_.c_plus * basis_.c_plus * s.gamma[2] +
               basis_.c_minus * basis_.c_minus * s.gamma[0];
    }
    double drift_z(double t) const {
        const RateSample s = rates_(t);
        return basis_.c_minus * basis_.c_minus * s.gamma[0] -
               basis_.c_plus * basis_.c_plus * s.gamma[2];
    }
    double step_z(double z_prev, double ta, double tb, double La, double Lb) const {
        const double kick = quad::integrate(
            [&](double s) {
                const double Ls = La + quad::integrate(
                    [&](double u) { return lambda_rate(u); }, ta, s, accum_).value;
                return std::exp(Ls - Lb) * drift_z(s);
            },
            ta, tb, accum_).value;
        return std::exp(La - Lb) * z_prev + kick;
    }
    BlochVector assemble(double t, double G, double z) const {
        const double e = std::exp(-G);
        const double c = std::cos(basis_.omega * t), s = std::sin(basis_.omega * t);
        return {e * (r0_[0] * c - r0_[1] * s), e * (r0_[1] * c + r0_[0] * s), z};
    }

    DressedBasis basis_;
    RateFunction rates_;
    BlochVector r0_;
    std::vector<double> grid_;
    quad::Options accum_;
    std::vector<double> Gamma_, Lambda_, z_;
};

// ------------------------------ Markovian limit -------------------------------

struct MarkovSummary {
    double tau_R = 0.0;  // longitudinal relaxation time
    double tau_D = 0.0;  // transverse decoherence time
    double z_inf = 0.0;
};

inline MarkovSummary markov_summary(const DressedBasis& b, const MarkovLimits& m) {
    const double cp2 = b.c_plus * b.c_plus;
    const double cm2 = b.c_minus * b.c_minus;
    const double c02 = b.c_zero * b.c_zero;
    const double lambda_rate = cp2 * m.gamma[2] + cm2 * m.gamma[0];
    const double gamma_rate = 0.5 * lambda_rate + 2.0 * c02 * m.gamma[1];
    if (lambda_rate == 0.0) {
        throw std::domain_error("markov summary: no relaxation channel, z_inf undefined");
    }
    MarkovSummary s;
    s.tau_R = 1.0 / lambda_rate;
    s.tau_D = 1.0 / gamma_rate;
    s.z_inf = (cm2 * m.gamma[0] - cp2 * m.gamma[2]) / lambda_rate;
    return s;
}

inline BlochVector markov_solution(double t, const MarkovSummary& m, const DressedBasis& b,
                                   const BlochVector& r0) {
    const double ed = std::exp(-t / m.tau_D);
    const double c = std::cos(b.omega * t), s = std::sin(b.omega * t);
    return {ed * (r0[0] * c - r0[1] * s), ed * (r0[1] * c + r0[0] * s),
            std::exp(-t / m.tau_R) * (r0[2] - m.z_inf) + m.z_inf};
}

// ------------------------------ density matrix -------------------------------

inline pauli::Mat2 density_matrix(const BlochVector& r) {
    return 0.5 * (pauli::identity() + r[0] * pauli::sigma_x() + r[1] * pauli::sigma_y() +
                  r[2] * pauli::sigma_z());
}

inline BlochVector bloch_vector(const pauli::Mat2& rho, double tol = 1e-10) {
    if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol) {
        throw std::invalid_argument("bloch_vector: density matrix must have unit trace");
    }
    if ((rho - rho.adjoint().eval()).cwiseAbs().maxCoeff() > tol) {
        throw std::invalid_argument("bloch_vector: density matrix must be Hermitian");
    }
    return {(rho * pauli::sigma_x()).trace().real(),
            (rho * pauli::sigma_y()).trace().real(),
            (rho * pauli::sigma_z()).trace().real()};
}

// ---------------------------------- output -----------------------------------

inline csv::Table bloch_csv(const BlochTrajectory& traj, const DressedBasis& basis) {
    csv::Table t;
    t.header = {"t", "T_dimensionless", "Rx", "Ry", "Rz",
                "Rx_bare", "Ry_bare", "Rz_bare", "Gamma", "Lambda"};
    const Eigen::Matrix3d rot = bare_rotation(basis);
    for (std::size_t i = 0; i < traj.grid.size(); ++i) {
        const BlochVector& r = traj.states[i];
        const BlochVector rb = rot * r;
        t.add_row({traj.grid[i], traj.grid[i] * traj.time_scale, r[0], r[1], r[2],
                   rb[0], rb[1], rb[2], traj.Gamma[i], traj.Lambda[i]});
    }
    return t;
}

} // namespace nmbloch
