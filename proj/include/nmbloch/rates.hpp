// rates.hpp — time-dependent decay and Lamb-shift coefficients gamma_xi(t),
// lambda_xi(t) for xi in {-, 0, +}, their Markovian limits, and trajectory
// sampling over a time grid.
//
// Closed forms exist for the Lorentzian and Ohmic spectra; any spectrum can be
// handled by the quadrature route, which doubles as the independent oracle for
// the closed forms. All rates are stored in physical 1/time units; the
// dimensionless T = (lambda or omega_c) * t appears only inside the formulas.
//
// Conventions (dimensionless detuning q per channel):
//   Lorentzian: q_xi = s - xi p = (omega0 - omega_eff)/lambda
//   Ohmic:      q_xi = s + xi p = omega_eff/omega_c          (must be > 0)
// with omega_eff = omega_L + xi*omega.

#pragma once

#include "nmbloch/dressed.hpp"
#include "nmbloch/parallel.hpp"
#include "nmbloch/quadrature.hpp"
#include "nmbloch/special_functions.hpp"
#include "nmbloch/spectral.hpp"
#include "nmbloch/csv.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace nmbloch {

inline constexpr int kChannelXi[3] = {-1, 0, +1};  // index order: minus, zero, plus

struct RatePair {
    double gamma = 0.0;
    double lamb = 0.0;
};

struct RateSample {
    double t = 0.0;
    std::array<double, 3> gamma{};  // [minus, zero, plus]
    std::array<double, 3> lamb{};
};

struct MarkovLimits {
    std::array<double, 3> gamma{};
    std::array<double, 3> lamb{};
};

struct EffectiveDetunings {
    enum class Convention { lorentzian, ohmic };
    std::array<double, 3> q{};
    Convention convention = Convention::lorentzian;
};

// ------------------------------- closed forms -------------------------------

// Lorentzian pair at dimensionless time T = lambda*t. The gamma prefactor is
// alpha_sq/(1+q^2) (its infinite-time limit is the golden-rule value
// 2 pi J(omega_eff)); lambda carries the extra 1/2 of the sine route.
inline RatePair lorentzian_rate(double T, double q, double alpha_sq) {
    if (!(T >= 0.0)) throw std::domain_error("lorentzian_rate: T must be >= 0");
    const double eT = std::exp(-T);
    const double c = std::cos(q * T), s = std::sin(q * T);
    const double denom = 1.0 + q * q;
    RatePair r;
    r.gamma = alpha_sq / denom * (1.0 - eT * c + q * eT * s);
    r.lamb = alpha_sq / (2.0 * denom) * (-q + q * eT * c + eT * s);
    return r;
}

// Ohmic pair at T = omega_c*t, q = omega_eff/omega_c > 0. Evaluated with the
// complex-argument cosine/sine integrals at z = q(T + i); the combinations are
// real-valued, and the leftover imaginary part (a roundoff probe of the
// conjugate symmetry) must stay below 1e-10 before being discarded.
inline RatePair ohmic_rate(double T, double q, double alpha, double omega_c) {
    if (!(T >= 0.0)) throw std::domain_error("ohmic_rate: T must be >= 0");
    if (!(q > 0.0)) throw std::domain_error("ohmic_rate: q must be > 0");
    using cplx = std::complex<double>;
    const cplx z(q * T, q);
    const cplx zb(q * T, -q);
    const sf::CiSi cs = sf::cisi(z);
    const sf::CiSi csb = sf::cisi(zb);
    const sf::ChiShi hs = sf::chishi(q);
    const cplx i(0.0, 1.0);

    const cplx bracket_g = M_PI - i * csb.ci + i * cs.ci + csb.si + cs.si;
    const cplx bracket_l =
        2.0 * hs.chi + 2.0 * hs.shi - csb.ci - cs.ci + i * cs.si - i * csb.si;
    const double scale_g = std::max(std::abs(bracket_g.real()), M_PI);
    const double scale_l = std::max(std::abs(bracket_l.real()), 1.0);
    if (std::abs(bracket_g.imag()) > 1e-10 * scale_g ||
        std::abs(bracket_l.imag()) > 1e-10 * scale_l) {
        throw sf::SpecialFunctionError(
            "ohmic_rate: imaginary residue exceeds 1e-10 at T = " + std::to_string(T) +
            ", q = " + std::to_string(q));
    }

    const double onepT2 = 1.0 + T * T;
    const double cqT = std::cos(q * T), sqT = std::sin(q * T);
    const double qe = q * std::exp(-q);
    const double scale = alpha * alpha * omega_c;
    RatePair r;
    r.gamma = scale * (2.0 * (T * cqT - sqT) / onepT2 + qe * bracket_g.real());
    r.lamb = scale * ((cqT + T * sqT - 1.0 - T * T) / onepT2 + 0.5 * qe * bracket_l.real());
    return r;
}

// ------------------------------ Markov limits --------------------------------

// Principal value of int J(w)/(omega_eff - w) dw for a piecewise-linear table,
// summed exactly segment by segment with the log terms grouped per node.
inline double tabulated_lamb_markov(const Tabulated& t, double omega_eff) {
    const std::size_t n = t.freq.size();
    double total = 0.0;
    std::vector<double> log_coef(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = t.freq[i], b = t.freq[i + 1];
        const double m = (t.density[i + 1] - t.density[i]) / (b - a);
        const double C = t.density[i] + m * (omega_eff - a);
        log_coef[i] += C;
        log_coef[i + 1] -= C;
        total -= m * (b - a);
    }
    const double scale = std::max(std::abs(t.freq.back()), 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = omega_eff - t.freq[i];
        if (std::abs(u) < 1e-14 * scale) {
            if (std::abs(log_coef[i]) > 1e-12) {
                throw std::domain_error("tabulated markov lamb: omega_eff sits on a grid node");
            }
            continue;
        }
        total += log_coef[i] * std::log(std::abs(u));
    }
    return total;
}

inline RatePair markov_limits(const SpectralModel& model, double omega_eff) {
    RatePair r;
    if (const auto* l = std::get_if<Lorentzian>(&model)) {
        const double q = (l->omega0 - omega_eff) / l->lambda;
        r.gamma = l->alpha_sq / (1.0 + q * q);
        r.lamb = -l->alpha_sq * q / (2.0 * (1.0 + q * q));
    } else if (const auto* o = std::get_if<Ohmic>(&model)) {
        const double q = omega_eff / o->omega_c;
        if (!(q > 0.0)) throw std::domain_error("ohmic markov: omega_eff must be > 0");
        r.gamma = 2.0 * M_PI * evaluate(model, omega_eff);
        r.lamb = o->alpha * o->alpha * o->omega_c * (q * std::exp(-q) * sf::expint_ei(q) - 1.0);
    } else {
        r.gamma = 2.0 * M_PI * evaluate(model, omega_eff);
        r.lamb = tabulated_lamb_markov(std::get<Tabulated>(model), omega_eff);
    }
    return r;
}

// ----------------------------- quadrature oracle -----------------------------

namespace detail {

// sin(x t)/x and (1 - cos(x t))/x with series switch near the removable point.
inline double kernel_sin(double x, double t) {
    const double u = x * t;
    if (std::abs(u) < 1e-2) {
        const double u2 = u * u;
        return t * (1.0 - u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0)));
    }
    return std::sin(u) / x;
}

inline double kernel_onemcos(double x, double t) {
    const double u = x * t;
    if (std::abs(u) < 1e-2) {
        const double u2 = u * u;
        return t * (u / 2.0) * (1.0 - u2 / 12.0 * (1.0 - u2 / 30.0));
    }
    return (1.0 - std::cos(u)) / x;
}

// h(v) = 1/(v Q(v)) with Q = (v-q)^2 + 1, and its first two derivatives.
struct LorTailFn {
    double q;
    double h(double v) const {
        const double Q = (v - q) * (v - q) + 1.0;
        return 1.0 / (v * Q);
    }
    double h1(double v) const {
        const double Q = (v - q) * (v - q) + 1.0;
        const double Qp = 2.0 * (v - q);
        const double vQ = v * Q;
        return -(Q + v * Qp) / (vQ * vQ);
    }
    double h2(double v) const {
        const double Q = (v - q) * (v - q) + 1.0;
        const double Qp = 2.0 * (v - q);
        const double vQ = v * Q;
        const double d1 = Q + v * Qp;
        return (2.0 * d1 * d1 - vQ * (2.0 * Qp + 2.0 * v)) / (vQ * vQ * vQ);
    }
};

// Three-term integration-by-parts tails of oscillatory integrals over |v| > U.
// Valid once U*T is a few units; below that the truncated tail is already
// negligible for the windows used here.
inline double tail_sin_both(const LorTailFn& f, double U, double T) {
    const double cUT = std::cos(U * T), sUT = std::sin(U * T);
    const double plus = f.h(U) * cUT / T - f.h1(U) * sUT / (T * T) - f.h2(U) * cUT / (T * T * T);
    // v -> -v side: h~(w) = h(-w), h~' = -h'(-w), h~'' = h''(-w)
    const double minus =
        -(f.h(-U) * cUT / T + f.h1(-U) * sUT / (T * T) - f.h2(-U) * cUT / (T * T * T));
    return plus + minus;
}

inline double tail_cos_both(const LorTailFn& f, double U, double T) {
    const double cUT = std::cos(U * T), sUT = std::sin(U * T);
    const double plus =
        -f.h(U) * sUT / T - f.h1(U) * cUT / (T * T) + f.h2(U) * sUT / (T * T * T);
    const double minus =
        -f.h(-U) * sUT / T + f.h1(-U) * cUT / (T * T) + f.h2(-U) * sUT / (T * T * T);
    return plus + minus;
}

inline std::vector<double> lor_breakpoints(double U, double q, double T) {
    std::vector<double> pts = {-U, U, -10.0, 10.0, -1.0, 1.0,
                               q - 10.0, q - 1.0, q, q + 1.0, q + 10.0};
    // seed panels near the oscillation scale so refinement starts close to final;
    // capped well under the interval budget, the heap picks up the slack
    if (T > 0.0) {
        const double dv = std::max(1.5 * 2.0 * M_PI / T, 2.0 * U / 8000.0);
        if (U / dv > 4.0) {
            for (double v = -U + dv; v < U - 0.5 * dv; v += dv) pts.push_back(v);
        }
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double p : pts) {
        if (p < -U || p > U) continue;
        if (!out.empty() && !(p > out.back() + 1e-12 * U)) continue;
        out.push_back(p);
    }
    if (out.front() != -U) out.insert(out.begin(), -U);
    if (out.back() != U) out.push_back(U);
    return out;
}

inline RatePair lorentzian_oracle(const Lorentzian& l, double t, double omega_eff,
                                  const quad::Options& opt) {
    const double T = l.lambda * t;
    const double q = (l.omega0 - omega_eff) / l.lambda;
    const double U = std::min(4.0e4, std::max(250.0, 60.0 / std::max(T, 1e-300)) +
                                         3.0 * std::abs(q) + 3.0);
    const auto pts = lor_breakpoints(U, q, T);
    const auto P = [q](double v) { const double d = v - q; return 1.0 / (d * d + 1.0); };

    const double Ig_central = quad::integrate_segmented(
        [&](double v) { return kernel_sin(v, T) * P(v); }, pts, opt).value;
    const double Il_central = quad::integrate_segmented(
        [&](double v) { return kernel_onemcos(v, T) * P(v); }, pts, opt).value;

    // 1/v part of the lambda kernel beyond the window: exact full-line principal
    // value minus the numerically evaluated central part.
    const double pv_full = q * M_PI / (1.0 + q * q);
    const double pv_central = quad::integrate(
        [&](double v) {
            if (v < 1e-300) return 4.0 * q / ((q * q + 1.0) * (q * q + 1.0));
            return (P(v) - P(-v)) / v;
        },
        0.0, U, opt).value;
    const double A_tail = pv_full - pv_central;

    LorTailFn tf{q};
    double Ig_tail = 0.0, Il_cos_tail = 0.0;
    if (U * T > 3.0) {
        Ig_tail = tail_sin_both(tf, U, T);
        Il_cos_tail = tail_cos_both(tf, U, T);
    }

    RatePair r;
    r.gamma = l.alpha_sq / M_PI * (Ig_central + Ig_tail);
    r.lamb = -l.alpha_sq / (2.0 * M_PI) * (Il_central + A_tail - Il_cos_tail);
    return r;
}

inline RatePair ohmic_oracle(const Ohmic& o, double t, double omega_eff,
                             const quad::Options& opt) {
    const double T = o.omega_c * t;
    const double q = omega_eff / o.omega_c;
    const double xmax = std::max(q, 0.0) + 40.0;
    std::vector<double> pts = {0.0, xmax};
    for (double p : {q - 1.0, q, q + 1.0}) {
        if (p > 1e-12 && p < xmax - 1e-12) pts.push_back(p);
    }
    std::sort(pts.begin(), pts.end());
    const double scale = o.alpha * o.alpha * o.omega_c;
    RatePair r;
    r.gamma = 2.0 * scale * quad::integrate_segmented(
        [&](double x) { return x * std::exp(-x) * kernel_sin(q - x, T); }, pts, opt).value;
    r.lamb = scale * quad::integrate_segmented(
        [&](double x) { return x * std::exp(-x) * kernel_onemcos(q - x, T); }, pts, opt).value;
    return r;
}

inline RatePair tabulated_oracle(const Tabulated& tab, double t, double omega_eff,
                                 const quad::Options& opt) {
    std::vector<double> pts;
    if (tab.freq.size() <= 65) {
        pts = tab.freq;
    } else {
        const std::size_t step = tab.freq.size() / 64 + 1;
        for (std::size_t i = 0; i < tab.freq.size(); i += step) pts.push_back(tab.freq[i]);
        if (pts.back() != tab.freq.back()) pts.push_back(tab.freq.back());
    }
    if (omega_eff > pts.front() && omega_eff < pts.back()) {
        pts.push_back(omega_eff);
        std::sort(pts.begin(), pts.end());
    }
    const double span = pts.back() - pts.front();
    std::vector<double> dedup;
    for (double p : pts) {
        if (dedup.empty() || p > dedup.back() + 1e-12 * span) dedup.push_back(p);
    }
    if (dedup.size() < 2) dedup = {pts.front(), pts.back()};
    pts = std::move(dedup);
    const SpectralModel model{tab};
    RatePair r;
    r.gamma = 2.0 * quad::integrate_segmented(
        [&](double w) { return evaluate(model, w) * kernel_sin(omega_eff - w, t); }, pts, opt).value;
    r.lamb = quad::integrate_segmented(
        [&](double w) { return evaluate(model, w) * kernel_onemcos(omega_eff - w, t); }, pts, opt).value;
    return r;
}

} // namespace detail

// Quadrature route for gamma_xi(t), lambda_xi(t) with the inner time integral
// done analytically: gamma = 2 Int J(w) sin((omega_eff - w)t)/(omega_eff - w) dw,
// lambda = Int J(w) (1 - cos((omega_eff - w)t))/(omega_eff - w) dw.
inline RatePair generic_rate_oracle(const SpectralModel& model, double t, double omega_eff,
                                    const quad::Options& opt = {1e-12, 1e-9, 20000}) {
    if (!(t >= 0.0)) throw std::domain_error("generic_rate_oracle: t must be >= 0");
    if (t == 0.0) return {};
    if (const auto* l = std::get_if<Lorentzian>(&model)) {
        return detail::lorentzian_oracle(*l, t, omega_eff, opt);
    }
    if (const auto* o = std::get_if<Ohmic>(&model)) {
        return detail::ohmic_oracle(*o, t, omega_eff, opt);
    }
    return detail::tabulated_oracle(std::get<Tabulated>(model), t, omega_eff, opt);
}

// --------------------------- per-channel evaluator ---------------------------

inline EffectiveDetunings effective_detunings(const SpectralModel& model,
                                              const DressedBasis& basis,
                                              const SystemParams& params) {
    EffectiveDetunings d;
    if (const auto* l = std::get_if<Lorentzian>(&model)) {
        if (!params.omega_laser) throw ConfigError("lorentzian: omega_L required for detunings");
        const double s = (l->omega0 - *params.omega_laser) / l->lambda;
        const double p = basis.omega / l->lambda;
        d.convention = EffectiveDetunings::Convention::lorentzian;
        for (int c = 0; c < 3; ++c) d.q[c] = s - kChannelXi[c] * p;
    } else if (const auto* o = std::get_if<Ohmic>(&model)) {
        if (!params.omega_laser) throw ConfigError("ohmic: omega_L required for detunings");
        const double s = *params.omega_laser / o->omega_c;
        const double p = basis.omega / o->omega_c;
        d.convention = EffectiveDetunings::Convention::ohmic;
        for (int c = 0; c < 3; ++c) {
            d.q[c] = s + kChannelXi[c] * p;
            if (!(d.q[c] > 0.0)) {
                throw ConfigError("ohmic: omega_L + xi*omega must stay positive (q = " +
                                  std::to_string(d.q[c]) + ")");
            }
        }
    } else {
        throw ConfigError("tabulated spectra have no closed-form detunings");
    }
    return d;
}

// Evaluates all six coefficient channels at arbitrary t, using closed forms for
// Lorentzian/Ohmic spectra and the quadrature route otherwise. Immutable and
// safe to share across threads.
class RateFunction {
  public:
    RateFunction(SpectralModel model, const DressedBasis& basis, const SystemParams& params,
                 quad::Options oracle_opt = {1e-12, 1e-9, 20000})
        : model_(std::move(model)), oracle_opt_(oracle_opt) {
        validate(model_);
        time_scale_ = dimensionless_time_scale(model_);
        if (!std::holds_alternative<Tabulated>(model_)) {
            detunings_ = effective_detunings(model_, basis, params);
        }
        if (!params.omega_laser && std::holds_alternative<Tabulated>(model_)) {
            throw ConfigError("tabulated: omega_L required");
        }
        for (int c = 0; c < 3; ++c) {
            omega_eff_[c] = params.omega_laser
                                ? *params.omega_laser + kChannelXi[c] * basis.omega
                                : std::numeric_limits<double>::quiet_NaN();
        }
    }

    RatePair channel(double t, int c) const {
        if (const auto* l = std::get_if<Lorentzian>(&model_)) {
            return lorentzian_rate(l->lambda * t, detunings_->q[c], l->alpha_sq);
        }
        if (const auto* o = std::get_if<Ohmic>(&model_)) {
            return ohmic_rate(o->omega_c * t, detunings_->q[c], o->alpha, o->omega_c);
        }
        return generic_rate_oracle(model_, t, omega_eff_[c], oracle_opt_);
    }

    RateSample operator()(double t) const {
        RateSample s;
        s.t = t;
        for (int c = 0; c < 3; ++c) {
            const RatePair r = channel(t, c);
            s.gamma[c] = r.gamma;
            s.lamb[c] = r.lamb;
        }
        return s;
    }

    MarkovLimits markov() const {
        MarkovLimits m;
        for (int c = 0; c < 3; ++c) {
            const RatePair r = std::holds_alternative<Tabulated>(model_)
                                   ? markov_limits(model_, omega_eff_[c])
                                   : markov_from_detuning(c);
            m.gamma[c] = r.gamma;
            m.lamb[c] = r.lamb;
        }
        return m;
    }

    double time_scale() const { return time_scale_; }
    const SpectralModel& model() const { return model_; }
    const std::optional<EffectiveDetunings>& detunings() const { return detunings_; }
    double omega_eff(int c) const { return omega_eff_[c]; }

  private:
    RatePair markov_from_detuning(int c) const {
        const double q = detunings_->q[c];
        if (const auto* l = std::get_if<Lorentzian>(&model_)) {
            RatePair r;
            r.gamma = l->alpha_sq / (1.0 + q * q);
            r.lamb = -l->alpha_sq * q / (2.0 * (1.0 + q * q));
            return r;
        }
        const auto& o = std::get<Ohmic>(model_);
        RatePair r;
        r.gamma = 2.0 * M_PI * o.alpha * o.alpha * o.omega_c * q * std::exp(-q);
        r.lamb = o.alpha * o.alpha * o.omega_c * (q * std::exp(-q) * sf::expint_ei(q) - 1.0);
        return r;
    }

    SpectralModel model_;
    quad::Options oracle_opt_;
    double time_scale_ = 1.0;
    std::optional<EffectiveDetunings> detunings_;
    std::array<double, 3> omega_eff_{};
};

// ------------------------------- trajectories --------------------------------

struct RateTrajectory {
    std::vector<double> grid;             // physical time, starts at 0
    std::vector<RateSample> samples;
    MarkovLimits markov;
    double time_scale = 1.0;              // T = time_scale * t
    // Accumulated integrals int_0^t gamma_xi(s) ds per channel (quadrature-grade);
    // feeds the CP margins.
    std::array<std::vector<double>, 3> gamma_int;
};

inline void check_grid(const std::vector<double>& grid) {
    if (grid.size() < 2) throw std::invalid_argument("grid: need at least two samples");
    if (grid.front() != 0.0) throw std::invalid_argument("grid: must start at t = 0");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("grid: must be strictly increasing");
    }
}

struct SampleOptions {
    unsigned workers = 0;    // 0 = hardware default
    quad::Options accum{1e-13, 1e-10, 20000};
};

inline RateTrajectory sample_trajectory(const SpectralModel& model, const DressedBasis& basis,
                                        const SystemParams& params, std::vector<double> grid,
                                        const SampleOptions& opt = {}) {
    check_grid(grid);
    RateFunction fn(model, basis, params);
    RateTrajectory traj;
    traj.grid = std::move(grid);
    traj.time_scale = fn.time_scale();
    traj.samples.resize(traj.grid.size());
    traj.markov = fn.markov();

    const std::size_t n = traj.grid.size();
    parallel_for(n, opt.workers, [&](std::size_t i) {
        try {
            traj.samples[i] = fn(traj.grid[i]);
        } catch (const std::exception& e) {
            throw std::runtime_error("rate sampling failed at grid index " + std::to_string(i) +
                                     " (t = " + csv::format_double(traj.grid[i]) + "): " + e.what());
        }
    });

    std::array<std::vector<double>, 3> increments;
    for (auto& v : increments) v.assign(n, 0.0);
    parallel_for((n - 1) * 3, opt.workers, [&](std::size_t k) {
        const int c = static_cast<int>(k % 3);
        const std::size_t i = k / 3 + 1;
        increments[c][i] = quad::integrate(
            [&](double t) { return fn.channel(t, c).gamma; },
            traj.grid[i - 1], traj.grid[i], opt.accum).value;
    });
    for (int c = 0; c < 3; ++c) {
        traj.gamma_int[c].assign(n, 0.0);
        for (std::size_t i = 1; i < n; ++i) {
            traj.gamma_int[c][i] = traj.gamma_int[c][i - 1] + increments[c][i];
        }
    }
    return traj;
}

inline csv::Table rates_csv(const RateTrajectory& traj) {
    csv::Table t;
    t.header = {"t", "T_dimensionless", "gamma_minus", "gamma_0", "gamma_plus",
                "lamb_minus", "lamb_0", "lamb_plus"};
    for (std::size_t i = 0; i < traj.grid.size(); ++i) {
        const auto& s = traj.samples[i];
        t.add_row({traj.grid[i], traj.grid[i] * traj.time_scale, s.gamma[0], s.gamma[1],
                   s.gamma[2], s.lamb[0], s.lamb[1], s.lamb[2]});
    }
    return t;
}

} // namespace nmbloch
