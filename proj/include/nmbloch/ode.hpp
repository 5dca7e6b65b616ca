// ode.hpp — adaptive Dormand–Prince 5(4) integrator with dense output
//
// Classic DOPRI5 tableau with the FSAL trick and Hairer's quartic continuous
// extension; output states are interpolated onto a caller-supplied grid, so the
// step sequence is tolerance-driven rather than grid-driven.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nmbloch::ode {

struct OdeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 50'000'000;
};

template <int N>
struct Result {
    std::vector<Eigen::Matrix<double, N, 1>> states;  // one per grid point
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
};

namespace detail {

// Dense-output weights (DOPRI5 "rcont5" combination).
inline constexpr double kD1 = -12715105075.0 / 11282082432.0;
inline constexpr double kD3 = 87487479700.0 / 32700410799.0;
inline constexpr double kD4 = -10690763975.0 / 1880347072.0;
inline constexpr double kD5 = 701980252875.0 / 199316789632.0;
inline constexpr double kD6 = -1453857185.0 / 822651844.0;
inline constexpr double kD7 = 69997945.0 / 29380423.0;

} // namespace detail

// Integrates y' = f(t, y) from grid.front() to grid.back(), returning y at
// every grid point. f has signature Vec(double t, const Vec& y).
template <int N, class F>
inline Result<N> integrate_dense(F&& f, const std::vector<double>& grid,
                                 const Eigen::Matrix<double, N, 1>& y0,
                                 const Options& opt = {}) {
    using Vec = Eigen::Matrix<double, N, 1>;
    if (grid.size() < 2) throw std::invalid_argument("ode: need at least two grid points");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("ode: grid must increase");
    }

    Result<N> res;
    res.states.reserve(grid.size());
    res.states.push_back(y0);

    const double t_end = grid.back();
    double t = grid.front();
    Vec y = y0;
    Vec k1 = f(t, y);
    res.evaluations++;

    auto error_norm = [&](const Vec& e, const Vec& ya, const Vec& yb) {
        double sum = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            const double q = e[i] / sc;
            sum += q * q;
        }
        return std::sqrt(sum / N);
    };

    // initial step heuristic
    double h;
    {
        double d0 = 0.0, d1 = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1 += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / N);
        d1 = std::sqrt(d1 / N);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * (t_end - t) : 0.01 * d0 / d1;
        h = std::min({h, 0.1 * (t_end - t), opt.max_step});
        if (!(h > 0.0)) h = 1e-6 * (t_end - t);
    }

    std::size_t next_out = 1;
    bool rejected_last = false;

    while (next_out < grid.size()) {
        if (res.steps >= opt.max_steps) {
            throw OdeError("ode: exceeded max step count at t = " + std::to_string(t));
        }
        h = std::min({h, opt.max_step, t_end - t});
        if (h <= std::abs(t) * std::numeric_limits<double>::epsilon() * 4.0 || h <= 1e-300) {
            throw OdeError("ode: step size underflow at t = " + std::to_string(t));
        }

        const Vec k2 = f(t + h * 0.2, Vec(y + h * 0.2 * k1));
        const Vec k3 = f(t + h * 0.3, Vec(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2)));
        const Vec k4 = f(t + h * 0.8,
                         Vec(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3)));
        const Vec k5 =
            f(t + h * (8.0 / 9.0),
              Vec(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                           64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4)));
        const Vec k6 = f(t + h, Vec(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                             46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                             5103.0 / 18656.0 * k5)));
        const Vec y1 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                                2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
        const Vec k7 = f(t + h, y1);
        res.evaluations += 6;

        const Vec err_vec = h * ((35.0 / 384.0 - 5179.0 / 57600.0) * k1 +
                                 (500.0 / 1113.0 - 7571.0 / 16695.0) * k3 +
                                 (125.0 / 192.0 - 393.0 / 640.0) * k4 +
                                 (-2187.0 / 6784.0 + 92097.0 / 339200.0) * k5 +
                                 (11.0 / 84.0 - 187.0 / 2100.0) * k6 - (1.0 / 40.0) * k7);
        const double err = error_norm(err_vec, y, y1);
        res.steps++;

        if (err <= 1.0) {
            // continuous extension on [t, t+h]
            const Vec ydiff = y1 - y;
            const Vec bspl = h * k1 - ydiff;
            const Vec r1 = y;
            const Vec r2 = ydiff;
            const Vec r3 = bspl;
            const Vec r4 = ydiff - h * k7 - bspl;
            const Vec r5 = h * (detail::kD1 * k1 + detail::kD3 * k3 + detail::kD4 * k4 +
                                detail::kD5 * k5 + detail::kD6 * k6 + detail::kD7 * k7);
            while (next_out < grid.size() && grid[next_out] <= t + h) {
                const double th = (grid[next_out] - t) / h;
                const double th1 = 1.0 - th;
                res.states.push_back(r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5))));
                ++next_out;
            }
            t += h;
            y = y1;
            k1 = k7;  // FSAL
            const double fac = std::pow(std::max(err, 1e-10), -0.2) * 0.9;
            h *= std::min(rejected_last ? 1.0 : 5.0, std::max(0.2, fac));
            rejected_last = false;
        } else {
            res.rejected++;
            rejected_last = true;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }
    return res;
}

} // namespace nmbloch::ode
