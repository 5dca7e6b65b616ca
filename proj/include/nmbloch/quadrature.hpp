// quadrature.hpp — globally adaptive Gauss–Kronrod 15(7) integration
//
// The error-driven refinement follows the QUADPACK QAG pattern: keep a pool of
// segments, always split the one with the largest error estimate, stop when
// the summed error passes the tolerance. Integrands are plain callables
// double -> double.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nmbloch::quad {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    std::size_t max_intervals = 20000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
};

namespace detail {

// Kronrod abscissae (positive half) and weights; Gauss-7 weights on the odd nodes.
inline constexpr double kXgk[8] = {
    0.9914553711208126392068546975263285, 0.9491079123427585245261896840478513,
    0.8648644233597690727897127886409262, 0.7415311855993944398638647732807884,
    0.5860872354676911302941448382587296, 0.4058451513773971669066064120769615,
    0.2077849550078984676006894037732449, 0.0};
inline constexpr double kWgk[8] = {
    0.0229353220105292249637320080589695, 0.0630920926299785532907006631892042,
    0.1047900103222501838398763225415180, 0.1406532597155259187451895905102379,
    0.1690047266392679028265834265985503, 0.1903505780647854099132564024210137,
    0.2044329400752988924141619992346491, 0.2094821410847278280129991748917143};
inline constexpr double kWg[4] = {
    0.1294849661688696932706114326790820, 0.2797053914892766679014677714237796,
    0.3818300505051189449503697754889751, 0.4179591836734693877551020408163265};

struct Segment {
    double a, b;
    double integral;
    double error;
};

template <class F>
inline Segment gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    double resk = 0.0, resg = 0.0, resabs = 0.0;
    for (int i = 0; i < 7; ++i) {
        resk += kWgk[i] * (fv[i] + fv[14 - i]);
        resabs += kWgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
    }
    resk += kWgk[7] * fv[7];
    resabs += kWgk[7] * std::abs(fv[7]);
    for (int i = 0; i < 4; ++i) {
        resg += kWg[i] * (i < 3 ? fv[2 * i + 1] + fv[13 - 2 * i] : fv[7]);
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fv[7] - mean);
    for (int i = 0; i < 7; ++i) {
        resasc += kWgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
    }
    resasc *= h;
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (!std::isfinite(resk)) {
        throw QuadratureError("non-finite integrand on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]");
    }
    return {a, b, resk * h, err};
}

} // namespace detail

// Integrate over [a, b] with initial subdivision at the given interior breakpoints.
template <class F>
inline Result integrate_segmented(F&& f, const std::vector<double>& breakpoints,
                                  const Options& opt = {}) {
    if (breakpoints.size() < 2) throw std::invalid_argument("integrate: need at least two breakpoints");
    std::vector<detail::Segment> segs;
    segs.reserve(breakpoints.size() + 64);
    Result res;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i] < breakpoints[i + 1])) {
            throw std::invalid_argument("integrate: breakpoints must be strictly increasing");
        }
        segs.push_back(detail::gk15(f, breakpoints[i], breakpoints[i + 1]));
        res.evaluations += 15;
    }
    auto by_error = [](const detail::Segment& s, const detail::Segment& t) { return s.error < t.error; };
    std::make_heap(segs.begin(), segs.end(), by_error);
    double total = 0.0, err = 0.0;
    for (const auto& s : segs) { total += s.integral; err += s.error; }
    std::size_t splits_since_resum = 0;
    while (true) {
        if (err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
            // refresh the running sums before trusting them
            total = err = 0.0;
            for (const auto& s : segs) { total += s.integral; err += s.error; }
            if (err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
                res.value = total;
                res.error = err;
                return res;
            }
        }
        if (segs.size() >= opt.max_intervals) {
            throw QuadratureError("quadrature did not converge within " +
                                  std::to_string(opt.max_intervals) + " intervals (error " +
                                  std::to_string(err) + ")");
        }
        std::pop_heap(segs.begin(), segs.end(), by_error);
        const detail::Segment worst = segs.back();
        segs.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            throw QuadratureError("quadrature interval underflow near " + std::to_string(mid));
        }
        total -= worst.integral;
        err -= worst.error;
        segs.push_back(detail::gk15(f, worst.a, mid));
        total += segs.back().integral;
        err += segs.back().error;
        std::push_heap(segs.begin(), segs.end(), by_error);
        segs.push_back(detail::gk15(f, mid, worst.b));
        total += segs.back().integral;
        err += segs.back().error;
        std::push_heap(segs.begin(), segs.end(), by_error);
        res.evaluations += 30;
        if (++splits_since_resum >= 2048) {
            splits_since_resum = 0;
            total = err = 0.0;
            for (const auto& s : segs) { total += s.integral; err += s.error; }
        }
    }
}

template <class F>
inline Result integrate(F&& f, double a, double b, const Options& opt = {}) {
    return integrate_segmented(f, std::vector<double>{a, b}, opt);
}

// Antiderivative sampled on a grid: out[k] = integral from grid[0] to grid[k].
// Each interval is integrated adaptively, then prefix-summed.
template <class F>
inline std::vector<double> cumulative(F&& f, const std::vector<double>& grid,
                                      const Options& opt = {}) {
    if (grid.empty()) return {};
    std::vector<double> out(grid.size(), 0.0);
    Options per = opt;
    per.abs_tol = opt.abs_tol / static_cast<double>(std::max<std::size_t>(grid.size(), 1));
    double acc = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        acc += integrate(f, grid[k - 1], grid[k], per).value;
        out[k] = acc;
    }
    return out;
}

} // namespace nmbloch::quad
