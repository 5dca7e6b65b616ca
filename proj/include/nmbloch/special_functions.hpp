// special_functions.hpp — cosine/sine integrals for complex argument, hyperbolic
// cosine/sine integrals for real argument, exponential integral Ei.
//
// Ci/Si use three regimes stitched together:
//   |z| <= 12          Maclaurin series of Si and Cin (cancellation stays ~1e-13)
//   12 < |z| < 35      Gauss–Legendre marching of ci' = cos t / t, si' = sin t / t
//                      along the ray from a series anchor at |z0| = 12
//   |z| >= 35          asymptotic auxiliary series f, g at optimal truncation
// Left half plane is reached by reflection, Ci(-z) = Ci(z) -/+ i*pi. The branch
// cut sits on the negative real axis and is rejected.

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace nmbloch::sf {

inline constexpr double kEulerGamma = 0.5772156649015328606065120900824024;

struct SpecialFunctionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CiSi {
    std::complex<double> ci;
    std::complex<double> si;
};

struct ChiShi {
    double chi;
    double shi;
};

namespace detail {

using cplx = std::complex<double>;

inline CiSi cisi_series(cplx z) {
    const cplx z2 = z * z;
    // Si(z) = sum (-1)^k z^(2k+1) / ((2k+1)(2k+1)!)
    cplx term = z;
    cplx si = z;
    for (int k = 0; k < 80; ++k) {
        const double n = 2.0 * k + 1.0;
        term *= -z2 * (n / ((n + 2.0) * (n + 1.0) * (n + 2.0)));
        si += term;
        if (std::abs(term) < 1e-18 * std::abs(si) + 1e-300) break;
    }
    // Cin(z) = sum_{k>=1} (-1)^(k+1) z^(2k) / ((2k)(2k)!)
    cplx cterm = z2 / 4.0;
    cplx cin = cterm;
    for (int k = 1; k < 80; ++k) {
        const double n = 2.0 * k;
        cterm *= -z2 * (n / ((n + 2.0) * (n + 1.0) * (n + 2.0)));
        cin += cterm;
        if (std::abs(cterm) < 1e-18 * std::abs(cin) + 1e-300) break;
    }
    return {kEulerGamma + std::log(z) - cin, si};
}

// Auxiliary asymptotic sums: f ~ (1/z) sum (-1)^m (2m)!/z^(2m),
// g ~ (1/z^2) sum (-1)^m (2m+1)!/z^(2m). Truncated at the smallest term.
inline CiSi cisi_asymptotic(cplx z) {
    const cplx iz2 = 1.0 / (z * z);
    cplx fterm(1.0, 0.0), gterm(1.0, 0.0);
    cplx fsum = fterm, gsum = gterm;
    double fprev = 1.0, gprev = 1.0;
    for (int m = 0; m < 40; ++m) {
        const double a = (2.0 * m + 1.0) * (2.0 * m + 2.0);
        const double b = (2.0 * m + 2.0) * (2.0 * m + 3.0);
        fterm *= -a * iz2;
        gterm *= -b * iz2;
        const double fa = std::abs(fterm), ga = std::abs(gterm);
        if (fa > fprev || ga > gprev) break;
        fsum += fterm;
        gsum += gterm;
        fprev = fa;
        gprev = ga;
        if (fa < 1e-17 && ga < 1e-17) break;
    }
    const cplx f = fsum / z;
    const cplx g = gsum / (z * z);
    const cplx c = std::cos(z), s = std::sin(z);
    const double half_pi = 1.5707963267948966192313216916398;
    return {f * s - g * c, half_pi - f * c - g * s};
}

// 16-point Gauss–Legendre nodes (positive half) and weights on [-1, 1].
inline constexpr double kGl16X[8] = {
    0.0950125098376374401853193354250, 0.2816035507792589132304605014604,
    0.4580167776572273863424194429835, 0.6178762444026437484466717640487,
    0.7554044083550030338951011948474, 0.8656312023878317438804678977123,
    0.9445750230732325760779884155346, 0.9894009349916499325961541734503};
inline constexpr double kGl16W[8] = {
    0.1894506104550684962853967232082, 0.1826034150449235888667636679692,
    0.1691565193950025381893120790303, 0.1495959888165767320815017305474,
    0.1246289712555338720524762821920, 0.0951585116824927848099251076022,
    0.0622535239386478928628438369944, 0.0271524594117540948517805724560};

// Integrate cos(t)/t and sin(t)/t along the straight segment [za, zb].
inline void cisi_march_segment(cplx za, cplx zb, cplx& dci, cplx& dsi) {
    const cplx mid = 0.5 * (za + zb);
    const cplx half = 0.5 * (zb - za);
    dci = dsi = cplx(0.0, 0.0);
    for (int i = 0; i < 8; ++i) {
        const cplx tp = mid + half * kGl16X[i];
        const cplx tm = mid - half * kGl16X[i];
        dci += kGl16W[i] * (std::cos(tp) / tp + std::cos(tm) / tm);
        dsi += kGl16W[i] * (std::sin(tp) / tp + std::sin(tm) / tm);
    }
    dci *= half;
    dsi *= half;
}

inline CiSi cisi_ring(cplx z) {
    const double r = std::abs(z);
    const cplx z0 = z * (12.0 / r);
    CiSi acc = cisi_series(z0);
    const double len = r - 12.0;
    const int n = std::max(1, static_cast<int>(std::ceil(len / 1.5)));
    cplx prev = z0;
    for (int k = 1; k <= n; ++k) {
        const cplx next = z0 + (z - z0) * (static_cast<double>(k) / n);
        cplx dci, dsi;
        cisi_march_segment(prev, next, dci, dsi);
        acc.ci += dci;
        acc.si += dsi;
        prev = next;
    }
    return acc;
}

inline CiSi cisi_right_half(cplx z) {
    const double r = std::abs(z);
    if (r <= 12.0) return cisi_series(z);
    if (r >= 35.0) return cisi_asymptotic(z);
    return cisi_ring(z);
}

} // namespace detail

// Principal-branch Ci and Si of complex z. Requires z != 0 and z off the
// negative real axis.
inline CiSi cisi(std::complex<double> z) {
    if (z == std::complex<double>(0.0, 0.0)) {
        throw SpecialFunctionError("cisi: z = 0 is outside the domain");
    }
    if (z.imag() == 0.0 && z.real() < 0.0) {
        throw SpecialFunctionError("cisi: branch cut (negative real axis) at z = " +
                                   std::to_string(z.real()));
    }
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw SpecialFunctionError("cisi: non-finite argument");
    }
    if (z.real() >= 0.0) return detail::cisi_right_half(z);
    // Reflection into the right half plane; the log branch adds +/- i*pi.
    CiSi r = detail::cisi_right_half(-z);
    const double s = z.imag() > 0.0 ? 1.0 : -1.0;
    return {r.ci + std::complex<double>(0.0, s * 3.1415926535897932384626433832795),
            -r.si};
}

// Chi(x) and Shi(x) for real x > 0 by all-positive Maclaurin series.
// The terms peak near e^x, so x is capped below the overflow edge.
inline ChiShi chishi(double x) {
    if (!(x > 0.0)) {
        throw SpecialFunctionError("chishi: requires x > 0, got " + std::to_string(x));
    }
    if (x > 700.0) {
        throw SpecialFunctionError("chishi: x = " + std::to_string(x) +
                                   " would overflow (limit 700)");
    }
    const double x2 = x * x;
    double sterm = x, shi = x;
    double cterm = x2 / 4.0, csum = cterm;
    for (int k = 0; k < 500; ++k) {
        const double n = 2.0 * k + 1.0;
        sterm *= x2 * (n / ((n + 2.0) * (n + 1.0) * (n + 2.0)));
        shi += sterm;
        const double m = 2.0 * k + 2.0;
        cterm *= x2 * (m / ((m + 2.0) * (m + 1.0) * (m + 2.0)));
        csum += cterm;
        if (sterm < 1e-18 * shi && cterm < 1e-18 * csum) break;
    }
    return {kEulerGamma + std::log(x) + csum, shi};
}

// Ei(x) = Chi(x) + Shi(x) for x > 0.
inline double expint_ei(double x) {
    const ChiShi cs = chishi(x);
    return cs.chi + cs.shi;
}

} // namespace nmbloch::sf
