#pragma once

// Slow, independently coded reference implementations ("oracles") used as
// ground truth by the test suite and the `verify` subcommand: Bessel-tail
// integrals by chunked series acceleration, analytic circle symbols, and the
// cylindrical-harmonics scattering series for the circular PEC cylinder.
//
// None of these share the evaluation strategy of the fast paths they check:
// tails are summed over oscillation half-periods with Euler averaging instead
// of contour rotation; the Mehler-Sonine integral uses the t = cosh(u)
// substitution instead of the Filon expansion; circle symbols come from
// closed forms or brute-force 1D quadrature of the kernel itself.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ef2d/bessel.hpp"
#include "ef2d/kernels.hpp"
#include "ef2d/quadrature.hpp"

namespace ef2d::oracle {

// int_x^inf J0(s r) env(s) ds for a smooth decaying envelope: integrate
// between consecutive (asymptotic) zeros of J0(s r) so chunk sums alternate
// in sign, then accelerate the alternating series by iterated averaging
// (the Euler transform).
template <class F>
inline double oscillatory_tail(F&& f, double x, double r, int max_chunks = 64) {
    // zeros of J0(u) sit near (n - 1/4) pi for large u; map to s = u / r
    const double u0 = x * r;
    int n0 = static_cast<int>(std::ceil(u0 / M_PI + 0.25));
    if ((n0 - 0.25) * M_PI <= u0) ++n0;
    std::vector<double> chunks;
    double lo = x;
    for (int n = 0; n < max_chunks; ++n) {
        const double hi = (n0 + n - 0.25) * M_PI / r;
        chunks.push_back(integrate_adaptive(f, lo, hi, 1e-15));
        lo = hi;
        if (n >= 12 && std::fabs(chunks.back()) < 1e-16) break;
    }
    // iterated averaging of the partial-sum sequence; final column entry is
    // the accelerated limit
    std::vector<double> row(chunks.size());
    double acc = 0;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        acc += chunks[i];
        row[i] = acc;
    }
    while (row.size() > 1) {
        for (std::size_t i = 0; i + 1 < row.size(); ++i) row[i] = 0.5 * (row[i] + row[i + 1]);
        row.pop_back();
    }
    return row[0];
}

// Tail of Eq. (7): int_alpha^inf J0(s r)/s ds, r > 0.
inline double tail_static(double r, double alpha) {
    if (!(r > 0)) throw std::invalid_argument("oracle::tail_static: r <= 0");
    return oscillatory_tail([r](double s) { return bessel::j0(s * r) / s; }, alpha, r);
}

// Tail of Eq. (8): int_alpha^inf J0(s r) s/(s^2 - k^2) ds, r > 0, alpha > k.
inline double tail_fourier(double r, double k, double alpha) {
    if (!(r > 0)) throw std::invalid_argument("oracle::tail_fourier: r <= 0");
    if (!(alpha > k)) throw std::invalid_argument("oracle::tail_fourier: alpha <= k");
    return oscillatory_tail(
        [r, k](double s) { return bessel::j0(s * r) * s / (s * s - k * k); }, alpha, r);
}

// Eq. (9) tail int_1^{alpha/k} cos(k r t)/sqrt(t^2-1) dt via t = cosh(u).
inline double tail_mehler_sonine(double r, double k, double alpha) {
    if (!(alpha > k)) throw std::invalid_argument("oracle::tail_mehler_sonine: alpha <= k");
    const double top = std::acosh(alpha / k);
    return integrate_adaptive([kr = k * r](double u) { return std::cos(kr * std::cosh(u)); },
                              0.0, top, 1e-12);
}

inline std::complex<double> kernel(const KernelSpec& spec, double r) {
    spec.validate();
    switch (spec.family) {
        case KernelFamily::StaticUnfiltered:
            return {-std::log(r) / (2.0 * M_PI), 0.0};
        case KernelFamily::DynamicUnfiltered:
            return {-0.25 * bessel::y0(spec.k * r), -0.25 * bessel::j0(spec.k * r)};
        case KernelFamily::StaticFiltered:
            return {-(std::log(r) + tail_static(r, spec.alpha)) / (2.0 * M_PI), 0.0};
        case KernelFamily::DynamicFourierFiltered:
            return {-0.25 * bessel::y0(spec.k * r) -
                        tail_fourier(r, spec.k, spec.alpha) / (2.0 * M_PI),
                    -0.25 * bessel::j0(spec.k * r)};
        case KernelFamily::DynamicMsFiltered:
            return {tail_mehler_sonine(r, spec.k, spec.alpha) / (2.0 * M_PI),
                    -0.25 * bessel::j0(spec.k * r)};
    }
    throw std::invalid_argument("oracle::kernel: unknown family");
}

// Integral representations of the cylindrical Bessel functions (DLMF 10.9.1
// and the classical Y0 cosine-log form), used to validate the series /
// asymptotic implementations in bessel.hpp.
inline double j0_integral(double x) {
    return integrate_adaptive([x](double t) { return std::cos(x * std::sin(t)); }, 0.0,
                              M_PI, 1e-13) /
           M_PI;
}

inline double y0_integral(double x) {
    const double v = integrate_adaptive(
        [x](double t) {
            const double st = std::sin(t);
            return std::cos(x * std::cos(t)) *
                   (euler_gamma + std::log(2.0 * x * st * st));
        },
        0.0, 0.5 * M_PI, 1e-13);
    return v * 4.0 / (M_PI * M_PI);
}

// ---------------------------------------------------------------------------
// Circle symbols: every operator in play is diagonal in the Fourier basis
// e^{i m theta} on the circle of radius a.

inline double circle_symbol_S_static(double a, int m) {
    if (!(a > 0)) throw std::invalid_argument("circle_symbol_S_static: a <= 0");
    if (m < 0) m = -m;
    return m == 0 ? -a * std::log(a) : a / (2.0 * m);
}

enum class CircleOp { S, N };

inline std::complex<double> circle_symbol_dynamic(double a, int m, double k, CircleOp op) {
    if (!(k * a > 0)) throw std::invalid_argument("circle_symbol_dynamic: ka <= 0");
    if (m < 0) m = -m;
    const double ka = k * a;
    const std::complex<double> iu(0.0, 1.0);
    if (op == CircleOp::S) return -iu * (M_PI * a / 2.0) * bessel::jn(m, ka) * bessel::h2n(m, ka);
    const std::complex<double> jp =
        (m == 0) ? -bessel::jn(1, ka)
                 : 0.5 * (bessel::jn(m - 1, ka) - bessel::jn(m + 1, ka));
    const std::complex<double> hp =
        (m == 0) ? -bessel::h2n(1, ka)
                 : 0.5 * (bessel::h2n(m - 1, ka) - bessel::h2n(m + 1, ka));
    return iu * (M_PI * k * k * a / 2.0) * jp * hp;
}

// m-th Fourier symbol of the integral operator with radial kernel
// theta -> g(2 a sin(theta/2)): 2 pi a x Fourier coefficient, by brute-force
// 1D adaptive quadrature of the (possibly slow) oracle kernel evaluation.
// For unfiltered kernels the theta -> 0 log singularity is split off
// analytically using ln(2 sin(theta/2)) = -sum cos(m theta)/m.
template <class Kern>
inline double circle_symbol_radial(double a, int m, Kern&& g, double tol = 1e-10) {
    if (m < 0) m = -m;
    const double v = integrate_adaptive(
        [&](double th) { return g(2.0 * a * std::sin(0.5 * th)) * std::cos(m * th); }, 0.0,
        M_PI, tol);
    return a * 2.0 * v;  // 2 pi a * (1/(2 pi)) * int_{-pi}^{pi} = 2 a int_0^pi
}

inline std::complex<double> circle_symbol_filtered(double a, int m, double k, double alpha,
                                                   KernelFamily family) {
    KernelSpec spec{family, k, alpha};
    spec.validate();
    if (!spec.is_filtered())
        throw std::invalid_argument("circle_symbol_filtered: family not filtered");
    const double re = circle_symbol_radial(
        a, m, [&](double r) { return kernel(spec, r).real(); });
    if (spec.is_static()) return {re, 0.0};
    const double im = circle_symbol_radial(
        a, m, [&](double r) { return -0.25 * bessel::j0(k * r); });
    return {re, im};
}

// Weak-form (Maue) N symbol for an arbitrary radial kernel with S symbols s_m:
// N_m = (m^2/a^2) s_m - k^2 (s_{m-1} + s_{m+1})/2, from phi' = (im/a) phi and
// t.t' = cos(theta - theta').
inline std::complex<double> circle_symbol_N_from_S(
    int m, double a, double k, const std::function<std::complex<double>(int)>& s_symbol) {
    if (m < 0) m = -m;
    return double(m) * double(m) / (a * a) * s_symbol(m) -
           k * k * 0.5 * (s_symbol(m - 1) + s_symbol(m + 1));
}

// ---------------------------------------------------------------------------
// TM scattering from the PEC circular cylinder: surface current series
// j_z(theta) = 2/(eta pi k a) sum_m (-i)^m e^{i m theta} / H2_m(ka) for a unit
// plane wave incident along +x.

struct MieSeriesTM {
    double a = 1, k = 1, eta = 1;
    int m_max = 0;
    std::vector<std::complex<double>> h2;  // H2_m(ka), m = 0..m_max

    std::complex<double> current(double theta) const {
        const std::complex<double> iu(0.0, 1.0);
        std::complex<double> acc = 1.0 / h2[0];
        std::complex<double> phase(1.0, 0.0);  // (-i)^m
        for (int m = 1; m <= m_max; ++m) {
            phase *= -iu;
            acc += phase * 2.0 * std::cos(m * theta) / h2[m];
        }
        return acc * (2.0 / (eta * M_PI * k * a));
    }

    // sum_m (|a_m|^2 + Re a_m) with a_m = -J_m/H2_m; exactly zero for the
    // true coefficients (the optical theorem for a lossless scatterer).
    double optical_theorem_residual() const {
        double acc = 0;
        for (int m = 0; m <= m_max; ++m) {
            const std::complex<double> am = -bessel::jn(m, k * a) / h2[m];
            const double w = (m == 0) ? 1.0 : 2.0;
            acc += w * (std::norm(am) + am.real());
        }
        return std::fabs(acc);
    }
};

inline MieSeriesTM mie_series_current_tm(double a, double k, double eta = 1.0) {
    const double ka = k * a;
    if (!(ka > 0) || ka > 20)
        throw std::invalid_argument("mie_series_current_tm: require ka in (0, 20]");
    MieSeriesTM s;
    s.a = a;
    s.k = k;
    s.eta = eta;
    s.m_max = static_cast<int>(ka + 10.0 * std::cbrt(ka) + 10.0);
    s.h2.resize(s.m_max + 1);
    for (int m = 0; m <= s.m_max; ++m) s.h2[m] = bessel::h2n(m, ka);
    return s;
}

}  // namespace ef2d::oracle
