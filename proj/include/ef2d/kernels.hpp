#pragma once

// Unfiltered 2D Helmholtz/Laplace Green's functions and the three filtered
// kernels obtained by truncating spectral representations of the Green's
// function: the static radial-spectral truncation, its dynamic counterpart,
// and the Mehler-Sonine truncation.
//
// The radial-spectral tails int_alpha^inf J0(s r) s/(s^2-k^2) ds are reduced
// to int_x^inf J0(u) f(u) du and evaluated by rotating the contour: on the
// real axis J0 = Re H0^(1), and H0^(1) decays like e^{-v} on the vertical ray
// u = X + iv, where its large-argument (Hankel) expansion applies.  A short
// real-axis leg bridges x up to the rotation point.

#include <cmath>
#include <complex>
#include <stdexcept>

#include "ef2d/bessel.hpp"
#include "ef2d/filon.hpp"
#include "ef2d/quadrature.hpp"

namespace ef2d {

enum class KernelFamily {
    StaticUnfiltered,
    DynamicUnfiltered,
    StaticFiltered,          // log kernel minus truncated radial-spectral tail
    DynamicFourierFiltered,  // Hankel kernel minus truncated radial-spectral tail
    DynamicMsFiltered,       // truncated Mehler-Sonine representation
};

inline const char* kernel_family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::StaticUnfiltered: return "static";
        case KernelFamily::DynamicUnfiltered: return "dynamic";
        case KernelFamily::StaticFiltered: return "static-filtered";
        case KernelFamily::DynamicFourierFiltered: return "fourier-filtered";
        case KernelFamily::DynamicMsFiltered: return "ms-filtered";
    }
    return "unknown";
}

struct KernelSpec {
    KernelFamily family = KernelFamily::StaticUnfiltered;
    double k = 0;      // wavenumber; 0 for static families
    double alpha = 0;  // spectral cutoff; unused for unfiltered families

    bool is_static() const {
        return family == KernelFamily::StaticUnfiltered ||
               family == KernelFamily::StaticFiltered;
    }
    bool is_filtered() const {
        return family == KernelFamily::StaticFiltered ||
               family == KernelFamily::DynamicFourierFiltered ||
               family == KernelFamily::DynamicMsFiltered;
    }
    void validate() const {
        if (is_static()) {
            if (k != 0.0) throw std::invalid_argument("KernelSpec: static family requires k = 0");
        } else if (!(k > 0)) {
            throw std::invalid_argument("KernelSpec: dynamic family requires k > 0");
        }
        if (is_filtered() && !(alpha > k))
            throw std::invalid_argument("KernelSpec: filtered family requires alpha > k");
    }
};

struct SingularityError : std::domain_error {
    using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// Unfiltered kernels

// g0(r) = -log(r) / (2 pi), r > 0.
inline double g_static(double r) {
    if (!(r > 0)) throw SingularityError("g_static: r = 0");
    return -std::log(r) / (2.0 * M_PI);
}

// g(r) = -(i/4) H0^(2)(k r) = -(1/4) Y0(kr) - (i/4) J0(kr), r > 0, k > 0.
inline std::complex<double> g_dynamic(double r, double k) {
    if (!(r > 0)) throw SingularityError("g_dynamic: r = 0");
    if (!(k > 0)) throw std::invalid_argument("g_dynamic: k must be > 0");
    const double x = k * r;
    return {-0.25 * bessel::y0(x), -0.25 * bessel::j0(x)};
}

namespace detail {

// W(x) = int_0^x (1 - J0(u))/u du, ascending series; usable for x <= ~18.
inline double j0_tail_series_w(double x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L, sum = 0.0L;
    for (int m = 1; m < 80; ++m) {
        term *= -q / (static_cast<long double>(m) * m);
        sum -= term / (2.0L * m);  // (-1)^{m+1} q^m / (2m (m!)^2)
        if (fabsl(term) < 1e-22L * (fabsl(sum) + 1.0L)) break;
    }
    return static_cast<double>(sum);
}

// V(x) = sum_{m>=1} (-1)^{m+1} H_m (x^2/4)^m / (m!)^2, the Y0 companion sum.
inline double y0_companion_v(double x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L, h = 0.0L, sum = 0.0L;
    for (int m = 1; m < 80; ++m) {
        term *= -q / (static_cast<long double>(m) * m);
        h += 1.0L / m;
        sum -= term * h;
        if (fabsl(term) * (h + 1.0L) < 1e-22L * (fabsl(sum) + 1.0L)) break;
    }
    return static_cast<double>(sum);
}

inline constexpr double kAsymptoticCut = 18.0;

// Truncated Hankel-expansion factor A(z) = sum_k i^k a_k(0) z^{-k}, so that
// H0^(1)(z) = sqrt(2/(pi z)) e^{i(z - pi/4)} A(z) for |z| >= kAsymptoticCut.
inline std::complex<double> hankel_factor(std::complex<double> z) {
    std::complex<double> zi = 1.0 / z;
    std::complex<double> term(1.0, 0.0), sum(1.0, 0.0);
    double prev = 1e300;
    long double ck = 1.0L;
    for (int k = 0; k < 40; ++k) {
        ck *= -(2.0L * k + 1.0L) * (2.0L * k + 1.0L) / (8.0L * (k + 1.0L));
        term *= std::complex<double>(0.0, 1.0) * zi;
        const std::complex<double> t = static_cast<double>(ck) * term;
        const double mag = std::abs(t);
        if (mag > prev) break;
        prev = mag;
        sum += t;
        if (mag < 1e-17) break;
    }
    return sum;
}

// Re int_X^inf H0^(1)(u) f(u) du via the vertical ray u = X + iv; valid for
// X >= kAsymptoticCut and f analytic and decaying in the upper-right quadrant
// with no poles at Re u >= X.
template <class F>
inline double contour_tail(double X, F&& f) {
    const std::complex<double> i_unit(0.0, 1.0);
    const std::complex<double> front =
        i_unit * std::polar(1.0, X - 0.25 * M_PI) * std::sqrt(2.0 / M_PI);
    auto integrand = [&](double v) -> std::complex<double> {
        const std::complex<double> z(X, v);
        return std::exp(-v) / std::sqrt(z) * hankel_factor(z) * f(z);
    };
    static constexpr double edges[] = {0.0, 0.5, 1.5, 3.5, 7.5, 15.5, 33.5};
    const GaussRule& g = cached_gauss(16);
    std::complex<double> acc(0.0, 0.0);
    for (size_t p = 0; p + 1 < sizeof(edges) / sizeof(edges[0]); ++p)
        acc += g.integrate(integrand, edges[p], edges[p + 1]);
    return (front * acc).real();
}

}  // namespace detail

// T0(x) = int_x^inf J0(u)/u du.
inline double j0_tail_over_u(double x) {
    if (!(x > 0)) throw std::invalid_argument("j0_tail_over_u: x <= 0");
    if (x <= detail::kAsymptoticCut)
        return -euler_gamma - std::log(0.5 * x) + detail::j0_tail_series_w(x);
    return detail::contour_tail(x, [](std::complex<double> z) { return 1.0 / z; });
}

// Radial-spectral tail int_alpha^inf J0(s r) s / (s^2 - k^2) ds, r > 0,
// alpha > k >= 0.  In u = s r this is int_x^inf J0(u) u/(u^2 - b^2) du with
// x = alpha r, b = k r.
inline double fourier_filter_tail(double r, double k, double alpha) {
    if (!(r > 0)) throw std::invalid_argument("fourier_filter_tail: r must be > 0");
    if (!(alpha > k) || k < 0) throw std::invalid_argument("fourier_filter_tail: alpha > k >= 0");
    const double x = alpha * r, b = k * r;
    const double X = std::max({x, detail::kAsymptoticCut, 1.5 * b});
    double real_leg = 0.0;
    if (X > x) {
        real_leg = integrate_adaptive(
            [b](double u) { return bessel::j0(u) * u / (u * u - b * b); }, x, X,
            1e-13 * (1.0 + std::fabs(std::log(x))));
    }
    const double vert_leg = detail::contour_tail(
        X, [b](std::complex<double> z) { return z / (z * z - b * b); });
    return real_leg + vert_leg;
}

// b^2 int_x^inf J0(u) / (u (u^2 - b^2)) du  (the tail's deviation from T0);
// finite for x -> 0 with b = kappa x, kappa < 1 fixed.
inline double fourier_filter_tail_correction(double r, double k, double alpha) {
    if (!(r >= 0)) throw std::invalid_argument("fourier_filter_tail_correction: r < 0");
    const double kappa = k / alpha;
    if (r == 0.0) return -0.5 * std::log1p(-kappa * kappa);
    const double x = alpha * r, b = k * r;
    const double X = std::max({x, detail::kAsymptoticCut, 1.5 * b});
    double real_leg = 0.0;
    if (X > x) {
        real_leg = integrate_adaptive(
            [b](double u) { return bessel::j0(u) * b * b / (u * (u * u - b * b)); }, x, X,
            1e-14);
    }
    const double vert_leg = detail::contour_tail(
        X, [b](std::complex<double> z) { return b * b / (z * (z * z - b * b)); });
    return real_leg + vert_leg;
}

// Static filtered kernel: -log(r)/(2 pi) - (1/2 pi) int_alpha^inf J0(s r)/s ds.
// Total function of r >= 0; the r -> 0 limit is (gamma_E + log(alpha/2))/(2 pi).
inline double g_static_filtered(double r, double alpha) {
    if (!(alpha > 0)) throw std::invalid_argument("g_static_filtered: alpha <= 0");
    if (!(r >= 0)) throw std::invalid_argument("g_static_filtered: r < 0");
    const double x = alpha * r;
    if (x <= detail::kAsymptoticCut)
        // log r and the tail's -log(x/2) combined analytically
        return (euler_gamma + std::log(0.5 * alpha) - detail::j0_tail_series_w(x)) /
               (2.0 * M_PI);
    return -(std::log(r) + j0_tail_over_u(x)) / (2.0 * M_PI);
}

// Dynamic 2D-Fourier filtered kernel (radial-spectral truncation of the
// Hankel kernel).  The log singularities of the two terms cancel; near r = 0
// the cancellation is done analytically through the ascending series.
inline std::complex<double> g_dynamic_fourier_filtered(double r, double k, double alpha) {
    if (!(k > 0)) throw std::invalid_argument("g_dynamic_fourier_filtered: k <= 0");
    if (!(alpha > k)) throw std::invalid_argument("g_dynamic_fourier_filtered: alpha <= k");
    if (!(r >= 0)) throw std::invalid_argument("g_dynamic_fourier_filtered: r < 0");
    const double x = alpha * r, b = k * r;
    const double im = (r == 0.0) ? -0.25 : -0.25 * bessel::j0(b);
    if (x <= detail::kAsymptoticCut) {
        const double lnb2g = (r == 0.0) ? 0.0
                                        : (std::log(0.5 * b) + euler_gamma) *
                                              (bessel::j0(b) - 1.0);
        const double re = -(lnb2g + std::log(k / alpha) + detail::y0_companion_v(b) +
                            detail::j0_tail_series_w(x) +
                            fourier_filter_tail_correction(r, k, alpha)) /
                          (2.0 * M_PI);
        return {re, im};
    }
    const double re =
        -0.25 * bessel::y0(b) - fourier_filter_tail(r, k, alpha) / (2.0 * M_PI);
    return {re, im};
}

// Mehler-Sonine filtered kernel: -(i/4) J0(kr) + (1/2 pi) int_1^{alpha/k}
// cos(k r t)/sqrt(t^2-1) dt.  The tail enters with the sign that makes
// g^alpha -> g as alpha -> inf (the truncated integral converges to
// -(pi/2) Y0(kr)).
inline std::complex<double> g_dynamic_ms_filtered(double r, double k, double alpha) {
    if (!(k > 0)) throw std::invalid_argument("g_dynamic_ms_filtered: k <= 0");
    if (!(alpha > k)) throw std::invalid_argument("g_dynamic_ms_filtered: alpha <= k");
    if (!(r >= 0)) throw std::invalid_argument("g_dynamic_ms_filtered: r < 0");
    const double tail = mehler_sonine_tail(r, k, alpha);
    return {tail / (2.0 * M_PI), -0.25 * bessel::j0(k * r)};
}

// Dispatch on the kernel spec.  Unfiltered families require r > 0.
inline std::complex<double> kernel_value(const KernelSpec& spec, double r) {
    switch (spec.family) {
        case KernelFamily::StaticUnfiltered:
            return {g_static(r), 0.0};
        case KernelFamily::DynamicUnfiltered:
            return g_dynamic(r, spec.k);
        case KernelFamily::StaticFiltered:
            return {g_static_filtered(r, spec.alpha), 0.0};
        case KernelFamily::DynamicFourierFiltered:
            return g_dynamic_fourier_filtered(r, spec.k, spec.alpha);
        case KernelFamily::DynamicMsFiltered:
            return g_dynamic_ms_filtered(r, spec.k, spec.alpha);
    }
    throw std::invalid_argument("kernel_value: unknown family");
}

}  // namespace ef2d
