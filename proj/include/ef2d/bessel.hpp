#pragma once

// Cylindrical and spherical Bessel functions needed by the kernel and
// quadrature stacks: J0, Y0, J1, Y1 (series + Hankel asymptotics), integer
// order Jn/Yn, and spherical j_n arrays for the Filon scheme.  Everything is
// self-contained; no external special-function library is used.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ef2d {

inline constexpr double euler_gamma = 0.57721566490153286060651209008;

namespace bessel {

namespace detail {

// Series/asymptotic switch point.  Below it the ascending series in long
// double keeps cancellation under ~1e2 x eps; above it the Hankel expansion
// reaches its minimal term well below 1e-13.
inline constexpr double kSeriesCut = 18.0;

// Hankel asymptotic sums P, Q for nu = 0 or 1 at x > kSeriesCut.
// J_nu = sqrt(2/(pi x)) (cos w P - sin w Q), Y_nu = sqrt(2/(pi x)) (sin w P + cos w Q),
// w = x - (2 nu + 1) pi / 4.  Coefficients c_k = a_k(nu) with sign folded in:
// c_k = c_{k-1} * (4 nu^2 - (2k-1)^2) / (8 k).
inline void hankel_pq(int nu, double x, double& p, double& q) {
    const double fournu2 = 4.0 * nu * nu;
    long double ck = 1.0L;
    long double xi = 1.0L / x;
    long double P = 0.0L, Q = 0.0L;
    long double pw = 1.0L;  // x^{-k}
    long double prev = std::numeric_limits<long double>::max();
    for (int k = 0; k < 60; ++k) {
        long double term = ck * pw;
        long double mag = fabsl(term);
        if (mag > prev) break;  // asymptotic tail started to diverge
        prev = mag;
        switch (k & 3) {
            case 0: P += term; break;
            case 1: Q += term; break;
            case 2: P -= term; break;
            case 3: Q -= term; break;
        }
        if (mag < 1e-19L) break;
        ck *= (fournu2 - (2.0L * k + 1.0L) * (2.0L * k + 1.0L)) / (8.0L * (k + 1.0L));
        pw *= xi;
    }
    p = static_cast<double>(P);
    q = static_cast<double>(Q);
}

}  // namespace detail

// J0 via ascending series (x <= 18) or Hankel asymptotics.
inline double j0(double x) {
    x = std::fabs(x);
    if (x <= detail::kSeriesCut) {
        const long double q = static_cast<long double>(x) * x / 4.0L;
        long double term = 1.0L, sum = 1.0L;
        for (int m = 1; m < 80; ++m) {
            term *= -q / (static_cast<long double>(m) * m);
            sum += term;
            if (fabsl(term) < 1e-22L * fabsl(sum) + 1e-25L) break;
        }
        return static_cast<double>(sum);
    }
    double p, q;
    detail::hankel_pq(0, x, p, q);
    const double w = x - 0.25 * M_PI;
    return std::sqrt(2.0 / (M_PI * x)) * (std::cos(w) * p - std::sin(w) * q);
}

inline double j1(double x) {
    const double ax = std::fabs(x);
    double r;
    if (ax <= detail::kSeriesCut) {
        const long double q = static_cast<long double>(ax) * ax / 4.0L;
        long double term = 0.5L * ax, sum = term;
        for (int m = 1; m < 80; ++m) {
            term *= -q / (static_cast<long double>(m) * (m + 1.0L));
            sum += term;
            if (fabsl(term) < 1e-22L * fabsl(sum) + 1e-25L) break;
        }
        r = static_cast<double>(sum);
    } else {
        double p, q;
        detail::hankel_pq(1, ax, p, q);
        const double w = ax - 0.75 * M_PI;
        r = std::sqrt(2.0 / (M_PI * ax)) * (std::cos(w) * p - std::sin(w) * q);
    }
    return x < 0 ? -r : r;
}

// Y0, x > 0.
inline double y0(double x) {
    if (!(x > 0)) throw std::domain_error("y0: requires x > 0");
    if (x <= detail::kSeriesCut) {
        const long double q = static_cast<long double>(x) * x / 4.0L;
        // J0 series and the harmonic-number companion series together.
        long double term = 1.0L, sumj = 1.0L;
        long double h = 0.0L, sumh = 0.0L;
        for (int m = 1; m < 80; ++m) {
            term *= -q / (static_cast<long double>(m) * m);
            sumj += term;
            h += 1.0L / m;
            // companion term: (-1)^{m+1} H_m q^m / (m!)^2 = -term * h
            sumh -= term * h;
            if (fabsl(term) * (h + 1.0L) < 1e-22L * (fabsl(sumh) + 1.0L)) break;
        }
        const long double lg = logl(static_cast<long double>(x) / 2.0L) +
                               static_cast<long double>(euler_gamma);
        return static_cast<double>((2.0L / M_PIl) * (lg * sumj + sumh));
    }
    double p, q;
    detail::hankel_pq(0, x, p, q);
    const double w = x - 0.25 * M_PI;
    return std::sqrt(2.0 / (M_PI * x)) * (std::sin(w) * p + std::cos(w) * q);
}

// Y1, x > 0.
inline double y1(double x) {
    if (!(x > 0)) throw std::domain_error("y1: requires x > 0");
    if (x <= detail::kSeriesCut) {
        const long double q = static_cast<long double>(x) * x / 4.0L;
        // sum_k (psi(k+1) + psi(k+2)) (-q)^k / (k! (k+1)!)
        long double term = 1.0L;  // (-q)^k / (k! (k+1)!)
        long double psum = -2.0L * static_cast<long double>(euler_gamma) + 1.0L;
        long double sum = psum;
        for (int k = 1; k < 80; ++k) {
            term *= -q / (static_cast<long double>(k) * (k + 1.0L));
            psum += 1.0L / k + 1.0L / (k + 1.0L);
            sum += term * psum;
            if (fabsl(term) * psum < 1e-22L * (fabsl(sum) + 1.0L)) break;
        }
        const long double lf = logl(static_cast<long double>(x) / 2.0L);
        const long double j1v = static_cast<long double>(j1(x));
        return static_cast<double>(-2.0L / (M_PIl * x) + (2.0L / M_PIl) * lf * j1v -
                                   (x / (2.0L * M_PIl)) * sum);
    }
    double p, q;
    detail::hankel_pq(1, x, p, q);
    const double w = x - 0.75 * M_PI;
    return std::sqrt(2.0 / (M_PI * x)) * (std::sin(w) * p + std::cos(w) * q);
}

// J_0..J_nmax by Miller's downward recurrence with the J0 + 2 sum J_{2k} = 1
// normalization; stable for all n.
inline std::vector<double> jn_array(int nmax, double x) {
    if (nmax < 0) throw std::invalid_argument("jn_array: nmax < 0");
    std::vector<double> out(nmax + 1, 0.0);
    x = std::fabs(x);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const int istart = std::max(nmax, static_cast<int>(x)) + 16 +
                       static_cast<int>(10.0 * std::sqrt(static_cast<double>(std::max(nmax, 1))));
    double fp = 0.0, fc = 1e-300;
    double norm = 0.0;
    for (int n = istart; n >= 0; --n) {
        const double fm = (2.0 * (n + 1)) / x * fc - fp;
        fp = fc;
        fc = fm;
        if (n <= nmax) out[n] = fc;
        if (n > 0 && (n & 1) == 0) norm += 2.0 * fc;
        // rescale to avoid overflow
        if (std::fabs(fc) > 1e250) {
            fc *= 1e-250;
            fp *= 1e-250;
            norm *= 1e-250;
            for (auto& v : out) v *= 1e-250;
        }
    }
    norm += fc;  // fc now holds the unnormalized J0
    const double s = 1.0 / norm;
    for (auto& v : out) v *= s;
    return out;
}

inline double jn(int n, double x) {
    if (n == 0) return j0(x);
    if (n == 1) return j1(x);
    return jn_array(n, x)[n];
}

// Y_0..Y_nmax by (stable) upward recurrence, x > 0.
inline std::vector<double> yn_array(int nmax, double x) {
    std::vector<double> out(std::max(nmax, 1) + 1);
    out[0] = y0(x);
    out[1] = y1(x);
    for (int n = 1; n < nmax; ++n) out[n + 1] = (2.0 * n) / x * out[n] - out[n - 1];
    out.resize(nmax + 1);
    return out;
}

inline double yn(int n, double x) { return yn_array(n, x)[n]; }

// Hankel function of the second kind, H_n^{(2)} = J_n - i Y_n.
inline std::complex<double> h2n(int n, double x) {
    return {jn(n, x), -yn(n, x)};
}

// Spherical Bessel j_0..j_nmax.  Upward recurrence when x dominates the
// order, Miller downward otherwise.  J_{n+1/2}(x) = sqrt(2x/pi) j_n(x).
inline std::vector<double> sph_jn_array(int nmax, double x) {
    if (nmax < 0) throw std::invalid_argument("sph_jn_array: nmax < 0");
    if (x < 0) throw std::invalid_argument("sph_jn_array: x < 0");
    std::vector<double> out(nmax + 1, 0.0);
    if (x < 1e-8) {
        // j_n(x) ~ x^n / (2n+1)!! (1 - x^2/(2(2n+3)))
        double pw = 1.0, dfac = 1.0;
        for (int n = 0; n <= nmax; ++n) {
            out[n] = pw / dfac * (1.0 - x * x / (2.0 * (2.0 * n + 3.0)));
            pw *= x;
            dfac *= 2.0 * n + 3.0;
            if (pw == 0.0) break;
        }
        return out;
    }
    const double j0v = std::sin(x) / x;
    if (nmax == 0) {
        out[0] = j0v;
        return out;
    }
    const double j1v = j0v / x - std::cos(x) / x;
    if (static_cast<double>(nmax) < x) {
        out[0] = j0v;
        out[1] = j1v;
        for (int n = 1; n < nmax; ++n)
            out[n + 1] = (2.0 * n + 1.0) / x * out[n] - out[n - 1];
        return out;
    }
    const int istart = nmax + 16 +
                       static_cast<int>(10.0 * std::sqrt(static_cast<double>(nmax)));
    double fp = 0.0, fc = 1e-300;
    for (int n = istart; n >= 0; --n) {
        const double fm = (2.0 * n + 3.0) / x * fc - fp;
        fp = fc;
        fc = fm;
        if (n <= nmax) out[n] = fc;
        if (std::fabs(fc) > 1e250) {
            fc *= 1e-250;
            fp *= 1e-250;
            for (auto& v : out) v *= 1e-250;
        }
    }
    // normalize against whichever closed form is better conditioned
    const double s = (std::fabs(j0v) > std::fabs(j1v)) ? j0v / out[0] : j1v / out[1];
    for (auto& v : out) v *= s;
    return out;
}

// J_{n+1/2}(x) for a single order.
inline double j_half(int n, double x) {
    if (x == 0.0) return 0.0;
    return std::sqrt(2.0 * x / M_PI) * sph_jn_array(n, x)[n];
}

}  // namespace bessel
}  // namespace ef2d
