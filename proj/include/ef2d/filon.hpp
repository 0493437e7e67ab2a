#pragma once

// Filon-type quadrature for Re(int_{c1}^{c2} e^{ikt} f(t) dt): the smooth
// factor is expanded in Legendre polynomials on the mapped interval and the
// oscillation integrated exactly through half-integer Bessel functions,
//     int_{-1}^{1} P_n(t) e^{ikt} dt = i^n sqrt(2 pi / k) J_{n+1/2}(k)
//                                    = 2 i^n j_n(k).
// This makes the cost independent of k.  The (1,2) endpoint-singular piece
// of the Mehler-Sonine tail goes through an integration-by-parts transform
// first, so only smooth factors ever get expanded.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "ef2d/bessel.hpp"
#include "ef2d/quadrature.hpp"

namespace ef2d {

struct FilonPlan {
    double c1 = 0, c2 = 0;
    std::vector<double> coeffs;      // Legendre coefficients of f(g(x)) on (-1,1)
    bool endpoint_transformed = false;  // plan built for the (1,2)-type interval
};

struct OscillatoryIntegralResult {
    double value = 0;
    double estimated_error = 0;
    int terms_used = 0;
};

inline constexpr int kFilonMaxTerms = 200;

// Legendre coefficients a_0..a_{M-1} of f(g(x)) with g the affine map
// (-1,1) -> (c1,c2); integrals by Gauss-Legendre of order >= 2M.
template <class F>
inline std::vector<double> legendre_coefficients(F&& f, double c1, double c2, int M) {
    if (!(c1 < c2)) throw std::invalid_argument("legendre_coefficients: need c1 < c2");
    if (M < 1) throw std::invalid_argument("legendre_coefficients: need M >= 1");
    const GaussRule& g = cached_gauss(std::max(2 * M, 32));
    const double mid = 0.5 * (c1 + c2), half = 0.5 * (c2 - c1);
    const int nq = g.order;
    std::vector<double> fv(nq);
    for (int i = 0; i < nq; ++i) {
        fv[i] = f(mid + half * g.nodes[i]);
        if (!std::isfinite(fv[i]))
            throw std::domain_error("legendre_coefficients: f non-finite at quadrature node");
    }
    std::vector<double> a(M);
    // evaluate all P_n at the nodes by running the recurrence per node
    std::vector<double> pm(nq, 1.0), pc(g.nodes.begin(), g.nodes.end());
    for (int n = 0; n < M; ++n) {
        long double acc = 0.0L;
        for (int i = 0; i < nq; ++i) {
            const double pn = (n == 0) ? 1.0 : (n == 1 ? g.nodes[i] : pc[i]);
            acc += static_cast<long double>(g.weights[i]) * fv[i] * pn;
        }
        a[n] = static_cast<double>((2.0L * n + 1.0L) / 2.0L * acc);
        if (n >= 1) {
            for (int i = 0; i < nq; ++i) {
                const double pn =
                    ((2.0 * n + 1.0) * g.nodes[i] * pc[i] - n * pm[i]) / (n + 1.0);
                pm[i] = pc[i];
                pc[i] = pn;
            }
        }
    }
    return a;
}

// Adaptive plan construction: coefficients are truncated once two consecutive
// |a_n| drop below 1e-14 of the running maximum, capped at kFilonMaxTerms.
template <class F>
inline FilonPlan make_filon_plan(F&& f, double c1, double c2) {
    FilonPlan plan;
    plan.c1 = c1;
    plan.c2 = c2;
    std::vector<double> a = legendre_coefficients(f, c1, c2, kFilonMaxTerms);
    double amax = 0.0;
    for (double v : a) amax = std::max(amax, std::fabs(v));
    size_t keep = a.size();
    for (size_t n = 1; n < a.size(); ++n) {
        if (std::fabs(a[n]) < 1e-14 * amax && std::fabs(a[n - 1]) < 1e-14 * amax) {
            keep = n + 1;
            break;
        }
    }
    a.resize(keep);
    plan.coeffs = std::move(a);
    return plan;
}

// Full complex integral int_{c1}^{c2} e^{ikt} f(t) dt for a prepared plan.
inline std::complex<double> filon_complex(const FilonPlan& plan, double k) {
    if (!(k >= 0) || !std::isfinite(k))
        throw std::invalid_argument("filon_complex: k must be finite and >= 0");
    const double half = 0.5 * (plan.c2 - plan.c1);
    const double kp = k * half;
    const int M = static_cast<int>(plan.coeffs.size());
    const std::vector<double> jn = bessel::sph_jn_array(M - 1, kp);
    // sum a_n i^n 2 j_n(k')
    std::complex<double> s(0.0, 0.0);
    static const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int n = 0; n < M; ++n) s += plan.coeffs[n] * ipow[n & 3] * (2.0 * jn[n]);
    const std::complex<double> phase = std::polar(1.0, kp + k * plan.c1);
    return half * phase * s;
}

inline OscillatoryIntegralResult oscillatory_integral(const FilonPlan& plan, double k) {
    OscillatoryIntegralResult res;
    const std::complex<double> v = filon_complex(plan, k);
    res.value = v.real();
    res.terms_used = static_cast<int>(plan.coeffs.size());
    // truncation dominated: last two retained coefficients bound the tail
    double tail = 0.0;
    const size_t M = plan.coeffs.size();
    if (M >= 2) tail = std::fabs(plan.coeffs[M - 1]) + std::fabs(plan.coeffs[M - 2]);
    res.estimated_error =
        (plan.c2 - plan.c1) * (tail + 1e-15 * std::fabs(res.value) + 1e-16);
    if (!std::isfinite(res.value))
        throw AccuracyError("oscillatory_integral: non-finite result", res.value, tail);
    return res;
}

namespace detail {

// Cache of plans keyed by (function id, interval endpoints at 1e-12).
struct PlanKey {
    int fid;
    std::int64_t a, b;
    bool operator<(const PlanKey& o) const {
        return std::tie(fid, a, b) < std::tie(o.fid, o.a, o.b);
    }
};

inline std::shared_ptr<const FilonPlan> cached_plan(int fid, double c1, double c2,
                                                    const std::function<double(double)>& f) {
    static std::map<PlanKey, std::shared_ptr<const FilonPlan>> cache;
    static std::mutex mu;
    const PlanKey key{fid, static_cast<std::int64_t>(std::llround(c1 * 1e12)),
                      static_cast<std::int64_t>(std::llround(c2 * 1e12))};
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto plan = std::make_shared<FilonPlan>(make_filon_plan(f, c1, c2));
    std::lock_guard<std::mutex> lk(mu);
    auto [it, ok] = cache.emplace(key, std::move(plan));
    (void)ok;  // last writer wins; plans are deterministic
    return it->second;
}

inline constexpr int kFidInvSqrt = 1;   // 1/sqrt(t^2-1)
inline constexpr int kFidAcosh = 2;     // ln(t + sqrt(t^2-1))

}  // namespace detail

// int_{c1}^{c2} cos(kt)/sqrt(t^2-1) dt on the near-singular interval
// 1 <= c1 < c2 <= 2, via integration by parts: the boundary term
// [cos(kt) arccosh(t)] plus k int sin(kt) arccosh(t) dt, the latter by the
// Legendre expansion (arccosh is smooth at t = 1, so few terms suffice).
inline double endpoint_singular_integral(double c1, double c2, double k) {
    if (!(c1 >= 1.0)) throw std::invalid_argument("endpoint_singular_integral: c1 < 1");
    if (!(c1 < c2)) throw std::invalid_argument("endpoint_singular_integral: c1 >= c2");
    if (!(k >= 0)) throw std::invalid_argument("endpoint_singular_integral: k < 0");
    auto acosh_f = [](double t) { return std::log(t + std::sqrt(t * t - 1.0)); };
    const double boundary = std::cos(k * c2) * acosh_f(c2) - std::cos(k * c1) * acosh_f(c1);
    if (k == 0.0) return boundary;
    // arccosh(t) ~ sqrt(2(t-1)) near t = 1, so a single Legendre expansion on
    // an interval touching 1 stalls around 1e-9.  Grade the interval
    // geometrically toward 1: each sub-plan sees the same self-similar shape
    // but with amplitude sqrt of the sub-interval scale, so the graded sum
    // converges to ~1e-13.  Split points depend only on (c1, c2), keeping the
    // plans cacheable across k.
    double osc = 0.0;  // int_{c1}^{c2} sin(kt) arccosh(t) dt
    if (c1 < 1.0 + 1e-12) {
        const double span = c2 - 1.0;
        double hi = c2;
        for (int j = 0; j < 17; ++j) {
            const double lo = 1.0 + span * std::pow(4.0, -(j + 1));
            auto plan = detail::cached_plan(detail::kFidAcosh, lo, hi, acosh_f);
            osc += filon_complex(*plan, k).imag();
            hi = lo;
        }
        // remaining sliver: arccosh < 2e-5, contribution below 4e-10 * k * h
        auto plan = detail::cached_plan(detail::kFidAcosh, 1.0, hi, acosh_f);
        osc += filon_complex(*plan, k).imag();
    } else {
        auto plan = detail::cached_plan(detail::kFidAcosh, c1, c2, acosh_f);
        osc = filon_complex(*plan, k).imag();
    }
    return boundary + k * osc;
}

// int_1^{alpha/k} cos(k r t)/sqrt(t^2-1) dt.  Split at min(2, alpha/k); the
// remaining (2, alpha/k) range is covered by cached Legendre-expansion plans
// on geometrically graded subintervals (ratio <= 8) so each expansion stays
// well inside its Bernstein ellipse.
inline double mehler_sonine_tail(double r, double k, double alpha) {
    if (!(r >= 0)) throw std::invalid_argument("mehler_sonine_tail: r < 0");
    if (!(k > 0)) throw std::invalid_argument("mehler_sonine_tail: k <= 0");
    if (!(alpha > k)) throw std::invalid_argument("mehler_sonine_tail: requires alpha > k");
    const double top = alpha / k;
    const double keff = k * r;
    double total = endpoint_singular_integral(1.0, std::min(2.0, top), keff);
    if (top <= 2.0) return total;
    auto inv_sqrt = [](double t) { return 1.0 / std::sqrt(t * t - 1.0); };
    double lo = 2.0;
    while (lo < top) {
        const double hi = std::min(top, lo * 8.0);
        auto plan = detail::cached_plan(detail::kFidInvSqrt, lo, hi, inv_sqrt);
        total += filon_complex(*plan, keff).real();
        lo = hi;
    }
    return total;
}

}  // namespace ef2d
