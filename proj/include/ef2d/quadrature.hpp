#pragma once

// Numerical integration stack: Gauss-Legendre rules of arbitrary order, a
// global-adaptive Gauss-Kronrod oracle, and a generalized rule exact for
// p(x) + q(x) log(x) on (0,1) used on self/adjacent panels.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace ef2d {

// Legendre polynomial P_n(x) by the three-term recurrence.
inline double legendre_p(int n, double x) {
    if (n == 0) return 1.0;
    double pm = 1.0, pc = x;
    for (int m = 1; m < n; ++m) {
        const double pn = ((2.0 * m + 1.0) * x * pc - m * pm) / (m + 1.0);
        pm = pc;
        pc = pn;
    }
    return pc;
}

struct GaussRule {
    int order = 0;
    std::vector<double> nodes;    // in (-1, 1), ascending
    std::vector<double> weights;  // sum to 2

    // Integrate f over (a, b).
    template <class F>
    auto integrate(F&& f, double a, double b) const {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        auto acc = decltype(f(a))(0) * 0.0;
        for (int i = 0; i < order; ++i) acc += weights[i] * f(mid + half * nodes[i]);
        return acc * half;
    }
};

// Nodes/weights via Newton iteration on P_n; accurate to machine precision.
inline GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order < 1");
    GaussRule r;
    r.order = n;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess for the i-th root (descending)
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double pm = 1.0, pc = x;
            for (int m = 1; m < n; ++m) {
                const double pn = ((2.0 * m + 1.0) * x * pc - m * pm) / (m + 1.0);
                pm = pc;
                pc = pn;
            }
            dp = n * (x * pc - pm) / (x * x - 1.0);
            const double dx = pc / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) {
                // one more step to polish
                pm = 1.0;
                pc = x;
                for (int m = 1; m < n; ++m) {
                    const double pn = ((2.0 * m + 1.0) * x * pc - m * pm) / (m + 1.0);
                    pm = pc;
                    pc = pn;
                }
                dp = n * (x * pc - pm) / (x * x - 1.0);
                x -= pc / dp;
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        // middle node is exactly 0
        double pm = 1.0, pc = 0.0, x = 0.0;
        for (int m = 1; m < n; ++m) {
            const double pn = ((2.0 * m + 1.0) * x * pc - m * pm) / (m + 1.0);
            pm = pc;
            pc = pn;
        }
        const double dp = n * (x * pc - pm) / (x * x - 1.0);
        r.nodes[n / 2] = 0.0;
        r.weights[n / 2] = 2.0 / (dp * dp);
    }
    return r;
}

// Process-wide cache of Gauss rules by order.
inline const GaussRule& cached_gauss(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
    return it->second;
}

struct AccuracyError : std::runtime_error {
    double best_estimate;
    double achieved_error;
    AccuracyError(const std::string& msg, double est, double err)
        : std::runtime_error(msg), best_estimate(est), achieved_error(err) {}
};

namespace detail {

// QUADPACK 7-15 Gauss-Kronrod pair.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gk15(const F& f, double a, double b, double& result, double& abserr) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(mid - half * kXgk[i]);
        fv[14 - i] = f(mid + half * kXgk[i]);
    }
    fv[7] = f(mid);
    double resk = kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        resk += kWgk[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) resg += kWg[i / 2] * (fv[i] + fv[14 - i]);
    }
    result = resk * half;
    abserr = std::fabs((resk - resg) * half);
    // sharpen the raw difference the QUADPACK way
    double resabs = 0.0;
    for (int i = 0; i < 7; ++i) resabs += kWgk[i] * (std::fabs(fv[i]) + std::fabs(fv[14 - i]));
    resabs += kWgk[7] * std::fabs(fv[7]);
    resabs *= std::fabs(half);
    if (resabs != 0.0 && abserr != 0.0)
        abserr = resabs * std::min(1.0, std::pow(200.0 * abserr / resabs, 1.5));
}

struct Interval {
    double a, b, result, err;
    int depth;
    bool operator<(const Interval& o) const { return err < o.err; }
};

}  // namespace detail

// Global adaptive Gauss-Kronrod integration of f over (a, b) to absolute
// tolerance tol (also accepts tol as relative against the running estimate).
// Throws AccuracyError (with the best estimate attached) past depth 60.
template <class F>
inline double integrate_adaptive(F&& f, double a, double b, double tol,
                                 int max_intervals = 20000) {
    double r0, e0;
    detail::gk15(f, a, b, r0, e0);
    std::priority_queue<detail::Interval> q;
    q.push({a, b, r0, e0, 0});
    double total = r0, toterr = e0;
    while (toterr > tol && toterr > 1e-15 * std::fabs(total)) {
        if (q.empty() || static_cast<int>(q.size()) > max_intervals)
            throw AccuracyError("integrate_adaptive: interval budget exhausted", total, toterr);
        detail::Interval iv = q.top();
        q.pop();
        if (iv.depth >= 60)
            throw AccuracyError("integrate_adaptive: bisection depth 60 reached", total, toterr);
        const double m = 0.5 * (iv.a + iv.b);
        double r1, e1, r2, e2;
        detail::gk15(f, iv.a, m, r1, e1);
        detail::gk15(f, m, iv.b, r2, e2);
        total += r1 + r2 - iv.result;
        toterr += e1 + e2 - iv.err;
        q.push({iv.a, m, r1, e1, iv.depth + 1});
        q.push({m, iv.b, r2, e2, iv.depth + 1});
    }
    return total;
}

// Quadrature rule on (0,1) exact for p(x) + q(x) log(x), deg p, q <= n-1.
// Built on 2n fixed Gauss nodes with weights from the exact moments of the
// shifted Legendre basis:  int_0^1 Pt_j = delta_j0,
// int_0^1 Pt_j log x = -1 (j=0), (-1)^{j+1} / (j (j+1)) otherwise.
struct LogRule {
    std::vector<double> nodes;    // in (0, 1)
    std::vector<double> weights;

    template <class F>
    auto integrate01(F&& f) const {
        auto acc = decltype(f(0.5))(0) * 0.0;
        for (size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

// Shifted Legendre Pt_n(x) = P_n(2x - 1).
inline double shifted_legendre(int n, double x) { return legendre_p(n, 2.0 * x - 1.0); }

inline LogRule log_singular_rule(int n) {
    if (n < 2) throw std::invalid_argument("log_singular_rule: order < 2");
    const int m = 2 * n;
    const GaussRule& g = cached_gauss(m);
    LogRule r;
    r.nodes.resize(m);
    // Gauss nodes mapped by u -> u^2 cluster toward the singularity; the
    // resulting weight solve is benign (|w| < 1), unlike uniform-node sets.
    for (int i = 0; i < m; ++i) {
        const double u = 0.5 * (g.nodes[i] + 1.0);
        r.nodes[i] = u * u;
    }
    Eigen::MatrixXd V(m, m);
    Eigen::VectorXd mom(m);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < m; ++i) V(j, i) = shifted_legendre(j, r.nodes[i]);
        mom(j) = (j == 0) ? 1.0 : 0.0;
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < m; ++i)
            V(n + j, i) = shifted_legendre(j, r.nodes[i]) * std::log(r.nodes[i]);
        mom(n + j) = (j == 0) ? -1.0 : ((j % 2 == 0) ? -1.0 : 1.0) / (j * (j + 1.0));
    }
    auto lu = V.fullPivLu();
    Eigen::VectorXd w = lu.solve(mom);
    // one refinement pass with long double residuals; the mixed
    // polynomial/log basis leaves the plain solve at ~1e-11
    for (int pass = 0; pass < 2; ++pass) {
        Eigen::VectorXd resid(m);
        for (int j = 0; j < m; ++j) {
            long double acc = 0.0L;
            for (int i = 0; i < m; ++i)
                acc += static_cast<long double>(V(j, i)) * static_cast<long double>(w(i));
            resid(j) = static_cast<double>(static_cast<long double>(mom(j)) - acc);
        }
        w += lu.solve(resid);
    }
    r.weights.assign(w.data(), w.data() + m);
    return r;
}

inline const LogRule& cached_log_rule(int n) {
    static std::map<int, LogRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, log_singular_rule(n)).first;
    return it->second;
}

}  // namespace ef2d
