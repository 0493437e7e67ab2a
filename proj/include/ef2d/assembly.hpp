#pragma once

// Galerkin assembly of the single-layer matrix S, the weak-form hypersingular
// matrix N, the Gram matrix G, plane-wave excitation vectors, and the dense
// direct solver.
//
// Singular panel pairs (self and node-sharing) split the unfiltered kernel as
// g(r) = A(r) + B(r) log r with A, B entire and even in r, integrate the
// log part with dedicated log-singular rules, and the rest with plain Gauss.
// Filtered kernels are entire functions of r; they are sampled once into a
// Chebyshev interpolant in r (they are expensive radial functions) and
// integrated with Gauss rules whose order resolves the O(alpha) oscillation.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ef2d/curve.hpp"
#include "ef2d/kernels.hpp"
#include "ef2d/parallel.hpp"
#include "ef2d/quadrature.hpp"

namespace ef2d {

struct OperatorMatrix {
    Eigen::MatrixXcd entries;
    KernelSpec kernel;
    std::string mesh_tag;
};

struct GramMatrix {
    Eigen::MatrixXd entries;
};

enum class Polarization { TM, TE };

struct ExcitationSpec {
    Polarization polarization = Polarization::TM;
    Point2 direction{1.0, 0.0};  // propagation direction d, unit
    double k = 0;
    double eta = 376.730313668;  // ohms

    void validate() const {
        if (std::fabs(direction.norm() - 1.0) > 1e-12)
            throw std::invalid_argument("ExcitationSpec: direction not normalized");
        if (!(k > 0)) throw std::invalid_argument("ExcitationSpec: dynamic excitation requires k > 0");
        if (!(eta > 0)) throw std::invalid_argument("ExcitationSpec: eta must be > 0");
    }
};

struct SingularSystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double mesh_diameter(const CurveMesh& mesh) {
    double d2 = 0;
    const std::size_t n = mesh.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point2 d = mesh.nodes[i] - mesh.nodes[j];
            d2 = std::max(d2, d.dot(d));
        }
    return std::sqrt(d2);
}

inline std::string mesh_tag(const CurveMesh& mesh) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "N=%ld;L=%.12g", static_cast<long>(mesh.size()), mesh.total_length);
    return std::string(buf);
}

namespace detail {

// Chebyshev proxy for the (entire, radial) filtered kernels on [0, rmax].
// Built serially once per assembly; evaluation is a short Clenshaw recurrence,
// so the millions of quadrature-node kernel evaluations stay cheap.
class RadialInterpolant {
  public:
    static RadialInterpolant build(const KernelSpec& spec, double rmax) {
        RadialInterpolant ip;
        ip.rmax_ = rmax;
        std::vector<std::complex<double>> vals;  // at cos(pi j / M), j = 0..M
        int M = 64;
        vals.resize(M + 1);
        for (int j = 0; j <= M; ++j) ip.sample(spec, vals, j, M);
        for (;;) {
            ip.coef_ = dct_coeffs(vals);
            double cmax = 0;
            for (const auto& c : ip.coef_) cmax = std::max(cmax, std::abs(c));
            double tail = 0;
            for (int n = M - 9; n <= M; ++n) tail = std::max(tail, std::abs(ip.coef_[n]));
            if (tail <= 1e-13 * cmax) break;
            if (M >= 8192)
                throw AccuracyError("RadialInterpolant: kernel not resolved by degree 8192",
                                    0.0, tail / cmax);
            // Chebyshev-Lobatto grids nest under doubling; reuse existing samples.
            std::vector<std::complex<double>> v2(2 * M + 1);
            for (int j = 0; j <= M; ++j) v2[2 * j] = vals[j];
            M *= 2;
            vals.swap(v2);
            for (int j = 1; j <= M; j += 2) ip.sample(spec, vals, j, M);
        }
        return ip;
    }

    std::complex<double> eval(double r) const {
        const double x = 2.0 * r / rmax_ - 1.0;
        std::complex<double> b1(0.0, 0.0), b2(0.0, 0.0);
        for (int n = static_cast<int>(coef_.size()) - 1; n >= 1; --n) {
            const std::complex<double> b0 = coef_[n] + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        return coef_[0] + x * b1 - b2;
    }

    double rmax() const { return rmax_; }

  private:
    void sample(const KernelSpec& spec, std::vector<std::complex<double>>& vals, int j, int M) {
        const double x = std::cos(M_PI * j / M);
        const double r = std::max(0.0, 0.5 * rmax_ * (x + 1.0));
        vals[j] = kernel_value(spec, r);
    }

    // DCT-I returning d_n with the boundary halving folded in, so that
    // f(x) = sum_{n=0}^{M} d_n T_n(x).
    static std::vector<std::complex<double>> dct_coeffs(
        const std::vector<std::complex<double>>& v) {
        const int M = static_cast<int>(v.size()) - 1;
        std::vector<double> ctab(2 * M);
        for (int t = 0; t < 2 * M; ++t) ctab[t] = std::cos(M_PI * t / M);
        std::vector<std::complex<double>> d(M + 1);
        for (int n = 0; n <= M; ++n) {
            std::complex<double> acc = 0.5 * (v[0] + (n % 2 ? -v[M] : v[M]));
            for (int j = 1; j < M; ++j) acc += v[j] * ctab[(std::int64_t(n) * j) % (2 * M)];
            d[n] = acc * (2.0 / M);
            if (n == 0 || n == M) d[n] *= 0.5;
        }
        return d;
    }

    double rmax_ = 1.0;
    std::vector<std::complex<double>> coef_;
};

// Log-split of the unfiltered kernels: g(r) = A(r) + B(r) log r with A and B
// entire and even.  Only used on self/adjacent pairs, where kr stays small.
struct KernelSplit {
    KernelSpec spec;

    std::complex<double> log_coeff(double r) const {  // B
        if (spec.family == KernelFamily::StaticUnfiltered) return {-1.0 / (2.0 * M_PI), 0.0};
        return {-bessel::j0(spec.k * r) / (2.0 * M_PI), 0.0};
    }
    std::complex<double> smooth_part(double r) const {  // A
        if (spec.family == KernelFamily::StaticUnfiltered) return {0.0, 0.0};
        const double x = spec.k * r;
        if (x > bessel::detail::kSeriesCut)
            throw std::invalid_argument(
                "assembly: panel too large for singular quadrature at this wavenumber");
        const double j0x = bessel::j0(x);
        const double re =
            -((std::log(0.5 * spec.k) + euler_gamma) * j0x + y0_companion_v(x)) / (2.0 * M_PI);
        return {re, -0.25 * j0x};
    }
};

struct Block22 {
    std::complex<double> m[2][2]{};  // rows: nodes (p, p+1); cols: nodes (q, q+1)
};

// Evaluation context shared by the pair-moment routines.
struct AsmContext {
    KernelSpec spec;
    std::optional<RadialInterpolant> interp;  // filtered families only
    KernelSplit split{};                      // unfiltered families only
    int far_order = 8;
    int filtered_order = 8;

    std::complex<double> g(double r) const {
        if (interp) return interp->eval(r);
        return kernel_value(spec, r);
    }
};

inline AsmContext make_context(const CurveMesh& mesh, const KernelSpec& spec) {
    spec.validate();
    AsmContext ctx;
    ctx.spec = spec;
    if (spec.is_filtered()) {
        double hmax = 0;
        for (double h : mesh.seg_length) hmax = std::max(hmax, h);
        ctx.filtered_order = std::min(
            200, std::max(8, static_cast<int>(std::ceil(2.0 + spec.alpha * hmax))));
        ctx.interp = RadialInterpolant::build(spec, mesh_diameter(mesh) * (1.0 + 1e-9));
    } else {
        ctx.split = KernelSplit{spec};
    }
    return ctx;
}

inline double hat0(double t) { return 1.0 - t; }
inline double hat1(double t) { return t; }

// Smooth pair: tensor Gauss of the given order on the kernel itself.
inline Block22 pair_far(const CurveMesh& mesh, const AsmContext& ctx, std::size_t p,
                        std::size_t q, int order) {
    const GaussRule& gr = cached_gauss(order);
    const double hp = mesh.seg_length[p], hq = mesh.seg_length[q];
    Block22 blk;
    for (int i = 0; i < order; ++i) {
        const double s = 0.5 * (gr.nodes[i] + 1.0), ws = 0.5 * gr.weights[i];
        const Point2 xs = mesh.panel_point(p, s);
        const double as0 = hat0(s), as1 = hat1(s);
        for (int j = 0; j < order; ++j) {
            const double t = 0.5 * (gr.nodes[j] + 1.0), wt = 0.5 * gr.weights[j];
            const Point2 d = xs - mesh.panel_point(q, t);
            const std::complex<double> gv = ctx.g(d.norm()) * (ws * wt);
            blk.m[0][0] += as0 * hat0(t) * gv;
            blk.m[0][1] += as0 * hat1(t) * gv;
            blk.m[1][0] += as1 * hat0(t) * gv;
            blk.m[1][1] += as1 * hat1(t) * gv;
        }
    }
    for (auto& row : blk.m)
        for (auto& v : row) v *= hp * hq;
    return blk;
}

// Self pair: r = h|s-t| exactly on a straight chord.  Smooth part (A + B log h)
// by tensor Gauss; the B(r) log|s-t| part reduces to a 1D log-rule integral in
// u = |s-t| against the correlation polynomials of the hat functions.
inline Block22 pair_self(const CurveMesh& mesh, const AsmContext& ctx, std::size_t p) {
    const double h = mesh.seg_length[p];
    const double lh = std::log(h);
    const GaussRule& g16 = cached_gauss(16);
    Block22 blk;
    for (int i = 0; i < 16; ++i) {
        const double s = 0.5 * (g16.nodes[i] + 1.0), ws = 0.5 * g16.weights[i];
        const double as0 = hat0(s), as1 = hat1(s);
        for (int j = 0; j < 16; ++j) {
            const double t = 0.5 * (g16.nodes[j] + 1.0), wt = 0.5 * g16.weights[j];
            const double r = h * std::fabs(s - t);
            const std::complex<double> gv =
                (ctx.split.smooth_part(r) + ctx.split.log_coeff(r) * lh) * (ws * wt);
            blk.m[0][0] += as0 * hat0(t) * gv;
            blk.m[0][1] += as0 * hat1(t) * gv;
            blk.m[1][0] += as1 * hat0(t) * gv;
            blk.m[1][1] += as1 * hat1(t) * gv;
        }
    }
    // int_0^1 log u * B(h u) * Phi_ab(u) du with
    // Phi_ab(u) = int over { |s-t| = u } of hat_a(s) hat_b(t).
    const LogRule& lr = cached_log_rule(10);
    const GaussRule& g4 = cached_gauss(4);
    for (std::size_t n = 0; n < lr.nodes.size(); ++n) {
        const double u = lr.nodes[n];
        // the rule integrates p + q log exactly; the log factor is part of f
        const std::complex<double> w =
            lr.weights[n] * std::log(u) * ctx.split.log_coeff(h * u);
        double phi[2][2] = {{0, 0}, {0, 0}};
        for (int i = 0; i < 4; ++i) {
            // s in (u, 1), t = s - u  and  s in (0, 1-u), t = s + u
            const double x = 0.5 * (g4.nodes[i] + 1.0), wx = 0.5 * g4.weights[i] * (1.0 - u);
            const double s1 = u + x * (1.0 - u), t1 = s1 - u;
            const double s2 = x * (1.0 - u), t2 = s2 + u;
            phi[0][0] += wx * (hat0(s1) * hat0(t1) + hat0(s2) * hat0(t2));
            phi[0][1] += wx * (hat0(s1) * hat1(t1) + hat0(s2) * hat1(t2));
            phi[1][0] += wx * (hat1(s1) * hat0(t1) + hat1(s2) * hat0(t2));
            phi[1][1] += wx * (hat1(s1) * hat1(t1) + hat1(s2) * hat1(t2));
        }
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) blk.m[a][b] += w * phi[a][b];
    }
    for (auto& row : blk.m)
        for (auto& v : row) v *= h * h;
    return blk;
}

// Adjacent pair q = next(p), sharing node q.  Both panels are parameterized
// from the shared node; on the triangle t = s w the distance factors exactly
// as r = s rho(w), splitting log r = log s + log rho(w).
inline Block22 pair_adjacent(const CurveMesh& mesh, const AsmContext& ctx, std::size_t p,
                             std::size_t q) {
    const double hp = mesh.seg_length[p], hq = mesh.seg_length[q];
    const Point2 shared = mesh.nodes[q];
    const Point2 v1 = mesh.nodes[p] - shared;          // along panel p, |v1| = hp
    const Point2 v2 = mesh.nodes[mesh.next(q)] - shared;  // along panel q, |v2| = hq
    const GaussRule& g16 = cached_gauss(16);
    const LogRule& lr = cached_log_rule(10);
    // Local weights: on panel p, psi_0 (node p) = s, psi_1 (node q) = 1-s;
    // on panel q, chi_0 (node q) = 1-w, chi_1 (node q+1) = w.
    Block22 local;  // rows (node p, node q), cols (node q, node q+1)

    auto add = [&](double s, double w, std::complex<double> gv) {
        local.m[0][0] += s * (1.0 - w) * gv;
        local.m[0][1] += s * w * gv;
        local.m[1][0] += (1.0 - s) * (1.0 - w) * gv;
        local.m[1][1] += (1.0 - s) * w * gv;
    };

    // Triangle 1: t = s*wt, Jacobian s, r = s*rho1(wt), rho1 = |v1 - wt v2|.
    // Triangle 2: s = w*st, Jacobian w, r = w*rho2(st), rho2 = |st v1 - v2|.
    for (int j = 0; j < 16; ++j) {
        const double y = 0.5 * (g16.nodes[j] + 1.0), wy = 0.5 * g16.weights[j];
        const double rho1 = (v1 - v2 * y).norm(), lr1 = std::log(rho1);
        const double rho2 = (v1 * y - v2).norm(), lr2 = std::log(rho2);
        for (int i = 0; i < 16; ++i) {
            const double x = 0.5 * (g16.nodes[i] + 1.0), wx = 0.5 * g16.weights[i];
            const double wgt = wx * wy * x;  // Duffy Jacobian (x is radial in both)
            const double r1 = x * rho1, r2 = x * rho2;
            // everything except the log-of-radial-variable pieces
            add(x, x * y, (ctx.split.smooth_part(r1) + ctx.split.log_coeff(r1) * lr1) * wgt);
            add(x * y, x, (ctx.split.smooth_part(r2) + ctx.split.log_coeff(r2) * lr2) * wgt);
        }
    }
    for (std::size_t n = 0; n < lr.nodes.size(); ++n) {
        const double u = lr.nodes[n], wu = lr.weights[n] * std::log(u);
        for (int j = 0; j < 16; ++j) {
            const double y = 0.5 * (g16.nodes[j] + 1.0), wy = 0.5 * g16.weights[j];
            const double rho1 = (v1 - v2 * y).norm();
            const double rho2 = (v1 * y - v2).norm();
            add(u, u * y, ctx.split.log_coeff(u * rho1) * (wu * wy * u));
            add(u * y, u, ctx.split.log_coeff(u * rho2) * (wu * wy * u));
        }
    }
    // Map local rows (node p, node q) to block rows (node p, node p+1): q = p+1
    // so rows already agree; same for columns.
    Block22 blk;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) blk.m[a][b] = local.m[a][b] * (hp * hq);
    return blk;
}

inline Block22 pair_moments(const CurveMesh& mesh, const AsmContext& ctx, std::size_t p,
                            std::size_t q) {
    if (ctx.interp) return pair_far(mesh, ctx, p, q, ctx.filtered_order);
    if (p == q) return pair_self(mesh, ctx, p);
    if (q == mesh.next(p)) return pair_adjacent(mesh, ctx, p, q);
    if (p == mesh.next(q)) {  // transpose of the adjacent block (q, p)
        const Block22 t = pair_adjacent(mesh, ctx, q, p);
        Block22 blk;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) blk.m[a][b] = t.m[b][a];
        return blk;
    }
    return pair_far(mesh, ctx, p, q, ctx.far_order);
}

// Computes the hat-moment blocks for all unordered panel pairs.  Blocks are
// computed in parallel over fixed chunks and scattered serially in pair order,
// so the assembled matrix is bit-identical for any thread count.
template <class Scatter>
inline void for_all_pair_blocks(const CurveMesh& mesh, const AsmContext& ctx, int threads,
                                Scatter&& scatter) {
    const std::size_t n = mesh.size();
    const std::int64_t npairs = static_cast<std::int64_t>(n) * (n + 1) / 2;
    std::vector<Block22> blocks(npairs);
    auto pq_of = [n](std::int64_t idx, std::size_t& p, std::size_t& q) {
        // row-major over the upper triangle p <= q
        std::size_t pi = 0;
        std::int64_t row = static_cast<std::int64_t>(n);
        while (idx >= row) {
            idx -= row;
            --row;
            ++pi;
        }
        p = pi;
        q = pi + static_cast<std::size_t>(idx);
    };
    const std::int64_t chunk = 128;
    const std::int64_t nchunks = (npairs + chunk - 1) / chunk;
    parallel_blocks(nchunks, threads, [&](std::int64_t c) {
        const std::int64_t lo = c * chunk, hi = std::min(npairs, lo + chunk);
        for (std::int64_t idx = lo; idx < hi; ++idx) {
            std::size_t p, q;
            pq_of(idx, p, q);
            blocks[idx] = pair_moments(mesh, ctx, p, q);
        }
    });
    std::int64_t idx = 0;
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p; q < n; ++q) scatter(p, q, blocks[idx++]);
}

}  // namespace detail

inline OperatorMatrix assemble_S(const CurveMesh& mesh, const KernelSpec& spec,
                                 int threads = 1) {
    const detail::AsmContext ctx = detail::make_context(mesh, spec);
    const std::size_t n = mesh.size();
    OperatorMatrix out;
    out.entries = Eigen::MatrixXcd::Zero(n, n);
    out.kernel = spec;
    out.mesh_tag = mesh_tag(mesh);
    detail::for_all_pair_blocks(mesh, ctx, threads,
                                [&](std::size_t p, std::size_t q, const detail::Block22& blk) {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const std::size_t i = (p + a) % n, j = (q + b) % n;
                out.entries(i, j) += blk.m[a][b];
                if (p != q) out.entries(j, i) += blk.m[a][b];
            }
    });
    return out;
}

inline OperatorMatrix assemble_N(const CurveMesh& mesh, const KernelSpec& spec,
                                 int threads = 1) {
    const detail::AsmContext ctx = detail::make_context(mesh, spec);
    const std::size_t n = mesh.size();
    const double k2 = spec.k * spec.k;
    OperatorMatrix out;
    out.entries = Eigen::MatrixXcd::Zero(n, n);
    out.kernel = spec;
    out.mesh_tag = mesh_tag(mesh);
    detail::for_all_pair_blocks(mesh, ctx, threads,
                                [&](std::size_t p, std::size_t q, const detail::Block22& blk) {
        const double hp = mesh.seg_length[p], hq = mesh.seg_length[q];
        const double tau = mesh.panel_tangent(p).dot(mesh.panel_tangent(q));
        const std::complex<double> msum =
            blk.m[0][0] + blk.m[0][1] + blk.m[1][0] + blk.m[1][1];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const double sa = a ? 1.0 : -1.0, sb = b ? 1.0 : -1.0;
                const std::complex<double> v =
                    sa * sb * msum / (hp * hq) - k2 * tau * blk.m[a][b];
                const std::size_t i = (p + a) % n, j = (q + b) % n;
                out.entries(i, j) += v;
                if (p != q) out.entries(j, i) += v;
            }
    });
    return out;
}

inline GramMatrix assemble_G(const CurveMesh& mesh) {
    const std::size_t n = mesh.size();
    GramMatrix g;
    g.entries = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t p = 0; p < n; ++p) {
        const double h = mesh.seg_length[p];
        const std::size_t q = mesh.next(p);
        g.entries(p, p) += h / 3.0;
        g.entries(q, q) += h / 3.0;
        g.entries(p, q) += h / 6.0;
        g.entries(q, p) += h / 6.0;
    }
    return g;
}

// Tests an arbitrary scalar field trace against the hat functions with the
// polarization-dependent scaling: TM (1/(eta i k)) <phi_i, E_z>, TE
// (i k / eta) <phi_i, E_t>.  field(x, that) receives the point and the unit
// tangent of the panel it lies on.
template <class Field>
inline Eigen::VectorXcd assemble_rhs_field(const CurveMesh& mesh, const ExcitationSpec& exc,
                                           Field&& field) {
    exc.validate();
    const std::size_t n = mesh.size();
    const std::complex<double> iu(0.0, 1.0);
    const std::complex<double> scale = (exc.polarization == Polarization::TM)
                                           ? 1.0 / (exc.eta * iu * exc.k)
                                           : iu * exc.k / exc.eta;
    const GaussRule& g16 = cached_gauss(16);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    for (std::size_t p = 0; p < n; ++p) {
        const double h = mesh.seg_length[p];
        const Point2 that = mesh.panel_tangent(p);
        std::complex<double> acc0(0.0, 0.0), acc1(0.0, 0.0);
        for (int i = 0; i < 16; ++i) {
            const double t = 0.5 * (g16.nodes[i] + 1.0), w = 0.5 * g16.weights[i];
            const std::complex<double> f = field(mesh.panel_point(p, t), that);
            acc0 += w * (1.0 - t) * f;
            acc1 += w * t * f;
        }
        b(p) += scale * h * acc0;
        b((p + 1) % n) += scale * h * acc1;
    }
    return b;
}

// Plane-wave excitation E^i(r) = exp(-i k d.r) * (polarization unit).
// TM tests the z-component; TE tests the tangential component
// E_t(r) = (p.t(r)) exp(-i k d.r) with p = d rotated by +90 degrees.
inline Eigen::VectorXcd assemble_rhs(const CurveMesh& mesh, const ExcitationSpec& exc) {
    const std::complex<double> iu(0.0, 1.0);
    const Point2 pol{-exc.direction.y, exc.direction.x};
    const bool te = exc.polarization == Polarization::TE;
    return assemble_rhs_field(mesh, exc, [&](Point2 x, Point2 that) {
        std::complex<double> f = std::exp(-iu * exc.k * exc.direction.dot(x));
        if (te) f *= pol.dot(that);
        return f;
    });
}

// Dense LU solve with one step of iterative refinement and a cheap 1-norm
// condition estimate (Hager-style power iteration on the inverse).
inline Eigen::VectorXcd solve_system(const OperatorMatrix& A, const Eigen::VectorXcd& b) {
    const Eigen::Index n = A.entries.rows();
    if (A.entries.cols() != n || b.size() != n)
        throw std::invalid_argument("solve_system: dimension mismatch");
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A.entries);

    double inv_norm = 0;
    {
        Eigen::VectorXcd v = Eigen::VectorXcd::Constant(n, 1.0 / double(n));
        for (int it = 0; it < 4; ++it) {
            const Eigen::VectorXcd y = lu.solve(v);
            inv_norm = y.lpNorm<1>();
            if (!(inv_norm > 0) || !std::isfinite(inv_norm)) break;
            Eigen::VectorXcd s(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double m = std::abs(y(i));
                s(i) = m > 0 ? y(i) / m : std::complex<double>(1.0, 0.0);
            }
            v = lu.adjoint().solve(s);
            Eigen::Index imax = 0;
            v.cwiseAbs().maxCoeff(&imax);
            v.setZero();
            v(imax) = 1.0;
        }
    }
    const double a_norm = A.entries.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(inv_norm) || a_norm * inv_norm > 1e15)
        throw SingularSystemError("solve_system: condition estimate exceeds 1e15");

    Eigen::VectorXcd x = lu.solve(b);
    const Eigen::VectorXcd r = b - A.entries * x;
    x += lu.solve(r);
    return x;
}

}  // namespace ef2d
