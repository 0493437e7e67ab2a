#pragma once

// Smooth closed parametric curves and their equal-arclength segment meshes
// with the piecewise-linear hat basis.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ef2d/quadrature.hpp"

namespace ef2d {

struct Point2 {
    double x = 0, y = 0;
    Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
    Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Point2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

enum class CurveKind { Circle, Ellipse, Kite, PolygonSmooth };

// Closed curve on the parameter domain [0, 2pi).
struct ParametricCurve {
    CurveKind kind = CurveKind::Circle;
    std::vector<double> params;  // circle: {a}; ellipse: {a, b};
                                 // kite: {scale}; polygon-smooth: {a, sides, eps}

    Point2 position(double t) const {
        switch (kind) {
            case CurveKind::Circle: {
                const double a = params.at(0);
                return {a * std::cos(t), a * std::sin(t)};
            }
            case CurveKind::Ellipse: {
                return {params.at(0) * std::cos(t), params.at(1) * std::sin(t)};
            }
            case CurveKind::Kite: {
                const double s = params.empty() ? 1.0 : params[0];
                return {s * (std::cos(t) + 0.65 * std::cos(2.0 * t) - 0.65),
                        s * 1.5 * std::sin(t)};
            }
            case CurveKind::PolygonSmooth: {
                const double a = params.at(0);
                const double p = params.at(1);
                const double eps = params.at(2);
                const double rho = a * (1.0 + eps * std::cos(p * t));
                return {rho * std::cos(t), rho * std::sin(t)};
            }
        }
        throw std::invalid_argument("ParametricCurve: unsupported kind");
    }

    Point2 tangent(double t) const {
        switch (kind) {
            case CurveKind::Circle: {
                const double a = params.at(0);
                return {-a * std::sin(t), a * std::cos(t)};
            }
            case CurveKind::Ellipse: {
                return {-params.at(0) * std::sin(t), params.at(1) * std::cos(t)};
            }
            case CurveKind::Kite: {
                const double s = params.empty() ? 1.0 : params[0];
                return {s * (-std::sin(t) - 1.3 * std::sin(2.0 * t)),
                        s * 1.5 * std::cos(t)};
            }
            case CurveKind::PolygonSmooth: {
                const double a = params.at(0);
                const double p = params.at(1);
                const double eps = params.at(2);
                const double rho = a * (1.0 + eps * std::cos(p * t));
                const double drho = -a * eps * p * std::sin(p * t);
                return {drho * std::cos(t) - rho * std::sin(t),
                        drho * std::sin(t) + rho * std::cos(t)};
            }
        }
        throw std::invalid_argument("ParametricCurve: unsupported kind");
    }

    double speed(double t) const { return tangent(t).norm(); }

    // Total arclength by adaptive quadrature.
    double arclength() const {
        return integrate_adaptive([this](double t) { return speed(t); }, 0.0, 2.0 * M_PI,
                                  1e-12);
    }

    void validate() const {
        switch (kind) {
            case CurveKind::Circle:
                if (params.size() != 1 || !(params[0] > 0))
                    throw std::invalid_argument("circle: needs radius > 0");
                break;
            case CurveKind::Ellipse:
                if (params.size() != 2 || !(params[0] > 0) || !(params[1] > 0))
                    throw std::invalid_argument("ellipse: needs semi-axes > 0");
                break;
            case CurveKind::Kite:
                if (params.size() > 1 || (params.size() == 1 && !(params[0] > 0)))
                    throw std::invalid_argument("kite: optional scale > 0");
                break;
            case CurveKind::PolygonSmooth:
                if (params.size() != 3 || !(params[0] > 0) || !(params[1] >= 3) ||
                    std::fabs(params[2]) >= 0.5)
                    throw std::invalid_argument(
                        "polygon-smooth: needs radius > 0, sides >= 3, |eps| < 0.5");
                break;
        }
    }
};

// Closed chain of N straight segments; segment i joins node i and (i+1) mod N.
struct CurveMesh {
    std::vector<Point2> nodes;
    std::vector<double> seg_length;  // chord lengths h_i
    std::vector<double> node_param;  // curve parameters of the nodes
    double total_length = 0;         // sum of chord lengths
    double arc_length = 0;           // curve arclength (equal-arc split target)

    int size() const { return static_cast<int>(nodes.size()); }
    int next(int i) const { return (i + 1) % size(); }
    int prev(int i) const { return (i + size() - 1) % size(); }

    Point2 panel_point(int p, double s) const {
        const Point2& a = nodes[p];
        const Point2& b = nodes[next(p)];
        return a + (b - a) * s;
    }
    Point2 panel_tangent(int p) const {
        const Point2 d = nodes[next(p)] - nodes[p];
        const double h = seg_length[p];
        return {d.x / h, d.y / h};
    }
};

// Equal-arclength mesh of N chord segments.  Node parameters are found by
// Newton iteration on the cumulative arclength (adaptive quadrature,
// tolerance 1e-12), bisection-safeguarded.
inline CurveMesh build_mesh(const ParametricCurve& curve, int n_segments) {
    if (n_segments < 8) throw std::invalid_argument("build_mesh: N must be >= 8");
    curve.validate();
    const double L = curve.arclength();
    const double ds = L / n_segments;
    CurveMesh mesh;
    mesh.arc_length = L;
    mesh.nodes.reserve(n_segments);
    mesh.node_param.reserve(n_segments);

    auto speed = [&curve](double t) { return curve.speed(t); };
    double t_prev = 0.0;
    for (int i = 0; i < n_segments; ++i) {
        double t;
        if (i == 0) {
            t = 0.0;
        } else {
            // bracket [lo, hi] around the target accumulated arc ds past t_prev
            double lo = t_prev, hi = t_prev + 2.0 * M_PI / n_segments;
            auto arc_from_prev = [&](double tt) {
                return integrate_adaptive(speed, t_prev, tt, 1e-13);
            };
            while (arc_from_prev(hi) < ds) hi += 0.5 * (hi - t_prev);
            t = 0.5 * (lo + hi);
            for (int it = 0; it < 80; ++it) {
                const double f = arc_from_prev(t) - ds;
                if (f > 0)
                    hi = t;
                else
                    lo = t;
                const double step = f / speed(t);
                double tn = t - step;
                if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
                if (std::fabs(tn - t) < 1e-15 * (1.0 + std::fabs(t))) {
                    t = tn;
                    break;
                }
                t = tn;
            }
        }
        mesh.node_param.push_back(t);
        mesh.nodes.push_back(curve.position(t));
        t_prev = t;
    }
    mesh.seg_length.resize(n_segments);
    for (int i = 0; i < n_segments; ++i) {
        mesh.seg_length[i] = (mesh.nodes[(i + 1) % n_segments] - mesh.nodes[i]).norm();
        mesh.total_length += mesh.seg_length[i];
    }
    return mesh;
}

// Piecewise-linear hat basis over a mesh; phi_i peaks at node i and is
// supported on segments i-1 and i (cyclic).
struct BasisSet {
    const CurveMesh* mesh = nullptr;
    explicit BasisSet(const CurveMesh& m) : mesh(&m) {}
};

// Hat value phi_i(r) for a point r lying on the mesh (within a relative
// tolerance of the local segment length).
inline double evaluate_basis(const BasisSet& basis, int i, const Point2& r) {
    const CurveMesh& mesh = *basis.mesh;
    const int n = mesh.size();
    if (i < 0 || i >= n) throw std::invalid_argument("evaluate_basis: index out of range");
    double best_dist = std::numeric_limits<double>::max();
    int best_p = -1;
    double best_s = 0;
    for (int p = 0; p < n; ++p) {
        const Point2 a = mesh.nodes[p];
        const Point2 d = mesh.nodes[mesh.next(p)] - a;
        const double h2 = d.dot(d);
        double s = (r - a).dot(d) / h2;
        s = std::clamp(s, 0.0, 1.0);
        const Point2 foot = a + d * s;
        const double dist = (r - foot).norm();
        if (dist < best_dist) {
            best_dist = dist;
            best_p = p;
            best_s = s;
        }
    }
    if (best_dist > 1e-9 * mesh.seg_length[best_p])
        throw std::invalid_argument("evaluate_basis: point does not lie on the mesh");
    if (best_p == i) return 1.0 - best_s;
    if (mesh.next(best_p) == i) return best_s;
    return 0.0;
}

// Parse "circle:1", "ellipse:2,1", "kite", "kite:0.5", "polygon-smooth:1,5,0.1".
inline ParametricCurve parse_curve_spec(const std::string& spec) {
    ParametricCurve c;
    std::string kind = spec;
    std::string rest;
    if (auto pos = spec.find(':'); pos != std::string::npos) {
        kind = spec.substr(0, pos);
        rest = spec.substr(pos + 1);
    }
    if (kind == "circle")
        c.kind = CurveKind::Circle;
    else if (kind == "ellipse")
        c.kind = CurveKind::Ellipse;
    else if (kind == "kite")
        c.kind = CurveKind::Kite;
    else if (kind == "polygon-smooth" || kind == "star")
        c.kind = CurveKind::PolygonSmooth;
    else
        throw std::invalid_argument("unsupported curve kind: " + kind);
    size_t start = 0;
    while (start < rest.size()) {
        size_t comma = rest.find(',', start);
        if (comma == std::string::npos) comma = rest.size();
        c.params.push_back(std::stod(rest.substr(start, comma - start)));
        start = comma + 1;
    }
    c.validate();
    return c;
}

}  // namespace ef2d
