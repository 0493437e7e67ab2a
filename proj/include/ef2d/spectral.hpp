#pragma once

// Spectral post-processing: the Laplace-Beltrami (LB) mode basis that orders
// the spectra, operator mode responses, the Calderon product G^-1 S G^-1 N,
// and full SVD spectra.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "ef2d/assembly.hpp"
#include "ef2d/curve.hpp"

namespace ef2d {

struct LaplaceBeltramiBasis {
    Eigen::VectorXd mu;   // eigenvalues, ascending, mu(0) = 0
    Eigen::MatrixXd u;    // columns G-orthonormal: u_m^T G u_n = delta
    std::string mesh_tag;
};

struct SpectrumRow {
    int n = 0;
    double mu = 0;
    double sqrt_mu = 0;
    double sigma = 0;
};

struct SpectrumReport {
    std::vector<SpectrumRow> rows;
    std::string op_label;         // S | N | calderon
    std::string kernel_family;
    double k = 0;
    double alpha = 0;
};

// Cyclic stiffness matrix of the hat functions (piecewise-linear FEM
// discretization of -d^2/ds^2 on the closed curve).
inline Eigen::MatrixXd assemble_lb_stiffness(const CurveMesh& mesh) {
    const std::size_t n = mesh.size();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t p = 0; p < n; ++p) {
        const double inv_h = 1.0 / mesh.seg_length[p];
        const std::size_t q = mesh.next(p);
        L(p, p) += inv_h;
        L(q, q) += inv_h;
        L(p, q) -= inv_h;
        L(q, p) -= inv_h;
    }
    return L;
}

inline LaplaceBeltramiBasis build_lb_basis(const CurveMesh& mesh) {
    const Eigen::MatrixXd L = assemble_lb_stiffness(mesh);
    const Eigen::MatrixXd G = assemble_G(mesh).entries;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(L, G);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("build_lb_basis: generalized eigensolver failed");
    LaplaceBeltramiBasis basis;
    basis.mu = es.eigenvalues().cwiseMax(0.0);  // clip -eps round-off on mu_0
    basis.u = es.eigenvectors();                // G-orthonormal by construction
    basis.mesh_tag = mesh_tag(mesh);
    // Within numerically degenerate pairs, put the reflection-symmetric mode
    // (u_i = u_{N-i} on a reflection-symmetric mesh) first.
    const Eigen::Index n = basis.mu.size();
    auto even_score = [&](Eigen::Index c) {
        double sym = 0, asym = 0;
        for (Eigen::Index i = 1; i < n; ++i) {
            const double a = basis.u(i, c), b = basis.u(n - i, c);
            sym += (a + b) * (a + b);
            asym += (a - b) * (a - b);
        }
        return sym - asym;
    };
    for (Eigen::Index c = 0; c + 1 < n; ++c) {
        const double scale = std::max(1.0, basis.mu(c + 1));
        if (basis.mu(c + 1) - basis.mu(c) < 1e-8 * scale &&
            even_score(c) < even_score(c + 1)) {
            basis.u.col(c).swap(basis.u.col(c + 1));
            std::swap(basis.mu(c), basis.mu(c + 1));
        }
    }
    return basis;
}

// sigma_n = ||G^-1 A u_n||_G / ||u_n||_G, the operator response in LB mode n.
inline SpectrumReport order_by_lb_modes(const OperatorMatrix& A,
                                        const LaplaceBeltramiBasis& basis,
                                        const GramMatrix& G) {
    const Eigen::Index n = A.entries.rows();
    if (basis.u.rows() != n || G.entries.rows() != n)
        throw std::invalid_argument("order_by_lb_modes: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(G.entries);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("order_by_lb_modes: G not SPD");
    SpectrumReport rep;
    rep.op_label = "A";
    rep.kernel_family = kernel_family_name(A.kernel.family);
    rep.k = A.kernel.k;
    rep.alpha = A.kernel.alpha;
    rep.rows.resize(n);
    const Eigen::MatrixXcd Au = A.entries * basis.u.cast<std::complex<double>>();
    for (Eigen::Index m = 0; m < n; ++m) {
        // y = G^-1 (A u_m); ||y||_G^2 = y^H G y = (A u_m)^H G^-1 (A u_m)
        const Eigen::VectorXcd y =
            llt.solve(Au.col(m).real()).cast<std::complex<double>>() +
            std::complex<double>(0, 1) * llt.solve(Au.col(m).imag());
        const double s2 = (Au.col(m).adjoint() * y)(0).real();
        rep.rows[m] = {static_cast<int>(m), basis.mu(m), std::sqrt(basis.mu(m)),
                       std::sqrt(std::max(0.0, s2))};
    }
    return rep;
}

// Alternative "ordered by" reading: full SVD, with each LB mode assigned the
// singular value whose left singular vector has maximal overlap with it
// (greedy, G-weighted).  Selected by the CLI flag --ordering overlap.
inline SpectrumReport order_by_overlap(const OperatorMatrix& A,
                                       const LaplaceBeltramiBasis& basis,
                                       const GramMatrix& G) {
    const Eigen::Index n = A.entries.rows();
    if (basis.u.rows() != n || G.entries.rows() != n)
        throw std::invalid_argument("order_by_overlap: dimension mismatch");
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A.entries,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
    SpectrumReport rep;
    rep.op_label = "A";
    rep.kernel_family = kernel_family_name(A.kernel.family);
    rep.k = A.kernel.k;
    rep.alpha = A.kernel.alpha;
    rep.rows.resize(n);
    const Eigen::MatrixXcd GU = G.entries.cast<std::complex<double>>() *
                                basis.u.cast<std::complex<double>>();
    const Eigen::MatrixXd overlap = (svd.matrixU().adjoint() * GU).cwiseAbs();
    std::vector<bool> taken(n, false);
    for (Eigen::Index m = 0; m < n; ++m) {
        Eigen::Index best = -1;
        double best_ov = -1;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (taken[j]) continue;
            const double ov = overlap(j, m);
            if (ov > best_ov) {
                best_ov = ov;
                best = j;
            }
        }
        taken[best] = true;
        rep.rows[m] = {static_cast<int>(m), basis.mu(m), std::sqrt(basis.mu(m)),
                       svd.singularValues()(best)};
    }
    return rep;
}

inline OperatorMatrix calderon_product(const OperatorMatrix& S, const OperatorMatrix& N,
                                       const GramMatrix& G) {
    const Eigen::Index n = G.entries.rows();
    if (S.entries.rows() != n || N.entries.rows() != n)
        throw std::invalid_argument("calderon_product: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXcd> llt(G.entries.cast<std::complex<double>>());
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("calderon_product: G not SPD");
    OperatorMatrix out;
    out.entries = llt.solve(S.entries) * llt.solve(N.entries);
    out.kernel = S.kernel;
    out.mesh_tag = S.mesh_tag;
    return out;
}

inline Eigen::VectorXd full_svd_spectrum(const OperatorMatrix& A) {
    const Eigen::Index n = A.entries.rows();
    if (n > 4096) throw std::invalid_argument("full_svd_spectrum: N > 4096");
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A.entries);
    if (svd.info() != Eigen::Success)
        throw std::runtime_error("full_svd_spectrum: SVD did not converge");
    return svd.singularValues();
}

// Smallest mode index whose spatial frequency sqrt(mu_n) exceeds alpha;
// returns the report length when alpha lies above the resolved band.
inline int cutoff_estimate(const SpectrumReport& report, double alpha) {
    if (report.rows.empty()) throw std::invalid_argument("cutoff_estimate: empty report");
    for (const auto& row : report.rows)
        if (row.sqrt_mu > alpha) return row.n;
    return static_cast<int>(report.rows.size());
}

}  // namespace ef2d
