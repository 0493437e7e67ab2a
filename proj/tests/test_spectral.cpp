#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ef2d/io.hpp"
#include "ef2d/oracle.hpp"
#include "ef2d/run.hpp"
#include "ef2d/spectral.hpp"

using namespace ef2d;

TEST_CASE("laplace-beltrami basis on the circle") {
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), 64);
    const GramMatrix G = assemble_G(mesh);
    const LaplaceBeltramiBasis basis = build_lb_basis(mesh);
    // mu_0 = 0 with constant mode
    CHECK(basis.mu[0] < 1e-10);
    const auto& u0 = basis.u.col(0);
    CHECK((u0.array() - u0.mean()).abs().maxCoeff() < 1e-10);
    // first degenerate pair: mu = 1 (angular index 1) up to O(h^2)
    CHECK(basis.mu[1] == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(basis.mu[2] == doctest::Approx(1.0).epsilon(5e-3));
    // ascending up to roundoff within degenerate pairs
    for (std::size_t i = 1; i < 64; ++i)
        CHECK(basis.mu[i] >= basis.mu[i - 1] - 1e-9 * (1.0 + std::fabs(basis.mu[i - 1])));
    // G-orthonormal
    const Eigen::MatrixXd I = basis.u.transpose() * G.entries * basis.u;
    CHECK((I - Eigen::MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-12);
    // trace identity: sum mu = trace(G^-1 L)
    const Eigen::MatrixXd L = assemble_lb_stiffness(mesh);
    double musum = 0;
    for (double m : basis.mu) musum += m;
    const double tr = G.entries.llt().solve(L).trace();
    CHECK(musum == doctest::Approx(tr).epsilon(1e-12));
}

TEST_CASE("order_by_lb_modes: identities in the G geometry") {
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), 32);
    const GramMatrix G = assemble_G(mesh);
    const LaplaceBeltramiBasis basis = build_lb_basis(mesh);
    OperatorMatrix A;
    A.entries = G.entries.cast<std::complex<double>>();
    for (const auto& row : order_by_lb_modes(A, basis, G).rows)
        CHECK(row.sigma == doctest::Approx(1.0).epsilon(1e-12));
    A.entries *= 2.5;
    for (const auto& row : order_by_lb_modes(A, basis, G).rows)
        CHECK(row.sigma == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("circle static mode responses match the log-kernel symbols") {
    const double a = 0.8;
    const std::size_t N = 256;
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:0.8"), N);
    const GramMatrix G = assemble_G(mesh);
    const LaplaceBeltramiBasis basis = build_lb_basis(mesh);
    const OperatorMatrix S =
        assemble_S(mesh, KernelSpec{KernelFamily::StaticUnfiltered, 0, 0}, 0);
    const SpectrumReport rep = order_by_lb_modes(S, basis, G);
    CHECK(rep.rows[0].sigma == doctest::Approx(-a * std::log(a)).epsilon(0.02));
    for (int m : {1, 3, 10}) {
        const double want = oracle::circle_symbol_S_static(a, m);
        CHECK(rep.rows[2 * m - 1].sigma == doctest::Approx(want).epsilon(0.02));
        CHECK(rep.rows[2 * m].sigma == doctest::Approx(want).epsilon(0.02));
    }
    // degenerate-pair invariance: the multiset {sigma} over a cos/sin pair is
    // rotation invariant; both members agree for the circle
    for (int m : {2, 5}) {
        CHECK(std::fabs(rep.rows[2 * m - 1].sigma - rep.rows[2 * m].sigma) < 1e-10);
    }
}

TEST_CASE("calderon product") {
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), 32);
    const GramMatrix G = assemble_G(mesh);
    OperatorMatrix Gc;
    Gc.entries = G.entries.cast<std::complex<double>>();
    const OperatorMatrix I = calderon_product(Gc, Gc, G);
    CHECK((I.entries - Eigen::MatrixXcd::Identity(32, 32)).cwiseAbs().maxCoeff() < 1e-12);
    // G not SPD rejected
    GramMatrix bad;
    bad.entries = -Eigen::MatrixXd::Identity(32, 32);
    CHECK_THROWS_AS(calderon_product(Gc, Gc, bad), std::invalid_argument);
}

TEST_CASE("full svd spectrum") {
    OperatorMatrix A;
    A.entries = Eigen::MatrixXcd::Zero(3, 3);
    A.entries(0, 0) = 3.0;
    A.entries(1, 1) = 1.0;
    A.entries(2, 2) = 2.0;
    const auto sv = full_svd_spectrum(A);
    CHECK(sv[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(sv[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sv[2] == doctest::Approx(1.0).epsilon(1e-14));
    // SVD of SPD G equals its eigenvalues
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), 24);
    const GramMatrix G = assemble_G(mesh);
    OperatorMatrix Gc;
    Gc.entries = G.entries.cast<std::complex<double>>();
    const auto gs = full_svd_spectrum(Gc);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G.entries);
    for (Eigen::Index i = 0; i < 24; ++i)
        CHECK(gs[i] == doctest::Approx(es.eigenvalues()[23 - i]).epsilon(1e-12));
    // A and A^T agree
    OperatorMatrix R;
    R.entries = Eigen::MatrixXcd::Random(20, 20);
    OperatorMatrix Rt;
    Rt.entries = R.entries.transpose();
    const auto s1 = full_svd_spectrum(R);
    const auto s2 = full_svd_spectrum(Rt);
    for (std::size_t i = 0; i < s1.size(); ++i)
        CHECK(std::fabs(s1[i] - s2[i]) < 1e-10 * s1[0]);
}

TEST_CASE("cutoff estimate") {
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), 64);
    const GramMatrix G = assemble_G(mesh);
    const LaplaceBeltramiBasis basis = build_lb_basis(mesh);
    OperatorMatrix A;
    A.entries = G.entries.cast<std::complex<double>>();
    const SpectrumReport rep = order_by_lb_modes(A, basis, G);
    const int c5 = cutoff_estimate(rep, 5.0);
    CHECK(c5 >= 9);
    CHECK(c5 <= 10);
    CHECK(cutoff_estimate(rep, 0.5) == 1);
    CHECK(cutoff_estimate(rep, 1e9) == static_cast<int>(rep.rows.size()));
}

TEST_CASE("low-pass property of the filtered operator (overlap ordering too)") {
    const double k = 3.0, alpha = 3.0 * k;
    const std::size_t N = 128;
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), N);
    const GramMatrix G = assemble_G(mesh);
    const LaplaceBeltramiBasis basis = build_lb_basis(mesh);
    const OperatorMatrix S =
        assemble_S(mesh, KernelSpec{KernelFamily::DynamicUnfiltered, k, 0}, 0);
    const OperatorMatrix Sa =
        assemble_S(mesh, KernelSpec{KernelFamily::DynamicFourierFiltered, k, alpha}, 0);
    const SpectrumReport r0 = order_by_lb_modes(S, basis, G);
    const SpectrumReport ra = order_by_lb_modes(Sa, basis, G);
    const std::size_t nstar = cutoff_estimate(ra, alpha);
    double tail_ratio = 0;
    std::vector<double> pass;
    for (std::size_t i = 0; i < r0.rows.size(); ++i) {
        const double ratio = ra.rows[i].sigma / r0.rows[i].sigma;
        if (double(i) > 1.5 * double(nstar)) tail_ratio = std::max(tail_ratio, ratio);
        if (double(i) < 0.5 * double(nstar)) pass.push_back(ratio);
    }
    CHECK(tail_ratio <= 0.1);
    std::sort(pass.begin(), pass.end());
    const double median = pass[pass.size() / 2];
    CHECK(median >= 0.8);
    CHECK(median <= 1.25);
    // the overlap ordering exists and reports the same number of modes
    const SpectrumReport ov = order_by_overlap(Sa, basis, G);
    CHECK(ov.rows.size() == N);
    for (const auto& row : ov.rows) CHECK(row.sigma >= 0.0);
}

TEST_CASE("spectrum report serialization") {
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), 16);
    const GramMatrix G = assemble_G(mesh);
    const LaplaceBeltramiBasis basis = build_lb_basis(mesh);
    OperatorMatrix A;
    A.entries = G.entries.cast<std::complex<double>>();
    SpectrumReport rep = order_by_lb_modes(A, basis, G);
    rep.op_label = "S";
    rep.kernel_family = "static";
    std::ostringstream os;
    io::write_spectrum_csv(os, rep, {"cfg"});
    const std::string s = os.str();
    CHECK(s.rfind("# cfg\nn,mu_n,sqrt_mu_n,sigma_n,operator,kernel_family,k,alpha\n", 0) ==
          0);
    // 16 data rows
    std::size_t lines = 0;
    for (char c : s)
        if (c == '\n') ++lines;
    CHECK(lines == 2 + 16);
    const auto j = io::spectrum_to_json(rep, {{"N", 16}});
    CHECK(j["rows"].size() == 16);
    CHECK(j["metadata"]["N"] == 16);
}

TEST_CASE("run config resolution") {
    RunConfig cfg;
    cfg.curve_spec = "circle:1";
    cfg.n_panels = 128;
    cfg.k = 0.0;
    cfg.kernel = "static-filtered";
    cfg.alpha_spec = "8";
    const ResolvedConfig r = resolve_config(cfg);
    CHECK(r.spec.alpha == 8.0);
    CHECK(r.n_panels == 128);

    SUBCASE("relative alpha") {
        cfg.k = 2.0;
        cfg.kernel = "fourier-filtered";
        cfg.alpha_spec = "3k";
        CHECK(resolve_config(cfg).spec.alpha == doctest::Approx(6.0));
    }
    SUBCASE("frequency converts to k") {
        cfg.k.reset();
        cfg.freq_hz = 1e9;
        cfg.kernel = "dynamic";
        cfg.alpha_spec.clear();
        CHECK(resolve_config(cfg).spec.k ==
              doctest::Approx(2.0 * M_PI * 1e9 / 299792458.0).epsilon(1e-15));
    }
    SUBCASE("h-over-lambda sets the panel count") {
        cfg.n_panels.reset();
        cfg.h_over_lambda = 1.0 / 30.0;
        cfg.k = 10.0;
        cfg.kernel = "dynamic";
        cfg.alpha_spec.clear();
        const auto rr = resolve_config(cfg);
        // circumference 2 pi, h = lambda/30 = 2 pi/300
        CHECK(rr.n_panels == 300);
    }
    SUBCASE("missing alpha with filtered family rejected") {
        cfg.alpha_spec.clear();
        CHECK_THROWS_AS(resolve_config(cfg), ConfigError);
    }
    SUBCASE("both k and freq rejected") {
        cfg.freq_hz = 1e9;
        CHECK_THROWS_AS(resolve_config(cfg), ConfigError);
    }
    SUBCASE("alpha below k rejected") {
        cfg.k = 20.0;
        cfg.kernel = "fourier-filtered";
        cfg.alpha_spec = "8";
        CHECK_THROWS_AS(resolve_config(cfg), ConfigError);
    }
}

TEST_CASE("spectrum driver emits filtered and unfiltered artifacts") {
    RunConfig cfg;
    cfg.curve_spec = "circle:1";
    cfg.n_panels = 32;
    cfg.k = 2.0;
    cfg.kernel = "fourier-filtered";
    cfg.alpha_spec = "3k";
    cfg.threads = 1;
    const SpectrumArtifacts art = run_spectrum(resolve_config(cfg));
    CHECK(art.report.rows.size() == 32);
    CHECK(art.unfiltered.has_value());
    CHECK(art.unfiltered->kernel_family == std::string("dynamic"));
    CHECK(art.csv.find("fourier-filtered") != std::string::npos);
    CHECK(!art.json.empty());
}
