#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "ef2d/assembly.hpp"
#include "ef2d/io.hpp"
#include "ef2d/oracle.hpp"

using namespace ef2d;

namespace {

Eigen::VectorXcd fourier_mode(std::size_t N, int m, bool use_sin = false) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(N));
    for (std::size_t i = 0; i < N; ++i) {
        const double th = 2.0 * M_PI * double(i) / double(N);
        v[static_cast<Eigen::Index>(i)] = use_sin ? std::sin(m * th) : std::cos(m * th);
    }
    return v;
}

std::complex<double> rayleigh(const Eigen::MatrixXcd& A, const Eigen::MatrixXd& G,
                              const Eigen::VectorXcd& v) {
    return (v.adjoint() * A * v)(0) /
           (v.adjoint() * G.cast<std::complex<double>>() * v)(0);
}

}  // namespace

TEST_CASE("gram matrix: closed-form cyclic tridiagonal") {
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), 32);
    const double h = mesh.seg_length[0];
    const GramMatrix G = assemble_G(mesh);
    for (Eigen::Index i = 0; i < 32; ++i) {
        CHECK(G.entries(i, i) == doctest::Approx(2.0 * h / 3.0).epsilon(1e-13));
        CHECK(G.entries(i, (i + 1) % 32) == doctest::Approx(h / 6.0).epsilon(1e-13));
        CHECK(G.entries(i, (i + 2) % 32) == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(G.entries.row(i).sum() == doctest::Approx(h).epsilon(1e-13));
    }
    // SPD
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G.entries);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("static S on the circle reproduces the log-kernel symbols") {
    const double a = 0.8;
    const std::size_t N = 256;
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:0.8"), N);
    const KernelSpec spec{KernelFamily::StaticUnfiltered, 0, 0};
    const OperatorMatrix S = assemble_S(mesh, spec, 0);
    const GramMatrix G = assemble_G(mesh);
    CHECK(rayleigh(S.entries, G.entries, fourier_mode(N, 0)).real() ==
          doctest::Approx(-a * std::log(a)).epsilon(1e-3 / 0.178));
    CHECK(rayleigh(S.entries, G.entries, fourier_mode(N, 3)).real() ==
          doctest::Approx(a / 6.0).epsilon(1e-3 / 0.133));
}

TEST_CASE("operator symmetry for every kernel family") {
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), 32);
    const std::vector<KernelSpec> specs = {
        {KernelFamily::StaticUnfiltered, 0, 0},
        {KernelFamily::DynamicUnfiltered, 2.0, 0},
        {KernelFamily::StaticFiltered, 0, 4.0},
        {KernelFamily::DynamicFourierFiltered, 2.0, 6.0},
        {KernelFamily::DynamicMsFiltered, 2.0, 6.0},
    };
    for (const auto& spec : specs) {
        const OperatorMatrix S = assemble_S(mesh, spec, 0);
        CHECK((S.entries - S.entries.transpose()).norm() / S.entries.norm() < 1e-10);
        const OperatorMatrix Nm = assemble_N(mesh, spec, 0);
        CHECK((Nm.entries - Nm.entries.transpose()).norm() / Nm.entries.norm() < 1e-10);
        CHECK(S.entries.allFinite());
        CHECK(Nm.entries.allFinite());
    }
}

TEST_CASE("static N annihilates constants") {
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), 48);
    const OperatorMatrix Nm =
        assemble_N(mesh, KernelSpec{KernelFamily::StaticUnfiltered, 0, 0}, 0);
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(48);
    CHECK((Nm.entries * ones).norm() / Nm.entries.norm() < 1e-10);
}

TEST_CASE("dynamic S and N match the circle Bessel-product symbols") {
    const double a = 1.0, k = 2.0;
    const std::size_t N = 128;
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), N);
    const KernelSpec spec{KernelFamily::DynamicUnfiltered, k, 0};
    const OperatorMatrix S = assemble_S(mesh, spec, 0);
    const OperatorMatrix Nm = assemble_N(mesh, spec, 0);
    const GramMatrix G = assemble_G(mesh);
    for (int m : {0, 1, 2, 5}) {
        const auto v = fourier_mode(N, m);
        const auto want_s = oracle::circle_symbol_dynamic(a, m, k, oracle::CircleOp::S);
        const auto want_n = oracle::circle_symbol_dynamic(a, m, k, oracle::CircleOp::N);
        CHECK(std::abs(rayleigh(S.entries, G.entries, v) - want_s) < 5e-3 * std::abs(want_s) + 1e-4);
        CHECK(std::abs(rayleigh(Nm.entries, G.entries, v) - want_n) < 5e-3 * std::abs(want_n) + 1e-3);
    }
}

TEST_CASE("filtered-matrix consistency: monotone approach to the unfiltered operator") {
    const double k = 2.0;
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), 32);
    const OperatorMatrix S =
        assemble_S(mesh, KernelSpec{KernelFamily::DynamicUnfiltered, k, 0}, 0);
    for (KernelFamily fam :
         {KernelFamily::DynamicFourierFiltered, KernelFamily::DynamicMsFiltered}) {
        double prev = 1e300;
        for (double ratio : {2.0, 4.0, 8.0, 16.0}) {
            const OperatorMatrix Sa = assemble_S(mesh, KernelSpec{fam, k, ratio * k}, 0);
            const double rel = (Sa.entries - S.entries).norm() / S.entries.norm();
            if (fam == KernelFamily::DynamicFourierFiltered) CHECK(rel < prev);
            prev = rel;
        }
        CHECK(prev < 0.05);  // close by alpha = 16k
    }
}

TEST_CASE("symmetry and SPD invariants across mesh sizes") {
    for (std::size_t N : {16u, 32u, 64u, 128u}) {
        const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), N);
        const GramMatrix G = assemble_G(mesh);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G.entries);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
        const OperatorMatrix S =
            assemble_S(mesh, KernelSpec{KernelFamily::StaticUnfiltered, 0, 0}, 0);
        CHECK((S.entries - S.entries.transpose()).norm() / S.entries.norm() < 1e-10);
    }
}

TEST_CASE("assembly determinism across thread counts") {
    const CurveMesh mesh = build_mesh(parse_curve_spec("ellipse:2,1"), 48);
    const KernelSpec spec{KernelFamily::DynamicFourierFiltered, 2.0, 7.0};
    const OperatorMatrix S1 = assemble_S(mesh, spec, 1);
    const OperatorMatrix S4 = assemble_S(mesh, spec, 4);
    const OperatorMatrix S8 = assemble_S(mesh, spec, 8);
    CHECK((S1.entries - S4.entries).cwiseAbs().maxCoeff() == 0.0);
    CHECK((S1.entries - S8.entries).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rhs assembly") {
    const std::size_t N = 40;
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), N);
    const double h = mesh.seg_length[0];
    SUBCASE("TM constant field") {
        // E_z = 1, eta = 1, k = 1: entry i = (1/(ik)) * h = -i h
        ExcitationSpec exc;
        exc.polarization = Polarization::TM;
        exc.k = 1.0;
        exc.eta = 1.0;
        const Eigen::VectorXcd b = assemble_rhs_field(
            mesh, exc, [](Point2, Point2) { return std::complex<double>(1.0, 0.0); });
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            CHECK(b[i].real() == doctest::Approx(0.0).epsilon(1e-14));
            CHECK(b[i].imag() == doctest::Approx(-h).epsilon(1e-12));
        }
    }
    SUBCASE("TE plane wave reflection symmetry") {
        ExcitationSpec exc;
        exc.polarization = Polarization::TE;
        exc.direction = {1.0, 0.0};
        exc.k = 2.0;
        const Eigen::VectorXcd b = assemble_rhs(mesh, exc);
        // nodes i and N-i are mirror images under y -> -y; the incident field
        // and the tangential projection are both even in y for incidence
        // along +x, so the entries coincide (cos-mode symmetry only)
        for (std::size_t i = 1; i < N; ++i) {
            const auto bi = b[static_cast<Eigen::Index>(i)];
            const auto bm = b[static_cast<Eigen::Index>(N - i)];
            CHECK(std::abs(bi - bm) < 1e-10 * b.norm());
        }
    }
    SUBCASE("norm scales as 1/eta") {
        ExcitationSpec exc;
        exc.polarization = Polarization::TM;
        exc.k = 1.5;
        exc.eta = 1.0;
        const double n1 = assemble_rhs(mesh, exc).norm();
        exc.eta = 4.0;
        const double n4 = assemble_rhs(mesh, exc).norm();
        CHECK(n1 == doctest::Approx(4.0 * n4).epsilon(1e-12));
    }
    SUBCASE("static excitation rejected") {
        ExcitationSpec exc;
        exc.k = 0.0;
        CHECK_THROWS_AS(assemble_rhs(mesh, exc), std::invalid_argument);
    }
}

TEST_CASE("solve_system") {
    const std::size_t N = 64;
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), N);
    SUBCASE("constructed solution through G") {
        const GramMatrix G = assemble_G(mesh);
        OperatorMatrix A;
        A.entries = G.entries.cast<std::complex<double>>();
        const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(N);
        const Eigen::VectorXcd x = solve_system(A, A.entries * ones);
        CHECK((x - ones).norm() < 1e-12);
    }
    SUBCASE("constructed solution through static S") {
        const OperatorMatrix S =
            assemble_S(mesh, KernelSpec{KernelFamily::StaticUnfiltered, 0, 0}, 0);
        Eigen::VectorXcd e = Eigen::VectorXcd::Random(N);
        const Eigen::VectorXcd x = solve_system(S, S.entries * e);
        CHECK((x - e).norm() / e.norm() < 1e-8);
    }
    SUBCASE("singular matrix rejected") {
        OperatorMatrix A;
        A.entries = Eigen::MatrixXcd::Zero(8, 8);
        A.entries(0, 0) = 1.0;
        CHECK_THROWS_AS(solve_system(A, Eigen::VectorXcd::Ones(8)), SingularSystemError);
    }
}

TEST_CASE("TM scattering matches the series oracle at ka = 1") {
    const double k = 1.0, eta = 376.730313668;
    const std::size_t N = 256;
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), N);
    const OperatorMatrix S =
        assemble_S(mesh, KernelSpec{KernelFamily::DynamicUnfiltered, k, 0}, 0);
    ExcitationSpec exc;
    exc.polarization = Polarization::TM;
    exc.direction = {1.0, 0.0};
    exc.k = k;
    exc.eta = eta;
    const Eigen::VectorXcd j = solve_system(S, assemble_rhs(mesh, exc));
    const auto mie = oracle::mie_series_current_tm(1.0, k, eta);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const double th = std::atan2(mesh.nodes[i].y, mesh.nodes[i].x);
        const auto want = mie.current(th);
        num += std::norm(j[static_cast<Eigen::Index>(i)] - want);
        den += std::norm(want);
        // forward/backward symmetry of the oracle itself
        CHECK(std::abs(mie.current(th) - mie.current(-th)) < 1e-12);
    }
    CHECK(std::sqrt(num / den) < 0.02);
    CHECK(mie.optical_theorem_residual() < 1e-8);
}

TEST_CASE("binary and CSV export round trips") {
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), 16);
    const OperatorMatrix S =
        assemble_S(mesh, KernelSpec{KernelFamily::StaticUnfiltered, 0, 0}, 0);
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    io::write_matrix_binary(ss, S.entries);
    // header: magic + version + N + payload
    CHECK(ss.str().size() == 4 + 4 + 4 + 16 * 16 * 2 * sizeof(double));
    CHECK(ss.str().substr(0, 4) == "EF2D");
    const Eigen::MatrixXcd back = io::read_matrix_binary(ss);
    CHECK((back - S.entries).cwiseAbs().maxCoeff() == 0.0);

    std::ostringstream cs;
    io::write_matrix_csv(cs, S.entries, {"config line"});
    CHECK(cs.str().rfind("# config line\nrow,col,re,im\n", 0) == 0);
    Eigen::MatrixXcd big(257, 257);
    CHECK_THROWS_AS(io::write_matrix_csv(cs, big), io::IoError);

    std::stringstream bad("EF3D....", std::ios::in | std::ios::binary);
    CHECK_THROWS_AS(io::read_matrix_binary(bad), io::IoError);
}
