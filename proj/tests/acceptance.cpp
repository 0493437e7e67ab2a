// Acceptance harness: one pass/fail line per criterion, exit code = number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "ef2d/assembly.hpp"
#include "ef2d/filon.hpp"
#include "ef2d/oracle.hpp"
#include "ef2d/run.hpp"
#include "ef2d/spectral.hpp"

using namespace ef2d;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail = "") {
    if (!pass) ++g_failures;
    std::printf("criterion %d: %s - %s%s%s\n", id, pass ? "PASS" : "FAIL", what.c_str(),
                detail.empty() ? "" : " | ", detail.c_str());
    std::fflush(stdout);
}

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

Eigen::VectorXcd fourier_mode(std::size_t N, int m) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(N));
    for (std::size_t i = 0; i < N; ++i)
        v[static_cast<Eigen::Index>(i)] = std::cos(m * 2.0 * M_PI * double(i) / double(N));
    return v;
}

double rayleigh_static(const Eigen::MatrixXcd& S, const Eigen::MatrixXd& G,
                       const Eigen::VectorXcd& v) {
    return ((v.adjoint() * S * v)(0) / (v.adjoint() * G.cast<std::complex<double>>() * v)(0))
        .real();
}

// --------------------------------------------------------------------------

void criterion_1() {
    const double a = 0.8;
    std::vector<std::vector<double>> lam(2);
    const std::size_t sizes[2] = {128, 256};
    for (int s = 0; s < 2; ++s) {
        const CurveMesh mesh = build_mesh(parse_curve_spec("circle:0.8"), sizes[s]);
        const OperatorMatrix S =
            assemble_S(mesh, KernelSpec{KernelFamily::StaticUnfiltered, 0, 0}, 0);
        const GramMatrix G = assemble_G(mesh);
        for (int m = 0; m <= 10; ++m)
            lam[s].push_back(rayleigh_static(S.entries, G.entries, fourier_mode(sizes[s], m)));
    }
    double worst = 0, worst_rich = 0;
    for (int m = 0; m <= 10; ++m) {
        const double want = oracle::circle_symbol_S_static(a, m);
        worst = std::max(worst, std::fabs(lam[1][m] - want) / std::fabs(want));
        const double rich = (4.0 * lam[1][m] - lam[0][m]) / 3.0;
        worst_rich = std::max(worst_rich, std::fabs(rich - want) / std::fabs(want));
    }
    char d[128];
    std::snprintf(d, sizeof(d), "N=256 rel err %.2e (tol 1e-2), Richardson %.2e (tol 1e-3)",
                  worst, worst_rich);
    report(1, worst <= 1e-2 && worst_rich <= 1e-3, "circle static spectrum", d);
}

void criterion_2() {
    auto f = [](double t) { return 1.0 / std::sqrt(t * t - 1.0); };
    const auto plan = make_filon_plan(f, 2.0, 40.0);
    const double ks[4] = {0.1, 1.0, 10.0, 100.0};
    double worst_rel = 0, tmin = 1e300, tmax = 0;
    for (double k : ks) {
        const double want = integrate_adaptive(
            [&](double t) { return std::cos(k * t) * f(t); }, 2.0, 40.0, 1e-13);
        const double got = oscillatory_integral(plan, k).value;
        worst_rel = std::max(worst_rel,
                             std::fabs(got - want) / std::max(1e-30, std::fabs(want)));
        // best-of-5 timing of 400 evaluations to suppress scheduler noise
        double best = 1e300;
        for (int rep = 0; rep < 5; ++rep) {
            const double t0 = now_s();
            double sink = 0;
            for (int i = 0; i < 400; ++i) sink += oscillatory_integral(plan, k).value;
            const double dt = now_s() - t0;
            if (sink != 0) best = std::min(best, dt);
        }
        tmin = std::min(tmin, best);
        tmax = std::max(tmax, best);
    }
    char d[128];
    std::snprintf(d, sizeof(d), "max rel err %.2e (tol 1e-9), runtime spread %.2fx (tol 2x)",
                  worst_rel, tmax / tmin);
    report(2, worst_rel <= 1e-9 && tmax / tmin <= 2.0, "filon-legendre correctness", d);
}

void criterion_3() {
    const auto& g = cached_gauss(64);
    double worst = 0;
    for (double k : {0.5, 2.0, 20.0}) {
        const auto jh = bessel::sph_jn_array(10, k);
        for (int n = 0; n <= 10; ++n) {
            std::complex<double> direct = 0;
            for (std::size_t q = 0; q < g.nodes.size(); ++q) {
                const double t = g.nodes[q];
                double pm1 = 1.0, p = t, pn = (n == 0) ? 1.0 : t;
                for (int m = 1; m < n; ++m) {
                    pn = ((2.0 * m + 1.0) * t * p - double(m) * pm1) / (m + 1.0);
                    pm1 = p;
                    p = pn;
                }
                direct += g.weights[q] * pn * std::exp(std::complex<double>(0, k * t));
            }
            const std::complex<double> want =
                std::pow(std::complex<double>(0, 1), n) *
                std::sqrt(2.0 * M_PI / k) * bessel::j_half(n, k);
            worst = std::max(worst, std::abs(direct - want));
        }
    }
    char d[64];
    std::snprintf(d, sizeof(d), "max err %.2e (tol 1e-11)", worst);
    report(3, worst <= 1e-11, "legendre plane-wave identity", d);
}

void criterion_4() {
    const double k = 1.0, r = 1.0;  // kr = 1
    struct Fam {
        KernelFamily f;
        const char* name;
        double tol;
    };
    const Fam fams[3] = {{KernelFamily::StaticFiltered, "static", 1e-5},
                         {KernelFamily::DynamicFourierFiltered, "fourier", 1e-5},
                         {KernelFamily::DynamicMsFiltered, "ms", 1e-3}};
    bool pass = true;
    std::string detail;
    for (const auto& fam : fams) {
        std::vector<double> errs;
        for (double ratio : {4.0, 16.0, 64.0, 256.0}) {
            const KernelSpec spec{fam.f, fam.f == KernelFamily::StaticFiltered ? 0.0 : k,
                                  ratio * k};
            const std::complex<double> lim =
                spec.is_static() ? std::complex<double>(g_static(r), 0)
                                 : g_dynamic(r, k);
            errs.push_back(std::abs(oracle::kernel(spec, r) - lim));
        }
        bool mono = true;
        for (std::size_t i = 1; i < errs.size(); ++i) mono = mono && errs[i] < errs[i - 1];
        const bool below = errs.back() < fam.tol;
        pass = pass && mono && below;
        char d[160];
        std::snprintf(d, sizeof(d), "%s: {%.3e, %.3e, %.3e, %.3e} mono=%s final<%g=%s",
                      fam.name, errs[0], errs[1], errs[2], errs[3], mono ? "yes" : "NO",
                      fam.tol, below ? "yes" : "NO");
        detail += std::string(detail.empty() ? "" : "; ") + d;
    }
    report(4, pass, "kernel consistency alpha->inf at kr=1", detail);
}

struct LowPassResult {
    double tail_ratio = 0;
    double passband_median = 0;
    int nstar = 0;
};

LowPassResult low_pass_ratios(const SpectrumReport& filt, const SpectrumReport& unf,
                              double alpha, double a) {
    LowPassResult res;
    std::vector<double> pass;
    for (std::size_t i = 0; i < filt.rows.size(); ++i) {
        const int m = (int(i) + 1) / 2;  // angular index of LB mode i on the circle
        const double ratio = filt.rows[i].sigma / unf.rows[i].sigma;
        if (double(m) > 1.5 * alpha * a) res.tail_ratio = std::max(res.tail_ratio, ratio);
        if (double(m) < 0.5 * alpha * a) pass.push_back(ratio);
    }
    std::sort(pass.begin(), pass.end());
    res.passband_median = pass[pass.size() / 2];
    res.nstar = cutoff_estimate(filt, alpha);
    return res;
}

void criterion_5_and_9() {
    const double a = 1.0, k = 10.0, alpha = 3.0 * k;
    const std::size_t N = 256;
    const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), N);
    const GramMatrix G = assemble_G(mesh);
    const LaplaceBeltramiBasis basis = build_lb_basis(mesh);
    const OperatorMatrix S =
        assemble_S(mesh, KernelSpec{KernelFamily::DynamicUnfiltered, k, 0}, 0);
    SpectrumReport unf = order_by_lb_modes(S, basis, G);

    bool pass = true;
    std::string detail;
    for (KernelFamily fam :
         {KernelFamily::DynamicFourierFiltered, KernelFamily::DynamicMsFiltered}) {
        const OperatorMatrix Sa = assemble_S(mesh, KernelSpec{fam, k, alpha}, 0);
        const SpectrumReport filt = order_by_lb_modes(Sa, basis, G);
        const LowPassResult res = low_pass_ratios(filt, unf, alpha, a);
        const bool ok =
            res.tail_ratio <= 0.1 && res.passband_median >= 0.8 && res.passband_median <= 1.25;
        pass = pass && ok;
        char d[128];
        std::snprintf(d, sizeof(d), "%s: tail %.3f (tol 0.1), passband median %.3f",
                      kernel_family_name(fam), res.tail_ratio, res.passband_median);
        detail += std::string(detail.empty() ? "" : "; ") + d;
    }
    report(5, pass, "low-pass effect on S^alpha (ka=10, alpha=3k, N=256)", detail);

    // criterion 9: the criterion-5 CSV artifact is bit-identical across
    // thread counts
    RunConfig cfg;
    cfg.curve_spec = "circle:1";
    cfg.n_panels = N;
    cfg.k = k;
    cfg.kernel = "fourier-filtered";
    cfg.alpha_spec = "3k";
    std::vector<std::string> csvs, unf_csvs;
    for (int threads : {1, 4, 8}) {
        cfg.threads = threads;
        ResolvedConfig rc = resolve_config(cfg);
        rc.threads = threads;  // pin exactly, bypassing hardware clamping
        const SpectrumArtifacts art = run_spectrum(rc);
        // strip the thread count from the header: the spec requires identical
        // artifacts for identical RunConfig content
        auto strip = [](std::string s) {
            const auto p = s.find(" threads=");
            const auto e = s.find('\n');
            if (p != std::string::npos && e != std::string::npos) s.erase(p, e - p);
            return s;
        };
        csvs.push_back(strip(art.csv));
        unf_csvs.push_back(strip(art.unfiltered_csv));
    }
    const bool identical = csvs[1] == csvs[0] && csvs[2] == csvs[0] &&
                           unf_csvs[1] == unf_csvs[0] && unf_csvs[2] == unf_csvs[0];
    report(9, identical, "criterion-5 CSV bit-identical across threads {1,4,8}");
}

void criterion_6() {
    const double k = 10.0, alpha = 3.0 * k;
    RunConfig cfg;
    cfg.curve_spec = "circle:1";
    cfg.h_over_lambda = 1.0 / 30.0;  // h = lambda/30
    cfg.k = k;
    cfg.kernel = "dynamic";
    const ResolvedConfig rc = resolve_config(cfg);
    const CurveMesh mesh = build_mesh(rc.curve, rc.n_panels);
    const GramMatrix G = assemble_G(mesh);
    const LaplaceBeltramiBasis basis = build_lb_basis(mesh);

    const KernelSpec dyn{KernelFamily::DynamicUnfiltered, k, 0};
    const KernelSpec fil{KernelFamily::DynamicFourierFiltered, k, alpha};
    OperatorMatrix C_unf = calderon_product(assemble_S(mesh, dyn, 0),
                                            assemble_N(mesh, dyn, 0), G);
    OperatorMatrix C_fil = calderon_product(assemble_S(mesh, fil, 0),
                                            assemble_N(mesh, fil, 0), G);
    // calderon_product returns the operator G^-1 S G^-1 N; order_by_lb_modes
    // consumes weak forms, so pass G * C to report the responses of C itself.
    C_unf.entries = G.entries * C_unf.entries;
    C_fil.entries = G.entries * C_fil.entries;
    const SpectrumReport unf = order_by_lb_modes(C_unf, basis, G);
    const SpectrumReport filt = order_by_lb_modes(C_fil, basis, G);

    std::vector<double> sig;
    for (const auto& row : unf.rows) sig.push_back(row.sigma);
    std::sort(sig.begin(), sig.end());
    const double median = sig[sig.size() / 2];

    const int nstar = cutoff_estimate(filt, alpha);
    double tail_max = 0;
    for (const auto& row : filt.rows)
        if (row.n > nstar) tail_max = std::max(tail_max, row.sigma);

    char d[160];
    std::snprintf(d, sizeof(d),
                  "N=%zu unfiltered median %.4f (want 0.25 +/- 20%%), filtered tail max "
                  "%.4f past n*=%d (tol 0.025)",
                  mesh.size(), median, tail_max, nstar);
    const bool pass = median >= 0.2 && median <= 0.3 && tail_max < 0.025;
    report(6, pass, "calderon experiment at h<=lambda/30", d);
}

void criterion_7() {
    double worst = 0;
    for (double alpha : {2.0, 10.0}) {
        const KernelSpec spec{KernelFamily::StaticFiltered, 0, alpha};
        const double v3 = kernel_value(spec, 1e-3).real();
        const double v4 = kernel_value(spec, 1e-4).real();
        const double v5 = kernel_value(spec, 1e-5).real();
        // error is O(r^2): two Richardson steps over the three radii
        const double a1 = (100.0 * v4 - v3) / 99.0;
        const double a2 = (100.0 * v5 - v4) / 99.0;
        const double extrap = (10000.0 * a2 - a1) / 9999.0;
        const double want = (euler_gamma + std::log(alpha / 2.0)) / (2.0 * M_PI);
        worst = std::max(worst, std::fabs(extrap - want));
    }
    char d[64];
    std::snprintf(d, sizeof(d), "max err %.2e (tol 1e-6)", worst);
    report(7, worst <= 1e-6, "static filtered kernel r->0 limit", d);
}

void criterion_8() {
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
        num += std::norm(j[static_cast<Eigen::Index>(i)] - mie.current(th));
        den += std::norm(mie.current(th));
    }
    const double rel = std::sqrt(num / den);
    char d[64];
    std::snprintf(d, sizeof(d), "L2 rel err %.4f (tol 0.02)", rel);
    report(8, rel <= 0.02, "TM solver vs scattering series (ka=1, N=256)", d);
}

}  // namespace

int main() {
    const double t0 = now_s();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5_and_9();
    criterion_6();
    criterion_7();
    criterion_8();
    std::printf("%d of 9 criteria failed (%.1f s total)\n", g_failures, now_s() - t0);
    return g_failures;
}
