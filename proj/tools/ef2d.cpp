// Command-line front end: configure geometry/kernel/filter, assemble
// operators, run spectral experiments, export CSV/JSON/binary artifacts, and
// run the self-verification suite.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 numeric failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ef2d/assembly.hpp"
#include "ef2d/filon.hpp"
#include "ef2d/io.hpp"
#include "ef2d/oracle.hpp"
#include "ef2d/run.hpp"

namespace {

using namespace ef2d;

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io::IoError("cannot open for writing: " + path);
    f << content;
    if (!f) throw io::IoError("write failed: " + path);
}

// Shared flag block; every subcommand that takes a RunConfig uses this.
void add_config_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--curve", cfg.curve_spec,
                    "geometry, e.g. circle:1, ellipse:2,1, kite:1");
    auto* n = cmd->add_option("--N", cfg.n_panels, "number of panels");
    auto* h = cmd->add_option("--target-h", cfg.target_h, "target panel arclength");
    auto* hl = cmd->add_option("--h-over-lambda", cfg.h_over_lambda,
                               "target panel arclength as fraction of wavelength");
    n->excludes(h)->excludes(hl);
    h->excludes(hl);
    auto* k = cmd->add_option("--k", cfg.k, "wavenumber (rad/m); 0 for static");
    auto* f = cmd->add_option("--freq", cfg.freq_hz, "frequency in Hz (k = 2 pi f / c)");
    k->excludes(f);
    cmd->add_option("--alpha", cfg.alpha_spec,
                    "filter cutoff: absolute (\"8\") or relative (\"3k\")");
    cmd->add_option("--kernel", cfg.kernel,
                    "static | dynamic | static-filtered | fourier-filtered | ms-filtered");
    cmd->add_option("--op", cfg.op, "operator: S | N | calderon");
    cmd->add_option("--ordering", cfg.ordering, "spectrum ordering: response | overlap");
    cmd->add_option("--eta", cfg.eta, "wave impedance");
    cmd->add_option("--threads", cfg.threads, "worker threads (0 = hardware)")
        ->envname("EF2D_THREADS");
    cmd->add_option("--pol", cfg.polarization, "polarization for solve: TM | TE");
    cmd->add_option("--incidence-deg", cfg.incidence_deg,
                    "plane-wave propagation direction, degrees from +x");
    cmd->set_config("--config", "", "key=value config file");
}

// ---------------------------------------------------------------------------

struct CheckTable {
    bool all_pass = true;
    std::vector<std::string> rows;  // name, error, tolerance, status

    void add(const std::string& name, double err, double tol) {
        const bool ok = err <= tol;
        all_pass = all_pass && ok;
        char line[160];
        std::snprintf(line, sizeof(line), "%-44s %12.3e %10.1e   %s", name.c_str(), err,
                      tol, ok ? "pass" : "FAIL");
        rows.push_back(line);
    }

    void print() const {
        std::printf("%-44s %12s %10s   %s\n", "check", "max error", "tol", "status");
        for (const auto& r : rows) std::printf("%s\n", r.c_str());
    }

    std::string csv() const {
        std::string out = "check,max_error,tolerance,status\n";
        for (const auto& r : rows) {
            // rows are fixed-format; re-split on whitespace from the right
            std::istringstream is(r);
            std::vector<std::string> parts;
            std::string tok;
            while (is >> tok) parts.push_back(tok);
            const std::string status = parts.back();
            const std::string tol = parts[parts.size() - 2];
            const std::string err = parts[parts.size() - 3];
            std::string name;
            for (std::size_t i = 0; i + 3 < parts.size(); ++i)
                name += (i ? " " : "") + parts[i];
            out += name + "," + err + "," + tol + "," + status + "\n";
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// quad-selftest: quick internal consistency checks of the quadrature engine.

int run_quad_selftest() {
    CheckTable t;

    {  // Filon vs closed form: f = 1 -> 2 sin(k)/k
        const auto plan = make_filon_plan([](double) { return 1.0; }, -1.0, 1.0);
        const double k = 3.7;
        const double got = oscillatory_integral(plan, k).value;
        t.add("filon constant integrand", std::fabs(got - 2.0 * std::sin(k) / k), 1e-12);
    }
    {  // Filon vs adaptive oracle on (2, 20), k = 5
        auto f = [](double u) { return 1.0 / std::sqrt(u * u - 1.0); };
        const auto plan = make_filon_plan(f, 2.0, 20.0);
        const double k = 5.0;
        const double got = oscillatory_integral(plan, k).value;
        const double want = integrate_adaptive(
            [&](double u) { return std::cos(k * u) * f(u); }, 2.0, 20.0, 1e-13);
        t.add("filon vs adaptive (2,20) k=5", std::fabs(got - want), 1e-10);
    }
    {  // endpoint-singular (1,2), k -> 0 limit acosh(2) = ln(2 + sqrt 3)
        const double got = endpoint_singular_integral(1.0, 2.0, 1e-8);
        t.add("endpoint singular k->0", std::fabs(got - std::acosh(2.0)), 1e-9);
    }
    {  // Mehler-Sonine tail continuity at the alpha = 2k split point; the
       // spread across the 4e-9*k probe interval is dominated by the smooth
       // alpha-derivative, so the admissible gap is well above roundoff
        const double k = 3.0, r = 0.7;
        const double lo = mehler_sonine_tail(r, k, 2.0 * k * (1.0 - 1e-9));
        const double hi = mehler_sonine_tail(r, k, 2.0 * k * (1.0 + 1e-9));
        t.add("mehler-sonine continuity at alpha=2k", std::fabs(hi - lo), 1e-7);
    }
    {  // Legendre coefficient decay of an analytic factor is exponential
        const auto plan =
            make_filon_plan([](double u) { return 1.0 / std::sqrt(u * u - 1.0); }, 2.0, 6.0);
        double tail = 0;
        for (std::size_t i = plan.coeffs.size() >= 4 ? plan.coeffs.size() - 4 : 0;
             i < plan.coeffs.size(); ++i)
            tail = std::max(tail, std::fabs(plan.coeffs[i]));
        t.add("filon coefficient decay", tail, 1e-12);
    }
    {  // combined log rule: exact moments of ln x and x ln x
        const auto& lr = cached_log_rule(10);
        const double m0 = lr.integrate01([](double u) { return std::log(u); });
        const double m1 = lr.integrate01([](double u) { return u * std::log(u); });
        t.add("log rule: int ln x = -1", std::fabs(m0 + 1.0), 1e-13);
        t.add("log rule: int x ln x = -1/4", std::fabs(m1 + 0.25), 1e-13);
    }
    {  // self-panel singular moment: int_0^1 int_0^1 a b ln|a-b| da db in the
       // substituted form int_0^1 ln(u) Phi(u) du used by the assembly, with
       // Phi(u) = int over the strips |a-b|=u of a*b = 2/3 - u + u^3/3, so
       // the exact value is -2/3 + 1/4 - 1/16 = -7/16
        const auto& lr = cached_log_rule(10);
        const double fast = lr.integrate01(
            [](double u) { return std::log(u) * (2.0 / 3.0 - u + u * u * u / 3.0); });
        t.add("self-panel log moment vs closed form", std::fabs(fast + 7.0 / 16.0), 1e-10);
    }

    t.print();
    return t.all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// verify: the oracle-reference suite (quick <= 60 s, full <= 15 min).

int run_verify(bool full, const std::string& artifact_path) {
    CheckTable t;

    {  // kernel oracle equivalence across all families
        std::mt19937 rng(20260826);
        std::uniform_real_distribution<double> ur(0.05, 2.5), uk(0.3, 4.0), ua(1.5, 12.0);
        double worst = 0;
        const int trials = full ? 20 : 8;
        for (int i = 0; i < trials; ++i) {
            const double r = ur(rng), k = uk(rng), ratio = ua(rng);
            for (KernelFamily fam :
                 {KernelFamily::StaticFiltered, KernelFamily::DynamicFourierFiltered,
                  KernelFamily::DynamicMsFiltered}) {
                KernelSpec spec{fam, fam == KernelFamily::StaticFiltered ? 0.0 : k,
                                fam == KernelFamily::StaticFiltered ? ratio : ratio * k};
                worst = std::max(worst,
                                 std::abs(kernel_value(spec, r) - oracle::kernel(spec, r)));
            }
        }
        t.add("filtered kernels vs adaptive oracle", worst, 1e-8);
    }
    {  // Bessel integral representations
        double worst = 0;
        for (double x : {0.2, 1.0, 4.0, 11.0, 19.0}) {
            worst = std::max(worst, std::fabs(oracle::j0_integral(x) - bessel::j0(x)));
            worst = std::max(worst, std::fabs(oracle::y0_integral(x) - bessel::y0(x)));
        }
        t.add("J0/Y0 integral representations", worst, 1e-11);
    }
    {  // Mehler-Sonine alpha -> infinity consistency (mutation-sensitive: a
       // sign flip in the Eq. (9) tail breaks this limit)
        const double k = 2.0, r = 0.9;
        const KernelSpec ms{KernelFamily::DynamicMsFiltered, k, 1000.0 * k};
        const KernelSpec dyn{KernelFamily::DynamicUnfiltered, k, 0.0};
        const double err = std::abs(kernel_value(ms, r) - kernel_value(dyn, r));
        t.add("ms-filtered alpha->inf limit", err, 1e-4);
    }
    {  // static circle symbols vs assembled Galerkin S (Rayleigh quotients)
        const double a = 0.8;
        const std::size_t N = full ? 128 : 64;
        const auto curve = parse_curve_spec("circle:0.8");
        const CurveMesh mesh = build_mesh(curve, N);
        const OperatorMatrix S =
            assemble_S(mesh, KernelSpec{KernelFamily::StaticUnfiltered, 0, 0}, 0);
        const GramMatrix G = assemble_G(mesh);
        double worst = 0;
        for (int m = 0; m <= 6; ++m) {
            Eigen::VectorXcd c(N), s(N);
            for (std::size_t i = 0; i < N; ++i) {
                const double th = 2.0 * M_PI * double(i) / double(N);
                c[i] = std::cos(m * th);
                s[i] = std::sin(m * th);
            }
            const auto ray = [&](const Eigen::VectorXcd& v) {
                return (v.adjoint() * S.entries * v)(0).real() /
                       (v.adjoint() * G.entries.cast<std::complex<double>>() * v)(0).real();
            };
            const double want = oracle::circle_symbol_S_static(a, m);
            worst = std::max(worst, std::fabs(ray(c) - want));
            if (m > 0) worst = std::max(worst, std::fabs(ray(s) - want));
        }
        t.add("static circle symbols vs assembly", worst, full ? 5e-3 : 2e-2);
    }
    {  // optical theorem for the scattering series
        const auto mie = oracle::mie_series_current_tm(1.0, 1.0);
        t.add("optical theorem residual (ka=1)", mie.optical_theorem_residual(), 1e-8);
    }
    if (full) {
        {  // dynamic circle symbols vs assembly at ka = 2
            const double a = 1.0, k = 2.0;
            const std::size_t N = 128;
            const CurveMesh mesh = build_mesh(parse_curve_spec("circle:1"), N);
            const KernelSpec spec{KernelFamily::DynamicUnfiltered, k, 0};
            const OperatorMatrix S = assemble_S(mesh, spec, 0);
            const OperatorMatrix Nm = assemble_N(mesh, spec, 0);
            const GramMatrix G = assemble_G(mesh);
            double worst = 0;
            for (int m : {0, 1, 2, 4, 8}) {
                Eigen::VectorXcd v(N);
                for (std::size_t i = 0; i < N; ++i) {
                    const double th = 2.0 * M_PI * double(i) / double(N);
                    v[i] = std::polar(1.0, m * th);
                }
                const std::complex<double> den =
                    (v.adjoint() * G.entries.cast<std::complex<double>>() * v)(0);
                const std::complex<double> sym_s = (v.adjoint() * S.entries * v)(0) / den;
                const std::complex<double> sym_n = (v.adjoint() * Nm.entries * v)(0) / den;
                worst = std::max(
                    worst, std::abs(sym_s - oracle::circle_symbol_dynamic(
                                                a, m, k, oracle::CircleOp::S)));
                worst = std::max(
                    worst, std::abs(sym_n - oracle::circle_symbol_dynamic(
                                                a, m, k, oracle::CircleOp::N)));
            }
            t.add("dynamic circle symbols vs assembly", worst, 5e-3);
        }
        {  // filtered circle symbol alpha -> infinity consistency; the radial
           // integral retains an O(alpha^-1 log alpha) remainder from the
           // r <~ 1/alpha region (measured 1.6e-4 at alpha/k = 1000)
            const double a = 1.0, k = 2.0;
            const auto got = oracle::circle_symbol_filtered(
                a, 2, k, 1000.0 * k, KernelFamily::DynamicFourierFiltered);
            const auto want = oracle::circle_symbol_dynamic(a, 2, k, oracle::CircleOp::S);
            t.add("filtered symbol alpha->inf limit", std::abs(got - want), 5e-4);
        }
        {  // TM solver end-to-end vs scattering series at ka = 1
            RunConfig cfg;
            cfg.curve_spec = "circle:1";
            cfg.n_panels = 256;
            cfg.k = 1.0;
            cfg.kernel = "dynamic";
            const auto res = run_solve(resolve_config(cfg));
            const auto mie = oracle::mie_series_current_tm(1.0, 1.0, 376.730313668);
            double num = 0, den = 0;
            for (std::size_t i = 0; i < res.mesh.size(); ++i) {
                const double th =
                    std::atan2(res.mesh.nodes[i].y, res.mesh.nodes[i].x);
                const std::complex<double> want = mie.current(th);
                num += std::norm(res.current[static_cast<Eigen::Index>(i)] - want);
                den += std::norm(want);
            }
            t.add("TM solve vs scattering series (L2 rel)", std::sqrt(num / den), 0.02);
        }
    }

    t.print();
    if (full && !artifact_path.empty()) {
        write_text_file(artifact_path, t.csv());
        std::printf("agreement table written to %s\n", artifact_path.c_str());
    }
    return t.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D EFIE boundary-element solver with spectrally filtered kernels"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string output = "ef2d_out";

    auto* sp = app.add_subcommand("spectrum",
                                  "mode responses of the selected operator, filtered and "
                                  "unfiltered side by side");
    add_config_flags(sp, cfg);
    sp->add_option("-o,--output", output, "output path stem");

    auto* kt = app.add_subcommand("kernel-trace", "kernel values over a log-spaced r grid");
    add_config_flags(kt, cfg);
    double r_min = 1e-3, r_max = 10.0;
    int trace_points = 200;
    kt->add_option("--r-min", r_min, "smallest positive radius");
    kt->add_option("--r-max", r_max, "largest radius");
    kt->add_option("--points", trace_points, "grid size");
    kt->add_option("-o,--output", output, "output path stem");

    auto* as = app.add_subcommand("assemble", "assemble an operator matrix and export it");
    add_config_flags(as, cfg);
    as->add_option("-o,--output", output, "output path stem");

    auto* so = app.add_subcommand("solve", "plane-wave scattering solve");
    add_config_flags(so, cfg);
    so->add_option("-o,--output", output, "output path stem");

    auto* ve = app.add_subcommand("verify", "run the oracle-reference suite");
    std::string level = "quick";
    std::string agreement_path = "agreement_table.csv";
    ve->add_option("level", level, "quick | full");
    ve->add_option("--agreement-table", agreement_path,
                   "CSV artifact path (full level only)");

    auto* qs = app.add_subcommand("quad-selftest", "quadrature engine self-checks");
    (void)qs;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(qs)) return run_quad_selftest();
        if (app.got_subcommand(ve)) {
            if (level != "quick" && level != "full")
                throw ConfigError("verify level must be quick or full");
            return run_verify(level == "full", level == "full" ? agreement_path : "");
        }

        const ResolvedConfig r = resolve_config(cfg);
        if (app.got_subcommand(sp)) {
            const SpectrumArtifacts art = run_spectrum(r);
            write_text_file(output + ".csv", art.csv);
            write_text_file(output + ".json", art.json);
            std::printf("wrote %s.csv (%zu rows), %s.json\n", output.c_str(),
                        art.report.rows.size(), output.c_str());
            if (art.unfiltered) {
                write_text_file(output + "_unfiltered.csv", art.unfiltered_csv);
                std::printf("wrote %s_unfiltered.csv\n", output.c_str());
            }
        } else if (app.got_subcommand(kt)) {
            std::ostringstream os;
            io::write_kernel_trace_csv(os, r.spec, trace_radii(r.spec, r_min, r_max,
                                                               trace_points),
                                       {"ef2d kernel-trace " + config_summary(r)});
            write_text_file(output + ".csv", os.str());
            std::printf("wrote %s.csv\n", output.c_str());
        } else if (app.got_subcommand(as)) {
            const CurveMesh mesh = build_mesh(r.curve, r.n_panels);
            Eigen::MatrixXcd A;
            if (r.op == "calderon") {
                const GramMatrix G = assemble_G(mesh);
                A = calderon_product(assemble_S(mesh, r.spec, r.threads),
                                     assemble_N(mesh, r.spec, r.threads), G)
                        .entries;
            } else {
                A = ef2d::detail::assemble_operator(mesh, r.spec, r.op, r.threads);
            }
            io::write_matrix_binary_file(output + ".bin", A);
            std::printf("wrote %s.bin\n", output.c_str());
            if (A.rows() <= 256) {
                std::ofstream f(output + ".csv", std::ios::binary);
                io::write_matrix_csv(f, A, {"ef2d assemble " + config_summary(r)});
                std::printf("wrote %s.csv\n", output.c_str());
            }
        } else if (app.got_subcommand(so)) {
            const SolveResult res = run_solve(r);
            write_text_file(output + ".csv", res.csv);
            std::printf("wrote %s.csv (%zu nodes)\n", output.c_str(), static_cast<std::size_t>(res.mesh.size()));
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    }
}
