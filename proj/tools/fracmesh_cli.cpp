// Command line front end for the fracmesh library.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fracmesh/fracmesh.hpp"

using namespace fracmesh;

namespace {

struct Geometry {
    double a = 1.0, eps = 1.0, b = 4.0;
    int m = 2;
    int kase = 1;
    double h = 1.0 / 16;  // fine step

    void add_to(CLI::App* app) {
        app->add_option("--a", a, "left end of the transition zone");
        app->add_option("--eps", eps, "half width of the transition zone");
        app->add_option("--b", b, "right end of the domain");
        app->add_option("--m", m, "coarse to fine step ratio")->check(CLI::PositiveNumber);
        app->add_option("--case", kase, "1: fine steps on the left, 2: fine steps on the right")
            ->check(CLI::IsMember({1, 2}));
        app->add_option("--step", h, "fine step")->check(CLI::PositiveNumber);
    }
    MeshConfig mesh() const {
        return build_mesh(SplitSpec(a, eps, b), kase == 1 ? MeshCase::FineLeft : MeshCase::FineRight, h, m);
    }
};

MeshCase to_case(int k) { return k == 1 ? MeshCase::FineLeft : MeshCase::FineRight; }

// A test function together with its left derivative when known.
struct NamedFunction {
    Field value;
    std::function<double(double)> derivative;  // empty if unknown
};

NamedFunction parse_function(const std::string& name, double alpha) {
    if (name.rfind("monomial:", 0) == 0) {
        const double p = std::stod(name.substr(9));
        return {[p](double x) { return p == 0.0 ? 1.0 : std::pow(x, p); },
                [p, alpha](double x) { return rl_exact_monomial(p, alpha, x); }};
    }
    if (name.rfind("example-u", 0) == 0) {
        const auto ex = make_example(std::stoi(name.substr(9)), alpha);
        return {[ex](double x) { return ex.profile(x); },
                [ex, alpha](double x) {
                    double d = 0.0;
                    for (auto [c, p] : ex.terms) d += c * rl_exact_monomial(p, alpha, x);
                    return d;
                }};
    }
    throw std::invalid_argument("unknown function '" + name + "' (use monomial:P or example-uJ)");
}

void print_csv_rows(const std::vector<StudyRow>& rows, const std::string& out) {
    if (out.empty())
        std::cout << to_csv(rows);
    else
        emit_csv(rows, out);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int report_checks(const std::vector<StudyRow>& rows, const std::string& manifest_path) {
    const auto outcomes = evaluate_checks(rows, read_file(manifest_path));
    int failed = 0;
    for (const auto& c : outcomes) {
        std::cerr << (c.pass ? "PASS  " : "FAIL  ") << c.line << "  (" << c.detail << ")\n";
        failed += !c.pass;
    }
    return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional derivatives on two-step meshes"};
    app.require_subcommand(1);
    int status = 0;

    // weights
    auto* wcmd = app.add_subcommand("weights", "print Grunwald, shifted or interpolated weights");
    double w_alpha = 1.5;
    long w_n = 10;
    std::string w_scheme = "g";
    std::optional<int> w_m, w_q;
    wcmd->add_option("--alpha", w_alpha)->required();
    wcmd->add_option("--n", w_n, "highest index")->required();
    wcmd->add_option("--scheme", w_scheme)->check(CLI::IsMember({"g", "11", "21", "22"}));
    wcmd->add_option("--m", w_m, "blend denominator");
    wcmd->add_option("--q", w_q, "blend numerator, 0..m");
    wcmd->callback([&] {
        FractionalOrder{w_alpha};
        std::vector<double> v = w_scheme == "g" ? grunwald_coeffs(w_alpha, w_n)
                                                : shifted_weights(SchemeParams::from_label(w_scheme, w_alpha), w_alpha, w_n);
        if (w_m || w_q) {
            if (!w_m || !w_q) throw std::invalid_argument("--m and --q go together");
            v = interp_weights(v, *w_q, *w_m);
        }
        for (double x : v) std::printf("%.17g\n", x);
    });

    // split
    auto* scmd = app.add_subcommand("split", "print x, M1 v, M2 v on a uniform grid");
    double s_a = 1.0, s_eps = 1.0, s_b = 4.0, s_h = 1.0 / 32, s_alpha = 1.5;
    std::string s_fn = "monomial:2";
    scmd->add_option("--a", s_a);
    scmd->add_option("--eps", s_eps);
    scmd->add_option("--b", s_b);
    scmd->add_option("--step", s_h)->check(CLI::PositiveNumber);
    scmd->add_option("--fn", s_fn, "monomial:P or example-uJ");
    scmd->add_option("--alpha", s_alpha, "order used by example-uJ profiles");
    scmd->callback([&] {
        const SplitSpec spec(s_a, s_eps, s_b);
        const auto f = parse_function(s_fn, s_alpha);
        const long n = detail::exact_multiple(s_b / s_h, "b");
        std::vector<double> x(n + 1), v(n + 1);
        for (long j = 0; j <= n; ++j) {
            x[j] = j * s_h;
            v[j] = f.value(x[j]);
        }
        auto [p1, p2] = split(spec, x, v);
        for (long j = 0; j <= n; ++j) std::printf("%.17g %.17g %.17g\n", x[j], p1[j], p2[j]);
    });

    // derivative
    auto* dcmd = app.add_subcommand("derivative", "left derivative on a two-step mesh");
    Geometry d_geo;
    double d_alpha = 1.5;
    std::string d_fn = "monomial:3.5", d_scheme2 = "11";
    std::optional<std::string> d_scheme1;
    d_geo.add_to(dcmd);
    dcmd->add_option("--alpha", d_alpha)->required();
    dcmd->add_option("--fn", d_fn, "monomial:P or example-uJ");
    dcmd->add_option("--scheme2", d_scheme2, "scheme of the coarse part")->check(CLI::IsMember({"11", "21", "22"}));
    dcmd->add_option("--scheme1", d_scheme1, "scheme of the fine part (default: same as --scheme2)")
        ->check(CLI::IsMember({"11", "21", "22"}));
    dcmd->callback([&] {
        const auto mesh = d_geo.mesh();
        const auto f = parse_function(d_fn, d_alpha);
        // scheme2 always names the coarse part; which side that is depends on the case
        const auto coarse = SchemeParams::from_label(d_scheme2, d_alpha);
        const auto fine = SchemeParams::from_label(d_scheme1.value_or(d_scheme2), d_alpha);
        const SchemePair pair = d_geo.kase == 1 ? SchemePair{fine, coarse} : SchemePair{coarse, fine};
        const auto v = nonuniform_derivative(f.value, d_alpha, mesh, pair);
        std::printf("# node approx exact abs_error\n");
        for (long n = 1; n < mesh.N(); ++n) {
            const double x = mesh.node(n), ex = f.derivative(x);
            std::printf("%.17g %.17g %.17g %.3e\n", x, v[n - 1], ex, std::abs(v[n - 1] - ex));
        }
    });

    // assemble
    auto* acmd = app.add_subcommand("assemble", "build the Crank-Nicolson matrices");
    Geometry a_geo;
    double a_alpha = 1.5, a_K = 1.0, a_tau = 1.0 / 400;
    std::string a_scheme = "11+11", a_side = "left", a_dump, a_which = "D";
    a_geo.add_to(acmd);
    acmd->add_option("--alpha", a_alpha)->required();
    acmd->add_option("--scheme", a_scheme);
    acmd->add_option("--K", a_K);
    acmd->add_option("--tau", a_tau);
    acmd->add_option("--side", a_side)->check(CLI::IsMember({"left", "right"}));
    acmd->add_option("--dump", a_dump, "write the matrix as row col value lines");
    acmd->add_option("--matrix", a_which, "matrix to dump")->check(CLI::IsMember({"D", "L", "R"}));
    acmd->callback([&] {
        const auto mesh = a_geo.mesh();
        const auto pair = SchemePair::from_label(a_scheme, a_alpha);
        const auto sys = a_side == "left" ? assemble_left(mesh, a_alpha, pair, a_K, a_tau, AssemblyOptions{false})
                                          : assemble_right(mesh, a_alpha, pair, a_K, a_tau, AssemblyOptions{false});
        std::printf("nodes %ld unknowns %ld h1 %.17g h2 %.17g\n", mesh.N() + 1, sys.size(), mesh.h1(), mesh.h2());
        if (!a_dump.empty()) {
            const Matrix& M = a_which == "D" ? sys.D : a_which == "L" ? sys.L : sys.R;
            std::FILE* f = std::fopen(a_dump.c_str(), "w");
            if (!f) throw std::runtime_error("cannot open '" + a_dump + "' for writing");
            for (long r = 0; r < M.rows(); ++r)
                for (long c = 0; c < M.cols(); ++c)
                    if (M(r, c) != 0.0) std::fprintf(f, "%ld %ld %.17g\n", r, c, M(r, c));
            std::fclose(f);
        }
    });

    // solve
    auto* vcmd = app.add_subcommand("solve", "solve one manufactured example");
    Geometry v_geo;
    int v_example = 1;
    double v_alpha = 1.5, v_tau = 1.0 / 400, v_T = 1.0, v_K = 1.0;
    std::string v_scheme = "11+11", v_snap;
    v_geo.add_to(vcmd);
    vcmd->add_option("--example", v_example)->check(CLI::Range(1, 4));
    vcmd->add_option("--alpha", v_alpha)->required();
    vcmd->add_option("--scheme", v_scheme);
    vcmd->add_option("--tau", v_tau)->check(CLI::PositiveNumber);
    vcmd->add_option("--T", v_T)->check(CLI::PositiveNumber);
    vcmd->add_option("--K", v_K);
    vcmd->add_option("--snapshots", v_snap, "write every time level");
    vcmd->callback([&] {
        const auto mesh = v_geo.mesh();
        const long M = std::lround(v_T / v_tau);
        if (std::abs(M * v_tau - v_T) > 1e-9 * v_T) throw std::invalid_argument("T must be a multiple of tau");
        const auto prob = make_example(v_example, v_alpha, v_K).problem(v_T, M);
        const auto sys = assemble_left(mesh, v_alpha, SchemePair::from_label(v_scheme, v_alpha), v_K, prob.tau(),
                                       AssemblyOptions{false});
        const auto res = solve(prob, sys, SolveOptions{!v_snap.empty()});
        std::printf("error %.6e\n", *res.final_error);
        if (!v_snap.empty()) {
            std::ofstream f(v_snap);
            if (!f) throw std::runtime_error("cannot open '" + v_snap + "' for writing");
            f.precision(17);
            for (std::size_t i = 0; i < res.levels.size(); ++i) {
                f << "t " << res.times[i] << '\n';
                for (long n = 0; n <= mesh.N(); ++n) f << mesh.node(n) << ' ' << res.levels[i](n) << '\n';
            }
        }
    });

    // converge
    // keys go under a [converge] section, named like the flags
    app.set_config("--config", "", "key=value study file");
    app.fallthrough();
    auto* ccmd = app.add_subcommand("converge", "run a convergence study and print CSV");
    StudySpec study;
    int c_case = 1;
    std::string c_out, c_check;
    ccmd->add_option("--example", study.example)->check(CLI::Range(1, 4));
    ccmd->add_option("--scheme", study.scheme);
    ccmd->add_option("--alphas", study.alphas)->delimiter(',');
    ccmd->add_option("--levels", study.levels, "inverse coarse steps")->delimiter(',');
    ccmd->add_option("--m", study.m)->check(CLI::PositiveNumber);
    ccmd->add_option("--case", c_case)->check(CLI::IsMember({1, 2}));
    ccmd->add_option("--a", study.a);
    ccmd->add_option("--eps", study.eps);
    ccmd->add_option("--b", study.b);
    ccmd->add_option("--T", study.T);
    ccmd->add_option("--M", study.M, "number of time steps");
    ccmd->add_option("--K", study.K);
    ccmd->add_option("--threads", study.threads);
    ccmd->add_option("--out", c_out, "CSV path (default stdout)");
    ccmd->add_option("--check", c_check, "manifest of tolerances; exit code 1 if any fails");
    ccmd->callback([&] {
        study.mesh_case = to_case(c_case);
        const auto rows = run_study(study);
        print_csv_rows(rows, c_out);
        if (!c_check.empty()) status = report_checks(rows, c_check);
    });

    // spectrum
    auto* rcmd = app.add_subcommand("spectrum", "spectral radius of the iteration matrix over alpha and h");
    std::string r_scheme = "11";
    int r_case = 1, r_m = 2;
    double r_tau = 1.0 / 400, r_K = 1.0;
    std::vector<double> r_alphas = {1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9};
    std::vector<long> r_levels = {8, 16, 32, 64};
    rcmd->add_option("--scheme", r_scheme);
    rcmd->add_option("--case", r_case)->check(CLI::IsMember({1, 2}));
    rcmd->add_option("--m", r_m)->check(CLI::PositiveNumber);
    rcmd->add_option("--tau", r_tau);
    rcmd->add_option("--K", r_K);
    rcmd->add_option("--alphas", r_alphas)->delimiter(',');
    rcmd->add_option("--levels", r_levels)->delimiter(',');
    rcmd->callback([&] {
        std::printf("alpha h radius\n");
        for (const auto& row : spectrum_sweep(r_scheme, to_case(r_case), r_m, r_alphas, r_levels, r_tau, r_K))
            std::printf("%g %.17g %.17g\n", row.alpha, row.h, row.radius);
    });

    // precondition
    auto* pcmd = app.add_subcommand("precondition", "condition numbers of L and of the band-preconditioned L");
    std::vector<std::string> p_schemes = {"11", "21", "22"};
    std::vector<double> p_alphas = {1.2, 1.4, 1.6, 1.8};
    std::vector<long> p_levels = {8, 16, 32, 64, 128};
    int p_m = 5;
    pcmd->add_option("--schemes", p_schemes)->delimiter(',');
    pcmd->add_option("--alphas", p_alphas)->delimiter(',');
    pcmd->add_option("--levels", p_levels, "inverse coarse steps")->delimiter(',');
    pcmd->add_option("--m", p_m)->check(CLI::PositiveNumber);
    pcmd->callback([&] {
        std::printf("scheme,alpha,h2,cond_L,cond_PL\n");
        for (const auto& s : p_schemes)
            for (long q : p_levels)
                for (double a : p_alphas) {
                    const auto c = condition_cell(s, a, q, p_m);
                    std::printf("%s+%s,%g,%g,%.6g,%.6g\n", s.c_str(), s.c_str(), a, c.h2, c.cond_L, c.cond_PL);
                }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return status;
}
