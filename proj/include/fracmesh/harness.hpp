#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fracmesh/assembly.hpp"
#include "fracmesh/cn_solver.hpp"
#include "fracmesh/fracop.hpp"
#include "fracmesh/mesh.hpp"
#include "fracmesh/weights.hpp"

namespace fracmesh {

// Solution e^{-t} * sum_j c_j x^{p_j} of u_t = K D^alpha u + f on (0,4) x (0,1].
struct ManufacturedCase {
    int id = 0;
    double alpha = 0.0;
    double K = 1.0;
    std::vector<std::pair<double, double>> terms;  // (coefficient, power)
    SpaceTimeField source;

    double profile(double x) const {
        double s = 0.0;
        for (auto [c, p] : terms) s += p == 0.0 ? c : c * std::pow(x, p);
        return s;
    }
    double exact(double x, double t) const { return std::exp(-t) * profile(x); }
    double initial(double x) const { return profile(x); }
    double left_trace(double t) const { return exact(0.0, t); }
    double right_trace(double t) const { return exact(4.0, t); }

    // u_t - K * D^alpha u - f using the monomial derivative term by term.
    double residual(double x, double t) const {
        double d = 0.0;
        for (auto [c, p] : terms) d += c * rl_exact_monomial(p, alpha, x);
        return -exact(x, t) - K * std::exp(-t) * d - source(x, t);
    }

    DiffusionProblem problem(double T = 1.0, long M = 400) const {
        DiffusionProblem p;
        p.K = K;
        p.alpha = alpha;
        p.source = source;
        auto self = *this;
        p.phi0 = [self](double x) { return self.initial(x); };
        p.u0 = [self](double t) { return self.left_trace(t); };
        p.ub = [self](double t) { return self.right_trace(t); };
        p.T = T;
        p.M = M;
        p.exact = [self](double x, double t) { return self.exact(x, t); };
        return p;
    }
};

inline ManufacturedCase make_example(int id, double alpha, double K = 1.0) {
    ManufacturedCase c;
    c.id = id;
    c.alpha = alpha;
    c.K = K;
    const double a = alpha;
    switch (id) {
        case 1:
            c.terms = {{1.0, 2.0 + a}, {1.0, 2.0}};
            c.source = [a, K](double x, double t) {
                return -std::exp(-t) * (std::pow(x, 2 + a) + x * x +
                                        K * (std::tgamma(3 + a) / 2 * x * x + 2 / std::tgamma(3 - a) * std::pow(x, 2 - a)));
            };
            break;
        case 2:
            c.terms = {{1.0, a / 4}, {1.0, 0.0}};
            c.source = [a, K](double x, double t) {
                return -std::exp(-t) * (K * (std::tgamma(1 + a / 4) / std::tgamma(1 - 3 * a / 4) * std::pow(x, -3 * a / 4) +
                                             std::pow(x, -a) / std::tgamma(1 - a)) +
                                        std::pow(x, a / 4) + 1.0);
            };
            break;
        case 3:
            c.terms = {{1.0, 1.0 + a}, {1.0, 1.0}};
            c.source = [a, K](double x, double t) {
                return -std::exp(-t) * (std::pow(x, 1 + a) + x +
                                        K * (std::tgamma(2 + a) * x + std::pow(x, 1 - a) / std::tgamma(2 - a)));
            };
            break;
        case 4: {
            const double p = 1.0 + std::abs(a - 1.5) / 2.0;
            c.terms = {{1.0, p}};
            c.source = [a, p, K](double x, double t) {
                return -std::exp(-t) *
                       (std::pow(x, p) + K * std::tgamma(1 + p) * reciprocal_gamma(1 + p - a) * std::pow(x, p - a));
            };
            break;
        }
        default: throw std::invalid_argument("unknown example id " + std::to_string(id) + " (expected 1..4)");
    }
    return c;
}

struct StudySpec {
    int example = 1;
    std::string scheme = "11+11";
    std::vector<double> alphas = {1.2, 1.4, 1.6, 1.8};
    std::vector<long> levels = {8, 16, 32, 64, 128};  // inverse of the coarse step
    double a = 1.0, eps = 1.0, b = 4.0;
    int m = 1;
    MeshCase mesh_case = MeshCase::FineLeft;
    double T = 1.0;
    long M = 400;
    double K = 1.0;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct StudyRow {
    std::string scheme;
    double alpha = 0.0;
    double h1 = 0.0, h2 = 0.0;
    double error = std::numeric_limits<double>::quiet_NaN();
    double rate = std::numeric_limits<double>::quiet_NaN();
    std::string failure;  // empty when the cell succeeded

    double coarse_h() const { return std::max(h1, h2); }
};

inline MeshConfig study_mesh(const StudySpec& s, long level) {
    return MeshConfig(SplitSpec(s.a, s.eps, s.b), s.mesh_case, level * s.m, s.m);
}

inline StudyRow run_cell(const StudySpec& s, double alpha, long level) {
    StudyRow row;
    row.scheme = s.scheme;
    row.alpha = alpha;
    try {
        const MeshConfig mesh = study_mesh(s, level);
        row.h1 = mesh.h1();
        row.h2 = mesh.h2();
        const auto ex = make_example(s.example, alpha, s.K);
        const auto prob = ex.problem(s.T, s.M);
        const auto sys = assemble_left(mesh, alpha, SchemePair::from_label(s.scheme, alpha), s.K, prob.tau(),
                                       AssemblyOptions{false});
        row.error = *solve(prob, sys).final_error;
    } catch (const std::exception& e) {
        row.failure = e.what();
    }
    return row;
}

// Runs `count` independent jobs on a small pool; results keep job order.
template <class R, class F>
std::vector<R> run_jobs(std::size_t count, unsigned threads, F&& job) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<R> out(count);
    if (threads == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = job(i);
        return out;
    }
    std::mutex mu;
    std::size_t next = 0;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= count) return;
                i = next++;
            }
            out[i] = job(i);
        }
    };
    std::vector<std::future<void>> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, count); ++t) pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
    return out;
}

inline void fill_rates(std::vector<StudyRow>& rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].rate = std::numeric_limits<double>::quiet_NaN();
        if (i == 0 || rows[i - 1].alpha != rows[i].alpha || rows[i - 1].scheme != rows[i].scheme) continue;
        const auto& p = rows[i - 1];
        if (!p.failure.empty() || !rows[i].failure.empty()) continue;
        if (p.error > 0.0 && rows[i].error > 0.0)
            rows[i].rate = std::log(p.error / rows[i].error) / std::log(p.coarse_h() / rows[i].coarse_h());
    }
}

// Alpha-major, level-minor rows.
inline std::vector<StudyRow> run_study(const StudySpec& s) {
    for (std::size_t i = 1; i < s.levels.size(); ++i)
        if (s.levels[i] <= s.levels[i - 1]) throw std::invalid_argument("study levels must strictly refine");
    const std::size_t L = s.levels.size();
    auto rows = run_jobs<StudyRow>(s.alphas.size() * L, s.threads,
                                   [&](std::size_t k) { return run_cell(s, s.alphas[k / L], s.levels[k % L]); });
    fill_rates(rows);
    return rows;
}

inline std::string format_sig(double v, int digits = 6) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline std::string to_csv(const std::vector<StudyRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("refusing to write an empty table");
    std::ostringstream os;
    os << "scheme,alpha,h1,h2,error,rate\n";
    for (const auto& r : rows)
        os << r.scheme << ',' << format_sig(r.alpha) << ',' << format_sig(r.h1) << ',' << format_sig(r.h2) << ','
           << (r.failure.empty() ? format_sig(r.error) : "error") << ',' << format_sig(r.rate) << '\n';
    return os.str();
}

inline void emit_csv(const std::vector<StudyRow>& rows, const std::string& path) {
    const std::string text = to_csv(rows);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::vector<StudyRow> parse_csv_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "scheme,alpha,h1,h2,error,rate")
        throw std::invalid_argument("missing or unexpected CSV header");
    std::vector<StudyRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (cells.size() != 6) throw std::invalid_argument("bad CSV row: " + line);
        StudyRow r;
        r.scheme = cells[0];
        r.alpha = std::stod(cells[1]);
        r.h1 = std::stod(cells[2]);
        r.h2 = std::stod(cells[3]);
        if (cells[4] == "error")
            r.failure = "error";
        else
            r.error = std::stod(cells[4]);
        if (!cells[5].empty()) r.rate = std::stod(cells[5]);
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<StudyRow> parse_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_csv_text(ss.str());
}

// ---- static operator studies -------------------------------------------------------------

// Error table of the unsplit hybrid sums for u = x^{1+alpha}, measured over coarse nodes n*h1.
inline std::vector<StudyRow> naive_study(NaiveVariant variant, const std::vector<double>& alphas,
                                         const std::vector<long>& coarse_inverses, int m = 2, double a = 1.0 / 3.0,
                                         double b = 1.0) {
    std::vector<StudyRow> rows;
    for (double alpha : alphas)
        for (long q : coarse_inverses) {
            const auto u = [alpha](double x) { return std::pow(x, 1.0 + alpha); };
            const auto v = naive_nonuniform(u, alpha, q, m, a, b, variant);
            const double h1 = 1.0 / q;
            std::vector<double> e(v.size());
            for (std::size_t n = 0; n < v.size(); ++n)
                e[n] = v[n] - rl_exact_monomial(1.0 + alpha, alpha, (n + 1) * h1);
            rows.push_back({variant == NaiveVariant::Phi ? "phi" : "psi", alpha, h1, h1 / m, uniform_l2(h1, e)});
        }
    fill_rates(rows);
    return rows;
}

// Pointwise error of the hybrid sum at x = 1.
inline std::vector<StudyRow> naive_point_study(const std::vector<double>& alphas, const std::vector<long>& coarse_inverses,
                                               int m = 2, double a = 1.0 / 3.0, double x = 1.0) {
    std::vector<StudyRow> rows;
    for (double alpha : alphas)
        for (long q : coarse_inverses) {
            const auto u = [alpha](double y) { return std::pow(y, 1.0 + alpha); };
            const auto v = naive_nonuniform(u, alpha, q, m, a, x, NaiveVariant::Phi);
            const double err = std::abs(v.back() - rl_exact_monomial(1.0 + alpha, alpha, x));
            rows.push_back({"phi@x", alpha, 1.0 / q, 1.0 / (q * m), err});
        }
    fill_rates(rows);
    return rows;
}

inline std::vector<StudyRow> mollified_study(SplitVariant variant, const std::vector<double>& alphas,
                                             const std::vector<long>& coarse_inverses, int m = 2,
                                             const SplitSpec& spec = SplitSpec(1.0, 1.0, 4.0)) {
    std::vector<StudyRow> rows;
    for (double alpha : alphas)
        for (long q : coarse_inverses) {
            const auto u = [alpha](double x) { return std::pow(x, 1.0 + alpha); };
            const auto v = mollified_first_order(u, alpha, spec, q, m, variant);
            const double h1 = 1.0 / q;
            std::vector<double> e(v.size());
            for (std::size_t n = 0; n < v.size(); ++n)
                e[n] = v[n] - rl_exact_monomial(1.0 + alpha, alpha, (n + 1) * h1);
            rows.push_back({variant == SplitVariant::CoarseLeft ? "split-coarse-left" : "split-coarse-right", alpha, h1,
                            h1 / m, uniform_l2(h1, e)});
        }
    fill_rates(rows);
    return rows;
}

// ---- stability and conditioning sweeps ---------------------------------------------------

struct SpectrumRow {
    double alpha;
    double h;  // coarse step
    double radius;
};

inline std::vector<SpectrumRow> spectrum_sweep(const std::string& scheme, MeshCase kase, int m,
                                               const std::vector<double>& alphas, const std::vector<long>& levels,
                                               double tau = 1.0 / 400.0, double K = 1.0,
                                               const SplitSpec& spec = SplitSpec(1.0, 1.0, 4.0), unsigned threads = 0) {
    const std::size_t L = levels.size();
    return run_jobs<SpectrumRow>(alphas.size() * L, threads, [&](std::size_t k) {
        const double alpha = alphas[k / L];
        const MeshConfig mesh(spec, kase, levels[k % L] * m, m);
        const auto sys =
            assemble_left(mesh, alpha, SchemePair::from_label(scheme, alpha), K, tau, AssemblyOptions{false});
        return SpectrumRow{alpha, std::max(mesh.h1(), mesh.h2()), iteration_matrix_radius(sys)};
    });
}

struct ConditionRow {
    std::string scheme;
    double alpha;
    double h2;
    double cond_L;
    double cond_PL;
};

inline ConditionRow condition_cell(const std::string& scheme, double alpha, long coarse_inverse, int m = 5,
                                   double tau = 1.0 / 400.0, double K = 1.0,
                                   const SplitSpec& spec = SplitSpec(1.0, 1.0, 4.0)) {
    const MeshConfig mesh(spec, MeshCase::FineLeft, coarse_inverse * m, m);
    const auto sys = assemble_left(mesh, alpha, SchemePair::from_label(scheme, alpha), K, tau, AssemblyOptions{false});
    const auto pre = precondition(sys.L, m);
    return {scheme, alpha, mesh.h2(), condition_number_2norm(sys.L), condition_number_2norm(pre.product)};
}

// ---- acceptance manifests ----------------------------------------------------------------

// One check per line:
//   error  alpha=A level=Q target=E rtol=R
//   rate   alpha=A level=Q min=LO max=HI
//   fitted alpha=A last=K min=LO max=HI
// `level` is the inverse coarse step; '#' starts a comment.
struct CheckOutcome {
    std::string line;
    bool pass = false;
    std::string detail;
};

inline std::vector<CheckOutcome> evaluate_checks(const std::vector<StudyRow>& rows, const std::string& manifest) {
    std::vector<CheckOutcome> out;
    std::istringstream is(manifest);
    std::string line;
    while (std::getline(is, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        std::map<std::string, double> kv;
        std::string tok;
        while (ls >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("bad check token '" + tok + "'");
            kv[tok.substr(0, eq)] = std::stod(tok.substr(eq + 1));
        }
        auto need = [&](const char* k) {
            auto it = kv.find(k);
            if (it == kv.end()) throw std::invalid_argument(std::string("check is missing '") + k + "': " + line);
            return it->second;
        };
        CheckOutcome c{line};
        std::vector<const StudyRow*> sel;
        const double alpha = need("alpha");
        for (const auto& r : rows)
            if (std::abs(r.alpha - alpha) < 1e-12) sel.push_back(&r);
        auto at_level = [&](double q) -> const StudyRow* {
            for (auto* r : sel)
                if (std::abs(1.0 / r->coarse_h() - q) < 1e-6 * q) return r;
            return nullptr;
        };
        std::ostringstream d;
        if (kind == "error") {
            const StudyRow* r = at_level(need("level"));
            const double target = need("target"), rtol = need("rtol");
            if (r && r->failure.empty()) {
                c.pass = std::abs(r->error - target) <= rtol * std::abs(target);
                d << "error " << format_sig(r->error, 4) << " vs " << format_sig(target, 4);
            } else {
                d << "cell missing or failed";
            }
        } else if (kind == "rate") {
            const StudyRow* r = at_level(need("level"));
            const double lo = need("min"), hi = need("max");
            if (r && !std::isnan(r->rate)) {
                c.pass = r->rate >= lo && r->rate <= hi;
                d << "rate " << format_sig(r->rate, 4) << " in [" << lo << ", " << hi << "]";
            } else {
                d << "rate unavailable";
            }
        } else if (kind == "fitted") {
            const std::size_t last = static_cast<std::size_t>(need("last"));
            const double lo = need("min"), hi = need("max");
            if (sel.size() >= last && last >= 2) {
                std::vector<std::pair<double, double>> pts;
                for (std::size_t i = sel.size() - last; i < sel.size(); ++i) pts.push_back({sel[i]->coarse_h(), sel[i]->error});
                const double r = fitted_rate(pts);
                c.pass = r >= lo && r <= hi;
                d << "fitted rate " << format_sig(r, 4) << " in [" << lo << ", " << hi << "]";
            } else {
                d << "not enough levels";
            }
        } else {
            throw std::invalid_argument("unknown check kind '" + kind + "'");
        }
        c.detail = d.str();
        out.push_back(c);
    }
    return out;
}

}  // namespace fracmesh
