#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracmesh/mesh.hpp"
#include "fracmesh/mollify.hpp"
#include "fracmesh/weights.hpp"

namespace fracmesh {

using Field = std::function<double(double)>;

// 1/Gamma(x), zero at the poles.
inline double reciprocal_gamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    return 1.0 / std::tgamma(x);
}

// Left Riemann-Liouville derivative of x^p on (0, x].
inline double rl_exact_monomial(double p, double alpha, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("rl_exact_monomial needs x > 0");
    if (!(p > -1.0)) throw std::invalid_argument("rl_exact_monomial needs p > -1");
    return std::tgamma(p + 1.0) * reciprocal_gamma(p + 1.0 - alpha) * std::pow(x, p - alpha);
}

// Exact derivative of the constant 1, i.e. x^{-alpha}/Gamma(1-alpha).
inline double constant_derivative(double alpha, double x) { return rl_exact_monomial(0.0, alpha, x); }

struct BoundaryCorrection {
    double u0 = 0.0;
    bool active = false;
};

// Weighted shifted sum on a uniform grid, samples[j] = u(j h), evaluated at node j = node.
inline double weighted_uniform(const std::vector<double>& samples, const std::vector<double>& w, double alpha,
                               double h, std::size_t node, int shift, const BoundaryCorrection& corr = {}) {
    if (node == 0) throw std::invalid_argument("weighted_uniform: node must be interior (> 0)");
    const std::size_t top = node + static_cast<std::size_t>(shift);
    if (shift < 0 || top >= samples.size())
        throw std::out_of_range("weighted_uniform: samples do not cover x + shift*h");
    if (top >= w.size()) throw std::out_of_range("weighted_uniform: weight table too short");
    const double base = corr.active ? corr.u0 : 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k <= top; ++k) s += w[k] * (samples[top - k] - base);
    double v = std::pow(h, -alpha) * s;
    if (corr.active) v += corr.u0 * constant_derivative(alpha, node * h);
    return v;
}

inline double grunwald_uniform(const std::vector<double>& samples, double alpha, double h, int shift,
                               std::size_t node, const BoundaryCorrection& corr = {}) {
    return weighted_uniform(samples, grunwald_coeffs(alpha, node + shift + 1), alpha, h, node, shift, corr);
}

enum class NaiveVariant { Phi, Psi };

// Values of the unsplit hybrid sums at the coarse nodes n*h1, n = 1..b/h1 (h1 = m*h2).
inline std::vector<double> naive_nonuniform(const Field& u, double alpha, long coarse_inverse, int m, double a,
                                            double b, NaiveVariant variant) {
    if (coarse_inverse < 1 || m < 1) throw std::invalid_argument("naive_nonuniform: bad step");
    const double h1 = 1.0 / coarse_inverse, h2 = h1 / m;
    const long nb = detail::exact_multiple(b * coarse_inverse, "b");
    const long a1 = static_cast<long>(std::floor(a * coarse_inverse + 1e-9));
    const long a2 = static_cast<long>(std::floor(a * coarse_inverse * m + 1e-9));
    const auto g = grunwald_coeffs(alpha, static_cast<std::size_t>(nb * m + 1));
    const double s1 = std::pow(h1, -alpha), s2 = std::pow(h2, -alpha);
    std::vector<double> out;
    out.reserve(nb);
    for (long n = 1; n <= nb; ++n) {
        const long mn = m * n;
        double v = 0.0;
        if (variant == NaiveVariant::Phi) {
            for (long k = 0; k <= mn - a2 - 1; ++k) v += s2 * g[k] * u((mn - k) * h2);
            for (long k = std::max(0L, n - a1); k <= n; ++k) v += s1 * g[k] * u((n - k) * h1);
        } else {
            for (long k = 0; k <= n - a1 - 1; ++k) v += s1 * g[k] * u((n - k) * h1);
            for (long k = std::max(0L, mn - a2); k <= mn; ++k) v += s2 * g[k] * u((mn - k) * h2);
        }
        out.push_back(v);
    }
    return out;
}

enum class SplitVariant { CoarseLeft, CoarseRight };

// Grunwald sums (shift p) of the two mollified pieces with different steps, at the interior
// coarse nodes n*h1, n = 1..b/h1 - 1.  CoarseLeft puts the left piece on the coarse step h1
// and the right piece on h2 = h1/m.
inline std::vector<double> mollified_first_order(const Field& u, double alpha, const SplitSpec& spec,
                                                 long coarse_inverse, int m, SplitVariant variant, int shift = 1,
                                                 const Mollifier& mol = default_mollifier()) {
    if (coarse_inverse < 1 || m < 1) throw std::invalid_argument("mollified_first_order: bad step");
    if (shift < 0 || shift > 1) throw std::invalid_argument("mollified_first_order: shift must be 0 or 1");
    const double h1 = 1.0 / coarse_inverse, h2 = h1 / m;
    const long nb = detail::exact_multiple(spec.b * coarse_inverse, "b");
    const auto g = grunwald_coeffs(alpha, static_cast<std::size_t>(nb * m + 1));
    const Truncation on_coarse = variant == SplitVariant::CoarseLeft ? Truncation::Left : Truncation::Right;
    const Truncation on_fine = variant == SplitVariant::CoarseLeft ? Truncation::Right : Truncation::Left;
    std::vector<double> coarse(nb + 1), fine(nb * m + 1);
    for (long j = 0; j <= nb; ++j) coarse[j] = eta(spec, on_coarse, j * h1, mol) * u(j * h1);
    for (long j = 0; j <= nb * m; ++j) fine[j] = eta(spec, on_fine, j * h2, mol) * u(j * h2);
    const double s1 = std::pow(h1, -alpha), s2 = std::pow(h2, -alpha);
    std::vector<double> out;
    out.reserve(nb - 1);
    for (long n = 1; n < nb; ++n) {
        double v1 = 0.0, v2 = 0.0;
        for (long k = 0; k <= n + shift; ++k) v1 += g[k] * coarse[n + shift - k];
        for (long k = 0; k <= m * n + shift; ++k) v2 += g[k] * fine[m * n + shift - k];
        out.push_back(s1 * v1 + s2 * v2);
    }
    return out;
}

// Fine-left mesh: left piece on step h1 with the left scheme, right piece on h2 = m*h1 with
// the right scheme, coarse values blended at points between coarse nodes.  With `correct`
// the constant u(0) is removed first and its exact derivative added back.
// Returns values at interior nodes 1..N-1.
inline std::vector<double> nonuniform_case1(const Field& u, double alpha, const MeshConfig& mesh,
                                            const SchemePair& schemes, bool correct = true,
                                            const Mollifier& mol = default_mollifier()) {
    if (mesh.mesh_case() != MeshCase::FineLeft) throw std::invalid_argument("nonuniform_case1 needs a fine-left mesh");
    const auto& spec = mesh.spec();
    const int m = mesh.m();
    const long P = mesh.N1() + mesh.NI();
    const long fend = mesh.fine_end();
    const long cend = fend / m;
    const double hf = mesh.h_fine(), hc = mesh.h2();
    const double u0 = correct ? u(0.0) : 0.0;

    std::vector<double> r1(P + 1, 0.0), r2(cend + 1, 0.0);
    for (long j = 1; j < P; ++j) {
        const double x = static_cast<double>(j) / mesh.fine_inverse();
        r1[j] = eta(spec, Truncation::Left, x, mol) * (u(x) - u0);
    }
    for (long c = 1; c <= cend; ++c) {
        const double x = static_cast<double>(c * m) / mesh.fine_inverse();
        r2[c] = eta(spec, Truncation::Right, x, mol) * (u(x) - u0);
    }

    const WeightTable W1(schemes.left, alpha, fend + 2, 1);
    const WeightTable W2(schemes.right, alpha, cend + 2, m);
    const double s1 = std::pow(hf, -alpha), s2 = std::pow(hc, -alpha);

    std::vector<double> out;
    out.reserve(mesh.N() - 1);
    for (long n = 1; n < mesh.N(); ++n) {
        const long i = mesh.fine_index(n);
        double fine = 0.0;
        for (long j = 1; j <= std::min(P - 1, i + 1); ++j) fine += W1.weight(i + 1 - j) * r1[j];
        double coarse = 0.0;
        const long c = i / m;
        const int q = static_cast<int>(i % m);
        if (q == 0) {
            if (c + 1 > cend) throw std::out_of_range("nonuniform_case1: stencil leaves the domain");
            for (long k = 0; k <= c; ++k) coarse += W2.weight(k) * r2[c + 1 - k];
        } else {
            if (c + 2 > cend) throw std::out_of_range("nonuniform_case1: stencil leaves the domain");
            for (long k = 0; k <= c + 1; ++k) coarse += W2.blended(k, q) * r2[c + 2 - k];
        }
        double v = s1 * fine + s2 * coarse;
        if (correct) v += u0 * constant_derivative(alpha, mesh.node(n));
        out.push_back(v);
    }
    return out;
}

// Fine-right mesh: left piece on the coarse step h1 = m*h2 (blended between coarse nodes),
// right piece on h2.  Assumes u(0) = 0.
inline std::vector<double> nonuniform_case2(const Field& u, double alpha, const MeshConfig& mesh,
                                            const SchemePair& schemes, const Mollifier& mol = default_mollifier()) {
    if (mesh.mesh_case() != MeshCase::FineRight)
        throw std::invalid_argument("nonuniform_case2 needs a fine-right mesh");
    if (u(0.0) != 0.0) throw std::invalid_argument("nonuniform_case2 requires u(0) = 0");
    const auto& spec = mesh.spec();
    const int m = mesh.m();
    const long fend = mesh.fine_end();
    const long cend = fend / m;
    const long A = (mesh.N1() + 1) * m;
    const long F = A + mesh.NI() - 1;
    const double hc = mesh.h1(), hf = mesh.h_fine();

    std::vector<double> u1(cend + 1, 0.0), u2(fend + 1, 0.0);
    for (long c = 1; c <= cend && c * m < F; ++c) {
        const double x = static_cast<double>(c * m) / mesh.fine_inverse();
        u1[c] = eta(spec, Truncation::Left, x, mol) * u(x);
    }
    for (long j = A + 1; j <= fend; ++j) {
        const double x = static_cast<double>(j) / mesh.fine_inverse();
        u2[j] = eta(spec, Truncation::Right, x, mol) * u(x);
    }

    const WeightTable W1(schemes.left, alpha, cend + 2, m);
    const WeightTable W2(schemes.right, alpha, fend + 2, 1);
    const double s1 = std::pow(hc, -alpha), s2 = std::pow(hf, -alpha);
    auto coarse_at = [&](long c) { return c <= cend ? u1[c] : 0.0; };

    std::vector<double> out;
    out.reserve(mesh.N() - 1);
    for (long n = 1; n < mesh.N(); ++n) {
        const long f = mesh.fine_index(n);
        const long c = f / m;
        const int q = static_cast<int>(f % m);
        double coarse = 0.0;
        if (q == 0) {
            for (long k = 0; k <= c; ++k) coarse += W1.weight(k) * coarse_at(c + 1 - k);
        } else {
            for (long k = 0; k <= c + 1; ++k) coarse += W1.blended(k, q) * coarse_at(c + 2 - k);
        }
        double fine = 0.0;
        if (f + 1 > fend) throw std::out_of_range("nonuniform_case2: stencil leaves the domain");
        for (long j = A + 1; j <= f + 1; ++j) fine += W2.weight(f + 1 - j) * u2[j];
        out.push_back(s1 * coarse + s2 * fine);
    }
    return out;
}

inline std::vector<double> nonuniform_derivative(const Field& u, double alpha, const MeshConfig& mesh,
                                                 const SchemePair& schemes, bool correct = true) {
    return mesh.mesh_case() == MeshCase::FineLeft ? nonuniform_case1(u, alpha, mesh, schemes, correct)
                                                  : nonuniform_case2(u, alpha, mesh, schemes);
}

}  // namespace fracmesh
