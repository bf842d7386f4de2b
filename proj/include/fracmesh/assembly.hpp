#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "fracmesh/fracop.hpp"
#include "fracmesh/mesh.hpp"
#include "fracmesh/mollify.hpp"
#include "fracmesh/weights.hpp"

namespace fracmesh {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Side { Left, Right };

struct AssemblyOptions {
    bool keep_components = true;  // retain A1, A2 (two extra (N-1)x(N+1) matrices)
};

// Crank-Nicolson system for K * D^alpha u.  Rows are the interior nodes 1..N-1; the extended
// components A1, A2, M1, M2 carry all node columns 0..N.  The full discrete operator is
//     D * U + u0_coef * u(0) + ub_coef * u(b).
struct AssembledSystem {
    MeshConfig mesh;
    double alpha = 0.0;
    double K = 0.0;
    double tau = 0.0;
    SchemePair schemes;
    Side side = Side::Left;

    Matrix A1, A2;
    Vector M1, M2;
    Matrix D;
    Matrix L, R;

    Vector h0D;  // x_n^{-alpha}/Gamma(1-alpha) measured in units of the left step
    Vector h0S;  // D*1 + ub_coef
    Vector hND;  // ub_coef without the step scaling
    Vector u0_coef;
    Vector ub_coef;
    bool u0_supported = true;  // nonzero left trace handled by the constant correction
    bool ub_supported = true;

    long size() const { return mesh.interior_size(); }

    Vector boundary_vector(double u0_now, double u0_next, double ub_now, double ub_next) const {
        if (!u0_supported && (u0_now != 0.0 || u0_next != 0.0))
            throw std::invalid_argument("this mesh case assumes a zero trace at x = 0");
        if (!ub_supported && (ub_now != 0.0 || ub_next != 0.0))
            throw std::invalid_argument("this mesh case assumes a zero trace at x = b");
        const double c = 0.5 * tau * K;
        return c * ((u0_now + u0_next) * u0_coef + (ub_now + ub_next) * ub_coef);
    }
};

namespace detail {

inline Vector splitting_diagonal(const MeshConfig& mesh, const Mollifier& mol) {
    Vector M1 = Vector::Zero(mesh.N() + 1);
    const double eps = mesh.spec().eps;
    const double h = mesh.h_fine();
    for (long j = 0; j <= mesh.N1(); ++j) M1(j) = 1.0;
    for (long k = 0; k < mesh.NI(); ++k) M1(mesh.N1() + 1 + k) = mol.cumulative(1.0 - k * h / eps);
    return M1;
}

inline void finish(AssembledSystem& s, const AssemblyOptions& opt) {
    const long N = s.mesh.N();
    const long n = N - 1;
    Matrix E = s.A1 * s.M1.asDiagonal();
    E.noalias() += s.A2 * s.M2.asDiagonal();
    s.D = E.block(0, 1, n, n);
    s.ub_coef = E.col(N);
    const Vector ones = Vector::Ones(n);
    s.h0S = s.D * ones + s.ub_coef;
    const double step_left = s.mesh.h1();
    s.h0D.resize(n);
    for (long r = 0; r < n; ++r)
        s.h0D(r) = constant_derivative(s.alpha, s.mesh.node(r + 1)) * std::pow(step_left, s.alpha);
    s.hND = s.ub_coef * std::pow(s.mesh.h2(), s.alpha);
    if (s.mesh.mesh_case() == MeshCase::FineLeft) {
        s.u0_coef = std::pow(step_left, -s.alpha) * s.h0D - s.h0S;
        s.u0_supported = true;
    } else {
        s.u0_coef = E.col(0);
        s.u0_supported = false;
    }
    const double c = 0.5 * s.tau * s.K;
    s.L = Matrix::Identity(n, n) - c * s.D;
    s.R = Matrix::Identity(n, n) + c * s.D;
    if (!opt.keep_components) {
        s.A1.resize(0, 0);
        s.A2.resize(0, 0);
    }
}

}  // namespace detail

inline AssembledSystem assemble_left(const MeshConfig& mesh, double alpha, const SchemePair& schemes, double K,
                                     double tau, const AssemblyOptions& opt = {},
                                     const Mollifier& mol = default_mollifier()) {
    if (!(K >= 0.0)) throw std::invalid_argument("diffusivity K must be nonnegative");
    if (!(tau > 0.0)) throw std::invalid_argument("time step tau must be positive");
    AssembledSystem s{mesh};
    s.alpha = alpha;
    s.K = K;
    s.tau = tau;
    s.schemes = schemes;
    s.side = Side::Left;

    const long N = mesh.N();
    const int m = mesh.m();
    const long fend = mesh.fine_end();
    const long cend = fend / m;
    s.A1 = Matrix::Zero(N - 1, N + 1);
    s.A2 = Matrix::Zero(N - 1, N + 1);
    s.M1 = detail::splitting_diagonal(mesh, mol);
    s.M2 = Vector::Ones(N + 1) - s.M1;
    auto coarse_node = [&](long c) { return mesh.node_at_fine(c * m); };

    if (mesh.mesh_case() == MeshCase::FineLeft) {
        const long P = mesh.N1() + mesh.NI();
        const WeightTable W1(schemes.left, alpha, fend + 2, 1);
        const WeightTable W2(schemes.right, alpha, cend + 2, m);
        const double s1 = std::pow(mesh.h1(), -alpha), s2 = std::pow(mesh.h2(), -alpha);
        for (long n = 1; n < N; ++n) {
            const long i = mesh.fine_index(n);
            // left piece lives on every fine index up to a+2eps, which are nodes 0..P
            for (long j = 0; j <= std::min(P, i + 1); ++j) s.A1(n - 1, j) = s1 * W1.weight(i + 1 - j);
            const long c = i / m;
            const int q = static_cast<int>(i % m);
            if (q == 0) {
                for (long cc = 0; cc <= c + 1; ++cc) s.A2(n - 1, coarse_node(cc)) = s2 * W2.weight(c + 1 - cc);
            } else {
                for (long cc = 0; cc <= c + 2; ++cc) s.A2(n - 1, coarse_node(cc)) = s2 * W2.blended(c + 2 - cc, q);
            }
        }
    } else {
        const long A = (mesh.N1() + 1) * m;
        const WeightTable W1(schemes.left, alpha, cend + 2, m);
        const WeightTable W2(schemes.right, alpha, fend + 2, 1);
        const double s1 = std::pow(mesh.h1(), -alpha), s2 = std::pow(mesh.h2(), -alpha);
        for (long n = 1; n < N; ++n) {
            const long f = mesh.fine_index(n);
            const long c = f / m;
            const int q = static_cast<int>(f % m);
            if (q == 0) {
                for (long cc = 0; cc <= std::min(c + 1, cend); ++cc)
                    s.A1(n - 1, coarse_node(cc)) = s1 * W1.weight(c + 1 - cc);
            } else {
                for (long cc = 0; cc <= std::min(c + 2, cend); ++cc)
                    s.A1(n - 1, coarse_node(cc)) = s1 * W1.blended(c + 2 - cc, q);
            }
            // right piece lives on the fine indices from a onward, all of which are nodes
            for (long j = A; j <= f + 1; ++j) s.A2(n - 1, mesh.node_at_fine(j)) = s2 * W2.weight(f + 1 - j);
        }
    }
    detail::finish(s, opt);
    return s;
}

// Right derivative: reflect x -> b - x, assemble the left problem there, and flip back.
inline AssembledSystem assemble_right(const MeshConfig& mesh, double alpha, const SchemePair& schemes, double K,
                                      double tau, const AssemblyOptions& opt = {},
                                      const Mollifier& mol = default_mollifier()) {
    const MeshConfig mirrored = reflect(mesh);
    AssembledSystem r = assemble_left(mirrored, alpha, SchemePair{schemes.right, schemes.left}, K, tau, opt, mol);
    AssembledSystem s{mesh};
    s.alpha = alpha;
    s.K = K;
    s.tau = tau;
    s.schemes = schemes;
    s.side = Side::Right;
    const long n = mesh.interior_size();
    auto flip = [](const Matrix& X) { return X.colwise().reverse().rowwise().reverse().eval(); };
    s.D = flip(r.D);
    s.L = flip(r.L);
    s.R = flip(r.R);
    if (opt.keep_components) {
        s.A1 = flip(r.A2);
        s.A2 = flip(r.A1);
    }
    s.M1 = r.M2.reverse();
    s.M2 = r.M1.reverse();
    s.u0_coef = r.ub_coef.reverse();
    s.ub_coef = r.u0_coef.reverse();
    s.h0D = r.hND.reverse();
    s.h0S = s.D * Vector::Ones(n) + s.u0_coef;
    s.hND = r.h0D.reverse();
    s.u0_supported = r.ub_supported;
    s.ub_supported = r.u0_supported;
    return s;
}

enum class BandRole { Preconditioner, ApproximateInverse };

struct Preconditioned {
    Matrix band;     // retained diagonals of L
    Matrix P_inv;    // operator applied on the left
    Matrix product;  // P_inv * L
};

// Keeps diagonals -2..2 of L plus the lower diagonals 3..2m (offset k > 0 is (i, i+k)).
inline Matrix band_part(const Matrix& L, int m, bool extra_below = true) {
    if (L.rows() != L.cols()) throw std::invalid_argument("band_part needs a square matrix");
    const long n = L.rows();
    Matrix B = Matrix::Zero(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = std::max(0L, i - 2 * m - 2); j < std::min(n, i + 2 * m + 3); ++j) {
            const long off = j - i;
            const bool keep = (off >= -2 && off <= 2) ||
                              (extra_below ? (off <= -3 && off >= -2 * m) : (off >= 3 && off <= 2 * m));
            if (keep) B(i, j) = L(i, j);
        }
    return B;
}

inline Preconditioned precondition(const Matrix& L, int m, BandRole role = BandRole::Preconditioner,
                                   bool extra_below = true) {
    Preconditioned p;
    p.band = band_part(L, m, extra_below);
    if (role == BandRole::Preconditioner) {
        Eigen::PartialPivLU<Matrix> lu(p.band);
        p.P_inv = lu.inverse();
        p.product = lu.solve(L);
    } else {
        p.P_inv = p.band;
        p.product = p.band * L;
    }
    return p;
}

inline double condition_number_2norm(const Matrix& A) {
    if (A.rows() == 0 || A.rows() != A.cols()) throw std::invalid_argument("condition number needs a square matrix");
    Eigen::BDCSVD<Matrix> svd(A);
    const auto& sv = svd.singularValues();
    const double smax = sv(0), smin = sv(sv.size() - 1);
    if (!(smin > 1e-14 * smax)) throw std::runtime_error("matrix is numerically singular");
    return smax / smin;
}

inline double spectral_norm(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    Eigen::BDCSVD<Matrix> svd(A);
    return svd.singularValues()(0);
}

// Relative-error bound for (L + dL) x~ = v + dv against L x = v.
inline double perturbation_bound(const Matrix& L, const Matrix& dL, const Vector& v, const Vector& dv) {
    const double kappa = condition_number_2norm(L);
    const double rl = spectral_norm(dL) / spectral_norm(L);
    const double rv = dv.norm() / v.norm();
    if (!(kappa * rl < 1.0)) throw std::invalid_argument("perturbation too large: K(L)*|dL|/|L| >= 1");
    return kappa / (1.0 - kappa * rl) * (rl + rv);
}

}  // namespace fracmesh
