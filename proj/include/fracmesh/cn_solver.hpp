#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fracmesh/assembly.hpp"
#include "fracmesh/mesh.hpp"

namespace fracmesh {

using SpaceTimeField = std::function<double(double, double)>;
using TimeField = std::function<double(double)>;

struct DiffusionProblem {
    double K = 1.0;
    double alpha = 1.5;
    SpaceTimeField source = [](double, double) { return 0.0; };
    Field phi0 = [](double) { return 0.0; };
    TimeField u0 = [](double) { return 0.0; };
    TimeField ub = [](double) { return 0.0; };
    double T = 1.0;
    long M = 400;
    std::optional<SpaceTimeField> exact;

    double tau() const { return T / static_cast<double>(M); }
};

struct SolveResult {
    std::vector<double> times;
    std::vector<Vector> levels;  // full node vectors 0..N; only the last one unless all were kept
    Vector final_state;
    std::optional<double> final_error;
};

struct SolveOptions {
    bool keep_levels = false;
};

inline SolveResult solve(const DiffusionProblem& prob, const AssembledSystem& sys, const SolveOptions& opt = {}) {
    if (prob.M < 1) throw std::invalid_argument("number of time steps must be positive");
    const double tau = prob.tau();
    if (std::abs(tau - sys.tau) > 1e-14 * tau)
        throw std::invalid_argument("system was assembled for a different time step");
    if (std::abs(prob.K - sys.K) > 1e-14 * std::max(1.0, prob.K))
        throw std::invalid_argument("system was assembled for a different diffusivity");

    const auto& mesh = sys.mesh;
    const long N = mesh.N();
    const long n = N - 1;
    Eigen::PartialPivLU<Matrix> lu(sys.L);
    {
        const auto& U = lu.matrixLU();
        const double scale = U.diagonal().cwiseAbs().maxCoeff();
        if (!(U.diagonal().cwiseAbs().minCoeff() > 1e-14 * scale))
            throw std::runtime_error("left matrix is singular");
    }

    auto full = [&](const Vector& interior, double t) {
        Vector v(N + 1);
        v(0) = prob.u0(t);
        v.segment(1, n) = interior;
        v(N) = prob.ub(t);
        return v;
    };

    Vector U(n);
    for (long j = 1; j < N; ++j) U(j - 1) = prob.phi0(mesh.node(j));

    SolveResult res;
    res.times.push_back(0.0);
    if (opt.keep_levels) res.levels.push_back(full(U, 0.0));

    Vector F(n), rhs(n);
    for (long i = 0; i < prob.M; ++i) {
        const double t0 = i * tau, t1 = (i + 1) * tau, th = 0.5 * (t0 + t1);
        for (long j = 1; j < N; ++j) F(j - 1) = prob.source(mesh.node(j), th);
        rhs.noalias() = sys.R * U;
        rhs += tau * F;
        rhs += sys.boundary_vector(prob.u0(t0), prob.u0(t1), prob.ub(t0), prob.ub(t1));
        U = lu.solve(rhs);
        if (!U.allFinite()) throw std::runtime_error("non-finite solution at time step " + std::to_string(i + 1));
        res.times.push_back(t1);
        if (opt.keep_levels) res.levels.push_back(full(U, t1));
    }
    res.final_state = full(U, prob.T);
    if (!opt.keep_levels) res.levels.push_back(res.final_state);
    if (prob.exact) {
        std::vector<double> e(n);
        for (long j = 1; j < N; ++j) e[j - 1] = U(j - 1) - (*prob.exact)(mesh.node(j), prob.T);
        res.final_error = discrete_l2(mesh, e);
    }
    return res;
}

struct RadiusOptions {
    long dense_limit = 1500;
    double tolerance = 1e-10;
    long max_iterations = 10000;
};

// Spectral radius of L^{-1} R.
inline double iteration_matrix_radius(const AssembledSystem& sys, const RadiusOptions& opt = {}) {
    const long n = sys.size();
    Eigen::PartialPivLU<Matrix> lu(sys.L);
    if (n <= opt.dense_limit) {
        const Matrix G = lu.solve(sys.R);
        Eigen::EigenSolver<Matrix> es(G, false);
        if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    // power iteration on G applied implicitly; the estimate is the growth of the iterate norm
    Vector x = Vector::Ones(n).normalized();
    double prev = 0.0, est = 0.0;
    for (long it = 0; it < opt.max_iterations; ++it) {
        Vector y = lu.solve(sys.R * x);
        est = y.norm();
        if (!(est > 0.0)) return 0.0;
        x = y / est;
        if (it > 10 && std::abs(est - prev) <= opt.tolerance * est) break;
        prev = est;
    }
    return est;
}

}  // namespace fracmesh
