#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fracmesh/cn_solver.hpp"
#include "fracmesh/harness.hpp"

using namespace fracmesh;

namespace {

const SplitSpec kSpec(1.0, 1.0, 4.0);

double example_error(int id, const char* scheme, double alpha, MeshCase kase, long level, int m) {
    const auto ex = make_example(id, alpha);
    MeshConfig mesh(kSpec, kase, level * m, m);
    auto sys = assemble_left(mesh, alpha, SchemePair::from_label(scheme, alpha), 1.0, 1.0 / 400);
    return *solve(ex.problem(), sys).final_error;
}

}  // namespace

TEST(Solver, ZeroDataGivesZero) {
    MeshConfig mesh(kSpec, MeshCase::FineLeft, 16, 2);
    auto sys = assemble_left(mesh, 1.5, SchemePair::from_label("21", 1.5), 1.0, 0.01);
    DiffusionProblem p;
    p.alpha = 1.5;
    p.M = 100;
    auto r = solve(p, sys);
    EXPECT_EQ(r.final_state.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(r.times.size(), 101u);
    EXPECT_DOUBLE_EQ(r.times.back(), 1.0);
    EXPECT_FALSE(r.final_error.has_value());
}

TEST(Solver, NoDiffusionMeansUnitRadius) {
    MeshConfig mesh(kSpec, MeshCase::FineRight, 16, 2);
    auto sys = assemble_left(mesh, 1.5, SchemePair::from_label("11", 1.5), 0.0, 0.01);
    EXPECT_NEAR(iteration_matrix_radius(sys), 1.0, 1e-14);
}

TEST(Solver, FirstExampleTabulatedValues) {
    // fine step on the right, half the coarse step
    EXPECT_NEAR(example_error(1, "11+11", 1.2, MeshCase::FineRight, 8, 2), 5.13e-1, 0.01 * 5.13e-1);
    EXPECT_NEAR(example_error(1, "21+21", 1.2, MeshCase::FineRight, 8, 2), 4.90e-2, 0.01 * 4.90e-2);
    EXPECT_NEAR(example_error(1, "21+21", 1.2, MeshCase::FineRight, 16, 2), 1.27e-2, 0.01 * 1.27e-2);
    EXPECT_NEAR(example_error(1, "22+22", 1.2, MeshCase::FineRight, 8, 2), 8.71e-2, 0.01 * 8.71e-2);
}

TEST(Solver, BoundaryEntriesFollowTheTraces) {
    const auto ex = make_example(1, 1.4);
    MeshConfig mesh(kSpec, MeshCase::FineLeft, 16, 2);
    auto p = ex.problem(1.0, 50);
    auto sys = assemble_left(mesh, 1.4, SchemePair::from_label("22", 1.4), 1.0, p.tau());
    auto r = solve(p, sys, SolveOptions{true});
    ASSERT_EQ(r.levels.size(), 51u);
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
        EXPECT_DOUBLE_EQ(r.levels[i](0), ex.left_trace(r.times[i]));
        EXPECT_DOUBLE_EQ(r.levels[i](mesh.N()), ex.right_trace(r.times[i]));
    }
    EXPECT_EQ(r.levels.back(), r.final_state);
}

TEST(Solver, LeftTraceNeedsFineLeftMesh) {
    const auto ex = make_example(2, 1.4);
    MeshConfig right(kSpec, MeshCase::FineRight, 16, 2);
    auto sys = assemble_left(right, 1.4, SchemePair::from_label("11", 1.4), 1.0, 1.0 / 400);
    EXPECT_THROW(solve(ex.problem(), sys), std::invalid_argument);

    double prev = std::numeric_limits<double>::infinity();
    for (long level : {8, 16, 32}) {
        const double e = example_error(2, "11+11", 1.4, MeshCase::FineLeft, level, 5);
        EXPECT_LT(e, prev);
        prev = e;
    }
}

TEST(Solver, RejectsMismatchedSystem) {
    const auto ex = make_example(1, 1.5);
    MeshConfig mesh(kSpec, MeshCase::FineLeft, 8, 1);
    auto sys = assemble_left(mesh, 1.5, SchemePair::from_label("11", 1.5), 1.0, 0.01);
    EXPECT_THROW(solve(ex.problem(1.0, 400), sys), std::invalid_argument);
    auto sys2 = assemble_left(mesh, 1.5, SchemePair::from_label("11", 1.5), 2.0, 1.0 / 400);
    EXPECT_THROW(solve(ex.problem(1.0, 400), sys2), std::invalid_argument);
}

TEST(Solver, NonFiniteReportsTheStep) {
    MeshConfig mesh(kSpec, MeshCase::FineLeft, 8, 1);
    auto sys = assemble_left(mesh, 1.5, SchemePair::from_label("11", 1.5), 1.0, 1.0 / 400);
    DiffusionProblem p;
    p.alpha = 1.5;
    p.source = [](double, double t) { return t > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 0.0; };
    try {
        solve(p, sys);
        FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("time step 201"), std::string::npos) << e.what();
    }
}

TEST(Solver, SecondOrderInSpaceOnTheFirstExample) {
    std::vector<std::pair<double, double>> pts;
    for (long level : {16, 32, 64}) pts.push_back({1.0 / level, example_error(1, "22+22", 1.4, MeshCase::FineRight, level, 2)});
    EXPECT_NEAR(fitted_rate(pts), 2.0, 0.15);
}

TEST(Radius, BoundedByOneOnSmallSweep) {
    for (auto kase : {MeshCase::FineLeft, MeshCase::FineRight})
        for (auto lab : {"11", "21", "22"})
            for (double alpha : {1.1, 1.5, 1.9})
                for (long level : {8, 16}) {
                    MeshConfig mesh(kSpec, kase, level * 2, 2);
                    auto sys = assemble_left(mesh, alpha, SchemePair::from_label(lab, alpha), 1.0, 1.0 / 400,
                                             AssemblyOptions{false});
                    EXPECT_LE(iteration_matrix_radius(sys), 1.0 + 1e-12) << lab << " " << alpha << " " << level;
                }
}

TEST(Radius, PowerIterationAgreesWithDense) {
    MeshConfig mesh(kSpec, MeshCase::FineLeft, 32, 2);
    auto sys = assemble_left(mesh, 1.6, SchemePair::from_label("11", 1.6), 1.0, 1.0 / 400);
    const double dense = iteration_matrix_radius(sys);
    RadiusOptions opt;
    opt.dense_limit = 0;
    opt.tolerance = 1e-13;
    opt.max_iterations = 200000;
    EXPECT_NEAR(iteration_matrix_radius(sys, opt), dense, 1e-6);
}
