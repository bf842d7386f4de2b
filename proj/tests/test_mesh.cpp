#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "fracmesh/mesh.hpp"

using namespace fracmesh;

namespace {

void expect_anchors(const MeshConfig& m) {
    const auto& s = m.spec();
    EXPECT_DOUBLE_EQ(m.node(0), 0.0);
    EXPECT_NEAR(m.node(m.N1() + 1), s.a, 1e-14);
    EXPECT_NEAR(m.node(m.N1() + m.NI()), s.a + 2 * s.eps, 1e-14);
    EXPECT_NEAR(m.node(m.N()), s.b, 1e-14);
    for (long n = 1; n <= m.N(); ++n) EXPECT_GT(m.node(n), m.node(n - 1));
}

}  // namespace

TEST(BuildMesh, FineLeftExample) {
    auto m = build_mesh(SplitSpec(1, 1, 4), MeshCase::FineLeft, 1.0 / 8, 2);
    EXPECT_DOUBLE_EQ(m.h1(), 1.0 / 8);
    EXPECT_DOUBLE_EQ(m.h2(), 1.0 / 4);
    EXPECT_EQ(m.N1(), 7);
    EXPECT_EQ(m.NI(), 17);
    EXPECT_EQ(m.N2(), 3);
    EXPECT_EQ(m.N(), 28);
    EXPECT_DOUBLE_EQ(m.node(m.N1() + 1), 1.0);
    EXPECT_DOUBLE_EQ(m.node(m.N1() + m.NI()), 3.0);
    EXPECT_DOUBLE_EQ(m.node(m.N()), 4.0);
    expect_anchors(m);
}

TEST(BuildMesh, FineRightExample) {
    auto m = build_mesh(SplitSpec(1, 1, 4), MeshCase::FineRight, 1.0 / 10, 5);
    EXPECT_DOUBLE_EQ(m.h1(), 0.5);
    EXPECT_DOUBLE_EQ(m.h2(), 0.1);
    EXPECT_EQ(m.N1(), 1);
    EXPECT_EQ(m.NI(), 21);
    EXPECT_EQ(m.N2(), 9);
    EXPECT_EQ(m.N(), 32);
    expect_anchors(m);
}

TEST(BuildMesh, UniformWhenRatioIsOne) {
    for (auto c : {MeshCase::FineLeft, MeshCase::FineRight}) {
        MeshConfig m(SplitSpec(1, 1, 4), c, 16, 1);
        EXPECT_EQ(m.N(), 64);
        for (long n = 0; n <= m.N(); ++n) EXPECT_DOUBLE_EQ(m.node(n), n / 16.0);
    }
}

TEST(BuildMesh, DivisibilityErrorsNameTheQuantity) {
    auto msg = [](auto f) {
        try {
            f();
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(msg([] { MeshConfig(SplitSpec(1.05, 1, 4), MeshCase::FineLeft, 8, 2); }).find("a"), std::string::npos);
    EXPECT_NE(msg([] { MeshConfig(SplitSpec(1, 0.5, 4), MeshCase::FineLeft, 4, 3); }).find("a+2eps"), std::string::npos);
    EXPECT_NE(msg([] { MeshConfig(SplitSpec(1, 1, 4), MeshCase::FineRight, 8, 3); }).find("a is"), std::string::npos);
    EXPECT_NE(msg([] { MeshConfig(SplitSpec(1, 1, 4.5), MeshCase::FineRight, 4, 4); }).find("b-a"), std::string::npos);
    EXPECT_THROW(build_mesh(SplitSpec(1, 1, 4), MeshCase::FineLeft, 0.3, 1), std::invalid_argument);
    EXPECT_THROW(MeshConfig(SplitSpec(1, 1, 4), MeshCase::FineLeft, 8, 0), std::invalid_argument);
}

TEST(BuildMesh, AtMostTwoGapSizes) {
    for (auto c : {MeshCase::FineLeft, MeshCase::FineRight})
        for (int m : {1, 2, 3, 5}) {
            MeshConfig mesh(SplitSpec(1, 1, 4), c, 30 * m, m);
            std::set<long> gaps;
            for (long n = 1; n <= mesh.N(); ++n) gaps.insert(mesh.fine_index(n) - mesh.fine_index(n - 1));
            EXPECT_LE(gaps.size(), 2u);
            for (long n = 1; n <= mesh.N(); ++n) {
                const double g = mesh.node(n) - mesh.node(n - 1);
                EXPECT_TRUE(std::abs(g - mesh.h1()) < 1e-12 * mesh.h1() || std::abs(g - mesh.h2()) < 1e-12 * mesh.h2());
            }
            expect_anchors(mesh);
        }
}

TEST(IndexMaps, RelabelInvertsNative) {
    for (auto c : {MeshCase::FineLeft, MeshCase::FineRight})
        for (int m : {1, 2, 4}) {
            MeshConfig mesh(SplitSpec(0.5, 0.25, 2.0), c, 8 * m, m);
            for (long n = 0; n <= mesh.N(); ++n) EXPECT_EQ(mesh.relabel(mesh.native(n)), n);
        }
}

TEST(IndexMaps, NativeGridsAgreeWithPositions) {
    MeshConfig left(SplitSpec(1, 1, 4), MeshCase::FineLeft, 8, 2);
    // y_0 sits at a+2eps, y_{N2+1} at b, z_1 at a
    EXPECT_DOUBLE_EQ(left.node(left.relabel({Grid::Y, 0})), 3.0);
    EXPECT_DOUBLE_EQ(left.node(left.relabel({Grid::Y, left.N2() + 1})), 4.0);
    EXPECT_DOUBLE_EQ(left.node(left.relabel({Grid::Z, 1})), 1.0);
    EXPECT_DOUBLE_EQ(left.node(left.relabel({Grid::Y, -2})), 2.5);
    EXPECT_THROW(left.relabel({Grid::X, 25}), std::out_of_range);  // odd fine point in the coarse zone

    MeshConfig right(SplitSpec(1, 1, 4), MeshCase::FineRight, 10, 5);
    EXPECT_DOUBLE_EQ(right.node(right.relabel({Grid::X, right.N1() + 1})), 1.0);
    EXPECT_DOUBLE_EQ(right.node(right.relabel({Grid::Y, 0})), 3.0);
    EXPECT_DOUBLE_EQ(right.node(right.relabel({Grid::Z, 1})), 1.0);
    EXPECT_DOUBLE_EQ(right.node(right.relabel({Grid::Z, right.NI()})), 3.0);
    EXPECT_DOUBLE_EQ(right.node(right.relabel({Grid::X, 8})), 4.0);
}

TEST(Reflection, SwapsCasesAndCounts) {
    MeshConfig m(SplitSpec(1, 1, 4), MeshCase::FineLeft, 16, 4);
    MeshConfig r = reflect(m);
    EXPECT_EQ(r.mesh_case(), MeshCase::FineRight);
    EXPECT_EQ(r.N(), m.N());
    EXPECT_EQ(r.N1(), m.N2());
    EXPECT_EQ(r.N2(), m.N1());
    EXPECT_DOUBLE_EQ(r.h1(), m.h2());
    EXPECT_DOUBLE_EQ(r.h2(), m.h1());
    for (long n = 0; n <= m.N(); ++n) EXPECT_NEAR(r.node(n), 4.0 - m.node(m.N() - n), 1e-14);
}

TEST(DiscreteNorm, Examples) {
    MeshConfig u(SplitSpec(1, 1, 4), MeshCase::FineLeft, 8, 1);
    std::vector<double> zeros(u.N() - 1, 0.0), ones(u.N() - 1, 1.0);
    EXPECT_EQ(discrete_l2(u, zeros), 0.0);
    EXPECT_NEAR(discrete_l2(u, ones), std::sqrt(u.h1() * (u.N() - 1)), 1e-14);

    MeshConfig m(SplitSpec(1, 1, 4), MeshCase::FineLeft, 8, 2);
    std::vector<double> e(m.N() - 1, 0.0);
    e[m.N1() + m.NI()] = 3.0;  // node N1+NI+1, first coarse interior node
    EXPECT_NEAR(discrete_l2(m, e), std::sqrt(m.h2()) * 3.0, 1e-14);
    e.assign(m.N() - 1, 0.0);
    e[0] = -2.0;
    EXPECT_NEAR(discrete_l2(m, e), std::sqrt(m.h1()) * 2.0, 1e-14);

    MeshConfig r(SplitSpec(1, 1, 4), MeshCase::FineRight, 10, 5);
    std::vector<double> f(r.N() - 1, 0.0);
    f[0] = 1.0;  // a coarse node on the left
    f[r.N1()] = 1.0;  // first fine node (a itself)
    EXPECT_NEAR(discrete_l2(r, f), std::sqrt(r.h1() + r.h2()), 1e-14);
    EXPECT_THROW(discrete_l2(r, std::vector<double>(3)), std::invalid_argument);
}

TEST(DiscreteNorm, NormAxioms) {
    MeshConfig m(SplitSpec(1, 1, 4), MeshCase::FineRight, 12, 3);
    std::mt19937 rng(11);
    std::normal_distribution<double> N01;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(m.N() - 1), y(m.N() - 1), s(m.N() - 1), c(m.N() - 1);
        const double lambda = N01(rng);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = N01(rng);
            y[i] = N01(rng);
            s[i] = x[i] + y[i];
            c[i] = lambda * x[i];
        }
        EXPECT_NEAR(discrete_l2(m, c), std::abs(lambda) * discrete_l2(m, x), 1e-12);
        EXPECT_LE(discrete_l2(m, s), discrete_l2(m, x) + discrete_l2(m, y) + 1e-12);
    }
}

TEST(Rates, Observed) {
    auto r = observed_rate({{0.1, 1.0}, {0.05, 0.5}, {0.025, 0.125}});
    ASSERT_EQ(r.size(), 2u);
    EXPECT_NEAR(r[0], 1.0, 1e-14);
    EXPECT_NEAR(r[1], 2.0, 1e-14);
    auto t = observed_rate({{0.1, 5.02e-1}, {0.05, 8.42e-1}});
    EXPECT_NEAR(t[0], -0.75, 0.005);
    EXPECT_TRUE(std::isnan(observed_rate({{0.1, 0.0}, {0.05, 1.0}})[0]));
    EXPECT_THROW(observed_rate({{0.1, 1.0}}), std::invalid_argument);
    EXPECT_THROW(observed_rate({{0.1, 1.0}, {0.2, 1.0}}), std::invalid_argument);
}

TEST(Rates, Fitted) {
    std::vector<std::pair<double, double>> pts;
    for (double h : {0.1, 0.05, 0.025, 0.0125}) pts.push_back({h, 3.0 * h * h});
    EXPECT_NEAR(fitted_rate(pts), 2.0, 1e-12);
}
