#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracmesh {

// Gauss-Legendre nodes and weights on [-1,1] by Newton iteration on P_n.
template <int N>
struct GaussLegendre {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    GaussLegendre() {
        for (int i = 0; i < (N + 1) / 2; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= N; ++k) {
                    double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = N * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= N; ++k) {
                double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = N * (x * p1 - p0) / (x * x - 1.0);
            double wt = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[N - 1 - i] = x;
            weights[i] = wt;
            weights[N - 1 - i] = wt;
        }
    }

    template <class F>
    double integrate(F&& f, double lo, double hi) const {
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        double s = 0.0;
        for (int i = 0; i < N; ++i) s += weights[i] * f(mid + half * nodes[i]);
        return half * s;
    }
};

class Mollifier {
public:
    // The constant is twice the half integral so that cumulative(0) is exactly one half.
    Mollifier() { normalization_ = 2.0 * rule_.integrate(bump, -1.0, 0.0); }

    double normalization() const { return normalization_; }
    const GaussLegendre<32>& rule() const { return rule_; }

    double rho(double x) const { return bump(x) / normalization_; }

    // Integral of rho from -1 to u.  The upper half is taken from the lower half by evenness,
    // so cumulative(u) + cumulative(-u) == 1 up to rounding.
    double cumulative(double u) const {
        if (u <= -1.0) return 0.0;
        if (u >= 1.0) return 1.0;
        if (u > 0.0) return 1.0 - lower(-u);
        return lower(u);
    }

private:
    static double bump(double x) {
        double d = x * x - 1.0;
        return d < 0.0 ? std::exp(1.0 / d) : 0.0;
    }
    double lower(double u) const { return rule_.integrate(bump, -1.0, u) / normalization_; }

    GaussLegendre<32> rule_;
    double normalization_ = 1.0;
};

inline const Mollifier& default_mollifier() {
    static const Mollifier instance;
    return instance;
}

struct SplitSpec {
    double a;
    double eps;
    double b;

    SplitSpec(double a_, double eps_, double b_) : a(a_), eps(eps_), b(b_) {
        if (!(a > 0.0)) throw std::invalid_argument("split point a must be positive");
        if (!(eps > 0.0)) throw std::invalid_argument("mollifier radius eps must be positive");
        if (!(a + 2.0 * eps < b)) throw std::invalid_argument("need a + 2*eps < b");
    }
};

enum class Truncation { Left, Right };

inline double distance_to_support(const SplitSpec& s, Truncation side, double x) {
    const double lo = side == Truncation::Left ? 0.0 : s.a + 2.0 * s.eps;
    const double hi = side == Truncation::Left ? s.a : s.b;
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
}

// Smooth cutoff equal to 1 on (0,a) [Left] or (a+2eps,b) [Right], decaying to 0 over 2eps.
inline double eta(const SplitSpec& s, Truncation side, double x, const Mollifier& mol = default_mollifier()) {
    const double d = distance_to_support(s, side, x);
    if (d == 0.0) return 1.0;
    if (d >= 2.0 * s.eps) return 0.0;
    return mol.cumulative(1.0 - d / s.eps);
}

inline std::pair<std::vector<double>, std::vector<double>> split(const SplitSpec& s, const std::vector<double>& x,
                                                                 const std::vector<double>& v,
                                                                 const Mollifier& mol = default_mollifier()) {
    if (x.size() != v.size()) throw std::invalid_argument("split: node and value lengths differ");
    std::vector<double> left(v.size()), right(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        left[i] = eta(s, Truncation::Left, x[i], mol) * v[i];
        right[i] = eta(s, Truncation::Right, x[i], mol) * v[i];
    }
    return {left, right};
}

}  // namespace fracmesh
