#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fracmesh {

class FractionalOrder {
public:
    explicit FractionalOrder(double alpha) : alpha_(alpha) {
        if (!(alpha > 1.0 && alpha < 2.0) && alpha != 2.0)
            throw std::invalid_argument("fractional order must lie in (1,2) or equal 2, got " +
                                        std::to_string(alpha));
    }
    double value() const { return alpha_; }
    operator double() const { return alpha_; }

private:
    double alpha_;
};

// Coefficients (d_{-1}, d_0, d_1) of the weighted shifted family plus its formal order.
struct SchemeParams {
    double d_minus1 = 0.0;
    double d0 = 0.0;
    double d1 = 1.0;
    int order = 1;
    std::string label = "11";

    static SchemeParams first_order() { return {0.0, 0.0, 1.0, 1, "11"}; }
    static SchemeParams weighted_21(double alpha) { return {0.0, 1.0 - alpha / 2.0, alpha / 2.0, 2, "21"}; }
    static SchemeParams weighted_22(double alpha) {
        return {(2.0 - alpha) / 4.0, 0.0, (2.0 + alpha) / 4.0, 2, "22"};
    }

    static SchemeParams from_label(std::string_view label, double alpha) {
        if (label == "11") return first_order();
        if (label == "21") return weighted_21(alpha);
        if (label == "22") return weighted_22(alpha);
        throw std::invalid_argument("unknown scheme label '" + std::string(label) + "' (expected 11, 21 or 22)");
    }
};

// Scheme used on the left piece and on the right piece of a split function.
struct SchemePair {
    SchemeParams left;
    SchemeParams right;

    std::string label() const { return left.label + "+" + right.label; }

    // Accepts "11+21" style labels or a single label used for both pieces.
    static SchemePair from_label(std::string_view label, double alpha) {
        auto plus = label.find('+');
        if (plus == std::string_view::npos) {
            auto s = SchemeParams::from_label(label, alpha);
            return {s, s};
        }
        return {SchemeParams::from_label(label.substr(0, plus), alpha),
                SchemeParams::from_label(label.substr(plus + 1), alpha)};
    }
};

inline std::vector<double> grunwald_coeffs(double alpha, std::size_t n) {
    std::vector<double> g(n + 1);
    g[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k)
        g[k] = (1.0 - (alpha + 1.0) / static_cast<double>(k)) * g[k - 1];
    return g;
}

inline std::vector<double> shifted_weights(const SchemeParams& s, double alpha, std::size_t n) {
    if (n < 2) throw std::invalid_argument("shifted_weights needs n >= 2");
    auto g = grunwald_coeffs(alpha, n);
    std::vector<double> w(n + 1);
    w[0] = s.d1 * g[0];
    w[1] = s.d0 * g[0] + s.d1 * g[1];
    for (std::size_t k = 2; k <= n; ++k)
        w[k] = s.d_minus1 * g[k - 2] + s.d0 * g[k - 1] + s.d1 * g[k];
    return w;
}

// Blend of consecutive weights for a point sitting q/m of the way between two coarse nodes.
inline std::vector<double> interp_weights(const std::vector<double>& w, int q, int m) {
    if (m < 1) throw std::invalid_argument("interp_weights needs m >= 1");
    if (q < 0 || q > m)
        throw std::invalid_argument("interp_weights: q=" + std::to_string(q) + " outside [0," +
                                    std::to_string(m) + "]");
    const double t = static_cast<double>(q) / m;
    std::vector<double> out(w.size());
    if (w.empty()) return out;
    out[0] = t * w[0];
    for (std::size_t k = 1; k < w.size(); ++k) out[k] = (1.0 - t) * w[k - 1] + t * w[k];
    return out;
}

// All weight families for one (scheme, alpha, length, m), built once and reused row by row.
struct WeightTable {
    std::vector<double> g;
    std::vector<double> w;
    std::vector<std::vector<double>> varpi;  // varpi[q][k]

    WeightTable() = default;
    WeightTable(const SchemeParams& s, double alpha, std::size_t n, int m = 1)
        : g(grunwald_coeffs(alpha, std::max<std::size_t>(n, 2))),
          w(shifted_weights(s, alpha, std::max<std::size_t>(n, 2))) {
        varpi.reserve(m + 1);
        for (int q = 0; q <= m; ++q) varpi.push_back(interp_weights(w, q, m));
    }

    // w_k with the convention w_k = 0 outside the stored range below zero.
    double weight(long k) const { return k < 0 ? 0.0 : w.at(static_cast<std::size_t>(k)); }
    double blended(long k, int q) const { return k < 0 ? 0.0 : varpi.at(q).at(static_cast<std::size_t>(k)); }
};

}  // namespace fracmesh
