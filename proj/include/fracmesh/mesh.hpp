#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracmesh/mollify.hpp"

namespace fracmesh {

enum class MeshCase { FineLeft, FineRight };

enum class Grid { X, Y, Z };

struct NativeIndex {
    Grid grid;
    long index;
    bool operator==(const NativeIndex&) const = default;
};

namespace detail {

inline long exact_multiple(double value, const std::string& what) {
    const double r = std::round(value);
    if (std::abs(value - r) > 1e-12 * std::max(1.0, std::abs(value)))
        throw std::invalid_argument(what + " is not an integer multiple of the step (ratio " +
                                    std::to_string(value) + ")");
    return static_cast<long>(r);
}

inline long inverse_step(double h) {
    if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
    return exact_multiple(1.0 / h, "1/h");
}

}  // namespace detail

// Two-step partition of [0,b].  Positions are stored as integer multiples of the fine step 1/q
// so that node arithmetic never drifts.
class MeshConfig {
public:
    MeshConfig(const SplitSpec& spec, MeshCase kase, long fine_inverse, int m)
        : spec_(spec), case_(kase), q_(fine_inverse), m_(m) {
        if (q_ < 1) throw std::invalid_argument("fine step inverse must be >= 1");
        if (m_ < 1) throw std::invalid_argument("refinement ratio m must be >= 1");
        using detail::exact_multiple;
        const double qd = static_cast<double>(q_);
        if (case_ == MeshCase::FineLeft) {
            h1_ = 1.0 / qd;
            h2_ = m_ / qd;
            const long A = exact_multiple(spec.a * qd, "a");
            const long P = exact_multiple((spec.a + 2.0 * spec.eps) * qd, "a+2eps");
            const long B = exact_multiple(spec.b * qd, "b");
            if (P % m_ != 0) throw std::invalid_argument("a+2eps is not an integer multiple of the coarse step h2");
            if ((B - P) % m_ != 0)
                throw std::invalid_argument("b-a-2eps is not an integer multiple of the coarse step h2");
            N1_ = A - 1;
            NI_ = P - A + 1;
            N2_ = (B - P) / m_ - 1;
        } else {
            h2_ = 1.0 / qd;
            h1_ = m_ / qd;
            const long A = exact_multiple(spec.a * qd, "a");
            const long E2 = exact_multiple(2.0 * spec.eps * qd, "2eps");
            const long B = exact_multiple(spec.b * qd, "b");
            if (A % m_ != 0) throw std::invalid_argument("a is not an integer multiple of the coarse step h1");
            if ((B - A) % m_ != 0) throw std::invalid_argument("b-a is not an integer multiple of the coarse step h1");
            N1_ = A / m_ - 1;
            NI_ = E2 + 1;
            N2_ = B - A - E2 - 1;
        }
        if (N1_ < 0 || N2_ < 0) throw std::invalid_argument("mesh too coarse for the split parameters");
        N_ = N1_ + NI_ + N2_ + 1;
        fine_.resize(N_ + 1);
        nodes_.resize(N_ + 1);
        for (long n = 0; n <= N_; ++n) {
            fine_[n] = fine_of_node(n);
            nodes_[n] = static_cast<double>(fine_[n]) / qd;
        }
    }

    const SplitSpec& spec() const { return spec_; }
    MeshCase mesh_case() const { return case_; }
    long fine_inverse() const { return q_; }
    int m() const { return m_; }
    double h1() const { return h1_; }
    double h2() const { return h2_; }
    double h_fine() const { return 1.0 / static_cast<double>(q_); }
    long N1() const { return N1_; }
    long NI() const { return NI_; }
    long N2() const { return N2_; }
    long N() const { return N_; }
    long interior_size() const { return N_ - 1; }
    long fine_end() const { return fine_[N_]; }

    const std::vector<double>& nodes() const { return nodes_; }
    double node(long n) const { return nodes_.at(n); }
    long fine_index(long n) const { return fine_.at(n); }

    // Node carrying the given fine index, or -1 if that fine point is not a mesh node.
    long node_at_fine(long f) const {
        auto it = std::lower_bound(fine_.begin(), fine_.end(), f);
        if (it == fine_.end() || *it != f) return -1;
        return static_cast<long>(it - fine_.begin());
    }

    NativeIndex native(long n) const {
        if (n < 0 || n > N_) throw std::out_of_range("node index out of range");
        if (case_ == MeshCase::FineLeft) {
            const long P = N1_ + NI_;
            if (n <= P) return {Grid::X, n};
            return {Grid::Y, n - P};
        }
        if (n <= N1_) return {Grid::X, n};
        return {Grid::Y, n - N1_ - NI_};
    }

    long fine_of_native(const NativeIndex& k) const {
        if (case_ == MeshCase::FineLeft) {
            const long P = N1_ + NI_;
            switch (k.grid) {
                case Grid::X: return k.index;
                case Grid::Y: return P + k.index * m_;
                case Grid::Z: return N1_ + k.index;
            }
        }
        const long F = (N1_ + 1) * m_ + NI_ - 1;
        switch (k.grid) {
            case Grid::X: return k.index * m_;
            case Grid::Y: return F + k.index;
            case Grid::Z: return F + k.index - NI_;
        }
        return -1;
    }

    long relabel(const NativeIndex& k) const {
        const long n = node_at_fine(fine_of_native(k));
        if (n < 0) throw std::out_of_range("native grid point is not a node of the relabeled mesh");
        return n;
    }

    // Step weight attached to interior node n in the discrete L2 norm.
    double norm_weight(long n) const {
        const long fine_count = case_ == MeshCase::FineLeft ? N1_ + NI_ : N1_;
        return n <= fine_count ? h1_ : h2_;
    }

private:
    long fine_of_node(long n) const {
        if (case_ == MeshCase::FineLeft) {
            const long P = N1_ + NI_;
            return n <= P ? n : P + (n - P) * m_;
        }
        return n <= N1_ ? n * m_ : (N1_ + 1) * m_ + (n - N1_ - 1);
    }

    SplitSpec spec_;
    MeshCase case_;
    long q_;
    int m_;
    double h1_ = 0.0, h2_ = 0.0;
    long N1_ = 0, NI_ = 0, N2_ = 0, N_ = 0;
    std::vector<long> fine_;
    std::vector<double> nodes_;
};

inline MeshConfig build_mesh(const SplitSpec& spec, MeshCase kase, double h_fine, int m) {
    return MeshConfig(spec, kase, detail::inverse_step(h_fine), m);
}

// The same partition seen from x -> b - x.  The fine side flips, so the case flips too.
inline MeshConfig reflect(const MeshConfig& mesh) {
    const auto& s = mesh.spec();
    SplitSpec r(s.b - s.a - 2.0 * s.eps, s.eps, s.b);
    MeshCase c = mesh.mesh_case() == MeshCase::FineLeft ? MeshCase::FineRight : MeshCase::FineLeft;
    return MeshConfig(r, c, mesh.fine_inverse(), mesh.m());
}

inline double discrete_l2(const MeshConfig& mesh, const std::vector<double>& e) {
    if (static_cast<long>(e.size()) != mesh.interior_size())
        throw std::invalid_argument("discrete_l2: expected " + std::to_string(mesh.interior_size()) +
                                    " interior values, got " + std::to_string(e.size()));
    double s = 0.0;
    for (long n = 1; n < mesh.N(); ++n) s += mesh.norm_weight(n) * e[n - 1] * e[n - 1];
    return std::sqrt(s);
}

// Uniform-grid norm sqrt(h * sum e^2).
inline double uniform_l2(double h, const std::vector<double>& e) {
    double s = 0.0;
    for (double v : e) s += v * v;
    return std::sqrt(h * s);
}

inline std::vector<double> observed_rate(const std::vector<std::pair<double, double>>& levels) {
    if (levels.size() < 2) throw std::invalid_argument("observed_rate needs at least two levels");
    std::vector<double> rates;
    for (std::size_t i = 1; i < levels.size(); ++i) {
        const auto [hp, ep] = levels[i - 1];
        const auto [h, e] = levels[i];
        if (!(h < hp)) throw std::invalid_argument("observed_rate: steps must strictly decrease");
        if (ep == 0.0 || e == 0.0) {
            rates.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        rates.push_back(std::log(ep / e) / std::log(hp / h));
    }
    return rates;
}

// Least-squares slope of log e against log h.
inline double fitted_rate(const std::vector<std::pair<double, double>>& levels) {
    if (levels.size() < 2) throw std::invalid_argument("fitted_rate needs at least two levels");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(levels.size());
    for (auto [h, e] : levels) {
        if (!(e > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double x = std::log(h), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fracmesh
