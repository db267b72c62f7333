#pragma once

// Reference implementations used only by tests. They deliberately avoid the
// library's own data layouts: coefficients are keyed by label strings and
// every polynomial term is evaluated by parsing its label.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "actlex/epa.hpp"
#include "actlex/impression.hpp"

namespace oracle {

using Profile = std::array<double, 9>;
using LabeledCoeffs = std::map<std::string, std::array<double, 9>>;

inline std::vector<std::string> all_labels() {
    const std::string chars = "ABO", dims = "epa";
    std::vector<std::string> out{"1"};
    for (char c : chars)
        for (char d : dims) out.push_back(std::string{c, d});
    const std::pair<char, char> pairs[] = {{'A', 'B'}, {'A', 'O'}, {'B', 'O'}};
    for (auto [x, y] : pairs)
        for (char d1 : dims)
            for (char d2 : dims) out.push_back(std::string{x, d1, y, d2});
    for (char d1 : dims)
        for (char d2 : dims)
            for (char d3 : dims) out.push_back(std::string{'A', d1, 'B', d2, 'O', d3});
    return out;
}

// Product of the profile values a label names, e.g. "AeBpOa" -> Ae*Bp*Oa.
inline double term_value(const std::string& label, const Profile& x) {
    if (label == "1") return 1.0;
    double v = 1.0;
    for (std::size_t i = 0; i + 1 < label.size(); i += 2) {
        const int who = label[i] == 'A' ? 0 : label[i] == 'B' ? 1 : label[i] == 'O' ? 2 : -1;
        const int dim = label[i + 1] == 'e' ? 0 : label[i + 1] == 'p' ? 1 : label[i + 1] == 'a' ? 2 : -1;
        if (who < 0 || dim < 0) throw std::logic_error("bad label " + label);
        v *= x[3 * who + dim];
    }
    return v;
}

inline Profile evaluate(const LabeledCoeffs& coeffs, const Profile& x) {
    Profile out{};
    for (const auto& [label, row] : coeffs) {
        const double t = term_value(label, x);
        for (int c = 0; c < 9; ++c) out[c] += t * row[c];
    }
    return out;
}

inline LabeledCoeffs random_coeffs(std::mt19937_64& gen, double scale = 0.5, double density = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale), keep(0.0, 1.0);
    LabeledCoeffs out;
    for (const auto& l : all_labels()) {
        std::array<double, 9> row{};
        for (auto& v : row) v = keep(gen) < density ? u(gen) : 0.0;
        // Higher-order terms get smaller weights so outputs stay moderate.
        const double damp = l.size() == 6 ? 0.05 : l.size() == 4 ? 0.2 : 1.0;
        for (auto& v : row) v *= damp;
        out[l] = row;
    }
    return out;
}

inline actlex::CoefficientSet to_set(const LabeledCoeffs& coeffs) {
    auto set = actlex::CoefficientSet::zero("oracle");
    for (const auto& [label, row] : coeffs)
        for (std::size_t c = 0; c < 9; ++c) set.set(label, c, row[c]);
    return set;
}

inline Profile random_profile(std::mt19937_64& gen, double lo = -4.3, double hi = 4.3) {
    std::uniform_real_distribution<double> u(lo, hi);
    Profile x;
    for (auto& v : x) v = u(gen);
    return x;
}

inline double squared_gap(const Profile& a, const Profile& b) {
    double s = 0.0;
    for (int i = 0; i < 9; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

// Residual of an event with one slot unknown, built from the term-by-term
// evaluator. `place` writes v into the inputs and fundamentals.
struct Quadratic {
    Eigen::Matrix3d h;  // D^T D
    Eigen::Vector3d g;  // D^T c
    double cc = 0.0;    // c^T c
    double operator()(double a, double b, double c) const {
        const Eigen::Vector3d v(a, b, c);
        return v.dot(h * v) + 2.0 * g.dot(v) + cc;
    }
};

struct AffineModel {
    Eigen::Matrix<double, 9, 1> c;
    Eigen::Matrix<double, 9, 3> d;
    double max_affinity_error = 0.0;
    Quadratic quadratic() const { return {d.transpose() * d, d.transpose() * c, c.squaredNorm()}; }
};

using Placement = std::function<void(const std::array<double, 3>& v, Profile& input, Profile& fundamental)>;

inline AffineModel affine_residual(const LabeledCoeffs& coeffs, const Placement& place, std::mt19937_64& gen) {
    auto residual = [&](const std::array<double, 3>& v) {
        Profile in{}, fund{};
        place(v, in, fund);
        const Profile t = evaluate(coeffs, in);
        Eigen::Matrix<double, 9, 1> r;
        for (int i = 0; i < 9; ++i) r[i] = t[i] - fund[i];
        return r;
    };
    AffineModel m;
    m.c = residual({0, 0, 0});
    for (int j = 0; j < 3; ++j) {
        std::array<double, 3> e{0, 0, 0};
        e[j] = 1.0;
        m.d.col(j) = residual(e) - m.c;
    }
    std::uniform_real_distribution<double> u(-4.3, 4.3);
    for (int k = 0; k < 10; ++k) {
        const std::array<double, 3> v{u(gen), u(gen), u(gen)};
        const Eigen::Vector3d ve(v[0], v[1], v[2]);
        m.max_affinity_error = std::max(m.max_affinity_error, (residual(v) - (m.c + m.d * ve)).cwiseAbs().maxCoeff());
    }
    return m;
}

// Minimum of the quadratic over the grid -4.3 + step*i covering [-4.3, 4.3]^3.
inline double grid_minimum(const Quadratic& q, double step = 0.05) {
    const int n = static_cast<int>(std::lround(8.6 / step)) + 1;
    std::vector<double> axis(n);
    for (int i = 0; i < n; ++i) axis[i] = -4.3 + step * i;
    double best = std::numeric_limits<double>::infinity();
    for (double a : axis)
        for (double b : axis)
            for (double c : axis) best = std::min(best, q(a, b, c));
    return best;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

// ABO code from the label-keyed evaluator: bit i set when transient i exceeds
// fundamental i, first dimension in the most significant position.
inline int abo_code(const LabeledCoeffs& coeffs, const Profile& f) {
    const Profile t = evaluate(coeffs, f);
    int code = 0;
    for (int i = 0; i < 9; ++i)
        if (t[i] > f[i]) code += 1 << (8 - i);
    return code;
}

// Exact best 2-partition by enumeration (n <= ~16).
inline double best_two_partition(const std::vector<actlex::Epa>& pts, std::uint32_t* mask_out = nullptr) {
    const std::size_t n = pts.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask < (1u << (n - 1)); ++mask) {
        double cost = 0.0;
        for (int side = 0; side < 2; ++side) {
            actlex::Epa sum{};
            int count = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (((mask >> i) & 1u) == static_cast<std::uint32_t>(side)) {
                    sum = sum + pts[i];
                    ++count;
                }
            }
            const actlex::Epa mean = (1.0 / count) * sum;
            for (std::size_t i = 0; i < n; ++i) {
                if (((mask >> i) & 1u) == static_cast<std::uint32_t>(side)) cost += actlex::squared_distance(pts[i], mean);
            }
        }
        if (cost < best) {
            best = cost;
            if (mask_out) *mask_out = mask;
        }
    }
    return best;
}

// Ordinary least squares with intercept: rows of x -> rows of y.
struct LinearFit {
    Eigen::MatrixXd w;  // (d+1) x k, last row is the intercept
    std::vector<double> predict(const std::vector<double>& x) const {
        std::vector<double> out(w.cols(), 0.0);
        for (Eigen::Index k = 0; k < w.cols(); ++k) {
            double s = w(w.rows() - 1, k);
            for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * w(static_cast<Eigen::Index>(i), k);
            out[k] = s;
        }
        return out;
    }
};

inline LinearFit least_squares(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y) {
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    const Eigen::Index d = static_cast<Eigen::Index>(x.front().size());
    const Eigen::Index k = static_cast<Eigen::Index>(y.front().size());
    Eigen::MatrixXd a(n, d + 1), b(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = x[i][j];
        a(i, d) = 1.0;
        for (Eigen::Index j = 0; j < k; ++j) b(i, j) = y[i][j];
    }
    return {a.colPivHouseholderQr().solve(b)};
}

}  // namespace oracle
