#pragma once

// Reference computations used by the tests. They rely only on map
// evaluation and Eigen, never on the library's Jacobians, cycle or
// eigenvalue code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "modelock/maps.hpp"

namespace oracle {

using modelock::BoundMap;
using modelock::Matrix3;
using modelock::State3;

/// Central-difference Jacobian.
inline Matrix3 fd_jacobian(const BoundMap& map, const State3& s, double h = 1e-6) {
    Matrix3 J;
    for (int j = 0; j < 3; ++j) {
        State3 e = State3::Zero();
        e[j] = h;
        J.col(j) = (map(s + e) - map(s - e)) / (2.0 * h);
    }
    return J;
}

/// Product of finite-difference Jacobians along the orbit of p0.
inline Matrix3 fd_monodromy(const BoundMap& map, State3 p, int period) {
    Matrix3 M = Matrix3::Identity();
    for (int i = 0; i < period; ++i) {
        M = fd_jacobian(map, p) * M;
        p = map(p);
    }
    return M;
}

/// Eigenvalues by Eigen's general solver, sorted by descending modulus.
inline std::vector<std::complex<double>> eigenvalues(const Matrix3& m) {
    Eigen::EigenSolver<Matrix3> es(m, false);
    std::vector<std::complex<double>> v(es.eigenvalues().begin(), es.eigenvalues().end());
    std::sort(v.begin(), v.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
    return v;
}

/// Largest distance between matched multisets of complex numbers
/// (greedy nearest matching, fine for well-separated values).
inline double multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
    double worst = 0.0;
    for (const auto& x : a) {
        auto it = std::min_element(b.begin(), b.end(), [&](auto p, auto q) { return std::abs(p - x) < std::abs(q - x); });
        worst = std::max(worst, std::abs(*it - x));
        b.erase(it);
    }
    return worst;
}

/// Lyapunov exponent of a periodic orbit from its multipliers.
inline double cycle_exponent(const BoundMap& map, const State3& p0, int period) {
    return std::log(std::abs(eigenvalues(fd_monodromy(map, p0, period)).front())) / period;
}

/// Distance from q to the polyline.
inline double polyline_distance(const State3& q, const std::vector<State3>& line) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        const State3 d = line[i + 1] - line[i];
        const double len2 = d.squaredNorm();
        double t = len2 > 0 ? (q - line[i]).dot(d) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, (line[i] + t * d - q).norm());
    }
    if (line.size() == 1) best = (line[0] - q).norm();
    return best;
}

}  // namespace oracle
