#include "modelock/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>
#include <Eigen/SVD>

namespace modelock {

bool EigenTriple::has_complex_pair() const {
    return std::any_of(values.begin(), values.end(),
                       [](const Complex& v) { return v.imag() != 0.0; });
}

double EigenTriple::max_modulus() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
}

std::optional<RoleTriple> role_order(const EigenTriple& e) {
    if (e.has_complex_pair()) return std::nullopt;
    std::array<double, 3> r{e[0].real(), e[1].real(), e[2].real()};
    std::sort(r.begin(), r.end());
    if (r[0] >= 0.0) return std::nullopt;
    return RoleTriple{r[2], r[0], r[1]};
}

std::array<double, 3> characteristic_coefficients(const Matrix3& m) {
    const double tr = m.trace();
    const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                          m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                       m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                       m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    return {tr, minors, det};
}

EigenTriple sorted_triple(std::array<Complex, 3> v) {
    std::sort(v.begin(), v.end(), [](const Complex& a, const Complex& b) {
        const double ma = std::abs(a), mb = std::abs(b);
        const double scale = std::max({ma, mb, 1e-300});
        if (std::abs(ma - mb) > 1e-12 * scale) return ma > mb;
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return EigenTriple{v};
}

namespace {

// Monic cubic lambda^3 + a2 lambda^2 + a1 lambda + a0.
struct Cubic {
    double a2, a1, a0;
    double operator()(double x) const { return ((x + a2) * x + a1) * x + a0; }
    double derivative(double x) const { return (3.0 * x + 2.0 * a2) * x + a1; }
};

double polish(const Cubic& p, double x) {
    double fx = p(x);
    for (int it = 0; it < 8; ++it) {
        const double d = p.derivative(x);
        if (d == 0.0) break;
        const double next = x - fx / d;
        const double fnext = p(next);
        if (!(std::abs(fnext) < std::abs(fx))) break;
        x = next;
        fx = fnext;
        if (fx == 0.0) break;
    }
    return x;
}

}  // namespace

EigenTriple eigenvalues3(const Matrix3& m) {
    const auto c = characteristic_coefficients(m);
    const Cubic poly{-c[0], c[1], -c[2]};
    const double shift = poly.a2 / 3.0;
    const double p = poly.a1 - poly.a2 * poly.a2 / 3.0;
    const double q = 2.0 * poly.a2 * poly.a2 * poly.a2 / 27.0 - poly.a2 * poly.a1 / 3.0 + poly.a0;
    const double disc = 0.25 * q * q + p * p * p / 27.0;

    std::array<Complex, 3> roots;
    if (disc > 0.0) {
        // One real root; the pair comes from deflation.
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-0.5 * q - std::copysign(sq, q));
        double t = (u == 0.0) ? 0.0 : u - p / (3.0 * u);
        double r = polish(poly, t - shift);
        const double b = poly.a2 + r;
        const double cc = poly.a1 + r * b;
        const double qd = b * b - 4.0 * cc;
        roots[0] = r;
        if (qd < 0.0) {
            const double im = 0.5 * std::sqrt(-qd);
            roots[1] = Complex(-0.5 * b, im);
            roots[2] = Complex(-0.5 * b, -im);
        } else {
            // Numerically at the real/complex boundary: report the real pair.
            const double s = std::sqrt(qd);
            const double q1 = -0.5 * (b + std::copysign(s, b));
            roots[1] = q1;
            roots[2] = (q1 != 0.0) ? cc / q1 : 0.0;
            roots[1] = polish(poly, roots[1].real());
            roots[2] = polish(poly, roots[2].real());
        }
    } else if (p == 0.0) {
        roots = {-shift, -shift, -shift};
    } else {
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            const double t = r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
            roots[k] = polish(poly, t - shift);
        }
    }
    return sorted_triple(roots);
}

State3 real_eigenvector(const Matrix3& m, double lambda) {
    const Matrix3 a = m - lambda * Matrix3::Identity();
    const std::array<State3, 3> crosses{a.row(0).transpose().cross(a.row(1).transpose()),
                                        a.row(0).transpose().cross(a.row(2).transpose()),
                                        a.row(1).transpose().cross(a.row(2).transpose())};
    const State3* best = &crosses[0];
    for (const auto& c : crosses)
        if (c.norm() > best->norm()) best = &c;
    if (best->norm() > 1e-300) return best->normalized();
    // Rank <= 1: fall back on the smallest right singular vector.
    Eigen::JacobiSVD<Matrix3> svd(a, Eigen::ComputeFullV);
    return svd.matrixV().col(2);
}

double condition_number(const Matrix3& m) {
    Eigen::JacobiSVD<Matrix3> svd(m);
    const auto& s = svd.singularValues();
    if (s(2) == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / s(2);
}

}  // namespace modelock
