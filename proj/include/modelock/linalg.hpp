#pragma once

#include <array>
#include <complex>
#include <optional>

#include "modelock/maps.hpp"

namespace modelock {

using Complex = std::complex<double>;

/// Three multipliers of a cycle, ordered by descending modulus with ties
/// broken by descending real part. A conjugate pair is always adjacent,
/// positive imaginary part first.
struct EigenTriple {
    std::array<Complex, 3> values{};

    const Complex& operator[](std::size_t i) const { return values[i]; }
    Complex& operator[](std::size_t i) { return values[i]; }

    bool has_complex_pair() const;
    double max_modulus() const;
    Complex product() const { return values[0] * values[1] * values[2]; }
};

/// Multipliers in the roles used to discuss torus doubling: lambda2 is the
/// most negative real multiplier (the one that goes through -1), lambda1 the
/// larger of the other two, lambda3 the remaining "third" multiplier.
struct RoleTriple {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
};

/// Empty when the triple contains a complex pair or no negative multiplier.
std::optional<RoleTriple> role_order(const EigenTriple& e);

/// Coefficients of det(lambda I - M) = lambda^3 - c[0] lambda^2 + c[1] lambda - c[2]
/// (trace, sum of principal 2x2 minors, determinant).
std::array<double, 3> characteristic_coefficients(const Matrix3& m);

/// Eigenvalues of a real 3x3 matrix from its characteristic cubic.
///
/// The real root(s) come from the closed-form (Cardano or trigonometric)
/// solution and are polished by Newton on the cubic; in the one-real-root
/// case the conjugate pair comes from the deflated quadratic. Conjugate
/// symmetry holds exactly by construction.
EigenTriple eigenvalues3(const Matrix3& m);

/// Sorts into the EigenTriple convention.
EigenTriple sorted_triple(std::array<Complex, 3> v);

/// Unit eigenvector for a simple real eigenvalue.
State3 real_eigenvector(const Matrix3& m, double lambda);

/// Ratio of extreme singular values (infinity for singular matrices).
double condition_number(const Matrix3& m);

}  // namespace modelock
