#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "bsretract/error.hpp"

namespace bsretract {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Throws InvalidArgument unless m is square, non-empty and finite.
void require_square_finite(const CMatrix& m, std::string_view what);

double hs_norm(const CMatrix& x);

/// Polar factors of an invertible matrix, A = unitary * positive.
struct PolarFactors {
    CMatrix unitary;
    CMatrix positive;
};

/// Left polar decomposition via SVD. Throws SingularMatrix when the
/// smallest singular value is at most 1e-12 times the largest.
PolarFactors polar(const CMatrix& a);

/// Hermitian functional calculus P^t for positive-definite P. The input is
/// symmetrized first; t == 0 returns the identity exactly.
CMatrix herm_power(const CMatrix& p, double t);

/// exp(H) for Hermitian H (symmetrized first).
CMatrix exp_herm(const CMatrix& h);

/// exp(H) - I and exp(-H) - I, computed with expm1 so that both stay
/// accurate when H is tiny. Used by the flow to form exact energy differences.
struct ExpHermIncrements {
    CMatrix forward;   // exp(H) - I
    CMatrix backward;  // exp(-H) - I
};
ExpHermIncrements exp_herm_increments(const CMatrix& h);

/// Eigenvalues with multiplicity. Normal inputs (commutator defect at most
/// 1e-8 |A|^2) go through the joint Hermitian-pair path; everything else
/// through a dense complex Schur solver. Throws NoConvergence.
std::vector<Complex> eigvals(const CMatrix& a);

/// Exact root of unity e^{2 pi i exponent / order} with gcd(exponent, order) = 1
/// (the trivial root is order 1, exponent 0).
struct RootOfUnity {
    std::int64_t order = 1;
    std::int64_t exponent = 0;

    Complex value() const;
    friend bool operator==(const RootOfUnity&, const RootOfUnity&) = default;
};

/// Nearest root of unity of order at most max_order. Throws NotARootOfUnity
/// when the nearest one is farther than tol.
RootOfUnity snap_root_of_unity(Complex lambda, std::int64_t max_order, double tol);

/// Inverse with a singularity gate (same threshold as polar).
CMatrix inverse(const CMatrix& a);

/// Integer power; negative exponents invert first.
CMatrix matrix_power(const CMatrix& a, std::int64_t k);

double unitarity_defect(const CMatrix& u);  // |U^dagger U - I|_HS
double commutator_norm(const CMatrix& x, const CMatrix& y);
double normality_defect(const CMatrix& x);  // |[X, X^dagger]|_HS

/// Condition number of the eigenvector matrix returned by the dense solver;
/// large values flag (near) non-diagonalizable input.
double eigenvector_condition(const CMatrix& a);

double condition_number(const CMatrix& a);

}  // namespace bsretract
