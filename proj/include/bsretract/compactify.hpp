#pragma once

#include <cstdint>
#include <vector>

#include "bsretract/bsrep.hpp"

namespace bsretract {

/// <B> with its exact order; elements are B^0 .. B^{order-1}.
struct FiniteCyclicGroup {
    CMatrix generator;
    std::int64_t order = 1;
    std::vector<CMatrix> elements;
};

/// Positive-definite Hermitian Q with det Q = 1; stands for the maximal
/// compact U(Q) = { g : g^dagger Q g = Q }.
struct HermitianForm {
    CMatrix q;
};

/// Per-eigenvalue roots of unity snapped at (max_order, tol).
std::vector<RootOfUnity> snapped_eigenvalues(const CMatrix& b, std::int64_t max_order, double tol);

/// lcm of the snapped eigenvalue orders, backed by |B^order - I| <= n tol order.
/// Throws NotFiniteOrder.
std::int64_t detect_finite_order(const CMatrix& b, std::int64_t max_order, double tol);

/// Throws DegenerateGroup when two powers coincide (HS distance <= 1e-6) or
/// B^order is not the identity within 1e-8.
FiniteCyclicGroup generated_group(const CMatrix& b, std::int64_t order);

/// Q = mean of h^dagger h over the group, normalized to det Q = 1.
HermitianForm averaged_form(const FiniteCyclicGroup& h);

/// max over elements of |h^dagger Q h - Q|_HS.
double form_invariance_defect(const FiniteCyclicGroup& h, const HermitianForm& form);

/// Conjugation by Q^{1/2}; afterwards every element of the group is unitary.
Rep conjugate_into_unitary(const Rep& rep, const HermitianForm& form);

struct NormalityFit {
    std::int64_t exponent = 0;
    double defect = 0.0;  // |A B A^-1 - B^j|_HS
};

/// j in [0, order) with B^j closest to A B A^-1; never throws on a poor fit.
NormalityFit closest_power(const Rep& rep, std::int64_t order);

/// j in [0, order) minimizing |A B A^-1 - B^j|. Throws NotNormalizing when
/// the minimum exceeds tol. Small orders are scanned; large ones solve for j
/// from the spectra of B and A B A^-1.
NormalityFit normality_exponent(const Rep& rep, std::int64_t order, double tol);

}  // namespace bsretract
