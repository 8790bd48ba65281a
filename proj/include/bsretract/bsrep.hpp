#pragma once

#include <cstdint>

#include "bsretract/census.hpp"
#include "bsretract/numerics.hpp"

namespace bsretract {

/// BS(p, q) = <a, b | a b^p a^-1 = b^q> with gcd(|p|, |q|) = 1 and |p| != |q|.
class BSGroup {
public:
    /// Throws InvalidGroup when the parameters violate the hypotheses.
    BSGroup(int p, int q);

    int p() const { return p_; }
    int q() const { return q_; }

    static bool valid(int p, int q);

    friend bool operator==(const BSGroup&, const BSGroup&) = default;

private:
    int p_;
    int q_;
};

/// A point (rho(a), rho(b)) of Hom(BS(p,q), GL_n C). Membership in the variety
/// is a residual tolerance checked by callers, never assumed.
struct Rep {
    BSGroup group;
    CMatrix a;
    CMatrix b;

    /// Validates shapes and finiteness (not the relation).
    Rep(BSGroup group, CMatrix a, CMatrix b);

    int dim() const { return static_cast<int>(a.rows()); }
};

inline constexpr double kRepTolerance = 1e-8;

/// |A B^p A^-1 - B^q|_HS. Throws SingularMatrix.
double relation_residual(const Rep& rep);

/// Block built from an orbit: B = diag(zeta^{m_j}), A e_{j+1} = e_j and
/// A e_1 = chi e_k. Throws InvalidOrbit.
Rep from_orbit_datum(const OrbitDatum& d, Complex chi);

/// Throws GroupMismatch.
Rep direct_sum(const Rep& r1, const Rep& r2);

/// (g A g^-1, g B g^-1). Throws SingularMatrix.
Rep conjugate(const Rep& rep, const CMatrix& g);

/// Same, with a precomputed inverse.
Rep conjugate(const Rep& rep, const CMatrix& g, const CMatrix& g_inv);

/// Rescales into SL_n: A by det(A)^{-1/n}; B by a scalar c with c^{q-p} = 1
/// and c^n det(B) = 1 (the only scalars that keep the relation). Throws
/// NotSpecialLinear when no such c exists.
Rep to_special_linear(const Rep& rep, double tol = 1e-10);

struct RandomRepOptions {
    double max_condition = 100.0;
    double chi_min_modulus = 0.5;
    double chi_max_modulus = 2.0;
    bool special_linear = false;
};

/// Deterministic in seed: a census-backed direct sum of orbit blocks of total
/// dimension n (trivial blocks pad), conjugated by a random g with cond(g)
/// at most max_condition.
Rep random_rep(int p, int q, int n, std::uint64_t seed, const RandomRepOptions& options = {});

}  // namespace bsretract
