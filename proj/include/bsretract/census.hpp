#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bsretract {

using BigInt = boost::multiprecision::cpp_int;

/// Exact data of one root-of-unity eigenvalue cycle: exponents m_j mod N with
/// m_{j+1} = u * m_j, u = q * p^{-1} mod N, so p * m_{j+1} = q * m_j (mod N).
struct OrbitDatum {
    int p = 0;
    int q = 0;
    std::int64_t modulus = 1;  // N
    std::int64_t multiplier = 0;  // u
    std::vector<std::int64_t> orbit;

    int length() const { return static_cast<int>(orbit.size()); }
    friend bool operator==(const OrbitDatum&, const OrbitDatum&) = default;
};

/// |p^k - q^k| exactly.
BigInt power_gap(int p, int q, int k);

/// O = prod_{k=1}^{n} |p^k - q^k|.
BigInt order_bound(int p, int q, int n);

/// max_{k <= n} |p^k - q^k|, saturated: every admissible eigenvalue order is
/// at most this, so it is the snapping cap for single eigenvalues.
std::int64_t eigenvalue_order_cap(int p, int q, int n);

/// Least k >= 1 with u^k = 1 (mod N). Throws NotAUnit.
std::int64_t mult_order(std::int64_t u, std::int64_t modulus);

/// Modular inverse of a unit; throws NotAUnit.
std::int64_t mod_inverse(std::int64_t x, std::int64_t modulus);

/// Non-negative residue of x mod N.
std::int64_t mod_floor(std::int64_t x, std::int64_t modulus);

/// Clamps to the int64 range (used to turn an order bound into a snapping cap).
std::int64_t saturate_int64(const BigInt& x);

struct CensusOptions {
    std::uint64_t factor_cap = 1'000'000;   // trial-division limit
    std::int64_t modulus_cap = 1'000'000;   // moduli above this are not expanded into orbits
};

/// A divisor range the enumeration could not cover, reported instead of dropped.
struct CensusGap {
    int k = 0;
    std::string value;  // decimal
    std::string reason;  // "unfactored" or "modulus_cap"
};

struct CensusReport {
    std::vector<OrbitDatum> orbits;
    std::vector<CensusGap> gaps;
};

/// Every unit-exponent orbit of x -> u x on Z/N of length exactly k, for each
/// k <= n_max and each divisor N > 1 of |p^k - q^k| coprime to pq, plus the
/// trivial orbit. Sorted by (k, N, smallest element). Each cycle appears once,
/// under the exact multiplicative order N of its eigenvalues.
CensusReport enumerate_orbits(int p, int q, int n_max, const CensusOptions& options = {});

/// Exact check of every OrbitDatum invariant.
bool verify_orbit(const OrbitDatum& d);

}  // namespace bsretract
