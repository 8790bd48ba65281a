#include "bsretract/census.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include <boost/integer/mod_inverse.hpp>

#include "bsretract/error.hpp"

namespace bsretract {

namespace {

std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t m) {
    return static_cast<std::int64_t>(static_cast<__int128>(a) * b % m);
}

struct Factorization {
    std::map<std::uint64_t, int> primes;
    BigInt cofactor = 1;  // unfactored remainder (1 when complete)
};

Factorization factor(BigInt x, std::uint64_t cap) {
    Factorization f;
    for (std::uint64_t d = 2; d <= cap && BigInt(d) * d <= x; d += (d == 2 ? 1 : 2)) {
        while (x % d == 0) {
            ++f.primes[d];
            x /= d;
        }
    }
    if (x > 1) {
        if (x <= BigInt(cap) * cap && x <= std::numeric_limits<std::uint64_t>::max()) {
            ++f.primes[static_cast<std::uint64_t>(x)];
        } else {
            f.cofactor = x;
        }
    }
    return f;
}

std::vector<BigInt> divisors(const Factorization& f) {
    std::vector<BigInt> out{1};
    for (const auto& [prime, exp] : f.primes) {
        const std::size_t size = out.size();
        BigInt pk = 1;
        for (int e = 1; e <= exp; ++e) {
            pk *= prime;
            for (std::size_t i = 0; i < size; ++i) out.push_back(out[i] * pk);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::int64_t>> unit_cycles(std::int64_t modulus, std::int64_t u) {
    std::vector<std::vector<std::int64_t>> cycles;
    if (modulus == 1) return {{0}};
    std::vector<char> seen(static_cast<std::size_t>(modulus), 0);
    for (std::int64_t x = 1; x < modulus; ++x) {
        if (seen[static_cast<std::size_t>(x)] || std::gcd(x, modulus) != 1) continue;
        std::vector<std::int64_t> cycle;
        std::int64_t y = x;
        do {
            seen[static_cast<std::size_t>(y)] = 1;
            cycle.push_back(y);
            y = mul_mod(u, y, modulus);
        } while (y != x);
        cycles.push_back(std::move(cycle));
    }
    return cycles;
}

}  // namespace

std::int64_t mod_floor(std::int64_t x, std::int64_t modulus) {
    const std::int64_t r = x % modulus;
    return r < 0 ? r + modulus : r;
}

std::int64_t mod_inverse(std::int64_t x, std::int64_t modulus) {
    if (modulus == 1) return 0;
    const std::int64_t r = mod_floor(x, modulus);
    if (std::gcd(r, modulus) != 1) {
        throw Error(ErrorCode::NotAUnit,
                    std::to_string(x) + " is not a unit mod " + std::to_string(modulus));
    }
    return boost::integer::mod_inverse(r, modulus);
}

BigInt power_gap(int p, int q, int k) {
    BigInt a = boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(k));
    BigInt b = boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(k));
    return abs(a - b);
}

BigInt order_bound(int p, int q, int n) {
    BigInt out = 1;
    for (int k = 1; k <= n; ++k) out *= power_gap(p, q, k);
    return out;
}

std::int64_t eigenvalue_order_cap(int p, int q, int n) {
    BigInt out = 1;
    for (int k = 1; k <= n; ++k) out = std::max(out, power_gap(p, q, k));
    return saturate_int64(out);
}

std::int64_t mult_order(std::int64_t u, std::int64_t modulus) {
    if (modulus < 1) throw Error(ErrorCode::InvalidArgument, "modulus must be positive");
    const std::int64_t r = mod_floor(u, modulus);
    if (std::gcd(r, modulus) != 1) {
        throw Error(ErrorCode::NotAUnit,
                    std::to_string(u) + " is not a unit mod " + std::to_string(modulus));
    }
    if (modulus == 1) return 1;
    std::int64_t x = r;
    std::int64_t k = 1;
    while (x != 1) {
        x = mul_mod(x, r, modulus);
        ++k;
    }
    return k;
}

std::int64_t saturate_int64(const BigInt& x) {
    if (x > std::numeric_limits<std::int64_t>::max()) return std::numeric_limits<std::int64_t>::max();
    if (x < std::numeric_limits<std::int64_t>::min()) return std::numeric_limits<std::int64_t>::min();
    return static_cast<std::int64_t>(x);
}

CensusReport enumerate_orbits(int p, int q, int n_max, const CensusOptions& options) {
    CensusReport report;
    report.orbits.push_back(OrbitDatum{p, q, 1, 0, {0}});
    const std::int64_t pq = std::abs(static_cast<std::int64_t>(p) * q);

    for (int k = 1; k <= n_max; ++k) {
        const BigInt gap = power_gap(p, q, k);
        if (gap == 0) continue;
        const Factorization f = factor(gap, options.factor_cap);
        if (f.cofactor != 1) report.gaps.push_back({k, f.cofactor.str(), "unfactored"});

        for (const BigInt& big : divisors(f)) {
            if (big <= 1) continue;
            if (big > options.modulus_cap) {
                report.gaps.push_back({k, big.str(), "modulus_cap"});
                continue;
            }
            const auto modulus = static_cast<std::int64_t>(big);
            // A prime shared with p would divide q^k as well; gcd(p, q) = 1 rules it out.
            if (std::gcd(modulus, pq) != 1) continue;
            const std::int64_t u = mul_mod(mod_floor(q, modulus), mod_inverse(p, modulus), modulus);
            if (mult_order(u, modulus) != k) continue;
            for (auto& cycle : unit_cycles(modulus, u)) {
                report.orbits.push_back(OrbitDatum{p, q, modulus, u, std::move(cycle)});
            }
        }
    }

    std::stable_sort(report.orbits.begin(), report.orbits.end(), [](const auto& a, const auto& b) {
        if (a.length() != b.length()) return a.length() < b.length();
        if (a.modulus != b.modulus) return a.modulus < b.modulus;
        return a.orbit.front() < b.orbit.front();
    });
    return report;
}

bool verify_orbit(const OrbitDatum& d) {
    const std::int64_t n = d.modulus;
    if (n < 1 || d.orbit.empty() || d.p == 0 || d.q == 0) return false;
    const std::int64_t pq = std::abs(static_cast<std::int64_t>(d.p) * d.q);
    if (std::gcd(n, pq) != 1) return false;
    if (d.multiplier < 0 || d.multiplier >= n) return false;
    if (mul_mod(d.multiplier, mod_floor(d.p, n), n) != mod_floor(d.q, n)) return false;

    const std::size_t k = d.orbit.size();
    std::vector<std::int64_t> sorted = d.orbit;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
    for (std::size_t j = 0; j < k; ++j) {
        const std::int64_t cur = d.orbit[j];
        const std::int64_t next = d.orbit[(j + 1) % k];
        if (cur < 0 || cur >= n) return false;
        if (mul_mod(d.multiplier, cur, n) != next) return false;
    }
    const bool has_unit = std::gcd(d.orbit.front(), n) == 1;
    if (has_unit && power_gap(d.p, d.q, static_cast<int>(k)) % n != 0) return false;
    return true;
}

}  // namespace bsretract
