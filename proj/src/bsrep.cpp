#include "bsretract/bsrep.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "bsretract/random.hpp"

namespace bsretract {

BSGroup::BSGroup(int p, int q) : p_(p), q_(q) {
    if (!valid(p, q)) {
        throw Error(ErrorCode::InvalidGroup,
                    "BS(" + std::to_string(p) + "," + std::to_string(q) +
                        ") needs nonzero coprime p, q with |p| != |q|");
    }
}

bool BSGroup::valid(int p, int q) {
    return p != 0 && q != 0 && std::abs(p) != std::abs(q) && std::gcd(p, q) == 1;
}

Rep::Rep(BSGroup g, CMatrix a_in, CMatrix b_in) : group(g), a(std::move(a_in)), b(std::move(b_in)) {
    require_square_finite(a, "rho(a)");
    require_square_finite(b, "rho(b)");
    if (a.rows() != b.rows()) throw Error(ErrorCode::InvalidArgument, "rho(a), rho(b) dimension mismatch");
}

double relation_residual(const Rep& rep) {
    const CMatrix lhs = rep.a * matrix_power(rep.b, rep.group.p()) * inverse(rep.a);
    return (lhs - matrix_power(rep.b, rep.group.q())).norm();
}

Rep from_orbit_datum(const OrbitDatum& d, Complex chi) {
    if (!verify_orbit(d)) {
        throw Error(ErrorCode::InvalidOrbit, "orbit fails p*m_{j+1} = q*m_j (mod N) or another invariant");
    }
    if (chi == Complex(0.0)) throw Error(ErrorCode::InvalidArgument, "chi must be nonzero");
    const int k = d.length();
    CMatrix a = CMatrix::Zero(k, k);
    CMatrix b = CMatrix::Zero(k, k);
    for (int j = 0; j < k; ++j) {
        b(j, j) = RootOfUnity{d.modulus, d.orbit[static_cast<std::size_t>(j)]}.value();
        if (j + 1 < k) a(j, j + 1) = 1.0;
    }
    a(k - 1, 0) = chi;
    return Rep(BSGroup(d.p, d.q), std::move(a), std::move(b));
}

Rep direct_sum(const Rep& r1, const Rep& r2) {
    if (!(r1.group == r2.group)) throw Error(ErrorCode::GroupMismatch, "direct sum of different groups");
    const int n1 = r1.dim(), n2 = r2.dim();
    CMatrix a = CMatrix::Zero(n1 + n2, n1 + n2);
    CMatrix b = CMatrix::Zero(n1 + n2, n1 + n2);
    a.topLeftCorner(n1, n1) = r1.a;
    a.bottomRightCorner(n2, n2) = r2.a;
    b.topLeftCorner(n1, n1) = r1.b;
    b.bottomRightCorner(n2, n2) = r2.b;
    return Rep(r1.group, std::move(a), std::move(b));
}

Rep conjugate(const Rep& rep, const CMatrix& g) { return conjugate(rep, g, inverse(g)); }

Rep conjugate(const Rep& rep, const CMatrix& g, const CMatrix& g_inv) {
    return Rep(rep.group, g * rep.a * g_inv, g * rep.b * g_inv);
}

Rep to_special_linear(const Rep& rep, double tol) {
    const int n = rep.dim();
    const Complex det_a = rep.a.determinant();
    const Complex det_b = rep.b.determinant();
    const CMatrix a = rep.a * std::pow(det_a, -1.0 / n);

    const int span = std::abs(rep.group.q() - rep.group.p());
    for (int m = 0; m < span; ++m) {
        const Complex c = RootOfUnity{span, m}.value();
        if (std::abs(std::pow(c, n) * det_b - 1.0) <= tol) return Rep(rep.group, a, rep.b * c);
    }
    throw Error(ErrorCode::NotSpecialLinear, "no admissible scalar brings det(rho(b)) to 1");
}

namespace {

Rep draw_block_sum(int n, const std::vector<OrbitDatum>& orbits, CounterRng& rng,
                   const RandomRepOptions& options) {
    std::vector<Rep> blocks;
    int remaining = n;
    while (remaining > 0) {
        std::vector<const OrbitDatum*> fits;
        for (const auto& d : orbits) {
            if (d.length() <= remaining) fits.push_back(&d);
        }
        if (fits.empty()) throw Error(ErrorCode::NoOrbitFits, "no census orbit fits the remaining dimension");
        const OrbitDatum& d = *fits[rng.below(fits.size())];
        const double modulus = std::exp(rng.uniform(std::log(options.chi_min_modulus),
                                                    std::log(options.chi_max_modulus)));
        const Complex chi = std::polar(modulus, kTwoPi * rng.uniform());
        blocks.push_back(from_orbit_datum(d, chi));
        remaining -= d.length();
    }
    Rep out = blocks.front();
    for (std::size_t i = 1; i < blocks.size(); ++i) out = direct_sum(out, blocks[i]);
    return out;
}

Rep trivial_fallback(const BSGroup& group, int n, CounterRng& rng) {
    // All-trivial rho(b) with a random invertible rho(a).
    return Rep(group, random_well_conditioned(rng, n, 10.0), CMatrix::Identity(n, n));
}

}  // namespace

Rep random_rep(int p, int q, int n, std::uint64_t seed, const RandomRepOptions& options) {
    const BSGroup group(p, q);
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
    CounterRng rng(seed);
    const CensusReport census = enumerate_orbits(p, q, n);

    std::optional<Rep> blocks;
    constexpr int kSpecialLinearAttempts = 64;
    const int attempts = options.special_linear ? kSpecialLinearAttempts : 1;
    for (int attempt = 0; attempt < attempts && !blocks; ++attempt) {
        CounterRng draw = rng.substream(static_cast<std::uint64_t>(attempt));
        try {
            Rep candidate = draw_block_sum(n, census.orbits, draw, options);
            blocks = options.special_linear ? to_special_linear(candidate) : candidate;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotSpecialLinear && e.code() != ErrorCode::NoOrbitFits) throw;
        }
    }
    CounterRng conj = rng.substream(0xC0FFEEULL);
    if (!blocks) {
        Rep fallback = trivial_fallback(group, n, conj);
        blocks = options.special_linear ? to_special_linear(fallback) : fallback;
    }
    const CMatrix g = random_well_conditioned(conj, n, options.max_condition);
    return conjugate(*blocks, g);
}

}  // namespace bsretract
