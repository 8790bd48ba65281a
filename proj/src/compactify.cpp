#include "bsretract/compactify.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <utility>

namespace bsretract {

namespace {
constexpr std::int64_t kPairwiseLimit = 512;
constexpr std::int64_t kMaxMaterializedOrder = 1'000'000;
constexpr std::int64_t kExhaustiveExponentLimit = 4096;

std::int64_t floor_mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

// Nearest exponent e with z ~ exp(2 pi i e / order).
std::int64_t nearest_exponent(Complex z, std::int64_t order) {
    const double e = std::arg(z) / (2.0 * std::numbers::pi) * static_cast<double>(order);
    return floor_mod(static_cast<std::int64_t>(std::llround(e)), order);
}

// x with a x = 1 (mod m), for gcd(a, m) = 1.
std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
    __int128 r0 = m, r1 = a, s0 = 0, s1 = 1;
    while (r1 != 0) {
        const __int128 k = r0 / r1;
        std::tie(r0, r1) = std::pair{r1, r0 - k * r1};
        std::tie(s0, s1) = std::pair{s1, s0 - k * s1};
    }
    return floor_mod(static_cast<std::int64_t>(s0 % m), m);
}

// In the eigenbasis of B, T = B^j reads diag(lambda_k^j). Snapping both
// spectra to exponents mod order turns this into j e_k = r_k (mod order),
// solved by merging congruences. Returns j in [0, order) or nothing.
std::optional<std::int64_t> spectral_exponent(const CMatrix& b, const CMatrix& t, std::int64_t order) {
    Eigen::ComplexEigenSolver<CMatrix> es(b);
    if (es.info() != Eigen::Success) return std::nullopt;
    const CMatrix& v = es.eigenvectors();
    const CMatrix c = inverse(v) * t * v;
    std::int64_t residue = 0, modulus = 1;  // j = residue (mod modulus)
    for (Eigen::Index k = 0; k < b.rows(); ++k) {
        const std::int64_t e = nearest_exponent(es.eigenvalues()(k), order);
        const std::int64_t r = nearest_exponent(c(k, k), order);
        const std::int64_t g = std::gcd(e, order);
        if (r % g != 0) return std::nullopt;
        const std::int64_t m = order / g;
        const std::int64_t x = m == 1 ? 0
                                      : static_cast<std::int64_t>(static_cast<__int128>(r / g) *
                                                                  inverse_mod(e / g, m) % m);
        // Merge j = residue (mod modulus) with j = x (mod m).
        const std::int64_t h = std::gcd(modulus, m);
        if (floor_mod(x - residue, h) != 0) return std::nullopt;
        const std::int64_t step = m / h;
        const std::int64_t s = step == 1 ? 0
                                         : static_cast<std::int64_t>(static_cast<__int128>((x - residue) / h) *
                                                                     inverse_mod(floor_mod(modulus / h, step), step) %
                                                                     step);
        const std::int64_t merged = modulus * step;
        residue = floor_mod(static_cast<std::int64_t>((residue + static_cast<__int128>(modulus) * s) % merged),
                            merged);
        modulus = merged;
    }
    return floor_mod(residue, order);
}
}  // namespace

std::vector<RootOfUnity> snapped_eigenvalues(const CMatrix& b, std::int64_t max_order, double tol) {
    std::vector<RootOfUnity> out;
    for (const Complex& lambda : eigvals(b)) out.push_back(snap_root_of_unity(lambda, max_order, tol));
    return out;
}

std::int64_t detect_finite_order(const CMatrix& b, std::int64_t max_order, double tol) {
    require_square_finite(b, "rho(b)");
    std::vector<RootOfUnity> roots;
    try {
        roots = snapped_eigenvalues(b, max_order, tol);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotARootOfUnity) throw Error(ErrorCode::NotFiniteOrder, e.what());
        throw;
    }
    std::int64_t order = 1;
    for (const auto& r : roots) {
        const std::int64_t g = std::gcd(order, r.order);
        const __int128 l = static_cast<__int128>(order / g) * r.order;
        if (l > std::numeric_limits<std::int64_t>::max()) {
            throw Error(ErrorCode::NotFiniteOrder, "order overflows 64 bits");
        }
        order = static_cast<std::int64_t>(l);
    }
    const double n = static_cast<double>(b.rows());
    const double defect = (matrix_power(b, order) - CMatrix::Identity(b.rows(), b.cols())).norm();
    if (!(defect <= n * tol * static_cast<double>(order))) {
        throw Error(ErrorCode::NotFiniteOrder,
                    "power check failed: |B^" + std::to_string(order) + " - I| = " + std::to_string(defect));
    }
    return order;
}

FiniteCyclicGroup generated_group(const CMatrix& b, std::int64_t order) {
    if (order < 1 || order > kMaxMaterializedOrder) {
        throw Error(ErrorCode::InvalidArgument, "order out of range: " + std::to_string(order));
    }
    FiniteCyclicGroup group{b, order, {}};
    const auto n = b.rows();
    group.elements.reserve(static_cast<std::size_t>(order));
    group.elements.push_back(CMatrix::Identity(n, n));
    for (std::int64_t j = 1; j < order; ++j) group.elements.push_back(group.elements.back() * b);

    const CMatrix closing = group.elements.back() * b - CMatrix::Identity(n, n);
    if (closing.norm() > 1e-8 * static_cast<double>(n)) {
        throw Error(ErrorCode::DegenerateGroup, "generator^order differs from the identity");
    }
    // Pairwise for small groups; for large ones B^i = B^j reduces to B^{j-i} = I.
    const std::size_t rows = order <= kPairwiseLimit ? group.elements.size() : 1;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = i + 1; j < group.elements.size(); ++j) {
            if ((group.elements[i] - group.elements[j]).norm() <= 1e-6) {
                throw Error(ErrorCode::DegenerateGroup,
                            "powers " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
            }
        }
    }
    return group;
}

HermitianForm averaged_form(const FiniteCyclicGroup& h) {
    const auto n = h.generator.rows();
    CMatrix q = CMatrix::Zero(n, n);
    for (const CMatrix& g : h.elements) q += g.adjoint() * g;
    q /= static_cast<double>(h.elements.size());
    q = (q + q.adjoint()) * 0.5;
    const double det = q.determinant().real();
    q /= std::pow(det, 1.0 / static_cast<double>(n));
    return {q};
}

double form_invariance_defect(const FiniteCyclicGroup& h, const HermitianForm& form) {
    double worst = 0.0;
    for (const CMatrix& g : h.elements) worst = std::max(worst, (g.adjoint() * form.q * g - form.q).norm());
    return worst;
}

Rep conjugate_into_unitary(const Rep& rep, const HermitianForm& form) {
    return conjugate(rep, herm_power(form.q, 0.5), herm_power(form.q, -0.5));
}

NormalityFit closest_power(const Rep& rep, std::int64_t order) {
    if (order < 1) throw Error(ErrorCode::InvalidArgument, "order must be >= 1");
    const CMatrix target = rep.a * rep.b * inverse(rep.a);
    NormalityFit best{0, std::numeric_limits<double>::infinity()};
    if (order <= kExhaustiveExponentLimit) {
        const auto n = rep.b.rows();
        CMatrix power = CMatrix::Identity(n, n);
        for (std::int64_t j = 0; j < order; ++j) {
            const double d = (target - power).norm();
            if (d < best.defect) best = {j, d};
            power = power * rep.b;
        }
    } else if (const auto j = spectral_exponent(rep.b, target, order)) {
        best = {*j, (target - matrix_power(rep.b, *j)).norm()};
    }
    return best;
}

NormalityFit normality_exponent(const Rep& rep, std::int64_t order, double tol) {
    const NormalityFit best = closest_power(rep, order);
    if (!(best.defect <= tol)) {
        throw Error(ErrorCode::NotNormalizing,
                    "closest power B^" + std::to_string(best.exponent) + " is at distance " +
                        std::to_string(best.defect));
    }
    return best;
}

}  // namespace bsretract
