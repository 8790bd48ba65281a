#include "bsretract/random.hpp"

#include <cmath>

#include <Eigen/QR>

namespace bsretract {

std::uint64_t CounterRng::mix(std::uint64_t z) {
    z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31U);
}

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11U) * 0x1.0p-53; }

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double CounterRng::normal() {
    // Box-Muller; one draw per call keeps the stream position predictable.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
        x = (*this)();
    } while (x >= limit);
    return x % bound;
}

CMatrix random_gaussian_matrix(CounterRng& rng, int n) {
    CMatrix g(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double re = rng.normal();
            const double im = rng.normal();
            g(i, j) = Complex(re, im) / std::sqrt(2.0);
        }
    }
    return g;
}

CMatrix random_unitary(CounterRng& rng, int n) {
    const CMatrix g = random_gaussian_matrix(rng, n);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        const double mag = std::abs(d);
        if (mag > 0.0) q.col(j) *= d / mag;
    }
    return q;
}

CMatrix random_well_conditioned(CounterRng& rng, int n, double max_condition) {
    const CMatrix u1 = random_unitary(rng, n);
    const CMatrix u2 = random_unitary(rng, n);
    const double span = std::log(max_condition);
    Eigen::VectorXcd s(n);
    for (int i = 0; i < n; ++i) s(i) = std::exp(span * (rng.uniform() - 0.5));
    return u1 * s.asDiagonal() * u2;
}

CMatrix random_unit_hermitian(CounterRng& rng, int n) {
    const CMatrix g = random_gaussian_matrix(rng, n);
    CMatrix h = (g + g.adjoint()) * 0.5;
    return h / h.norm();
}

}  // namespace bsretract
