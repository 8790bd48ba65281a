#pragma once

#include <cstdint>
#include <limits>

#include "bsretract/numerics.hpp"

namespace bsretract {

/// Counter-based 64-bit generator: output i is the SplitMix64 finalizer of
/// (key + i * golden gamma). No hidden state beyond the counter, so streams
/// are reproducible from (key, position) alone.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (++counter_) * kGamma); }

    /// Independent stream keyed off this one's key and a tag.
    CounterRng substream(std::uint64_t tag) const { return CounterRng(mix(key_ ^ mix(tag + kGamma))); }

    double uniform();                     // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
    double normal();
    std::uint64_t below(std::uint64_t bound);  // [0, bound)

    static std::uint64_t mix(std::uint64_t z);

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    std::uint64_t key_;
    std::uint64_t counter_;
};

CMatrix random_gaussian_matrix(CounterRng& rng, int n);

/// Haar-distributed unitary (QR of a complex Ginibre matrix with phase fix).
CMatrix random_unitary(CounterRng& rng, int n);

/// U1 * diag(s) * U2 with log-uniform singular values spanning a ratio of at
/// most max_condition.
CMatrix random_well_conditioned(CounterRng& rng, int n, double max_condition);

/// Random Hermitian matrix with unit Hilbert-Schmidt norm.
CMatrix random_unit_hermitian(CounterRng& rng, int n);

}  // namespace bsretract
