#pragma once

#include <cstdint>
#include <vector>

namespace railenv {

/// Deterministic 64-bit generator (splitmix64). Used everywhere randomness is
/// needed so that identical seeds give identical streams on every platform;
/// the standard <random> distributions leave their sequences implementation
/// defined, which would break byte-identical reruns.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n), n > 0. Rejection sampling keeps it unbiased.
    uint64_t next_below(uint64_t n);

    /// Standard normal deviate (Box-Muller, fresh pair each call).
    double next_normal();

  private:
    uint64_t state_;
};

/// Stable seed derivation for independent substreams.
uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0, uint64_t c = 0);

/// Deterministic Fisher-Yates shuffle of index vector [0, n).
std::vector<size_t> shuffled_indices(size_t n, Rng& rng);

}  // namespace railenv
