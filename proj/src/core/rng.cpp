#include "core/rng.hpp"

#include <cmath>
#include <numeric>

#include "core/constants.hpp"

namespace railenv {

uint64_t Rng::next_below(uint64_t n) {
    const uint64_t threshold = (0ULL - n) % n;  // 2^64 mod n
    for (;;) {
        const uint64_t r = next_u64();
        if (r >= threshold) return r % n;
    }
}

double Rng::next_normal() {
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * constants::pi * u2);
}

uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b, uint64_t c) {
    Rng mixer(master ^ 0x6a09e667f3bcc909ULL);
    uint64_t s = mixer.next_u64();
    s ^= Rng(a ^ 0xbb67ae8584caa73bULL).next_u64();
    s = Rng(s).next_u64() ^ Rng(b ^ 0x3c6ef372fe94f82bULL).next_u64();
    s = Rng(s).next_u64() ^ Rng(c ^ 0xa54ff53a5f1d36f1ULL).next_u64();
    return Rng(s).next_u64();
}

std::vector<size_t> shuffled_indices(size_t n, Rng& rng) {
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    for (size_t i = n; i > 1; --i) {
        const size_t j = static_cast<size_t>(rng.next_below(i));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

}  // namespace railenv
