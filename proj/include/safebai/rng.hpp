#pragma once

#include <cstdint>
#include <limits>

namespace safebai {

/// Counter-based 64-bit generator: the n-th output is splitmix64(key + n * golden).
/// Streams are addressed by (master_seed, replication, channel), so any
/// replication can be regenerated without replaying the others.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key = 0, std::uint64_t counter = 0)
        : key_(key), counter_(counter) {}

    static CounterRng substream(std::uint64_t master_seed, std::uint64_t replication,
                                std::uint64_t channel) {
        std::uint64_t k = mix(master_seed ^ 0x6a09e667f3bcc909ULL);
        k = mix(k ^ (replication * 0xbb67ae8584caa73bULL + 0x3c6ef372fe94f82bULL));
        k = mix(k ^ (channel * 0xa54ff53a5f1d36f1ULL + 0x510e527fade682d1ULL));
        return CounterRng(k);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (++counter_) * kGolden); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace safebai
