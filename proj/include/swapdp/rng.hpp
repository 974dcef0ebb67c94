#pragma once

#include <cstdint>
#include <random>

namespace swapdp {

/**
 * Deterministic random stream.
 *
 * Wraps mt19937_64 with portable draw primitives so that identical seeds give
 * identical streams on every platform and build (std::uniform_*_distribution
 * output is implementation-defined, so it is not used here).
 *
 * Parallel consumers derive independent streams with for_path(seed, index);
 * the split rule is simply seed + index.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform draw in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform draw in [0, n); n must be positive. Multiply-shift mapping.
    int next_int(int n) {
        const unsigned __int128 wide =
            static_cast<unsigned __int128>(gen_()) * static_cast<unsigned __int128>(n);
        return static_cast<int>(wide >> 64);
    }

    static Rng for_path(std::uint64_t seed, std::uint64_t path_index) {
        return Rng(seed + path_index);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace swapdp
