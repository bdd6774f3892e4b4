#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace pimnet {

// Counter-based random streams (Philox4x32-10). Every draw is addressed by
// (seed, context, trial, step, slot), so trajectories are reproducible under
// any trial-level parallelism and two coupled processes can consume the same
// noise by using the same address.
namespace philox {

struct block4 {
    std::array<std::uint32_t, 4> x;
};

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline block4 philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(M0, ctr[0], hi0, lo0);
        mulhilo(M1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return {ctr};
}

}  // namespace philox

// Stream contexts keep logically distinct draws on disjoint counters.
enum class RngContext : std::uint16_t {
    dynamics = 0,    // per-step integration noise
    init = 1,        // initial spin states
    bootstrap = 2,   // metric resampling
    instance = 3,    // problem generators
    misc = 4,
};

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Raw 128-bit block for the given address.
    philox::block4 block(RngContext ctx, std::uint32_t trial, std::uint64_t step,
                         std::uint32_t slot) const {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(step),
            static_cast<std::uint32_t>(step >> 32) ^
                (static_cast<std::uint32_t>(ctx) << 24),
            trial,
            slot,
        };
        const std::array<std::uint32_t, 2> key = {
            static_cast<std::uint32_t>(seed_),
            static_cast<std::uint32_t>(seed_ >> 32),
        };
        return philox::philox4x32(ctr, key);
    }

    // Two uniforms in [0,1).
    std::array<double, 2> uniform_pair(RngContext ctx, std::uint32_t trial, std::uint64_t step,
                                       std::uint32_t slot) const {
        const auto b = block(ctx, trial, step, slot);
        return {to_unit(join(b.x[0], b.x[1])), to_unit(join(b.x[2], b.x[3]))};
    }

    // Two independent standard normals (Box-Muller on one Philox block).
    std::array<double, 2> normal_pair(RngContext ctx, std::uint32_t trial, std::uint64_t step,
                                      std::uint32_t slot) const {
        const auto b = block(ctx, trial, step, slot);
        const double u1 = 1.0 - to_unit(join(b.x[0], b.x[1]));  // (0,1], keeps log finite
        const double u2 = to_unit(join(b.x[2], b.x[3]));
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    // Fill n normals for (trial, step); slot k feeds entries 2k, 2k+1.
    void fill_normals(RngContext ctx, std::uint32_t trial, std::uint64_t step, double* out,
                      std::size_t n) const {
        for (std::size_t k = 0; 2 * k < n; ++k) {
            const auto z = normal_pair(ctx, trial, step, static_cast<std::uint32_t>(k));
            out[2 * k] = z[0];
            if (2 * k + 1 < n) out[2 * k + 1] = z[1];
        }
    }

    // Uniform integer in [0, bound) via 64-bit multiply-shift.
    std::uint64_t uniform_index(RngContext ctx, std::uint32_t trial, std::uint64_t step,
                                std::uint32_t slot, std::uint64_t bound) const {
        const auto b = block(ctx, trial, step, slot);
        const std::uint64_t x = join(b.x[0], b.x[1]);
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(x) * bound) >> 64);
    }

private:
    static std::uint64_t join(std::uint32_t hi, std::uint32_t lo) {
        return (static_cast<std::uint64_t>(hi) << 32) | lo;
    }
    static double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

    std::uint64_t seed_;
};

}  // namespace pimnet
