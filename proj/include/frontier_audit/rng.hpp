#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace frontier_audit {

namespace detail {

inline std::uint64_t rotl64(std::uint64_t x, int r) { return (x << r) | (x >> (64 - r)); }

// Threefry-2x64, 20 rounds (Salmon et al., SC11). Counter-based: a pure
// function from (key, counter) to 128 random-looking bits, so any draw can
// be produced without generating its predecessors.
inline std::array<std::uint64_t, 2> threefry2x64(std::array<std::uint64_t, 2> key,
                                                 std::array<std::uint64_t, 2> ctr) {
    constexpr std::uint64_t parity = 0x1BD11BDAA9FC1A22ull;
    constexpr int rot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
    const std::uint64_t ks[3] = {key[0], key[1], key[0] ^ key[1] ^ parity};
    std::uint64_t x0 = ctr[0] + ks[0];
    std::uint64_t x1 = ctr[1] + ks[1];
    for (int r = 0; r < 20; ++r) {
        x0 += x1;
        x1 = rotl64(x1, rot[r % 8]);
        x1 ^= x0;
        if (r % 4 == 3) {
            const auto s = static_cast<std::uint64_t>(r / 4 + 1);
            x0 += ks[s % 3];
            x1 += ks[(s + 1) % 3] + s;
        }
    }
    return {x0, x1};
}

}  // namespace detail

// Deterministic randomness addressed by (replicate, draw). Replicates can be
// evaluated in any order, on any number of threads, and every draw still comes
// out identical for a given seed. That property is what makes resampling runs
// reproducible byte-for-byte.
class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Both 64-bit lanes of the underlying block cipher call.
    std::array<std::uint64_t, 2> block(std::uint64_t replicate, std::uint64_t draw) const {
        return detail::threefry2x64({seed_, replicate}, {draw, 0});
    }

    std::uint64_t bits(std::uint64_t replicate, std::uint64_t draw) const {
        return block(replicate, draw)[0];
    }

    // Uniform on [0, 1), 53 significant bits.
    double uniform(std::uint64_t replicate, std::uint64_t draw) const {
        return static_cast<double>(bits(replicate, draw) >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller on the two lanes of a single block.
    double normal(std::uint64_t replicate, std::uint64_t draw) const {
        auto lanes = block(replicate, draw);
        double u1 = (static_cast<double>(lanes[0] >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        double u2 = static_cast<double>(lanes[1] >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    class Stream;
    Stream stream(std::uint64_t replicate) const;

  private:
    std::uint64_t seed_ = 0;
};

// Sequential view of one replicate: hands out draws 0, 1, 2, ... of that
// replicate. Rejection-sampled operations simply consume extra indices, which
// keeps them exactly reproducible too.
class SeededRng::Stream {
  public:
    Stream(const SeededRng& rng, std::uint64_t replicate) : rng_(&rng), replicate_(replicate) {}

    std::uint64_t bits() { return rng_->bits(replicate_, next_++); }

    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    double normal() { return rng_->normal(replicate_, next_++); }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~0ull - ~0ull % n;
        for (;;) {
            std::uint64_t x = bits();
            if (x < limit) return x % n;
        }
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    std::uint64_t replicate() const { return replicate_; }
    std::uint64_t position() const { return next_; }

  private:
    const SeededRng* rng_;
    std::uint64_t replicate_;
    std::uint64_t next_ = 0;
};

inline SeededRng::Stream SeededRng::stream(std::uint64_t replicate) const {
    return Stream(*this, replicate);
}

}  // namespace frontier_audit
