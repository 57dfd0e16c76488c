#pragma once

// Seeded deterministic uniform source. All stochastic operations in this
// library take one explicitly, so identical seeds reproduce identical results
// bit for bit on every platform.

#include <cstdint>
#include <random>

namespace ptt {

namespace detail {

// 64-bit finalizer used to spread child-stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

}  // namespace detail

class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // uniform on [0, 1) with 53-bit resolution
    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Independent stream derived from (seed, stream index) only; unaffected by
    // how many draws the parent has consumed, so parallel workloads can hand
    // out children up front and stay deterministic.
    RandomSource child(std::uint64_t stream_index) const {
        return RandomSource(
            detail::mix64(seed_ + detail::mix64(stream_index + 0x9E3779B97F4A7C15ull)));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace ptt
