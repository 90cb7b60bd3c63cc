#pragma once

#include <cstdint>
#include <random>

namespace lnls {

/// SplitMix64 finalizer. Used to derive independent stream seeds from
/// (seed, stream) pairs so that parallel workers reproduce serial results.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Seedable 64-bit generator with explicit stream splitting.
///
/// Wraps std::mt19937_64; the conversions to doubles and spins are written
/// out by hand so that results do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(derive_seed(seed, stream)) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, n). Lemire's nearly-divisionless method.
    std::uint64_t below(std::uint64_t n) {
        __extension__ using u128 = unsigned __int128;
        u128 m = static_cast<u128>(engine_()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = -n % n;
            while (low < threshold) {
                m = static_cast<u128>(engine_()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool coin() { return (engine_() >> 63) != 0; }

    std::int8_t spin() { return coin() ? std::int8_t{1} : std::int8_t{-1}; }

private:
    std::mt19937_64 engine_;
};

}  // namespace lnls
