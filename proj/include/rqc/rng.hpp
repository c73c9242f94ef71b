#pragma once

#include <array>
#include <cstdint>

namespace rqc {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stream identifiers keep independent uses of one seed apart.
enum class Stream : std::uint32_t {
    field = 1,
    coloring = 2,
    surface = 3,
    pairs = 4,
    rectangles = 5,
    trials = 6,
    generic = 7,
};

/// Counter-based generator addressed by (seed, stream, a, b, c). Two generators
/// built from the same address produce the same sequence regardless of when or
/// in which order they are created.
class KeyedRng {
public:
    KeyedRng(std::uint64_t seed, Stream stream, std::int64_t a = 0, std::int64_t b = 0,
             std::int64_t c = 0);

    std::uint32_t next_u32();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal (Box-Muller, both variates used).
    double normal();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    void refill();

    std::array<std::uint32_t, 2> key_{};
    std::array<std::uint32_t, 4> counter_{};
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// SplitMix64 finaliser; used to derive child seeds.
std::uint64_t mix64(std::uint64_t x);

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag)
{
    return mix64(seed ^ mix64(tag + 0x9e3779b97f4a7c15ULL));
}

} // namespace rqc
