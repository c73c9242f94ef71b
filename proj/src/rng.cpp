#include "rqc/rng.hpp"

#include <cmath>
#include <numbers>

namespace rqc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key)
{
    for (int round = 0; round < 10; ++round) {
        std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        auto lo0 = static_cast<std::uint32_t>(p0);
        auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

KeyedRng::KeyedRng(std::uint64_t seed, Stream stream, std::int64_t a, std::int64_t b,
                   std::int64_t c)
{
    key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    // Word 0 is the draw index; the address occupies the remaining words.
    std::uint64_t tail = mix64(static_cast<std::uint64_t>(c) ^
                               (static_cast<std::uint64_t>(stream) << 48));
    counter_ = {0u, static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                static_cast<std::uint32_t>(tail ^ (tail >> 32))};
    if ((a >> 32) != 0 && (a >> 32) != -1) counter_[3] ^= static_cast<std::uint32_t>(mix64(a));
    if ((b >> 32) != 0 && (b >> 32) != -1) counter_[3] ^= static_cast<std::uint32_t>(mix64(b) >> 7);
}

void KeyedRng::refill()
{
    block_ = philox4x32(counter_, key_);
    ++counter_[0];
    used_ = 0;
}

std::uint32_t KeyedRng::next_u32()
{
    if (used_ >= 4) refill();
    return block_[used_++];
}

double KeyedRng::uniform()
{
    std::uint64_t hi = next_u32() >> 5;  // 27 bits
    std::uint64_t lo = next_u32() >> 6;  // 26 bits
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
}

double KeyedRng::normal()
{
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
}

std::uint64_t KeyedRng::below(std::uint64_t n)
{
    if (n <= 1) return 0;
    // Rejection keeps the result unbiased.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    while (true) {
        std::uint64_t x = (static_cast<std::uint64_t>(next_u32()) << 32) | next_u32();
        if (x < limit) return x % n;
    }
}

} // namespace rqc
