#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace d2d {

/// Philox4x32-10 counter-based generator.
///
/// The 64-bit seed is the key; the counter is (draw index, stream index), so
/// stream s draw n is a pure function of (seed, s, n). Satisfies
/// UniformRandomBitGenerator.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (pos_ == 4) {
            buf_ = block(key_, {static_cast<std::uint32_t>(draw_), static_cast<std::uint32_t>(draw_ >> 32),
                                static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)});
            ++draw_;
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept {
        const std::uint64_t a = (*this)() >> 5;
        const std::uint64_t b = (*this)() >> 6;
        return static_cast<double>(a * 67108864ULL + b) * 0x1.0p-53;
    }

    static Block block(std::array<std::uint32_t, 2> key, Block ctr) noexcept {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t draw_ = 0;
    Block buf_{};
    int pos_ = 4;
};

}  // namespace d2d
