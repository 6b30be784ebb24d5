#pragma once

#include <cstdint>

namespace d2d {

/// Library and cache dimensions with the Zipf normaliser.
///
/// rho = (sum_{l=1}^{L} l^{-zeta})^{-1} is computed by direct summation at
/// construction, so instances are immutable and cheap to share.
class CacheParams {
public:
    static constexpr std::int64_t kMaxLibrarySize = 10'000'000;

    CacheParams(std::int64_t library_size, double zeta, std::int64_t cache_mbs, std::int64_t cache_d2d);

    std::int64_t library_size() const noexcept { return library_size_; }
    double zeta() const noexcept { return zeta_; }
    std::int64_t cache_mbs() const noexcept { return cache_mbs_; }
    std::int64_t cache_d2d() const noexcept { return cache_d2d_; }
    double rho() const noexcept { return rho_; }

    CacheParams with_zeta(double zeta) const { return {library_size_, zeta, cache_mbs_, cache_d2d_}; }
    CacheParams with_cache_d2d(std::int64_t c) const { return {library_size_, zeta_, cache_mbs_, c}; }

private:
    std::int64_t library_size_;
    double zeta_;
    std::int64_t cache_mbs_;
    std::int64_t cache_d2d_;
    double rho_;
};

// pop(c) = rho c^{-zeta}
double popularity(std::int64_t c, const CacheParams& p);

// 1 iff content c is among the C_m most popular files held by the MBS.
int hit_mbs(std::int64_t c, const CacheParams& p);

// 1 - (1 - pop(c))^{C_d}: each helper slot holds an independent popularity draw.
double hit_d2d(std::int64_t c, const CacheParams& p);

}  // namespace d2d
