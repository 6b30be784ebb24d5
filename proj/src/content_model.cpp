#include "d2d/content_model.hpp"

#include <cmath>
#include <string>

#include "d2d/errors.hpp"

namespace d2d {

namespace {

void check_index(std::int64_t c, const CacheParams& p) {
    if (c < 1 || c > p.library_size()) {
        throw IndexError("content index " + std::to_string(c) + " outside [1, " +
                         std::to_string(p.library_size()) + "]");
    }
}

}  // namespace

CacheParams::CacheParams(std::int64_t library_size, double zeta, std::int64_t cache_mbs, std::int64_t cache_d2d)
    : library_size_(library_size), zeta_(zeta), cache_mbs_(cache_mbs), cache_d2d_(cache_d2d) {
    if (library_size < 1 || library_size > kMaxLibrarySize) {
        throw DomainError("CacheParams: library size must lie in [1, 1e7]");
    }
    if (!(zeta >= 0.0) || !std::isfinite(zeta)) throw DomainError("CacheParams: zeta must be >= 0");
    if (cache_mbs < 1 || cache_mbs > library_size) throw DomainError("CacheParams: need 1 <= C_m <= L");
    if (cache_d2d < 0) throw DomainError("CacheParams: C_d must be >= 0");

    // Smallest terms first keeps the rounding error of the sum near one ulp.
    double sum = 0.0, comp = 0.0;
    for (std::int64_t l = library_size; l >= 1; --l) {
        const double y = std::pow(static_cast<double>(l), -zeta) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    rho_ = 1.0 / sum;
}

double popularity(std::int64_t c, const CacheParams& p) {
    check_index(c, p);
    return p.rho() * std::pow(static_cast<double>(c), -p.zeta());
}

int hit_mbs(std::int64_t c, const CacheParams& p) {
    check_index(c, p);
    return c <= p.cache_mbs() ? 1 : 0;
}

double hit_d2d(std::int64_t c, const CacheParams& p) {
    const double pop = popularity(c, p);
    if (p.cache_d2d() == 0) return 0.0;
    if (pop >= 1.0) return 1.0;
    return -std::expm1(static_cast<double>(p.cache_d2d()) * std::log1p(-pop));
}

}  // namespace d2d
