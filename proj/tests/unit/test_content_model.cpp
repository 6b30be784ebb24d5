#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "d2d/content_model.hpp"
#include "d2d/errors.hpp"

using namespace d2d;
using doctest::Approx;

TEST_CASE("popularity is a probability mass function") {
    for (double zeta : {0.0, 0.5, 0.8, 1.0, 1.6}) {
        const CacheParams p(10000, zeta, 500, 20);
        long double s = 0.0L;
        for (std::int64_t c = 1; c <= p.library_size(); ++c) s += popularity(c, p);
        CHECK(static_cast<double>(s) == Approx(1.0).epsilon(1e-12));
        CHECK(popularity(1, p) >= popularity(2, p));
    }
    const CacheParams flat(40, 0.0, 1, 1);
    CHECK(popularity(17, flat) == Approx(1.0 / 40.0).epsilon(1e-15));
}

TEST_CASE("MBS hit is a threshold on rank") {
    const CacheParams p(10000, 0.8, 500, 20);
    CHECK(hit_mbs(1, p) == 1);
    CHECK(hit_mbs(500, p) == 1);
    CHECK(hit_mbs(501, p) == 0);
    CHECK_THROWS_AS(hit_mbs(0, p), IndexError);
    CHECK_THROWS_AS(hit_mbs(10001, p), IndexError);
}

TEST_CASE("helper hit probability") {
    const CacheParams p(10000, 0.8, 500, 20);
    for (std::int64_t c : {1, 2, 10, 100, 1000, 10000}) {
        const double q = popularity(c, p);
        CHECK(hit_d2d(c, p) == Approx(1.0 - std::pow(1.0 - q, 20.0)).epsilon(1e-12));
    }
    CHECK(hit_d2d(1, p.with_cache_d2d(0)) == 0.0);
    CHECK(hit_d2d(1, CacheParams(1, 0.8, 1, 3)) == 1.0);
}

TEST_CASE("property: helper hit decreases in rank and increases in cache size") {
    const CacheParams p(2000, 0.9, 100, 10);
    for (std::int64_t c = 1; c < p.library_size(); ++c) CHECK(hit_d2d(c, p) >= hit_d2d(c + 1, p));
    for (std::int64_t cd = 0; cd < 50; ++cd) {
        CHECK(hit_d2d(7, p.with_cache_d2d(cd)) <= hit_d2d(7, p.with_cache_d2d(cd + 1)));
    }
}

TEST_CASE("invalid cache parameters") {
    CHECK_THROWS_AS(CacheParams(0, 0.8, 1, 1), DomainError);
    CHECK_THROWS_AS(CacheParams(CacheParams::kMaxLibrarySize + 1, 0.8, 1, 1), DomainError);
    CHECK_THROWS_AS(CacheParams(100, -0.1, 1, 1), DomainError);
    CHECK_THROWS_AS(CacheParams(100, NAN, 1, 1), DomainError);
    CHECK_THROWS_AS(CacheParams(100, 0.8, 0, 1), DomainError);
    CHECK_THROWS_AS(CacheParams(100, 0.8, 101, 1), DomainError);
    CHECK_THROWS_AS(CacheParams(100, 0.8, 10, -1), DomainError);
    CHECK_THROWS_AS(popularity(101, CacheParams(100, 0.8, 10, 1)), IndexError);
}
