#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "d2d/content_model.hpp"
#include "d2d/errors.hpp"
#include "d2d/mode_selection.hpp"

using namespace d2d;
using doctest::Approx;

namespace {

// Negative binomial with shape 3.5, written out in long double.
long double pmf_ref(int j, double eta) {
    const long double a = 3.5L, e = eta;
    return std::exp(std::lgamma(j + a) - std::lgamma(a) - std::lgamma(j + 1.0L) + a * std::log(a / (a + e)) +
                    j * std::log(e / (a + e)));
}

const CacheParams kCache(10000, 0.8, 500, 20);

}  // namespace

TEST_CASE("helper count pmf") {
    for (double eta : {0.5, 1.0, 10.0, 20.0, 200.0}) {
        double s = 0.0;
        for (int j = 0; j < 5000; ++j) s += cell_helper_count_pmf(j, eta);
        CHECK(s == Approx(1.0).epsilon(1e-12));
        for (int j : {0, 1, 5, 10, 40}) {
            CHECK(cell_helper_count_pmf(j, eta) == Approx(static_cast<double>(pmf_ref(j, eta))).epsilon(1e-11));
        }
    }
    CHECK_THROWS_AS(cell_helper_count_pmf(-1, 1.0), DomainError);
    CHECK_THROWS_AS(cell_helper_count_pmf(1, 0.0), DomainError);
}

TEST_CASE("tail probability: summation and closed form agree") {
    for (double eta : {0.3, 2.0, 10.0, 20.0, 80.0}) {
        for (int i = 1; i <= 30; ++i) {
            long double ref = 1.0L;
            for (int j = 0; j < i; ++j) ref -= pmf_ref(j, eta);
            const double a = helper_count_at_least(i, eta);
            CHECK(a == Approx(helper_count_at_least_closed(i, eta)).epsilon(1e-9).scale(1e-300));
            if (ref > 1e-6L) CHECK(a == Approx(static_cast<double>(ref)).epsilon(1e-10));
        }
        CHECK(helper_count_at_least(1, eta) == Approx(1.0 - std::pow(1.0 + eta / 3.5, -3.5)).epsilon(1e-13));
    }
}

TEST_CASE("mode probabilities sum with the cellular mode to one") {
    for (auto s : {SelectionScheme::NS, SelectionScheme::US}) {
        for (int k = 1; k <= 12; ++k) {
            for (std::int64_t c : {1, 10, 100, 5000}) {
                const auto prof = mode_profile(s, c, k, 20.0, kCache);
                double sum = prof.cellular;
                for (double p : prof.per_helper) {
                    CHECK(p >= 0.0);
                    sum += p;
                }
                CHECK(sum == Approx(1.0).epsilon(1e-14));
                CHECK(prof.d2d_total <= 1.0);
                for (int i = 1; i <= k; ++i) {
                    CHECK(p_served_by_ith(s, i, c, k, 20.0, kCache) ==
                          Approx(p_served_by_ith_closed(s, i, c, k, 20.0, kCache)).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("uniform selection does not depend on k") {
    for (std::int64_t c : {1, 3, 100}) {
        const double flat = hit_d2d(c, kCache) * (1.0 - std::pow(1.0 + 20.0 / 3.5, -3.5));
        for (int k = 1; k <= 15; ++k) {
            CHECK(p_d2d_mode(SelectionScheme::US, c, k, 20.0, kCache) == Approx(flat).epsilon(1e-13));
            CHECK(mode_profile(SelectionScheme::US, c, k, 20.0, kCache).d2d_total == Approx(flat).epsilon(1e-12));
        }
    }
}

TEST_CASE("property: nearest selection is nondecreasing in k and below its bound") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> eta_d(0.2, 100.0);
    std::uniform_int_distribution<std::int64_t> cc(1, 10000);
    for (int t = 0; t < 100; ++t) {
        const double eta = eta_d(rng);
        const auto c = cc(rng);
        double prev = 0.0;
        for (int k = 1; k <= 10; ++k) {
            const double p = p_d2d_mode(SelectionScheme::NS, c, k, eta, kCache);
            CHECK(p >= prev - 1e-15);
            prev = p;
            CHECK(p <= p_d2d_mode_bound(SelectionScheme::NS, c, k, kCache) + 1e-15);
            CHECK(p_d2d_mode(SelectionScheme::US, c, k, eta, kCache) <=
                  p_d2d_mode_bound(SelectionScheme::US, c, k, kCache) + 1e-15);
            for (int i = 1; i <= k; ++i) {
                CHECK(p_served_by_ith(SelectionScheme::NS, i, c, k, eta, kCache) <=
                      p_d2d_bound(SelectionScheme::NS, i, c, k, kCache) + 1e-15);
            }
        }
    }
}

TEST_CASE("offloaded fraction") {
    for (auto s : {SelectionScheme::NS, SelectionScheme::US}) {
        for (int k : {1, 3, 10}) {
            const double f = offloaded_fraction(s, k, 20.0, kCache);
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
            CHECK(f <= offloaded_fraction(s, k, 20.0, kCache, true) + 1e-15);
            // Direct sum over the library.
            double ref = 0.0;
            for (std::int64_t c = 1; c <= kCache.library_size(); ++c) {
                ref += popularity(c, kCache) * p_d2d_mode(s, c, k, 20.0, kCache);
            }
            CHECK(f == Approx(ref).epsilon(1e-10));
        }
    }
    CHECK(offloaded_fraction(SelectionScheme::NS, 4, 20.0, kCache.with_cache_d2d(0)) == 0.0);
}

TEST_CASE("argument checks and names") {
    CHECK_THROWS_AS(p_served_by_ith(SelectionScheme::NS, 0, 1, 3, 20.0, kCache), IndexError);
    CHECK_THROWS_AS(p_served_by_ith(SelectionScheme::NS, 4, 1, 3, 20.0, kCache), IndexError);
    CHECK_THROWS_AS(p_d2d_mode(SelectionScheme::NS, 1, 0, 20.0, kCache), IndexError);
    CHECK_THROWS_AS(p_d2d_mode(SelectionScheme::NS, 1, 2, -1.0, kCache), DomainError);
    CHECK(parse_scheme("NS") == SelectionScheme::NS);
    CHECK(parse_scheme("US") == SelectionScheme::US);
    CHECK(to_string(SelectionScheme::US) == "US");
    CHECK_THROWS_AS(parse_scheme("XX"), DomainError);
}
