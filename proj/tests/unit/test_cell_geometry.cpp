#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "d2d/cell_geometry.hpp"
#include "d2d/errors.hpp"
#include "oracles.hpp"

using namespace d2d;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
// 10 MBSs and 100 helpers per disk of radius 500 m.
const GeometryParams kGeo(10.0 / (kPi * 500.0 * 500.0), 100.0 / (kPi * 500.0 * 500.0));

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("marginal densities") {
    const double ell = kGeo.length_scale();
    CHECK(ell == Approx(500.0 / std::sqrt(10.0)).epsilon(1e-14));
    const double fy = simpson([](double y) { return user_distance_pdf(y, kGeo); }, 0.0, 6.0 * ell, 4000);
    const double fx = simpson([](double x) { return max_disk_radius_pdf(x, kGeo); }, 0.0, 3.0 * ell, 4000);
    CHECK(fy == Approx(1.0).epsilon(1e-9));
    CHECK(fx == Approx(1.0).epsilon(1e-9));
    CHECK(user_distance_cdf(ell, kGeo) == Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    CHECK(max_disk_radius_ccdf(ell, kGeo) == Approx(std::exp(-4.0)).epsilon(1e-14));
    CHECK_THROWS_AS(GeometryParams(0.0, 1.0), DomainError);
}

TEST_CASE("user inside the inscribed disk") {
    CHECK(p_user_inside(kGeo) == 0.2);
    CHECK(p_user_inside_integral(kGeo) == Approx(0.2).epsilon(1e-9));
    const GeometryParams dense(kGeo.lambda_m * 7.3, kGeo.lambda_d);
    CHECK(p_user_inside_integral(dense) == Approx(0.2).epsilon(1e-9));
}

TEST_CASE("helpers inside the inscribed disk: closed form vs integral") {
    for (int i : {1, 2, 3, 5}) {
        CAPTURE(i);
        CHECK(p_at_least_i_inside(i, kGeo.eta_d()) == Approx(p_at_least_i_inside_integral(i, kGeo)).epsilon(1e-7));
    }
    // With helpers everywhere the weight reduces to the containment weight at r = 0 over p_in.
    CHECK(p_at_least_i_inside(1, 1e9) == Approx(containment_weight(0.0, kGeo) / 0.2).epsilon(1e-6));
    CHECK_THROWS_AS(p_at_least_i_inside(0, 10.0), DomainError);
}

TEST_CASE("lens area against rejection sampling") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.05, 2.0), v(0.0, 1.0);
    int checked = 0;
    for (int t = 0; t < 20; ++t) {
        const double y = u(rng), x = u(rng);
        const double lo = std::abs(x - y), hi = x + y;
        const double r = lo + (hi - lo) * (0.02 + 0.96 * v(rng));
        const auto mc = oracle::lens_area_mc(r, y, x, 200000, 100 + t);
        CAPTURE(r);
        CAPTURE(y);
        CAPTURE(x);
        CHECK(std::abs(lens_area(r, y, x) - mc.area) <= 4.0 * mc.sd + 1e-12);
        ++checked;
    }
    CHECK(checked == 20);
}

TEST_CASE("lens area at the regime boundaries") {
    // r = x + y: b(o, r) swallows the whole disk.
    CHECK(lens_area(3.0, 1.0, 2.0) == Approx(kPi * 4.0).epsilon(1e-9));
    // r = x - y: b(o, r) sits inside the disk.
    CHECK(lens_area(1.0, 1.0, 2.0) == Approx(kPi).epsilon(1e-9));
    // r = y - x: external tangency.
    CHECK(lens_area(1.0, 2.0, 1.0) == Approx(0.0).scale(1.0).epsilon(1e-7));
    CHECK_THROWS_AS(lens_area(0.5, 1.0, 2.0), GeometryError);
    CHECK_THROWS_AS(lens_area(3.5, 1.0, 2.0), GeometryError);
    CHECK_THROWS_AS(lens_area(-1.0, 1.0, 2.0), GeometryError);
    CHECK_THROWS_AS(lens_area_derivative(1.0, 1.0, 2.0), GeometryError);
}

TEST_CASE("property: lens derivative matches central differences") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 2.0), v(0.05, 0.95);
    for (int t = 0; t < 200; ++t) {
        const double y = u(rng), x = u(rng);
        const double lo = std::abs(x - y), hi = x + y;
        const double r = lo + (hi - lo) * v(rng);
        const double h = 1e-5 * (hi - lo);
        const double fd = (lens_area(r + h, y, x) - lens_area(r - h, y, x)) / (2.0 * h);
        CHECK(lens_area_derivative(r, y, x) == Approx(fd).epsilon(1e-6).scale(1e-3));
    }
}

TEST_CASE("containment weight") {
    CHECK(containment_weight(0.0, kGeo) == Approx(1.0 / 15.0).epsilon(1e-14));
    const double ell = kGeo.length_scale();
    for (double rs : {0.05, 0.2, 0.5, 1.0, 1.5}) {
        const double r = rs * ell;
        CAPTURE(rs);
        const double closed = containment_weight(r, kGeo);
        CHECK(closed == Approx(containment_weight_integral(r, kGeo)).epsilon(1e-7).scale(1e-14));
        // Independent double Simpson in scaled units: f_Y(y) = 2y e^{-y^2}, f_X(x) F_Y(x) = 8x e^{-4x^2}(1 - e^{-x^2}).
        const double ref = simpson(
            [&](double y) {
                const double inner = simpson(
                    [](double x) { return 8.0 * x * std::exp(-4.0 * x * x) * -std::expm1(-x * x); }, rs + y,
                    rs + y + 4.0, 800);
                return 2.0 * y * std::exp(-y * y) * inner;
            },
            0.0, 6.0, 800);
        CHECK(closed == Approx(ref).epsilon(1e-5).scale(1e-14));
        CHECK(std::abs(containment_weight_variant(r, kGeo) - closed) > 1e-3 * closed);
    }
    CHECK(containment_weight_variant(0.0, kGeo) == Approx(1.0 / 15.0).epsilon(1e-14));
}

TEST_CASE("property: containment weight is nonincreasing") {
    const double ell = kGeo.length_scale();
    double prev = containment_weight(0.0, kGeo);
    for (int k = 1; k <= 300; ++k) {
        const double w = containment_weight(k * 0.01 * ell, kGeo);
        CHECK(w <= prev + 1e-15);
        CHECK(w >= 0.0);
        prev = w;
    }
}

TEST_CASE("unconstrained nearest-neighbour distance") {
    const double lambda = kGeo.lambda_d;
    for (int i : {1, 2, 4}) {
        const double top = 6.0 * std::sqrt(i / (kPi * lambda));
        CHECK(simpson([&](double r) { return unconstrained_pdf(i, r, lambda); }, 0.0, top, 4000) ==
              Approx(1.0).epsilon(1e-8));
        const double r = 0.7 / std::sqrt(kPi * lambda);
        const double h = 1e-6 * r;
        CHECK(unconstrained_pdf(i, r, lambda) ==
              Approx(-(unconstrained_ccdf(i, r + h, lambda) - unconstrained_ccdf(i, r - h, lambda)) / (2.0 * h))
                  .epsilon(1e-6));
    }
}

TEST_CASE("distance distribution is a density") {
    for (int i : {1, 2, 3, 4}) {
        CAPTURE(i);
        const auto d = build_distance_distribution(i, kGeo);
        CHECK(d.order() == i);
        CHECK(std::abs(d.norm_defect()) < 0.02);
        CHECK(d.raw_mass() == Approx(1.0).epsilon(0.02));
        CHECK(d.cdf(d.r_max()) == Approx(d.raw_mass()).epsilon(1e-6));
        CHECK(d.lens_mass_fraction() > 0.0);
        CHECK(d.lens_mass_fraction() < 1.0);
        for (std::size_t k = 0; k < d.grid().size(); ++k) CHECK(d.density()[k] >= 0.0);
        const double r = 0.3 * kGeo.length_scale();
        CHECK(d(r) == Approx(distance_pdf(i, r, kGeo)).epsilon(1e-3));
    }
}

TEST_CASE("linear cosine-law variant breaks normalisation") {
    DistanceGridOptions opts;
    opts.omega2 = Omega2Form::linear_variant;
    const auto bad = build_distance_distribution(1, kGeo, opts);
    CHECK(std::abs(bad.norm_defect()) > 0.02);
}

TEST_CASE("printed containment variant breaks normalisation") {
    DistanceGridOptions opts;
    opts.containment = ContainmentForm::printed_variant;
    const auto bad = build_distance_distribution(1, kGeo, opts);
    CHECK(std::abs(bad.norm_defect()) > 0.02);
}

TEST_CASE("property: sparser MBSs move the distance law toward the unconstrained one") {
    double prev_l1 = 1e9, prev_lens = 1e9;
    for (double shrink : {1.0, 10.0, 100.0}) {
        const GeometryParams g(kGeo.lambda_m / shrink, kGeo.lambda_d);
        const auto d = build_distance_distribution(1, g);
        const double top = 3.0 / std::sqrt(g.lambda_d);
        const int n = 4000;
        double l1 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double r = (k + 0.5) * top / n;
            l1 += std::abs(d(r) - unconstrained_pdf(1, r, g.lambda_d)) * top / n;
        }
        CAPTURE(shrink);
        CHECK(l1 < prev_l1);
        CHECK(d.lens_mass_fraction() < prev_lens);
        prev_l1 = l1;
        prev_lens = d.lens_mass_fraction();
    }
}
