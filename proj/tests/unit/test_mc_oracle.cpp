#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "d2d/config.hpp"
#include "d2d/errors.hpp"
#include "d2d/mc_oracle.hpp"
#include "d2d/mode_selection.hpp"

using namespace d2d;
using doctest::Approx;

namespace {

NetworkParams baseline_network() { return load_profile("table1").network; }

mc::SimConfig small_config(std::int64_t trials, unsigned workers = 1) {
    mc::SimConfig c;
    c.trials = trials;
    c.seed = 77;
    c.workers = workers;
    c.chunk = 256;
    return c;
}

}  // namespace

TEST_CASE("Philox4x32-10 known answers") {
    using B = Philox4x32::Block;
    CHECK(Philox4x32::block({0u, 0u}, {0u, 0u, 0u, 0u}) == B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::block({0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}) ==
          B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::block({0xa4093822u, 0x299f31d0u}, {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}) ==
          B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("Philox streams are pure functions of seed and stream") {
    Philox4x32 a(5, 9), b(5, 9), c(5, 10);
    bool differ = false;
    for (int k = 0; k < 100; ++k) {
        const auto x = a(), y = b(), z = c();
        CHECK(x == y);
        differ |= x != z;
    }
    CHECK(differ);
    Philox4x32 u(1, 1);
    for (int k = 0; k < 1000; ++k) {
        const double v = u.uniform();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("accumulator statistics") {
    mc::Accumulator acc(2);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double v : {1.0, 2.0, 3.0, 4.0}) acc.add({v, nan});
    const auto e = acc.estimate(0, 1);
    CHECK(e.mean == Approx(2.5));
    CHECK(e.samples == 4);
    CHECK(e.ci_halfwidth == Approx(1.959963984540054 * std::sqrt((5.0 / 3.0) / 4.0)).epsilon(1e-12));
    CHECK(acc.estimate(1, 0).discarded == 4);
    CHECK_THROWS_AS(acc.estimate(1, 1), InsufficientSamples);
    CHECK_THROWS_AS(acc.estimate(0, 100), InsufficientSamples);

    mc::Accumulator one(1);
    one.add({0.7});
    const auto single = one.estimate(0, 1);
    CHECK(single.mean == 0.7);
    CHECK(std::isinf(single.ci_halfwidth));

    mc::Accumulator merged(2);
    merged.merge(acc);
    CHECK(merged.estimate(0, 1).mean == e.mean);
}

TEST_CASE("configuration checks") {
    auto cfg = small_config(10);
    cfg.window_factor = 2.5;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = small_config(0);
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = small_config(10);
    cfg.workers = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    CHECK(mc::parse_us_variant("check_then_select") == mc::UsVariant::check_then_select);
    CHECK(mc::parse_us_variant("us_select_then_check") == mc::UsVariant::select_then_check);
    CHECK(mc::to_string(mc::EdgePolicy::toroidal) == "toroidal");
}

TEST_CASE("results do not depend on the worker count") {
    const auto n = baseline_network();
    const auto one = mc::estimate_p_inside(n, small_config(3000, 1));
    const auto three = mc::estimate_p_inside(n, small_config(3000, 3));
    CHECK(one.mean == three.mean);
    CHECK(one.ci_halfwidth == three.ci_halfwidth);

    const std::vector<mc::ModeQuery> q{{SelectionScheme::NS, 3, 0.4}, {SelectionScheme::US, 3, 0.4}};
    const auto m1 = mc::estimate_mode(n, small_config(1500, 1), q, mc::UsVariant::select_then_check);
    const auto m4 = mc::estimate_mode(n, small_config(1500, 4), q, mc::UsVariant::select_then_check);
    for (std::size_t j = 0; j < q.size(); ++j) CHECK(m1[j].mean == m4[j].mean);
}

TEST_CASE("availability extremes") {
    const auto n = baseline_network();
    const std::vector<mc::ModeQuery> q{{SelectionScheme::NS, 1, 1.0},
                                       {SelectionScheme::NS, 4, 1.0},
                                       {SelectionScheme::US, 4, 1.0},
                                       {SelectionScheme::NS, 4, 0.0},
                                       {SelectionScheme::US, 4, 0.0}};
    const auto est = mc::estimate_mode(n, small_config(4000), q, mc::UsVariant::select_then_check);
    // With every helper holding the content, any nonempty cell serves over D2D.
    CHECK(est[0].mean == est[1].mean);
    CHECK(est[1].mean == est[2].mean);
    CHECK(est[3].mean == 0.0);
    CHECK(est[4].mean == 0.0);
    const double occupied = helper_count_at_least(1, n.eta_d());
    CHECK(std::abs(est[0].mean - occupied) < 3.0 * est[0].ci_halfwidth / 1.96 + 0.01);
}

TEST_CASE("histogram bookkeeping") {
    const auto n = baseline_network();
    const double s = 1.0 / std::sqrt(n.lambda_m);
    std::vector<double> edges;
    for (int b = 0; b <= 60; ++b) edges.push_back(b * s / 20.0);
    const auto hs = mc::conditional_distance_histograms(3, n, small_config(3000), edges);
    REQUIRE(hs.size() == 3);
    for (const auto& h : hs) {
        CHECK(h.trials == 3000);
        CHECK(h.retained_true + h.discarded_few_in_cell + h.discarded_degenerate == h.trials);
        CHECK(h.retained_disk + h.discarded_outside_bmax + h.discarded_few_in_disk + h.discarded_degenerate ==
              h.trials);
        double mass = 0.0;
        for (std::size_t b = 0; b + 1 < edges.size(); ++b) mass += h.true_cell[b] * (edges[b + 1] - edges[b]);
        CHECK(mass <= 1.0 + 1e-12);
        CHECK(mass > 0.9);
    }
    CHECK(hs[0].retained_true >= hs[1].retained_true);
    const auto single = mc::conditional_distance_histogram(3, n, small_config(3000), edges);
    CHECK(single.true_cell == hs[2].true_cell);
}

TEST_CASE("typical-cell helper counts follow the shape-3.5 law") {
    const auto n = baseline_network();
    const std::int64_t trials = 20000;
    const auto pmf = mc::helper_count_pmf(n, small_config(trials), 15);
    REQUIRE(pmf.counts.size() == 17);
    std::int64_t total = 0;
    for (auto c : pmf.counts) total += c;
    CHECK(total == trials);
    for (int j = 0; j <= 15; ++j) {
        const double p = cell_helper_count_pmf(j, n.eta_d());
        const double phat = static_cast<double>(pmf.counts[j]) / trials;
        const double sd = std::sqrt(p * (1.0 - p) / trials);
        CAPTURE(j);
        // The shape-3.5 law is itself an approximation, worth a few thousandths per count.
        CHECK(std::abs(phat - p) <= 3.0 * sd + 0.004);
    }
}

TEST_CASE("a larger window does not move the estimate") {
    const auto n = baseline_network();
    auto narrow = small_config(20000);
    auto wide = narrow;
    wide.window_factor = 10.0;
    const auto a = mc::estimate_p_inside(n, narrow);
    const auto b = mc::estimate_p_inside(n, wide);
    CHECK(std::abs(a.mean - b.mean) <= std::hypot(a.ci_halfwidth, b.ci_halfwidth) * 1.5);
}

TEST_CASE("toroidal edge policy") {
    const auto n = baseline_network();
    auto cfg = small_config(5000);
    cfg.edge = mc::EdgePolicy::toroidal;
    const auto e = mc::estimate_p_inside(n, cfg);
    CHECK(e.mean > 0.2);
    CHECK(e.mean < 0.3);
    const auto cov = mc::estimate_cellular_coverage(n, cfg, {1.0});
    CHECK(cov[0].mean > 0.3);
    CHECK(cov[0].mean < 0.8);
}

TEST_CASE("sparser MBSs bring the nearest in-cell helper closer to Rayleigh") {
    // Helper count per realisation grows like eta_d, so this stays at a tenth of the MBS density.
    auto l1_at = [](double shrink) {
        auto n = baseline_network();
        n.lambda_m /= shrink;
        const double scale = 1.0 / std::sqrt(std::numbers::pi * n.lambda_d);
        std::vector<double> edges;
        for (int b = 0; b <= 40; ++b) edges.push_back(b * 3.0 * scale / 40.0);
        const auto h = mc::conditional_distance_histogram(1, n, small_config(3000), edges);
        double l1 = 0.0;
        for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
            const double w = edges[b + 1] - edges[b];
            const double mid = 0.5 * (edges[b] + edges[b + 1]);
            const double ray = 2.0 * mid / (scale * scale) * std::exp(-mid * mid / (scale * scale));
            l1 += std::abs(h.true_cell[b] - ray) * w;
        }
        return l1;
    };
    CHECK(l1_at(10.0) < l1_at(1.0));
}

TEST_CASE("single trials report an unbounded interval") {
    const auto n = baseline_network();
    const auto e = mc::estimate_p_inside(n, small_config(1), 1);
    CHECK(e.samples == 1);
    CHECK(std::isinf(e.ci_halfwidth));
    CHECK_THROWS_AS(mc::estimate_p_inside(n, small_config(1)), InsufficientSamples);
}
