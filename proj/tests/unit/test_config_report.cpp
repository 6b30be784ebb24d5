#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>

#include "d2d/config.hpp"
#include "d2d/errors.hpp"
#include "d2d/experiment.hpp"
#include "d2d/report.hpp"

using namespace d2d;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

std::string profile_dir() {
    const char* d = std::getenv("D2D_TEST_PROFILE_DIR");
    return d ? d : "";
}

}  // namespace

TEST_CASE("built-in baseline profile") {
    const auto cfg = load_profile("table1");
    const double disk = kPi * 500.0 * 500.0;
    CHECK(cfg.network.lambda_m == Approx(10.0 / disk).epsilon(1e-14));
    CHECK(cfg.network.lambda_d == Approx(100.0 / disk).epsilon(1e-14));
    CHECK(cfg.network.lambda_u == Approx(200.0 / disk).epsilon(1e-14));
    CHECK(cfg.network.p_m == Approx(1.0).epsilon(1e-14));
    CHECK(cfg.network.p_d == Approx(std::pow(10.0, -0.7)).epsilon(1e-14));
    CHECK(cfg.network.w_m == 7e6);
    CHECK(cfg.network.w_d == 3e6);
    CHECK(cfg.network.alpha == 4.0);
    CHECK(cfg.network.tau_m == Approx(1000.0).epsilon(1e-14));
    CHECK(cfg.network.sigma2 == Approx(1e-14).epsilon(1e-12));
    CHECK(cfg.network.beta == 0.8);
    CHECK(cfg.cache.library_size() == 10000);
    CHECK(cfg.cache.cache_mbs() == 500);
    CHECK(cfg.cache.cache_d2d() == 20);
    CHECK(cfg.sweep.schemes.size() == 2);
    CHECK(cfg.sweep.k.size() == 10);
    CHECK(cfg.sim.trials == 100000);
    CHECK(builtin_profile_names().size() >= 1);
    CHECK_THROWS_AS(builtin_profile("nope"), ConfigError);
}

TEST_CASE("profile errors") {
    const std::string head = builtin_profile("table1");
    CHECK_THROWS_AS(parse_profile(head + "bogus_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_profile(head + "alpha = 3\n"), ConfigError);                  // duplicate
    CHECK_THROWS_AS(parse_profile(head + "p_m_w = 1\n"), ConfigError);                  // second spelling
    CHECK_THROWS_AS(parse_profile("alpha = 4\nbase = table1\n"), ConfigError);          // base after keys
    CHECK_THROWS_AS(parse_profile("base = table1\nalpha = 1.5\n"), ConfigError);        // out of domain
    CHECK_THROWS_AS(parse_profile("base = table1\nlibrary_size = ten\n"), ConfigError); // not a number
    CHECK_THROWS_AS(parse_profile("name = x\n"), ConfigError);                          // missing keys
    CHECK_THROWS_AS(parse_profile("base = table1\njust text\n"), ConfigError);
    auto cfg = load_profile("table1");
    CHECK_THROWS_AS(apply_override(cfg, "novalue"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "nope=1"), ConfigError);
}

TEST_CASE("inheritance and overrides") {
    const auto cfg = parse_profile("base = table1\nalpha = 3.5\n# comment\np_m_w = 2 # inline\n");
    CHECK(cfg.network.alpha == 3.5);
    CHECK(cfg.network.p_m == 2.0);
    CHECK(cfg.network.beta == 0.8);

    auto o = load_profile("table1");
    apply_override(o, "cache_d2d=5");
    CHECK(o.cache.cache_d2d() == 5);
    apply_override(o, "p_m_w = 3");
    CHECK(o.network.p_m == 3.0);
    apply_override(o, "trials=1e3");
    CHECK(o.sim.trials == 1000);
    apply_override(o, "k=1..3,7");
    CHECK(o.sweep.k == std::vector<int>{1, 2, 3, 7});
}

TEST_CASE("profiles from the profile directory") {
    const auto dir = profile_dir();
    REQUIRE(!dir.empty());
    const auto by_path = load_profile(dir + "/zero_availability.profile");
    CHECK(by_path.cache.cache_d2d() == 0);
    CHECK(by_path.network.alpha == 4.0);
    ::setenv("D2DOFFLOAD_PROFILE_DIR", dir.c_str(), 1);
    const auto by_name = load_profile("omega2_trap");
    CHECK(by_name.model.grid.omega2 == Omega2Form::linear_variant);
    const auto trap = load_profile("containment_trap");
    CHECK(trap.model.grid.containment == ContainmentForm::printed_variant);
    ::unsetenv("D2DOFFLOAD_PROFILE_DIR");
    CHECK_THROWS_AS(load_profile("omega2_trap"), ConfigError);
}

TEST_CASE("dump and reparse reproduce the configuration") {
    auto cfg = load_profile("table1");
    apply_override(cfg, "tau_db=-10,0,10");
    apply_override(cfg, "us_variant=check_then_select");
    const auto text = dump_profile(cfg);
    const auto back = parse_profile(text);
    CHECK(back.entries == cfg.entries);
    CHECK(dump_profile(back) == text);
    CHECK(back.us_variant == mc::UsVariant::check_then_select);
    CHECK(back.sweep.tau_db == std::vector<double>{-10.0, 0.0, 10.0});
}

TEST_CASE("list and unit helpers") {
    CHECK(parse_int_list("1..4,8") == std::vector<std::int64_t>{1, 2, 3, 4, 8});
    CHECK(parse_int_list("5") == std::vector<std::int64_t>{5});
    CHECK(parse_int_list("").empty());
    CHECK_THROWS_AS(parse_int_list("4..1"), ConfigError);
    CHECK(parse_double_list("-10, 2.5") == std::vector<double>{-10.0, 2.5});
    CHECK(dbm_to_watt(30.0) == Approx(1.0).epsilon(1e-15));
    CHECK(db_to_linear(30.0) == Approx(1000.0).epsilon(1e-15));
}

TEST_CASE("CSV and JSON round trips") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<Row> rows{
        {"NS", 3, 1, "coverage", 0.1 + 0.2, "exact", std::nullopt, std::nullopt, std::nullopt},
        {"US", std::nullopt, 7, "mode-prob", 1e-300, "mc", 0.00123, 1000, 42},
        {"", std::nullopt, std::nullopt, "p-in", nan, "mc", inf, 1, 18446744073709551615ull},
        {"NS", 1, 1, "odd,\"name\"", -inf, "exact", std::nullopt, std::nullopt, std::nullopt},
    };
    for (auto f : {Format::csv, Format::json}) {
        const auto text = render(rows, f);
        const auto back = parse_rows(text, f);
        CHECK(back == rows);
        CHECK(render(back, f) == text);
    }
    const auto csv = render_csv(rows);
    CHECK(csv.rfind("scheme,k,c,metric,value,method,ci_halfwidth,trials,seed\n", 0) == 0);
    CHECK(csv.find("0.30000000000000004") != std::string::npos);
    CHECK(csv.find(",inf,") != std::string::npos);
    CHECK(parse_format("json") == Format::json);
    CHECK_THROWS_AS(parse_format("xml"), ConfigError);
    CHECK_THROWS_AS(parse_rows("wrong,header\n", Format::csv), ConfigError);
}

TEST_CASE("analytic command") {
    auto cfg = load_profile("table1");
    apply_override(cfg, "k=1..6");
    const auto rows = cmd_analytic(cfg, {"mode-prob"});
    CHECK(rows.size() == 12);
    std::set<double> us_values;
    for (const auto& r : rows) {
        CHECK(r.method == "exact");
        CHECK(r.metric == "mode-prob");
        if (r.scheme == "US") us_values.insert(r.value);
    }
    // Equal up to the last bit or two.
    CHECK(*us_values.rbegin() - *us_values.begin() <= 1e-15);

    auto zero = load_profile("table1");
    apply_override(zero, "cache_d2d=0");
    apply_override(zero, "k=2");
    for (const auto& r : cmd_analytic(zero, {"mode-prob", "coverage-d2d"})) {
        if (r.metric == "mode-prob") CHECK(r.value == 0.0);
        if (r.metric == "coverage-d2d") CHECK(std::isnan(r.value));
    }
    CHECK_THROWS_AS(cmd_analytic(cfg, {"not-a-metric"}), ConfigError);
}

TEST_CASE("empty sweep axes give a single row") {
    auto cfg = parse_profile("base = table1\nschemes = NS\nk = 1\nc = 1\n");
    const auto rows = cmd_analytic(cfg, {"coverage"});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].k == 1);
    CHECK(rows[0].c == 1);
}

TEST_CASE("simulate command") {
    auto cfg = load_profile("table1");
    apply_override(cfg, "trials=1");
    SimulateRequest req;
    req.observables = {"p-in"};
    const auto one = cmd_simulate(cfg, req);
    REQUIRE(one.size() == 1);
    CHECK(std::isinf(*one[0].ci_halfwidth));
    CHECK(one[0].trials == 1);
    CHECK(one[0].seed == cfg.sim.seed);

    apply_override(cfg, "trials=400");
    apply_override(cfg, "k=1,2");
    req.observables = {"mode-prob"};
    const auto a = cmd_simulate(cfg, req);
    apply_override(cfg, "workers=3");
    CHECK(cmd_simulate(cfg, req) == a);
    CHECK_THROWS_AS(cmd_simulate(cfg, SimulateRequest{{"bogus"}}), ConfigError);
}

TEST_CASE("optimal-k command") {
    auto cfg = load_profile("table1");
    apply_override(cfg, "k=1");
    CHECK_THROWS_AS(cmd_optimal_k(cfg), ConfigError);
    apply_override(cfg, "k=1..10");
    const auto rows = cmd_optimal_k(cfg);
    bool saw_us = false;
    for (const auto& r : rows) {
        if (r.scheme == "US" && r.metric == "k-opt-coverage") {
            CHECK(r.value == 1.0);
            saw_us = true;
        }
    }
    CHECK(saw_us);
}
