// Runs every reconciliation check against the baseline profile and prints
// one PASS/FAIL line per criterion, followed by the measured quantities.

#include <cstdlib>
#include <iostream>
#include <thread>

#include "d2d/config.hpp"
#include "d2d/validation.hpp"

int main() {
    const auto cfg = d2d::load_profile("table1");
    d2d::ValidationOptions opts;
    opts.workers = std::max(1u, std::thread::hardware_concurrency());
    if (const char* s = std::getenv("D2D_ACCEPTANCE_TRIAL_SCALE")) opts.trial_scale = std::atof(s);

    int failed = 0, total = 0;
    d2d::run_validation(cfg, opts, [&](const d2d::CheckResult& r) {
        std::cout << d2d::format_check(r) << std::flush;
        ++total;
        if (!r.pass) ++failed;
    });
    std::cout << "\nsummary: " << total - failed << " of " << total << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
