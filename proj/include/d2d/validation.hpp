#pragma once

#include <functional>
#include <string>
#include <vector>

#include "d2d/config.hpp"

namespace d2d {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::vector<std::string> details;  // one "quantity: value vs tolerance" entry per sub-check
};

struct ValidationOptions {
    // Multiplies every Monte Carlo trial count; tolerances assume 1.
    double trial_scale = 1.0;
    unsigned workers = 1;
    std::uint64_t seed = 20240601;
    // Empty runs every check.
    std::vector<int> only;
};

/// Analytic-vs-simulation reconciliation suite. Network, cache and model
/// forms come from `cfg`; each check also uses its own fixed settings where
/// the check is defined at particular densities.
std::vector<CheckResult> run_validation(const ExperimentConfig& cfg, const ValidationOptions& opts,
                                        const std::function<void(const CheckResult&)>& on_result = {});

std::string format_check(const CheckResult& r);

}  // namespace d2d
