#pragma once

#include <functional>
#include <string>
#include <vector>

#include "d2d/config.hpp"
#include "d2d/report.hpp"

namespace d2d {

/// Analytic metrics, one row per (scheme, k, c, metric) in sweep order:
///   mode-prob, offloaded, coverage, coverage-d2d, coverage-cellular,
///   rate, rate-d2d, rate-cellular                       (per scheme, k, c)
///   link-coverage-d2d@tau_db=T                            (k is the helper order)
///   link-coverage-cellular@tau_db=T
/// Conditional metrics of a zero-probability event are reported as nan.
std::vector<Row> cmd_analytic(const ExperimentConfig& cfg, const std::vector<std::string>& metrics);

struct SimulateRequest {
    std::vector<std::string> observables;
    int order = 1;                    // helper order for distance-hist
    int hist_bins = 120;              // bins of width spacing / 40 by default
    double hist_range_spacings = 3.0; // histogram range in mean inter-MBS spacings
    int pmf_max = 15;
};

/// Monte Carlo observables with 95 % CIs:
///   p-in, mode-prob, coverage, rate, coverage-d2d, rate-d2d  (per scheme, k, c)
///   link-coverage-cellular@tau_db=T, link-coverage-d2d@tau_db=T (k = order), spectral-efficiency-cellular
///   distance-hist (densities per bin and discard bookkeeping), helper-count-pmf
/// Every observable reuses cfg.sim.seed, so sweep points share random numbers.
std::vector<Row> cmd_simulate(const ExperimentConfig& cfg, const SimulateRequest& req);

/// k* for coverage and rate per (scheme, c) over the k range of the sweep,
/// with the value at k* and the gains over the cellular baselines.
std::vector<Row> cmd_optimal_k(const ExperimentConfig& cfg);

std::vector<std::string> analytic_metric_names();
std::vector<std::string> simulate_observable_names();

/// Runs fn(0..n-1) on up to `workers` threads; exceptions are rethrown after joining.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace d2d
