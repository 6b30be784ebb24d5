#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "d2d/mode_selection.hpp"
#include "d2d/performance.hpp"
#include "d2d/philox.hpp"

namespace d2d::mc {

enum class EdgePolicy { oversized_window, toroidal };

/// How the uniform scheme meets content availability.
///   select_then_check: draw one of the first min(k, N) helpers, then test it.
///   check_then_select: test all of them, draw among those holding the content.
enum class UsVariant { select_then_check, check_then_select };

std::string_view to_string(EdgePolicy p);
std::string_view to_string(UsVariant v);
UsVariant parse_us_variant(std::string_view s);

struct SimConfig {
    // Window radius = (measurement_factor + window_factor) mean inter-MBS spacings.
    double measurement_factor = 3.0;
    double window_factor = 5.0;
    std::int64_t trials = 100000;
    std::uint64_t seed = 1;
    EdgePolicy edge = EdgePolicy::oversized_window;
    unsigned workers = 1;
    std::int64_t chunk = 2048;

    void validate() const;
    double window_radius(double lambda_m) const;
};

/// What a realisation has to produce; skipping unused parts keeps the
/// cheap observables cheap.
struct Needs {
    bool helpers = false;
    bool mbs_interference = false;
    bool d2d_interference = false;
};

/// One sampled network seen from a user at the origin.
struct Realization {
    double y = 0.0;  // user to serving MBS
    double x = 0.0;  // B_max radius of the serving MBS
    bool inside_bmax = false;
    std::vector<double> cell_helpers;  // distances of in-cell helpers, ascending
    std::vector<double> disk_helpers;  // distances of helpers inside B_max, ascending
    std::vector<double> mbs_interferers;
    std::vector<double> d2d_interferers;  // one active helper per other nonempty cell
    bool discarded = false;
    std::string_view reason;
};

Realization sample_realization(const NetworkParams& n, const SimConfig& cfg, const Needs& needs, Philox4x32& rng);

/// Helper count of the typical cell (MBS placed at the origin).
std::int64_t sample_typical_cell_count(const NetworkParams& n, const SimConfig& cfg, Philox4x32& rng);

struct TrialRequest {
    SelectionScheme scheme = SelectionScheme::NS;
    UsVariant us = UsVariant::select_then_check;
    int k = 1;
    double h_d = 0.0;
    bool sinr = false;
    // Co-user Poisson means for the bandwidth share; rate recorded when sinr is set.
    double eta_u_cellular = 0.0;
    double eta_u_d2d = 0.0;
    // 1 on an MBS cache hit, beta when the content comes over the backhaul.
    double cellular_rate_factor = 1.0;
};

struct TrialOutcome {
    int mode = 0;  // 0 cellular, i > 0 served by the i-th nearest in-cell helper
    double r_serving = 0.0;
    double sinr = 0.0;
    bool covered_m = false;
    bool covered_d = false;
    double rate = 0.0;  // bps after bandwidth sharing
    std::int64_t n_helpers_in_cell = 0;
    bool inside_bmax = false;
    bool discarded = false;
    std::string_view reason;
};

/// One realisation with helper selection and, if requested, SINR and rate of
/// the serving link. Fading is unit-mean exponential on every link.
TrialOutcome run_trial(std::uint64_t trial, const NetworkParams& n, const SimConfig& cfg, const TrialRequest& req);

struct Estimate {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double ci_halfwidth = std::numeric_limits<double>::infinity();  // 95 % normal approximation
    std::int64_t samples = 0;
    std::int64_t discarded = 0;
};

/// Running sums for several observables at once; NaN marks "not sampled".
class Accumulator {
public:
    explicit Accumulator(std::size_t width = 0) : sum_(width, 0.0), sq_(width, 0.0), n_(width, 0), skipped_(width, 0) {}
    void add(const std::vector<double>& values);
    void merge(const Accumulator& o);
    std::size_t width() const noexcept { return sum_.size(); }
    /// Throws InsufficientSamples when fewer than `min_samples` were retained.
    Estimate estimate(std::size_t j, std::int64_t min_samples = 100) const;

private:
    std::vector<double> sum_, sq_;
    std::vector<std::int64_t> n_, skipped_;
};

/// Runs `trial(index, out)` for every index in [0, cfg.trials), `out` being
/// `width` values per trial. Chunks are reduced in index order, so the result
/// does not depend on cfg.workers.
Accumulator run_trials(const SimConfig& cfg, std::size_t width,
                       const std::function<void(std::uint64_t, std::vector<double>&)>& trial);

/// Chunked map-reduce over trial indices. Each chunk gets a fresh
/// accumulator; chunks are merged in index order after all workers finish.
template <class Acc>
Acc parallel_reduce(const SimConfig& cfg, const std::function<Acc()>& make,
                    const std::function<void(std::uint64_t, Acc&)>& body,
                    const std::function<void(Acc&, const Acc&)>& merge) {
    cfg.validate();
    const std::int64_t n_chunks = (cfg.trials + cfg.chunk - 1) / cfg.chunk;
    std::vector<std::optional<Acc>> parts(static_cast<std::size_t>(n_chunks));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto work = [&] {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                Acc acc = make();
                const std::int64_t lo = c * cfg.chunk;
                const std::int64_t hi = std::min(cfg.trials, lo + cfg.chunk);
                for (std::int64_t t = lo; t < hi; ++t) body(static_cast<std::uint64_t>(t), acc);
                parts[static_cast<std::size_t>(c)] = std::move(acc);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next.store(n_chunks);
                return;
            }
        }
    };

    const auto n_workers = static_cast<unsigned>(std::min<std::int64_t>(cfg.workers, n_chunks));
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    Acc total = make();
    for (const auto& part : parts) merge(total, *part);
    return total;
}

// Observables ---------------------------------------------------------------

Estimate estimate_p_inside(const NetworkParams& n, const SimConfig& cfg, std::int64_t min_samples = 100);

struct ModeQuery {
    SelectionScheme scheme;
    int k;
    double h_d;
};

/// P[D2D mode] for several (scheme, k, h_d) at once with common random numbers.
std::vector<Estimate> estimate_mode(const NetworkParams& n, const SimConfig& cfg, const std::vector<ModeQuery>& q,
                                    UsVariant us, std::int64_t min_samples = 100);

/// P[SINR_m >= tau] for every tau in `taus` (linear).
std::vector<Estimate> estimate_cellular_coverage(const NetworkParams& n, const SimConfig& cfg,
                                                 const std::vector<double>& taus, std::int64_t min_samples = 100);

/// Coverage of the link to the i-th nearest in-cell helper, i = 1..max_order,
/// given at least i helpers in the cell; result[(i-1) * taus.size() + t].
std::vector<Estimate> estimate_d2d_coverage(const NetworkParams& n, const SimConfig& cfg, int max_order,
                                            const std::vector<double>& taus, std::int64_t min_samples = 100);

/// E[log2(1 + SINR_m)].
Estimate estimate_cellular_spectral_efficiency(const NetworkParams& n, const SimConfig& cfg,
                                               std::int64_t min_samples = 100);

/// Coverage (covered_d) and bandwidth-shared rate in D2D mode, conditional on D2D mode.
struct D2DModeEstimates {
    Estimate coverage;
    Estimate rate;
    Estimate p_d2d;
};
D2DModeEstimates estimate_d2d_mode(const NetworkParams& n, const SimConfig& cfg, const TrialRequest& req,
                                   std::int64_t min_samples = 100);

struct DistanceHistogram {
    int order = 1;
    std::vector<double> edges;
    std::vector<double> true_cell;  // density per unit length
    std::vector<double> disk;
    std::int64_t trials = 0;
    std::int64_t retained_true = 0;
    std::int64_t discarded_few_in_cell = 0;
    std::int64_t retained_disk = 0;
    std::int64_t discarded_outside_bmax = 0;
    std::int64_t discarded_few_in_disk = 0;
    std::int64_t discarded_degenerate = 0;
};

/// Histograms of the distance to the i-th nearest in-cell helper:
///   true_cell: realisations with fewer than i in-cell helpers discarded;
///   disk: user outside B_max or fewer than i helpers inside B_max discarded,
///         distance taken among helpers inside B_max.
DistanceHistogram conditional_distance_histogram(int i, const NetworkParams& n, const SimConfig& cfg,
                                                 const std::vector<double>& edges);

/// Same for i = 1..max_order from one set of realisations.
std::vector<DistanceHistogram> conditional_distance_histograms(int max_order, const NetworkParams& n,
                                                               const SimConfig& cfg, const std::vector<double>& edges);

/// Empirical helper-count PMF of the typical cell for j = 0..max_j; the last
/// entry collects everything above max_j.
struct CountPmf {
    std::vector<std::int64_t> counts;
    std::int64_t trials = 0;
};
CountPmf helper_count_pmf(const NetworkParams& n, const SimConfig& cfg, int max_j);

}  // namespace d2d::mc
