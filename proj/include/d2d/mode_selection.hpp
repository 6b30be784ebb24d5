#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "d2d/content_model.hpp"

namespace d2d {

/// Helper selection rule applied by the MBS to the k nearest in-cell helpers.
///   NS: nearest helper holding the content.
///   US: one helper drawn uniformly, then checked for the content.
enum class SelectionScheme { NS, US };

std::string_view to_string(SelectionScheme s);
SelectionScheme parse_scheme(std::string_view name);

struct ModeProfile {
    int k = 1;
    std::vector<double> per_helper;  // per_helper[i-1] = p(i, c)
    double d2d_total = 0.0;
    double cellular = 1.0;
};

/// P[N_d = j] for the helper count of a Poisson-Voronoi cell (shape-3.5 gamma
/// approximation of the normalised cell area), eta_d = lambda_d / lambda_m.
double cell_helper_count_pmf(std::int64_t j, double eta_d);

/// P[N_d >= i] by PMF summation (head complement or tail sum, whichever avoids
/// cancellation; residual mass below 1e-15).
double helper_count_at_least(int i, double eta_d);

/// P[N_d >= i] through the 2F1(1, i+3.5; i+1; eta/(eta+3.5)) closed form.
double helper_count_at_least_closed(int i, double eta_d);

/// Probability that a user requesting c is served by its i-th nearest in-cell helper.
double p_served_by_ith(SelectionScheme scheme, int i, std::int64_t c, int k, double eta_d,
                       const CacheParams& cache);

/// Same quantity evaluated via the hypergeometric closed forms (cross-check path).
double p_served_by_ith_closed(SelectionScheme scheme, int i, std::int64_t c, int k, double eta_d,
                              const CacheParams& cache);

ModeProfile mode_profile(SelectionScheme scheme, std::int64_t c, int k, double eta_d, const CacheParams& cache);

/// D2D mode probability. NS sums the per-helper terms; US uses the k-free
/// closed form h_d(c) [1 - (1 + eta_d/3.5)^{-3.5}].
double p_d2d_mode(SelectionScheme scheme, std::int64_t c, int k, double eta_d, const CacheParams& cache);

/// eta_d -> infinity upper bound on p(i, c).
double p_d2d_bound(SelectionScheme scheme, int i, std::int64_t c, int k, const CacheParams& cache);

/// Sum of p_d2d_bound over i = 1..k.
double p_d2d_mode_bound(SelectionScheme scheme, std::int64_t c, int k, const CacheParams& cache);

/// Request-weighted D2D fraction rho * sum_c c^{-zeta} p_d2d(c) over the whole
/// library. `bound` selects the eta_d -> infinity probabilities.
double offloaded_fraction(SelectionScheme scheme, int k, double eta_d, const CacheParams& cache,
                          bool bound = false);

}  // namespace d2d
