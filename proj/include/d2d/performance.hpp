#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "d2d/cell_geometry.hpp"
#include "d2d/content_model.hpp"
#include "d2d/math_kernels.hpp"
#include "d2d/mode_selection.hpp"

namespace d2d {

/// Radio and density parameters, all linear SI (W, Hz, m^-2).
struct NetworkParams {
    double lambda_m = 0.0;
    double lambda_d = 0.0;
    double lambda_u = 0.0;
    double p_m = 0.0;
    double p_d = 0.0;
    double w_m = 0.0;
    double w_d = 0.0;
    double alpha = 4.0;
    double tau_m = 1.0;
    double tau_d = 1.0;
    double sigma2 = 0.0;
    double beta = 1.0;

    void validate() const;
    GeometryParams geometry() const { return {lambda_m, lambda_d}; }
    double eta_d() const { return lambda_d / lambda_m; }
    double eta_u() const { return lambda_u / lambda_m; }
    /// 1 - (1 + eta_d/3.5)^{-3.5}: a cell holds at least one helper.
    double p_interferer() const;
};

enum class Method { exact, bound };
std::string to_string(Method m);

struct MetricResult {
    double value = 0.0;
    std::map<std::string, double> components;
    Method method = Method::exact;
};

// gamma(a) = (1 - e^{-a}) / a, the mean bandwidth share with Poisson(a) co-users.
double bandwidth_share(double a);

/// 2F1(1, b; 1 + b; -x) for 0 < b < 1 and x >= 0.
double unit_hyp2f1_neg(double b, double x);

/// \int_t^\infty du / (1 + u^{alpha/2}).
double interference_tail(double alpha, double t);

/// delta_m(tau, alpha) = tau^{2/alpha} \int_{tau^{-2/alpha}}^\infty du / (1 + u^{alpha/2}).
double cellular_delta(double tau, double alpha);

/// Laplace exponent of the active-helper interference field under the
/// nearest-interferer guard zone, after Jensen's bound:
///   Psi(m) = m \int_0^\infty e^{-v} I(alpha, v/m) dv,   m = pi lambda~ tau^{2/alpha} r^2.
/// Tabulated on a log grid and interpolated with a cubic B-spline.
class InterferenceKernel {
public:
    explicit InterferenceKernel(double alpha);

    double alpha() const noexcept { return alpha_; }
    double operator()(double m) const;
    /// Direct quadrature, bypassing the table.
    double direct(double m) const;

    /// The same exponent written as 2 pi s lambda~ E_Q[q^{2-alpha} 2F1(1, a'; 1+a'; -s q^{-alpha})] / (alpha - 2).
    static double hypergeometric_form(double alpha, double s, double lambda_tilde,
                                      const math::QuadratureSpec& spec = {});

private:
    double alpha_;
    double log_m_min_, log_m_max_;
    double slope_lo_;
    std::shared_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

/// (1 / ln 2) \int_0^\infty ccdf(t) / (1 + t) dt for an SINR ccdf.
double ergodic_rate_from_ccdf(const std::function<double(double)>& ccdf, const math::QuadratureSpec& spec = {});

double coverage_cellular(const NetworkParams& n, const math::QuadratureSpec& spec = {});
double coverage_cellular_at(double tau, const NetworkParams& n, const math::QuadratureSpec& spec = {});

/// Gamma_{d,i} at threshold tau for a tabulated f_{R_i}.
double coverage_d2d_link(const DistanceDistribution& dist, double tau, const NetworkParams& n,
                         const InterferenceKernel& psi);

/// Gamma_{d,i} at n.tau_d, building f_{R_i} on the fly.
double coverage_d2d_ith(int i, const NetworkParams& n, const DistanceGridOptions& grid = {});

struct ModelOptions {
    int k_max = 10;
    DistanceGridOptions grid{};
    math::QuadratureSpec spec{};
    // Rescale tabulated f_{R_i} to unit mass; norm_tolerance is enforced either way.
    bool renormalize = false;
};

struct OptimalK {
    int k = 1;
    double value = 0.0;
    std::vector<double> curve;  // curve[k-1]
};

struct Gain {
    OptimalK ns, us;
    double gamma_m = 0.0;
    double gain_ns = 0.0;  // percent
    double gain_us = 0.0;
};

/// Caches everything that depends only on the network (f_{R_i}, link
/// coverages, link rates, offloaded fractions) and evaluates the per-content
/// metrics on top. Thread-safe; lazily filled.
class PerformanceModel {
public:
    PerformanceModel(NetworkParams n, CacheParams cache, ModelOptions opts = {});

    const NetworkParams& network() const noexcept { return net_; }
    const CacheParams& cache() const noexcept { return cache_; }
    const ModelOptions& options() const noexcept { return opts_; }
    const InterferenceKernel& kernel() const noexcept { return *psi_; }

    /// Same network, different cache; link-level results computed so far are reused.
    PerformanceModel with_cache(CacheParams cache) const;

    const DistanceDistribution& distance(int i) const;

    double gamma_m() const;
    double gamma_m_at(double tau) const;
    double gamma_d(int i) const;
    double gamma_d_at(int i, double tau) const;
    double rate_m() const;     // bits/s/Hz
    double rate_d(int i) const;

    /// rho sum_c c^{-zeta} p_d2d(c); cached per (scheme, k, bound).
    double offloaded(SelectionScheme s, int k, bool bound = false) const;
    double eta_u_d2d(SelectionScheme s, int k, bool bound = false) const;
    double eta_u_cellular(SelectionScheme s, int k, bool bound = false) const;

    double coverage_d2d_mode(SelectionScheme s, std::int64_t c, int k) const;
    MetricResult coverage_overall(SelectionScheme s, std::int64_t c, int k, Method m = Method::exact) const;

    double avg_rate_d2d(SelectionScheme s, std::int64_t c, int k) const;
    double avg_rate_cellular(SelectionScheme s, std::int64_t c, int k, bool bound = false) const;
    MetricResult avg_rate_overall(SelectionScheme s, std::int64_t c, int k, Method m = Method::exact) const;

    double baseline_cached() const;   // T_m^(ca)
    double baseline_backhaul() const; // T_m^(bh)

    OptimalK optimal_k_coverage(SelectionScheme s, std::int64_t c, int k_lo = 1, int k_hi = 0) const;
    OptimalK optimal_k_rate(SelectionScheme s, std::int64_t c, int k_lo = 1, int k_hi = 0) const;
    Gain coverage_gain(std::int64_t c) const;

private:
    PerformanceModel(const PerformanceModel& base, CacheParams cache);
    void check_k(int k) const;
    std::vector<double> weights(SelectionScheme s, std::int64_t c, int k, Method m) const;

    NetworkParams net_;
    CacheParams cache_;
    ModelOptions opts_;
    std::shared_ptr<const InterferenceKernel> psi_;

    mutable std::mutex mu_;
    mutable std::map<int, std::shared_ptr<const DistanceDistribution>> dist_;
    mutable std::map<int, double> gamma_d_, rate_d_;
    mutable std::optional<double> gamma_m_, rate_m_;
    mutable std::map<std::tuple<int, int, bool>, double> offloaded_;
};

}  // namespace d2d
