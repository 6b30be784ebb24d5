#include "d2d/performance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "d2d/errors.hpp"

namespace d2d {

namespace {

constexpr double kPi = std::numbers::pi;

// Pfaff: 2F1(1, b; 1+b; -x) = 2F1(1, 1; 1+b; x/(1+x)) / (1+x), argument <= 1/2 for x <= 1.
double pfaff_small(double b, double x) { return math::hyp2f1(1.0, 1.0, 1.0 + b, x / (1.0 + x)) / (1.0 + x); }

double interference_at_zero(double alpha) { return (2.0 / alpha) * kPi / std::sin(2.0 * kPi / alpha); }

}  // namespace

void NetworkParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError(std::string("NetworkParams: ") + name + " must be positive and finite");
        }
    };
    positive(lambda_m, "lambda_m");
    positive(lambda_d, "lambda_d");
    positive(lambda_u, "lambda_u");
    positive(p_m, "p_m");
    positive(p_d, "p_d");
    positive(w_m, "w_m");
    positive(w_d, "w_d");
    positive(tau_m, "tau_m");
    positive(tau_d, "tau_d");
    positive(beta, "beta");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw DomainError("NetworkParams: sigma2 must be >= 0");
    if (!(alpha > 2.0) || alpha > 5.0) throw DomainError("NetworkParams: alpha must lie in (2, 5]");
    if (beta > 1.0) throw DomainError("NetworkParams: beta must lie in (0, 1]");
}

double NetworkParams::p_interferer() const { return -std::expm1(-3.5 * std::log1p(eta_d() / 3.5)); }

std::string to_string(Method m) { return m == Method::exact ? "exact" : "bound"; }

double bandwidth_share(double a) {
    if (a < 0.0) throw DomainError("bandwidth_share: argument must be >= 0");
    if (a < 1e-8) return 1.0 - 0.5 * a;
    return -std::expm1(-a) / a;
}

double unit_hyp2f1_neg(double b, double x) {
    if (!(b > 0.0 && b < 1.0)) throw DomainError("unit_hyp2f1_neg: b must lie in (0, 1)");
    if (!(x >= 0.0)) throw DomainError("unit_hyp2f1_neg: x must be >= 0");
    if (x <= 1.0) return pfaff_small(b, x);
    if (std::isinf(x)) return 0.0;
    // b x^{-b} \int_0^x u^{b-1}/(1+u) du with the tail beyond x folded in reverse.
    const double whole = kPi / std::sin(kPi * b);
    const double tail = std::pow(x, b - 1.0) / (1.0 - b) * pfaff_small(1.0 - b, 1.0 / x);
    return b * std::pow(x, -b) * (whole - tail);
}

double interference_tail(double alpha, double t) {
    if (!(alpha > 2.0)) throw DomainError("interference_tail: alpha must exceed 2");
    if (!(t >= 0.0)) throw DomainError("interference_tail: t must be >= 0");
    const double h = 0.5 * alpha;
    if (t <= 1.0) return interference_at_zero(alpha) - t * unit_hyp2f1_neg(1.0 / h, std::pow(t, h));
    if (std::isinf(t)) return 0.0;
    return std::pow(t, 1.0 - h) / (h - 1.0) * unit_hyp2f1_neg(1.0 - 1.0 / h, std::pow(t, -h));
}

double cellular_delta(double tau, double alpha) {
    if (!(tau >= 0.0)) throw DomainError("cellular_delta: tau must be >= 0");
    if (tau == 0.0) return 0.0;
    const double a = std::pow(tau, 2.0 / alpha);
    return a * interference_tail(alpha, 1.0 / a);
}

InterferenceKernel::InterferenceKernel(double alpha) : alpha_(alpha) {
    if (!(alpha > 2.0) || alpha > 5.0) throw DomainError("InterferenceKernel: alpha must lie in (2, 5]");
    log_m_min_ = std::log(1e-8);
    log_m_max_ = std::log(1e8);
    constexpr int kPoints = 1201;
    const double step = (log_m_max_ - log_m_min_) / (kPoints - 1);
    std::vector<double> values(kPoints);
    for (int k = 0; k < kPoints; ++k) values[k] = std::log(direct(std::exp(log_m_min_ + k * step)));
    slope_lo_ = (values[1] - values[0]) / step;
    spline_ = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        values.begin(), values.end(), log_m_min_, step);
}

double InterferenceKernel::direct(double m) const {
    if (!(m >= 0.0)) throw DomainError("InterferenceKernel: m must be >= 0");
    if (m == 0.0) return 0.0;
    const math::QuadratureSpec spec{1e-300, 1e-11, 4000, 0.1};
    auto f = [&](double v) { return std::exp(-v) * interference_tail(alpha_, v / m); };
    // e^{-v} underflows long before v = 800
    constexpr double kCut = 800.0;
    const double head = math::integrate(f, 0.0, std::min(m, kCut), spec).value;
    const double tail =
        m < kCut ? math::integrate(f, m, math::kInf, spec,
                                   math::exponential_tail(interference_at_zero(alpha_), 1.0, 0.0))
                       .value
                 : 0.0;
    return m * (head + tail);
}

double InterferenceKernel::operator()(double m) const {
    if (!(m >= 0.0)) throw DomainError("InterferenceKernel: m must be >= 0");
    if (m == 0.0) return 0.0;
    const double lm = std::log(m);
    if (lm < log_m_min_) return std::exp((*spline_)(log_m_min_) + slope_lo_ * (lm - log_m_min_));
    if (lm > log_m_max_) return std::exp((*spline_)(log_m_max_)) * (m / std::exp(log_m_max_));
    return std::exp((*spline_)(lm));
}

double InterferenceKernel::hypergeometric_form(double alpha, double s, double lambda_tilde,
                                               const math::QuadratureSpec& spec) {
    if (!(alpha > 2.0)) throw DomainError("hypergeometric_form: alpha must exceed 2");
    if (!(s > 0.0) || !(lambda_tilde > 0.0)) throw DomainError("hypergeometric_form: s, lambda~ must be positive");
    const double abar = 1.0 - 2.0 / alpha;
    const double rate = kPi * lambda_tilde;
    // q in units of 1/sqrt(pi lambda~)
    const double unit = 1.0 / std::sqrt(rate);
    auto f = [&](double qs) {
        if (qs <= 0.0) return 0.0;
        const double q = qs * unit;
        const double x = s * std::pow(q, -alpha);
        return std::pow(q, 2.0 - alpha) * unit_hyp2f1_neg(abar, x) * 2.0 * qs * std::exp(-qs * qs);
    };
    // q^{2-alpha} 2F1(...; -s q^{-alpha}) never exceeds its q -> 0 limit
    const double bound = abar * kPi / std::sin(kPi * abar) * std::pow(s, -abar);
    const double expectation = math::integrate(f, 0.0, math::kInf, spec, math::gaussian_tail(2.0 * bound, 1.0)).value;
    return 2.0 * kPi * s * lambda_tilde * expectation / (alpha - 2.0);
}

double ergodic_rate_from_ccdf(const std::function<double(double)>& ccdf, const math::QuadratureSpec& spec) {
    // t in [0, 1] directly, t > 1 through t = e^x; ccdf assumed to decay at least like t^{-2/5}.
    constexpr double kDecayLength = 2.5;
    const double head = math::integrate([&](double t) { return ccdf(t) / (1.0 + t); }, 0.0, 1.0, spec).value;
    auto g = [&](double x) {
        const double t = std::exp(x);
        return ccdf(t) / (1.0 + 1.0 / t);
    };
    auto env = [&](double x) { return kDecayLength * ccdf(std::exp(x)); };
    const double tail = math::integrate(g, 0.0, math::kInf, spec, env).value;
    return (head + tail) / std::numbers::ln2;
}

double coverage_cellular_at(double tau, const NetworkParams& n, const math::QuadratureSpec& spec) {
    n.validate();
    if (!(tau >= 0.0)) throw DomainError("coverage_cellular: tau must be >= 0");
    if (tau == 0.0) return 1.0;
    const double delta = cellular_delta(tau, n.alpha);
    const double noise = tau * n.sigma2 / n.p_m;
    const double area = kPi * n.lambda_m;
    // w = pi lambda_m nu
    auto f = [&](double w) { return std::exp(-w * (1.0 + delta) - noise * std::pow(w / area, 0.5 * n.alpha)); };
    return math::integrate(f, 0.0, math::kInf, spec, math::exponential_tail(1.0, 1.0 + delta)).value;
}

double coverage_cellular(const NetworkParams& n, const math::QuadratureSpec& spec) {
    return coverage_cellular_at(n.tau_m, n, spec);
}

double coverage_d2d_link(const DistanceDistribution& dist, double tau, const NetworkParams& n,
                         const InterferenceKernel& psi) {
    if (!(tau >= 0.0)) throw DomainError("coverage_d2d: tau must be >= 0");
    if (tau == 0.0) return dist.expectation([](double) { return 1.0; });
    const double lt = n.p_interferer() * n.lambda_m;
    const double m_coef = kPi * lt * std::pow(tau, 2.0 / n.alpha);
    const double noise = tau * n.sigma2 / n.p_d;
    return dist.expectation([&](double r) {
        return std::exp(-psi(m_coef * r * r) - noise * std::pow(r, n.alpha));
    });
}

double coverage_d2d_ith(int i, const NetworkParams& n, const DistanceGridOptions& grid) {
    n.validate();
    const auto dist = build_distance_distribution(i, n.geometry(), grid);
    const InterferenceKernel psi(n.alpha);
    return coverage_d2d_link(dist, n.tau_d, n, psi);
}

PerformanceModel::PerformanceModel(NetworkParams n, CacheParams cache, ModelOptions opts)
    : net_(n), cache_(std::move(cache)), opts_(std::move(opts)) {
    net_.validate();
    opts_.spec.validate();
    if (opts_.k_max < 1) throw DomainError("ModelOptions: k_max must be >= 1");
    psi_ = std::make_shared<const InterferenceKernel>(net_.alpha);
}

PerformanceModel::PerformanceModel(const PerformanceModel& base, CacheParams cache)
    : net_(base.net_), cache_(std::move(cache)), opts_(base.opts_), psi_(base.psi_) {
    std::lock_guard lock(base.mu_);
    dist_ = base.dist_;
    gamma_d_ = base.gamma_d_;
    rate_d_ = base.rate_d_;
    gamma_m_ = base.gamma_m_;
    rate_m_ = base.rate_m_;
}

PerformanceModel PerformanceModel::with_cache(CacheParams cache) const { return PerformanceModel(*this, std::move(cache)); }

void PerformanceModel::check_k(int k) const {
    if (k < 1) throw IndexError("k must be >= 1");
}

const DistanceDistribution& PerformanceModel::distance(int i) const {
    if (i < 1) throw IndexError("helper order must be >= 1");
    {
        std::lock_guard lock(mu_);
        if (auto it = dist_.find(i); it != dist_.end()) return *it->second;
    }
    DistanceGridOptions grid = opts_.grid;
    grid.renormalize = opts_.renormalize;
    auto d = std::make_shared<const DistanceDistribution>(build_distance_distribution(i, net_.geometry(), grid));
    if (d->norm_defect() > grid.norm_tolerance) {
        std::ostringstream msg;
        msg << "f_R(i=" << i << ") integrates to " << d->raw_mass() << ", outside tolerance " << grid.norm_tolerance;
        throw ToleranceNotMet(msg.str(), d->raw_mass(), d->norm_defect());
    }
    std::lock_guard lock(mu_);
    return *dist_.emplace(i, std::move(d)).first->second;
}

double PerformanceModel::gamma_m_at(double tau) const { return coverage_cellular_at(tau, net_, opts_.spec); }

double PerformanceModel::gamma_m() const {
    {
        std::lock_guard lock(mu_);
        if (gamma_m_) return *gamma_m_;
    }
    const double v = gamma_m_at(net_.tau_m);
    std::lock_guard lock(mu_);
    gamma_m_ = v;
    return v;
}

double PerformanceModel::gamma_d_at(int i, double tau) const {
    return coverage_d2d_link(distance(i), tau, net_, *psi_);
}

double PerformanceModel::gamma_d(int i) const {
    {
        std::lock_guard lock(mu_);
        if (auto it = gamma_d_.find(i); it != gamma_d_.end()) return it->second;
    }
    const double v = gamma_d_at(i, net_.tau_d);
    std::lock_guard lock(mu_);
    gamma_d_[i] = v;
    return v;
}

double PerformanceModel::rate_m() const {
    {
        std::lock_guard lock(mu_);
        if (rate_m_) return *rate_m_;
    }
    const double v = ergodic_rate_from_ccdf([&](double t) { return gamma_m_at(t); }, opts_.spec);
    std::lock_guard lock(mu_);
    rate_m_ = v;
    return v;
}

double PerformanceModel::rate_d(int i) const {
    {
        std::lock_guard lock(mu_);
        if (auto it = rate_d_.find(i); it != rate_d_.end()) return it->second;
    }
    const auto& dist = distance(i);
    const double v = ergodic_rate_from_ccdf([&](double t) { return coverage_d2d_link(dist, t, net_, *psi_); },
                                            opts_.spec);
    std::lock_guard lock(mu_);
    rate_d_[i] = v;
    return v;
}

double PerformanceModel::offloaded(SelectionScheme s, int k, bool bound) const {
    check_k(k);
    const auto key = std::tuple{static_cast<int>(s), k, bound};
    {
        std::lock_guard lock(mu_);
        if (auto it = offloaded_.find(key); it != offloaded_.end()) return it->second;
    }
    const double v = offloaded_fraction(s, k, net_.eta_d(), cache_, bound);
    std::lock_guard lock(mu_);
    offloaded_[key] = v;
    return v;
}

double PerformanceModel::eta_u_d2d(SelectionScheme s, int k, bool bound) const {
    return net_.eta_u() * offloaded(s, k, bound);
}

double PerformanceModel::eta_u_cellular(SelectionScheme s, int k, bool bound) const {
    return net_.eta_u() - eta_u_d2d(s, k, bound);
}

std::vector<double> PerformanceModel::weights(SelectionScheme s, std::int64_t c, int k, Method m) const {
    check_k(k);
    std::vector<double> w(k);
    if (m == Method::exact) {
        w = mode_profile(s, c, k, net_.eta_d(), cache_).per_helper;
    } else {
        for (int i = 1; i <= k; ++i) w[i - 1] = p_d2d_bound(s, i, c, k, cache_);
    }
    return w;
}

double PerformanceModel::coverage_d2d_mode(SelectionScheme s, std::int64_t c, int k) const {
    const auto w = weights(s, c, k, Method::exact);
    double num = 0.0, den = 0.0;
    for (int i = 1; i <= k; ++i) {
        if (w[i - 1] == 0.0) continue;
        num += w[i - 1] * gamma_d(i);
        den += w[i - 1];
    }
    if (!(den > 0.0)) {
        throw UndefinedConditional("coverage_d2d_mode: D2D mode has probability zero for c=" + std::to_string(c));
    }
    return num / den;
}

MetricResult PerformanceModel::coverage_overall(SelectionScheme s, std::int64_t c, int k, Method m) const {
    const auto w = weights(s, c, k, m);
    MetricResult r;
    r.method = m;
    double p = 0.0;
    for (double v : w) p += v;
    r.components["cellular"] = (1.0 - p) * gamma_m();
    for (int i = 1; i <= k; ++i) {
        r.components["d2d_" + std::to_string(i)] = w[i - 1] == 0.0 ? 0.0 : w[i - 1] * gamma_d(i);
    }
    for (const auto& [_, v] : r.components) r.value += v;
    return r;
}

double PerformanceModel::avg_rate_d2d(SelectionScheme s, std::int64_t c, int k) const {
    const auto w = weights(s, c, k, Method::exact);
    double num = 0.0, den = 0.0;
    for (int i = 1; i <= k; ++i) {
        if (w[i - 1] == 0.0) continue;
        num += w[i - 1] * rate_d(i);
        den += w[i - 1];
    }
    if (!(den > 0.0)) {
        throw UndefinedConditional("avg_rate_d2d: D2D mode has probability zero for c=" + std::to_string(c));
    }
    return net_.w_d * bandwidth_share(eta_u_d2d(s, k)) * num / den;
}

double PerformanceModel::avg_rate_cellular(SelectionScheme s, std::int64_t c, int k, bool bound) const {
    if (c < 1 || c > cache_.library_size()) throw IndexError("content index outside the library");
    const double hat = rate_m() * (hit_mbs(c, cache_) ? 1.0 : net_.beta);
    return net_.w_m * hat * bandwidth_share(eta_u_cellular(s, k, bound));
}

MetricResult PerformanceModel::avg_rate_overall(SelectionScheme s, std::int64_t c, int k, Method m) const {
    const bool bound = m == Method::bound;
    const auto w = weights(s, c, k, m);
    MetricResult r;
    r.method = m;
    double p = 0.0;
    for (double v : w) p += v;
    r.components["cellular"] = (1.0 - p) * avg_rate_cellular(s, c, k, bound);
    const double share = net_.w_d * bandwidth_share(eta_u_d2d(s, k, bound));
    for (int i = 1; i <= k; ++i) {
        r.components["d2d_" + std::to_string(i)] = w[i - 1] == 0.0 ? 0.0 : w[i - 1] * share * rate_d(i);
    }
    for (const auto& [_, v] : r.components) r.value += v;
    return r;
}

double PerformanceModel::baseline_cached() const {
    return (net_.w_m + net_.w_d) * bandwidth_share(net_.eta_u()) * rate_m();
}

double PerformanceModel::baseline_backhaul() const { return net_.beta * baseline_cached(); }

namespace {

OptimalK argmax_over_k(int lo, int hi, const std::function<double(int)>& f) {
    if (lo < 1 || hi < lo) throw DomainError("optimal k: need 1 <= k_lo <= k_hi");
    OptimalK best;
    best.k = lo;
    best.value = -std::numeric_limits<double>::infinity();
    for (int k = lo; k <= hi; ++k) {
        const double v = f(k);
        best.curve.push_back(v);
        if (v > best.value) {
            best.value = v;
            best.k = k;
        }
    }
    return best;
}

}  // namespace

OptimalK PerformanceModel::optimal_k_coverage(SelectionScheme s, std::int64_t c, int k_lo, int k_hi) const {
    if (k_hi == 0) k_hi = opts_.k_max;
    return argmax_over_k(k_lo, k_hi, [&](int k) { return coverage_overall(s, c, k).value; });
}

OptimalK PerformanceModel::optimal_k_rate(SelectionScheme s, std::int64_t c, int k_lo, int k_hi) const {
    if (k_hi == 0) k_hi = opts_.k_max;
    return argmax_over_k(k_lo, k_hi, [&](int k) { return avg_rate_overall(s, c, k).value; });
}

Gain PerformanceModel::coverage_gain(std::int64_t c) const {
    Gain g;
    g.gamma_m = gamma_m();
    g.ns = optimal_k_coverage(SelectionScheme::NS, c);
    g.us = optimal_k_coverage(SelectionScheme::US, c);
    g.gain_ns = (g.ns.value - g.gamma_m) / g.gamma_m * 100.0;
    g.gain_us = (g.us.value - g.gamma_m) / g.gamma_m * 100.0;
    return g;
}

}  // namespace d2d
