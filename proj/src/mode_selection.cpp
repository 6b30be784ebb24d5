#include "d2d/mode_selection.hpp"

#include <cmath>
#include <numbers>

#include "d2d/errors.hpp"
#include "d2d/math_kernels.hpp"

namespace d2d {

namespace {

constexpr double kShape = 3.5;

void check_eta(double eta_d) {
    if (!(eta_d > 0.0) || !std::isfinite(eta_d)) throw DomainError("eta_d must be positive and finite");
}

void check_order(int i, int k) {
    if (k < 1) throw IndexError("k must be >= 1");
    if (i < 1 || i > k) throw IndexError("helper order i=" + std::to_string(i) + " outside [1, " + std::to_string(k) + "]");
}

double log_pmf(std::int64_t j, double eta_d) {
    const double jd = static_cast<double>(j);
    return kShape * std::log(kShape) + std::lgamma(jd + kShape) + jd * std::log(eta_d) -
           std::lgamma(kShape) - std::lgamma(jd + 1.0) - (jd + kShape) * std::log(eta_d + kShape);
}

}  // namespace

std::string_view to_string(SelectionScheme s) { return s == SelectionScheme::NS ? "NS" : "US"; }

SelectionScheme parse_scheme(std::string_view name) {
    if (name == "NS" || name == "ns") return SelectionScheme::NS;
    if (name == "US" || name == "us") return SelectionScheme::US;
    throw DomainError("unknown selection scheme '" + std::string(name) + "' (expected NS or US)");
}

double cell_helper_count_pmf(std::int64_t j, double eta_d) {
    check_eta(eta_d);
    if (j < 0) throw DomainError("helper count must be >= 0");
    return std::exp(log_pmf(j, eta_d));
}

double helper_count_at_least(int i, double eta_d) {
    check_eta(eta_d);
    if (i <= 0) return 1.0;
    if (i - 1 <= eta_d) {
        double head = 0.0;
        for (int j = 0; j < i; ++j) head += std::exp(log_pmf(j, eta_d));
        return std::max(0.0, 1.0 - head);
    }
    // Tail sum; successive ratios (j+3.5)/(j+1) z decrease towards z < 1.
    const double z = eta_d / (eta_d + kShape);
    double term = std::exp(log_pmf(i, eta_d));
    double sum = 0.0;
    for (std::int64_t j = i; j < i + 100'000'000LL; ++j) {
        sum += term;
        const double ratio = (j + kShape) / (j + 1.0) * z;
        term *= ratio;
        if (term * ratio / (1.0 - ratio) < 1e-15 * std::max(sum, 1e-300) || term == 0.0) break;
    }
    return std::min(sum, 1.0);
}

double helper_count_at_least_closed(int i, double eta_d) {
    check_eta(eta_d);
    if (i <= 0) return 1.0;
    const double id = i;
    const double z = eta_d / (eta_d + kShape);
    // 343/30 sqrt(14/pi) == 3.5^3.5 / Gamma(3.5)
    const double lead = std::log(343.0 / 30.0 * std::sqrt(14.0 / std::numbers::pi)) + std::lgamma(id + kShape) +
                        id * std::log(eta_d) - std::lgamma(id + 1.0) - (id + kShape) * std::log(eta_d + kShape);
    return std::exp(lead) * math::hyp2f1(1.0, id + kShape, id + 1.0, z);
}

namespace {

double us_uniform_sum(int i, int k, double eta_d) {
    double s = 0.0;
    for (int m = i; m <= k; ++m) s += cell_helper_count_pmf(m, eta_d) / m;
    return s;
}

}  // namespace

double p_served_by_ith(SelectionScheme scheme, int i, std::int64_t c, int k, double eta_d, const CacheParams& cache) {
    check_order(i, k);
    check_eta(eta_d);
    const double h = hit_d2d(c, cache);
    if (scheme == SelectionScheme::NS) {
        if (h == 0.0) return 0.0;
        return helper_count_at_least(i, eta_d) * std::pow(1.0 - h, i - 1) * h;
    }
    return h * (helper_count_at_least(k + 1, eta_d) / k + us_uniform_sum(i, k, eta_d));
}

double p_served_by_ith_closed(SelectionScheme scheme, int i, std::int64_t c, int k, double eta_d,
                              const CacheParams& cache) {
    check_order(i, k);
    check_eta(eta_d);
    const double h = hit_d2d(c, cache);
    if (scheme == SelectionScheme::NS) return helper_count_at_least_closed(i, eta_d) * std::pow(1.0 - h, i - 1) * h;
    return h * (helper_count_at_least_closed(k + 1, eta_d) / k + us_uniform_sum(i, k, eta_d));
}

ModeProfile mode_profile(SelectionScheme scheme, std::int64_t c, int k, double eta_d, const CacheParams& cache) {
    check_order(1, k);
    ModeProfile out;
    out.k = k;
    out.per_helper.reserve(k);
    for (int i = 1; i <= k; ++i) out.per_helper.push_back(p_served_by_ith(scheme, i, c, k, eta_d, cache));
    double total = 0.0;
    for (double p : out.per_helper) total += p;
    out.d2d_total = total;
    out.cellular = 1.0 - total;
    return out;
}

double p_d2d_mode(SelectionScheme scheme, std::int64_t c, int k, double eta_d, const CacheParams& cache) {
    check_order(1, k);
    check_eta(eta_d);
    if (scheme == SelectionScheme::US) {
        return hit_d2d(c, cache) * -std::expm1(-kShape * std::log1p(eta_d / kShape));
    }
    return mode_profile(scheme, c, k, eta_d, cache).d2d_total;
}

double p_d2d_bound(SelectionScheme scheme, int i, std::int64_t c, int k, const CacheParams& cache) {
    check_order(i, k);
    const double h = hit_d2d(c, cache);
    if (scheme == SelectionScheme::NS) return std::pow(1.0 - h, i - 1) * h;
    return h / k;
}

double p_d2d_mode_bound(SelectionScheme scheme, std::int64_t c, int k, const CacheParams& cache) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += p_d2d_bound(scheme, i, c, k, cache);
    return s;
}

double offloaded_fraction(SelectionScheme scheme, int k, double eta_d, const CacheParams& cache, bool bound) {
    check_order(1, k);
    check_eta(eta_d);
    std::vector<double> at_least(k + 1, 1.0);
    if (!bound) {
        for (int i = 1; i <= k; ++i) at_least[i] = helper_count_at_least(i, eta_d);
    }
    const double occupied = bound ? 1.0 : at_least[1];
    double acc = 0.0;
    for (std::int64_t c = cache.library_size(); c >= 1; --c) {
        const double h = hit_d2d(c, cache);
        double p = 0.0;
        if (scheme == SelectionScheme::US) {
            p = h * occupied;
        } else {
            double miss = 1.0;
            for (int i = 1; i <= k; ++i) {
                p += at_least[i] * miss * h;
                miss *= 1.0 - h;
            }
        }
        acc += std::pow(static_cast<double>(c), -cache.zeta()) * p;
    }
    return cache.rho() * acc;
}

}  // namespace d2d
