#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "d2d/errors.hpp"

namespace d2d::math {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerances for the adaptive Gauss-Kronrod engine.
///
/// Semi-infinite integrals are truncated at the first point where the caller's
/// tail envelope drops below `abs_tol * tail_fraction`; the discarded mass is
/// added to the reported error.
struct QuadratureSpec {
    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    int max_subdivisions = 2000;
    double tail_fraction = 0.1;

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

/// Upper bound on the tail mass: envelope(x) >= \int_x^\infty |f(t)| dt.
/// Must be nonincreasing in x.
using TailEnvelope = std::function<double(double)>;

// Envelope for integrands bounded by scale * exp(-rate * (t - origin)).
TailEnvelope exponential_tail(double scale, double rate, double origin = 0.0);

// Envelope for integrands bounded by scale * t * exp(-rate * t^2).
TailEnvelope gaussian_tail(double scale, double rate);

double gamma_fn(double a);

/// log|Gamma(x)| and sign(Gamma(x)); sign is 0 at the poles.
struct SignedLogGamma {
    double log_abs;
    int sign;
};
SignedLogGamma signed_log_gamma(double x);

/// Gamma(i, x) / Gamma(i) for integer i >= 1, i.e. P[Poisson(x) <= i - 1].
double regularized_upper_gamma(int i, double x);

/// Gauss hypergeometric 2F1(a, b; c; z) for real parameters and 0 <= z < 1.
///
/// Power series for z <= 0.9. Above that the 1 - z connection formula is
/// used; when it cancels badly (c - a - b close to an integer) the direct
/// series is summed to convergence instead.
double hyp2f1(double a, double b, double c, double z);

double erfc_fn(double x);

namespace detail {

template <class F>
QuadratureResult integrate_finite(F&& f, double lower, double upper, const QuadratureSpec& spec,
                                  double extra_error) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    auto eval = [&](double a, double b) {
        double err = 0.0;
        const double v = GK::integrate(f, a, b, 0, 0.0, &err);
        // Boost reports the Kronrod-Gauss gap on the reference interval [-1, 1].
        return Panel{a, b, v, err * 0.5 * (b - a)};
    };

    std::priority_queue<Panel> open;
    std::vector<Panel> closed;
    open.push(eval(lower, upper));
    int subdivisions = 1;

    auto totals = [&]() {
        double v = 0.0, e = extra_error;
        auto acc = [&](const Panel& p) {
            v += p.value;
            e += p.error;
        };
        auto copy = open;
        while (!copy.empty()) {
            acc(copy.top());
            copy.pop();
        }
        for (const auto& p : closed) acc(p);
        return std::pair{v, e};
    };

    double value = open.top().value;
    double error = open.top().error + extra_error;
    while (true) {
        const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
        if (error <= target || open.empty()) break;
        if (subdivisions >= spec.max_subdivisions) {
            std::tie(value, error) = totals();
            if (error <= target) break;
            std::ostringstream msg;
            msg << "integrate: tolerance not met on [" << lower << ", " << upper << "] after "
                << subdivisions << " subdivisions (estimate " << value << ", error " << error << ")";
            throw ToleranceNotMet(msg.str(), value, error);
        }
        const Panel worst = open.top();
        open.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            closed.push_back(worst);
            continue;
        }
        const Panel left = eval(worst.a, mid);
        const Panel right = eval(mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        open.push(left);
        open.push(right);
        ++subdivisions;
        // Resynchronise the running sums against drift now and then.
        if (subdivisions % 64 == 0) std::tie(value, error) = totals();
    }
    std::tie(value, error) = totals();
    return {value, error, subdivisions};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) quadrature of f over [lower, upper].
/// `upper` may be +infinity, in which case `tail` is required.
template <class F>
QuadratureResult integrate(F&& f, double lower, double upper, const QuadratureSpec& spec = {},
                           const TailEnvelope& tail = {}) {
    spec.validate();
    if (!(lower <= upper) || std::isnan(lower)) throw DomainError("integrate: lower must be <= upper");
    if (lower == upper) return {};
    if (std::isinf(upper)) {
        if (!tail) throw DomainError("integrate: semi-infinite range needs a tail envelope");
        const double threshold = spec.abs_tol * spec.tail_fraction;
        double step = std::max(1.0, std::abs(lower));
        double cut = lower + step;
        int guard = 0;
        while (tail(cut) > threshold) {
            step *= 2.0;
            cut = lower + step;
            if (++guard > 2000) throw NonConvergenceError("integrate: tail envelope never drops below tolerance");
        }
        // Pull the cut back while the envelope still allows it.
        double lo = lower, hi = cut;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (tail(mid) > threshold) lo = mid; else hi = mid;
        }
        return detail::integrate_finite(f, lower, hi, spec, tail(hi));
    }
    return detail::integrate_finite(f, lower, upper, spec, 0.0);
}

}  // namespace d2d::math
