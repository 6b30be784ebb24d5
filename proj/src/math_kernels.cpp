#include "d2d/math_kernels.hpp"

#include <math.h>

#include <string>

namespace d2d::math {

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1 || !(tail_fraction > 0.0) ||
        tail_fraction > 1.0) {
        throw DomainError("QuadratureSpec: abs_tol, rel_tol > 0, max_subdivisions >= 1, tail_fraction in (0, 1]");
    }
}

TailEnvelope exponential_tail(double scale, double rate, double origin) {
    return [=](double x) { return scale / rate * std::exp(-rate * (x - origin)); };
}

TailEnvelope gaussian_tail(double scale, double rate) {
    // \int_x^\infty s t exp(-r t^2) dt = s/(2r) exp(-r x^2)
    return [=](double x) { return scale / (2.0 * rate) * std::exp(-rate * x * x); };
}

double gamma_fn(double a) {
    if (!(a > 0.0)) throw DomainError("gamma_fn: argument must be positive, got " + std::to_string(a));
    return std::tgamma(a);
}

SignedLogGamma signed_log_gamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return {kInf, 0};
    int sign = 1;
    const double lg = ::lgamma_r(x, &sign);
    return {lg, sign};
}

double regularized_upper_gamma(int i, double x) {
    if (i < 1 || !(x >= 0.0)) throw DomainError("regularized_upper_gamma: need i >= 1 and x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    double sum = 0.0;
    if (x < 600.0) {
        double term = std::exp(-x);
        sum = term;
        for (int j = 1; j < i; ++j) {
            term *= x / j;
            sum += term;
        }
    } else {
        const double lx = std::log(x);
        for (int j = 0; j < i; ++j) sum += std::exp(-x + j * lx - std::lgamma(j + 1.0));
    }
    return std::min(sum, 1.0);
}

double erfc_fn(double x) { return std::erfc(x); }

namespace {

struct Series {
    double value = 0.0;
    double abs_sum = 0.0;
    bool converged = false;
};

// Neumaier-compensated power series of 2F1.
Series hyp2f1_series(double a, double b, double c, double z, long max_terms) {
    Series s;
    double sum = 1.0, comp = 0.0, abs_sum = 1.0, term = 1.0;
    const double tiny = 1e-17;
    for (long n = 0; n < max_terms; ++n) {
        const double ratio = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        term *= ratio;
        if (term == 0.0) {
            s.converged = true;
            break;
        }
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term)) comp += (sum - t) + term;
        else comp += (term - t) + sum;
        sum = t;
        abs_sum += std::abs(term);
        if (!std::isfinite(sum)) break;
        const double r = std::max(std::abs(ratio), std::abs(z));
        if (r < 1.0 && n > 2 && std::abs(term) * r / (1.0 - r) <= tiny * std::abs(sum + comp)) {
            s.converged = true;
            break;
        }
    }
    s.value = sum + comp;
    s.abs_sum = abs_sum;
    return s;
}

bool near_integer(double v, double tol) { return std::abs(v - std::round(v)) < tol; }

}  // namespace

double hyp2f1(double a, double b, double c, double z) {
    if (!(z >= 0.0 && z < 1.0)) throw DomainError("hyp2f1: z must lie in [0, 1)");
    if (c <= 0.0 && c == std::floor(c)) throw DomainError("hyp2f1: c must not be a nonpositive integer");
    if (z == 0.0) return 1.0;

    constexpr long kSeriesTerms = 200000;
    constexpr long kFallbackTerms = 50000000;
    constexpr double kMaxCondition = 1e4;

    if (z <= 0.9) {
        const Series s = hyp2f1_series(a, b, c, z, kSeriesTerms);
        if (s.converged && std::isfinite(s.value)) return s.value;
        throw NonConvergenceError("hyp2f1: power series did not converge");
    }

    const double d = c - a - b;
    const double w = 1.0 - z;
    if (!near_integer(d, 1e-9)) {
        // 2F1(a,b;c;z) = A 2F1(a,b;1-d;w) + B w^d 2F1(c-a,c-b;1+d;w)
        const auto gc = signed_log_gamma(c);
        const auto gd = signed_log_gamma(d);
        const auto gmd = signed_log_gamma(-d);
        const auto gca = signed_log_gamma(c - a);
        const auto gcb = signed_log_gamma(c - b);
        const auto ga = signed_log_gamma(a);
        const auto gb = signed_log_gamma(b);

        double coef_a = 0.0, coef_b = 0.0;
        if (gca.sign != 0 && gcb.sign != 0) {
            coef_a = gc.sign * gd.sign * gca.sign * gcb.sign *
                     std::exp(gc.log_abs + gd.log_abs - gca.log_abs - gcb.log_abs);
        }
        if (ga.sign != 0 && gb.sign != 0) {
            coef_b = gc.sign * gmd.sign * ga.sign * gb.sign *
                     std::exp(gc.log_abs + gmd.log_abs - ga.log_abs - gb.log_abs + d * std::log(w));
        }
        const Series s1 = coef_a != 0.0 ? hyp2f1_series(a, b, 1.0 - d, w, kSeriesTerms) : Series{0.0, 0.0, true};
        const Series s2 = coef_b != 0.0 ? hyp2f1_series(c - a, c - b, 1.0 + d, w, kSeriesTerms) : Series{0.0, 0.0, true};
        if (s1.converged && s2.converged) {
            const double value = coef_a * s1.value + coef_b * s2.value;
            const double spread = std::abs(coef_a) * s1.abs_sum + std::abs(coef_b) * s2.abs_sum;
            if (std::isfinite(value) && value != 0.0 && spread / std::abs(value) < kMaxCondition) return value;
        }
    }

    const Series direct = hyp2f1_series(a, b, c, z, kFallbackTerms);
    if (direct.converged && std::isfinite(direct.value) &&
        direct.abs_sum / std::abs(direct.value) < 1e8) {
        return direct.value;
    }
    throw NonConvergenceError("hyp2f1: neither the connection formula nor the direct series met tolerance");
}

}  // namespace d2d::math
