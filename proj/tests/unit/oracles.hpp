#pragma once

// Reference values computed by routes that share no code with the library.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace oracle {

using Quad = __float128;

inline double hyp2f1_series(double a, double b, double c, double z) {
    Quad term = 1, sum = 1;
    for (int n = 0; n < 2'000'000; ++n) {
        term *= (Quad(a) + n) * (Quad(b) + n) / ((Quad(c) + n) * (n + 1)) * Quad(z);
        sum += term;
        const Quad at = term < 0 ? -term : term;
        if (n > 10 && at < sum * Quad(1e-30)) break;
    }
    return static_cast<double>(sum);
}

// b \int_0^1 t^{b-1} / (1 + x t) dt by substitution t = s^{1/b}: \int_0^1 ds / (1 + x s^{1/b}),
// composite Gauss-Legendre in long double on a graded mesh.
inline double unit_hyp2f1_neg_integral(double b, double x) {
    static const long double nodes[5] = {0.0L, -0.5384693101056830910363144L, 0.5384693101056830910363144L,
                                         -0.9061798459386639927976269L, 0.9061798459386639927976269L};
    static const long double weights[5] = {0.5688888888888888888888889L, 0.4786286704993664680412915L,
                                           0.4786286704993664680412915L, 0.2369268850561890875142640L,
                                           0.2369268850561890875142640L};
    const long double inv_b = 1.0L / b, lx = x;
    long double sum = 0.0L;
    const int panels = 4000;
    for (int p = 0; p < panels; ++p) {
        // Quadratic grading toward s = 0 where s^{1/b} bends.
        const long double u0 = static_cast<long double>(p) / panels, u1 = static_cast<long double>(p + 1) / panels;
        const long double a = u0 * u0, bb = u1 * u1;
        const long double half = 0.5L * (bb - a), mid = 0.5L * (bb + a);
        for (int q = 0; q < 5; ++q) {
            const long double s = mid + half * nodes[q];
            sum += weights[q] * half / (1.0L + lx * std::pow(s, inv_b));
        }
    }
    return static_cast<double>(sum);
}

inline long double poisson_cdf(int i, double x) {
    const long double lx = x;
    long double term = std::exp(-lx), sum = 0.0L;
    for (int j = 0; j < i; ++j) {
        sum += term;
        term *= lx / (j + 1);
    }
    return sum;
}

// Area of b(o, r) intersected with the disk of radius x centred at (y, 0),
// with a 3-sigma band, by uniform sampling in the bounding square of b(o, r).
struct AreaEstimate {
    double area;
    double sd;
};

inline AreaEstimate lens_area_mc(double r, double y, double x, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int hits = 0;
    for (int s = 0; s < n; ++s) {
        const double px = u(rng) * r, py = u(rng) * r;
        if (px * px + py * py <= r * r && (px - y) * (px - y) + py * py <= x * x) ++hits;
    }
    const double p = static_cast<double>(hits) / n;
    return {4.0 * r * r * p, 4.0 * r * r * std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace oracle
