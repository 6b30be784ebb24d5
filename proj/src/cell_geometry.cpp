#include "d2d/cell_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "d2d/errors.hpp"

namespace d2d {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUserInside = 0.2;

// Boundary slack for the regime checks, relative to the largest length.
constexpr double kRegimeSlack = 1e-12;

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

// Lens area without precondition checks; arguments are clamped into range.
double lens_unchecked(double r, double y, double x, Omega2Form form) {
    const double w1 = r * r + y * y - x * x;
    const double w2 = form == Omega2Form::standard ? x * x + y * y - r * r : x * x + y - r * r;
    const double root = std::max(0.0, 4.0 * y * y * x * x - w2 * w2);
    return r * r * std::acos(clamp_unit(w1 / (2.0 * y * r))) + x * x * std::acos(clamp_unit(w2 / (2.0 * y * x))) -
           0.5 * std::sqrt(root);
}

double lens_derivative_unchecked(double r, double y, double x) {
    return 2.0 * r * std::acos(clamp_unit((r * r + y * y - x * x) / (2.0 * y * r)));
}

void check_order(int i) {
    if (i < 1) throw DomainError("neighbour order i must be >= 1");
}

// Containment weight in MBS length units, b = r^2:
// \int f_Y(y) [e^{-4(r+y)^2} - 0.8 e^{-5(r+y)^2}] dy in closed form.
double kappa_scaled(double b) {
    if (b > 150.0) return 0.0;
    const double sb = std::sqrt(b);
    const double gauss = std::exp(-4.0 * b) / 5.0 - 2.0 / 15.0 * std::exp(-5.0 * b);
    const double four = 4.0 / (5.0 * std::sqrt(5.0)) * std::exp(-0.8 * b) * std::erfc(4.0 * sb / std::sqrt(5.0));
    const double five = 2.0 / (3.0 * std::sqrt(6.0)) * std::exp(-5.0 * b / 6.0) * std::erfc(5.0 * sb / std::sqrt(6.0));
    return std::max(0.0, gauss - std::sqrt(kPi * b) * (four - five));
}

double kappa_scaled_variant(double b) {
    if (b > 150.0) return 0.0;
    const double sb = std::sqrt(b);
    const double first = std::sqrt(6.0) / 9.0 * std::exp(b / 6.0) * std::erfc(5.0 * std::sqrt(6.0) * sb / 6.0);
    const double second = 4.0 * std::sqrt(5.0) / 25.0 * std::exp(-0.8 * b) * std::erfc(4.0 * std::sqrt(5.0) * sb / 5.0);
    return std::max(0.0, std::exp(-4.0 * b) / 15.0 + b * std::sqrt(kPi) * (first - second));
}

double kappa_for(ContainmentForm form, double b) {
    return form == ContainmentForm::standard ? kappa_scaled(b) : kappa_scaled_variant(b);
}

// f_{i,2} in MBS length units (lambda_d pi = eta).
double unconstrained_scaled(int i, double r, double eta) {
    if (r <= 0.0) return 0.0;
    const double lg = std::log(2.0) + i * std::log(eta) + (2.0 * i - 1.0) * std::log(r) - eta * r * r - std::lgamma(i);
    return std::exp(lg);
}

// Un-normalised lens contribution T1 in MBS length units.
double lens_term_scaled(int i, double r, double eta, Omega2Form form, double ell, const math::QuadratureSpec& spec) {
    if (r <= 0.0) return 0.0;
    const double density_d = eta / kPi;  // helpers per unit area in scaled units
    const double lg_i = std::lgamma(static_cast<double>(i));

    math::QuadratureSpec inner_spec = spec;
    inner_spec.abs_tol = spec.abs_tol * 1e-2;
    inner_spec.rel_tol = spec.rel_tol * 1e-2;

    auto inner = [&](double y) {
        if (y <= 0.0) return 0.0;
        const double lo = std::max(y, r - y);
        const double hi = r + y;
        if (!(hi > lo)) return 0.0;
        auto integrand = [&](double x) {
            double area;
            if (form == Omega2Form::standard) {
                area = lens_unchecked(r, y, x, form);
            } else {
                area = lens_unchecked(r * ell, y * ell, x * ell, form) / (ell * ell);
            }
            const double u = std::max(0.0, density_d * area);
            const double du = density_d * lens_derivative_unchecked(r, y, x);
            double shape;
            if (i == 1) {
                shape = std::exp(-u);
            } else if (u == 0.0) {
                shape = 0.0;
            } else {
                shape = std::exp((i - 1) * std::log(u) - u - lg_i);
            }
            const double fx = 8.0 * x * std::exp(-4.0 * x * x);
            const double fy_cdf = -std::expm1(-x * x);
            return du * shape * fx * fy_cdf;
        };
        return math::integrate(integrand, lo, hi, inner_spec).value;
    };
    auto outer = [&](double y) { return 2.0 * y * std::exp(-y * y) * inner(y); };

    const double split = 0.5 * r;
    const double head = math::integrate(outer, 0.0, split, spec).value;
    const double tail =
        math::integrate(outer, split, math::kInf, spec, math::gaussian_tail(4.0 * eta * r + 1e-300, 5.0)).value;
    return head + tail;
}

}  // namespace

GeometryParams::GeometryParams(double lambda_m_, double lambda_d_) : lambda_m(lambda_m_), lambda_d(lambda_d_) {
    if (!(lambda_m > 0.0) || !(lambda_d > 0.0) || !std::isfinite(lambda_m) || !std::isfinite(lambda_d)) {
        throw DomainError("GeometryParams: densities must be positive and finite");
    }
}

double GeometryParams::length_scale() const noexcept { return 1.0 / std::sqrt(kPi * lambda_m); }

double max_disk_radius_pdf(double x, const GeometryParams& g) {
    if (x < 0.0) return 0.0;
    return 8.0 * g.lambda_m * kPi * x * std::exp(-4.0 * g.lambda_m * kPi * x * x);
}

double max_disk_radius_ccdf(double x, const GeometryParams& g) {
    if (x <= 0.0) return 1.0;
    return std::exp(-4.0 * g.lambda_m * kPi * x * x);
}

double user_distance_pdf(double y, const GeometryParams& g) {
    if (y < 0.0) return 0.0;
    return 2.0 * g.lambda_m * kPi * y * std::exp(-g.lambda_m * kPi * y * y);
}

double user_distance_cdf(double y, const GeometryParams& g) {
    if (y <= 0.0) return 0.0;
    return -std::expm1(-g.lambda_m * kPi * y * y);
}

double p_user_inside(const GeometryParams&) { return kUserInside; }

double p_user_inside_integral(const GeometryParams& g, const math::QuadratureSpec& spec) {
    auto f = [&](double y) { return max_disk_radius_ccdf(y, g) * user_distance_pdf(y, g); };
    const double rate = g.lambda_m * kPi;
    return math::integrate(f, 0.0, math::kInf, spec, math::gaussian_tail(2.0 * rate, 5.0 * rate)).value;
}

double p_at_least_i_inside(int i, double eta_d) {
    check_order(i);
    if (!(eta_d > 0.0)) throw DomainError("eta_d must be positive");
    const double id = i;
    return 5.0 * std::pow(1.0 + 4.0 / eta_d, -id) + 10.0 / 3.0 * std::pow(1.0 + 6.0 / eta_d, -id) -
           8.0 * std::pow(1.0 + 5.0 / eta_d, -id);
}

double p_at_least_i_inside_integral(int i, const GeometryParams& g, const math::QuadratureSpec& spec) {
    check_order(i);
    const double eta = g.eta_d();
    auto inner = [&](double y) {
        auto f = [&](double x) {
            const double at_least = 1.0 - math::regularized_upper_gamma(i, eta * x * x);
            return at_least * 8.0 * x * std::exp(-4.0 * x * x) * -std::expm1(-x * x);
        };
        return math::integrate(f, y, math::kInf, spec, math::gaussian_tail(8.0, 4.0)).value;
    };
    auto outer = [&](double y) { return 2.0 * y * std::exp(-y * y) * inner(y); };
    return math::integrate(outer, 0.0, math::kInf, spec, math::gaussian_tail(2.0, 5.0)).value / kUserInside;
}

double lens_area(double r, double y, double x, Omega2Form form) {
    if (!(y > 0.0) || !(x > 0.0) || !(r > 0.0)) throw GeometryError("lens_area: r, y, x must be positive");
    const double slack = kRegimeSlack * std::max({r, x, y});
    if (r < std::abs(x - y) - slack || r > x + y + slack) {
        throw GeometryError("lens_area: need |x - y| <= r <= x + y (partial overlap)");
    }
    return lens_unchecked(r, y, x, form);
}

double lens_area_derivative(double r, double y, double x) {
    if (!(y > 0.0) || !(x > 0.0) || !(r > 0.0)) throw GeometryError("lens_area_derivative: r, y, x must be positive");
    if (!(r > std::abs(x - y)) || !(r < x + y)) {
        throw GeometryError("lens_area_derivative: r must lie strictly inside (|x - y|, x + y)");
    }
    return lens_derivative_unchecked(r, y, x);
}

double containment_weight(double r, const GeometryParams& g) {
    if (r < 0.0) throw DomainError("containment_weight: r must be >= 0");
    return kappa_scaled(g.lambda_m * kPi * r * r);
}

double containment_weight_variant(double r, const GeometryParams& g) {
    if (r < 0.0) throw DomainError("containment_weight_variant: r must be >= 0");
    return kappa_scaled_variant(g.lambda_m * kPi * r * r);
}

double containment_weight_integral(double r, const GeometryParams& g, const math::QuadratureSpec& spec) {
    if (r < 0.0) throw DomainError("containment_weight_integral: r must be >= 0");
    const double rs = r / g.length_scale();
    // \int_{r+y}^\infty f_X F_Y dx = e^{-4t^2} - 0.8 e^{-5t^2} with t = r + y (scaled units)
    auto f = [&](double y) {
        const double t = rs + y;
        return 2.0 * y * std::exp(-y * y) * (std::exp(-4.0 * t * t) - 0.8 * std::exp(-5.0 * t * t));
    };
    return math::integrate(f, 0.0, math::kInf, spec, math::gaussian_tail(2.0, 5.0)).value;
}

double unconstrained_pdf(int i, double r, double lambda_d) {
    check_order(i);
    if (!(lambda_d > 0.0)) throw DomainError("unconstrained_pdf: lambda_d must be positive");
    if (r <= 0.0) return 0.0;
    const double a = lambda_d * kPi;
    return std::exp(std::log(2.0) + i * std::log(a) + (2.0 * i - 1.0) * std::log(r) - a * r * r - std::lgamma(i));
}

double unconstrained_ccdf(int i, double r, double lambda_d) {
    check_order(i);
    if (r <= 0.0) return 1.0;
    return math::regularized_upper_gamma(i, lambda_d * kPi * r * r);
}

DistanceTerms distance_pdf_terms(int i, double r, const GeometryParams& g, const math::QuadratureSpec& spec,
                                 Omega2Form form, ContainmentForm containment) {
    check_order(i);
    if (r < 0.0) throw DomainError("distance_pdf: r must be >= 0");
    const double ell = g.length_scale();
    const double eta = g.eta_d();
    const double rs = r / ell;
    const double norm = kUserInside * p_at_least_i_inside(i, eta);
    DistanceTerms t;
    try {
        t.lens = lens_term_scaled(i, rs, eta, form, ell, spec) / norm / ell;
    } catch (const ToleranceNotMet& e) {
        throw ToleranceNotMet("distance_pdf(i=" + std::to_string(i) + ", r=" + std::to_string(r) +
                                  "): lens term: " + e.what(),
                              e.estimate(), e.achieved_error());
    }
    t.contained = unconstrained_scaled(i, rs, eta) * kappa_for(containment, rs * rs) / norm / ell;
    return t;
}

double distance_pdf(int i, double r, const GeometryParams& g, const math::QuadratureSpec& spec) {
    return distance_pdf_terms(i, r, g, spec).total();
}

namespace {

using GL5 = boost::math::quadrature::gauss<double, 5>;

// Appends the 5 Gauss-Legendre nodes/weights of [a, b].
void gauss_nodes(double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    const auto& x = GL5::abscissa();
    const auto& w = GL5::weights();
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] == 0.0) {
            nodes.push_back(mid);
            weights.push_back(half * w[k]);
        } else {
            nodes.push_back(mid - half * x[k]);
            weights.push_back(half * w[k]);
            nodes.push_back(mid + half * x[k]);
            weights.push_back(half * w[k]);
        }
    }
}

}  // namespace

DistanceDistribution::DistanceDistribution(int order, std::vector<double> grid, std::vector<double> lens,
                                           std::vector<double> contained, bool renormalize)
    : order_(order), grid_(std::move(grid)), lens_(std::move(lens)), contained_(std::move(contained)) {
    if (grid_.size() < 2 || lens_.size() != grid_.size() || contained_.size() != grid_.size()) {
        throw DomainError("DistanceDistribution: grid needs >= 2 points and matching samples");
    }
    for (std::size_t k = 1; k < grid_.size(); ++k) {
        if (!(grid_[k] > grid_[k - 1])) throw DomainError("DistanceDistribution: grid must be strictly increasing");
    }
    density_.resize(grid_.size());
    for (std::size_t k = 0; k < grid_.size(); ++k) density_[k] = std::max(0.0, lens_[k] + contained_[k]);

    auto x = grid_;
    auto y = density_;
    interp_ = std::make_shared<const Interpolant>(std::move(x), std::move(y));
    auto lx = grid_;
    auto ly = lens_;
    for (auto& v : ly) v = std::max(0.0, v);
    const Interpolant lens_interp(std::move(lx), std::move(ly));

    cumulative_.assign(grid_.size(), 0.0);
    for (std::size_t k = 0; k + 1 < grid_.size(); ++k) {
        const std::size_t first = nodes_.size();
        gauss_nodes(grid_[k], grid_[k + 1], nodes_, weights_);
        double mass = 0.0;
        for (std::size_t n = first; n < nodes_.size(); ++n) {
            const double f = std::max(0.0, (*interp_)(nodes_[n]));
            lens_weights_.push_back(weights_[n] * lens_interp(nodes_[n]));
            weights_[n] *= f;
            mass += weights_[n];
        }
        cumulative_[k + 1] = cumulative_[k] + mass;
    }
    raw_mass_ = cumulative_.back();
    norm_defect_ = std::abs(1.0 - raw_mass_);
    if (renormalize && raw_mass_ > 0.0) {
        renormalized_ = true;
        scale_ = 1.0 / raw_mass_;
        for (auto& v : density_) v *= scale_;
        for (auto& v : weights_) v *= scale_;
        for (auto& v : lens_weights_) v *= scale_;
        for (auto& v : cumulative_) v *= scale_;
    }
}

double DistanceDistribution::operator()(double r) const {
    if (r < grid_.front() || r > grid_.back()) return 0.0;
    return std::max(0.0, (*interp_)(r)) * scale_;
}

double DistanceDistribution::cdf(double r) const {
    if (r <= grid_.front()) return 0.0;
    if (r >= grid_.back()) return cumulative_.back();
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
    const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
    std::vector<double> n, w;
    gauss_nodes(grid_[k], r, n, w);
    double part = 0.0;
    for (std::size_t j = 0; j < n.size(); ++j) part += w[j] * (*this)(n[j]);
    return cumulative_[k] + part;
}

double DistanceDistribution::mean() const {
    return expectation([](double r) { return r; });
}

double DistanceDistribution::lens_mass_fraction() const {
    double lens = 0.0, total = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        lens += lens_weights_[k];
        total += weights_[k];
    }
    return total > 0.0 ? lens / total : 0.0;
}

DistanceDistribution build_distance_distribution(int i, const GeometryParams& g, const DistanceGridOptions& opts) {
    check_order(i);
    if (opts.points < 3) throw DomainError("distance grid needs at least 3 points");
    const double eta = g.eta_d();
    const double ell = g.length_scale();

    // Upper edge: unconstrained tail below tail_mass, and twice the radius
    // beyond which B_max essentially never reaches (R_i <= X + Y < 2X).
    double lo = 0.0, hi = 1.0;
    while (math::regularized_upper_gamma(i, eta * hi * hi) > opts.tail_mass) hi *= 2.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (math::regularized_upper_gamma(i, eta * mid * mid) > opts.tail_mass ? lo : hi) = mid;
    }
    const double r_unconstrained = hi;
    const double r_cell = 2.0 * std::sqrt(std::log(1e10) / 4.0);
    const double r_max = std::max(r_unconstrained, r_cell);
    const double r_min = 1e-3 * std::sqrt(static_cast<double>(i) / eta);

    std::vector<double> grid;
    grid.reserve(opts.points);
    grid.push_back(0.0);
    const int geometric = opts.points - 1;
    const double ratio = std::pow(r_max / r_min, 1.0 / (geometric - 1));
    for (int k = 0; k < geometric; ++k) grid.push_back(r_min * std::pow(ratio, k) * ell);
    grid.back() = r_max * ell;

    std::vector<double> lens(grid.size()), contained(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto t = distance_pdf_terms(i, grid[k], g, opts.spec, opts.omega2, opts.containment);
        lens[k] = t.lens;
        contained[k] = t.contained;
    }
    DistanceDistribution dist(i, std::move(grid), std::move(lens), std::move(contained), opts.renormalize);
    return dist;
}

}  // namespace d2d
