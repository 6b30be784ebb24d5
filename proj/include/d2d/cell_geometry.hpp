#pragma once

#include <memory>
#include <vector>

#include <math.h>  // pchip in Boost 1.74 calls isnan unqualified

#include <boost/math/interpolators/pchip.hpp>

#include "d2d/math_kernels.hpp"

namespace d2d {

/// MBS and helper intensities in nodes per square metre.
struct GeometryParams {
    double lambda_m;
    double lambda_d;

    GeometryParams(double lambda_m_, double lambda_d_);

    double eta_d() const noexcept { return lambda_d / lambda_m; }
    // 1 / sqrt(pi lambda_m): the length unit in which f_Y is a unit Rayleigh.
    double length_scale() const noexcept;
};

/// Which second cosine-law term the lens area uses. `linear_variant` keeps
/// the dimensionally inconsistent x^2 + y - r^2 variant and only exists as a
/// regression trap for the validation suite.
enum class Omega2Form { standard, linear_variant };

/// Closed form used for the containment weight. `printed_variant` is an
/// alternative erfc expression (exp(b/6) and b sqrt(pi) prefactors) that
/// agrees only at r = 0; it is kept as a second regression trap.
enum class ContainmentForm { standard, printed_variant };

// Radius X of the largest MBS-centred disk inside the Voronoi cell.
double max_disk_radius_pdf(double x, const GeometryParams& g);
double max_disk_radius_ccdf(double x, const GeometryParams& g);

// Distance Y from the typical user to its serving MBS.
double user_distance_pdf(double y, const GeometryParams& g);
double user_distance_cdf(double y, const GeometryParams& g);

/// P[X >= Y]; the constant 1/5.
double p_user_inside(const GeometryParams& g);
/// \int (1 - F_X(y)) f_Y(y) dy evaluated numerically.
double p_user_inside_integral(const GeometryParams& g, const math::QuadratureSpec& spec = {});

/// Normalised probability of at least i helpers inside B_max (closed form).
double p_at_least_i_inside(int i, double eta_d);
/// The same quantity from its defining double integral.
double p_at_least_i_inside_integral(int i, const GeometryParams& g, const math::QuadratureSpec& spec = {});

/// Area of b(o, r) intersected with the disk of radius x centred at distance y.
/// Requires |x - y| <= r <= x + y.
double lens_area(double r, double y, double x, Omega2Form form = Omega2Form::standard);
/// d/dr of lens_area = 2 r arccos((r^2 + y^2 - x^2) / (2 y r)); open regime only.
double lens_area_derivative(double r, double y, double x);

/// Weight of (x, y) configurations with b(o, r) fully inside B_max,
///   kappa(r) = \int f_Y(y) \int_{r+y}^\infty f_X(x) F_Y(x) dx dy,
/// closed form in erfc with b = lambda_m pi r^2; kappa(0) = 1/15.
double containment_weight(double r, const GeometryParams& g);
double containment_weight_variant(double r, const GeometryParams& g);
/// Same weight as a one-dimensional integral over y.
double containment_weight_integral(double r, const GeometryParams& g, const math::QuadratureSpec& spec = {});

/// i-th nearest neighbour distance density of an unconstrained helper HPPP.
double unconstrained_pdf(int i, double r, double lambda_d);
double unconstrained_ccdf(int i, double r, double lambda_d);

/// Lens (partial overlap) and contained contributions to f_{R_i}(r), both
/// already divided by p_in * p_{N_d}^{(i)}.
struct DistanceTerms {
    double lens = 0.0;
    double contained = 0.0;
    double total() const noexcept { return lens + contained; }
};

DistanceTerms distance_pdf_terms(int i, double r, const GeometryParams& g, const math::QuadratureSpec& spec = {},
                                 Omega2Form form = Omega2Form::standard,
                                 ContainmentForm containment = ContainmentForm::standard);

/// f_{R_i}(r) for the i-th nearest in-cell helper under the inscribed disk model.
double distance_pdf(int i, double r, const GeometryParams& g, const math::QuadratureSpec& spec = {});

struct DistanceGridOptions {
    int points = 400;
    bool renormalize = false;
    double norm_tolerance = 0.02;
    double tail_mass = 1e-6;
    Omega2Form omega2 = Omega2Form::standard;
    ContainmentForm containment = ContainmentForm::standard;
    math::QuadratureSpec spec{1e-12, 1e-8, 2000, 0.1};
};

/// f_{R_i} tabulated on a radius grid (r = 0 plus geometric spacing) and
/// interpolated with a monotone cubic. Immutable after construction.
class DistanceDistribution {
public:
    DistanceDistribution(int order, std::vector<double> grid, std::vector<double> lens,
                         std::vector<double> contained, bool renormalize);

    int order() const noexcept { return order_; }
    const std::vector<double>& grid() const noexcept { return grid_; }
    const std::vector<double>& density() const noexcept { return density_; }
    const std::vector<double>& lens_part() const noexcept { return lens_; }
    const std::vector<double>& contained_part() const noexcept { return contained_; }
    double raw_mass() const noexcept { return raw_mass_; }
    double norm_defect() const noexcept { return norm_defect_; }
    bool renormalized() const noexcept { return renormalized_; }
    double r_max() const noexcept { return grid_.back(); }

    double operator()(double r) const;
    double cdf(double r) const;
    double mass_between(double a, double b) const { return cdf(b) - cdf(a); }
    double mean() const;
    double lens_mass_fraction() const;

    /// \int g(r) f(r) dr using 5-point Gauss-Legendre on every grid interval.
    template <class G>
    double expectation(G&& g) const {
        double s = 0.0;
        for (std::size_t k = 0; k < nodes_.size(); ++k) s += weights_[k] * g(nodes_[k]);
        return s;
    }

private:
    int order_;
    std::vector<double> grid_, density_, lens_, contained_;
    std::vector<double> nodes_, weights_, lens_weights_;
    std::vector<double> cumulative_;
    using Interpolant = boost::math::interpolators::pchip<std::vector<double>>;
    std::shared_ptr<const Interpolant> interp_;
    double raw_mass_ = 0.0;
    double norm_defect_ = 0.0;
    bool renormalized_ = false;
    double scale_ = 1.0;
};

DistanceDistribution build_distance_distribution(int i, const GeometryParams& g, const DistanceGridOptions& opts = {});

}  // namespace d2d
