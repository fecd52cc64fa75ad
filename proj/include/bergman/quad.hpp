#pragma once

#include <functional>
#include <vector>

#include "bergman/cone.hpp"
#include "bergman/integral_spec.hpp"
#include "bergman/tube.hpp"

namespace bergman {

// ---------------------------------------------------------------------------
// One-dimensional rules

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1].
Rule1D gauss_legendre(int n);

/// Composite Gauss-Legendre on [a, b] with panels of width at most one.
Rule1D composite_gauss(double a, double b, int density);

/// y in [1/R, R] through y = e^s.
Rule1D radial_rule(double R, int density);

/// x in [-R, R] through x = scale * sinh(t).
Rule1D line_rule(double R, double scale, int density);

/// Trapezoid rule on a full period [0, 2 pi).
Rule1D periodic_rule(int m);

/// Product rule on the unit sphere S^k in R^{k+1}; weights sum to its area.
struct SphereRule {
    std::vector<RealVector> directions;
    std::vector<double> weights;
};
SphereRule sphere_rule(int k, int angular);

// ---------------------------------------------------------------------------
// Node sets

struct NodeSet {
    std::vector<RealVector> points;
    std::vector<double> weights;
    std::size_t size() const { return points.size(); }
};

/// Tensor nodes for the truncated cone: radial variables on [1/R, R].
NodeSet cone_nodes(const ConeDescriptor& cone, double R, int density, const IntegralSpec& spec);

/// Tensor nodes for [-R, R]^n under the sinh map.
NodeSet base_nodes(int n, double R, int density, const IntegralSpec& spec);

/// Number of cone nodes without building them.
long long cone_node_count(const ConeDescriptor& cone, double R, int density, const IntegralSpec& spec);

// ---------------------------------------------------------------------------
// Integration

using ConeIntegrand = std::function<cdouble(const RealVector&)>;
using TubeIntegrand = std::function<cdouble(const TubePoint&)>;
using ProductIntegrand = std::function<cdouble(const std::vector<TubePoint>&)>;

/// Integral over the cone with the extra weight Delta(y)^{spec.weight_exponent}.
IntegrationResult integrate_cone(const ConeDescriptor& cone, const ConeIntegrand& f, const IntegralSpec& spec);

/// Integral over R^n.
IntegrationResult integrate_base(int n, const ConeIntegrand& f, const IntegralSpec& spec);

/// Integral over the tube for Lebesgue measure du dv, times Delta(v)^{spec.weight_exponent}.
IntegrationResult integrate_tube(const ConeDescriptor& cone, const TubeIntegrand& f, const IntegralSpec& spec);

/// Integral over the m-fold product of tubes. Each factor carries the weight
/// Delta(v_j)^{weights[j]} (weights empty means no weight). Nested order: the
/// first factor is innermost.
IntegrationResult integrate_product_tube(const ConeDescriptor& cone, int m, const ProductIntegrand& f,
                                         const std::vector<double>& weights, const IntegralSpec& spec);

/// Tensor nodes of a single tube with weights w_y w_x Delta(y)^{weight_exponent}.
struct TubeNodes {
    std::vector<TubePoint> points;
    std::vector<double> weights;
    std::size_t size() const { return points.size(); }
};
TubeNodes tube_nodes(const ConeDescriptor& cone, double R, int density, const IntegralSpec& spec,
                     double weight_exponent);
long long tube_node_count(const ConeDescriptor& cone, double R, int density, const IntegralSpec& spec);

/// One tensor evaluation of a truncated quantity at cutoff R and the given density.
struct LevelValue {
    cdouble value;
    long long evaluations;
};
using LevelFunction = std::function<LevelValue(double R, int density)>;
using CountFunction = std::function<long long(double R, int density)>;

/// Drives a truncated tensor rule through the truncation ladder of `spec`,
/// with node-halving error estimates and tail extrapolation.
IntegrationResult ladder_integrate(const LevelFunction& level, const CountFunction& count, const IntegralSpec& spec);

/// Iterated tube integral: sum over cone nodes of w_y Delta(y)^w outer(S(y), y)
/// where S(y) is the base-space integral of inner(x + iy).
IntegrationResult integrate_tube_iterated(const ConeDescriptor& cone, const TubeIntegrand& inner,
                                          const std::function<cdouble(cdouble, const RealVector&)>& outer,
                                          const IntegralSpec& spec);

// ---------------------------------------------------------------------------
// Ladder classification and exponent fits

struct LadderAnalysis {
    Verdict verdict = Verdict::Undecided;
    /// Last value, or the geometric-tail extrapolation when it applies.
    double extrapolated = 0.0;
    /// Ratio of the last two increments; NaN when unavailable.
    double last_ratio = 0.0;
};

/// Classifies values of a truncated integral along strictly increasing radii.
LadderAnalysis divergence_probe(const std::vector<double>& values, const std::vector<double>& radii,
                                double tolerance = 1e-4);

/// Convenience overload: evaluates the truncated integral on each radius.
LadderAnalysis divergence_probe(const std::function<double(double)>& truncated, const std::vector<double>& radii,
                                double tolerance = 1e-4);

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    double r_squared = 0.0;
    std::vector<double> lambdas;
    std::vector<double> values;
};

/// Logarithmically spaced grid of `points` values on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int points);

/// Least-squares fit of log value against log lambda. The grid needs at least
/// five points spanning two decades.
ExponentFit detect_exponent(const std::function<double(double)>& family, const std::vector<double>& lambdas);
ExponentFit fit_exponent(const std::vector<double>& lambdas, const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Archetypal integrals

/// Integral over the cone of Delta^alpha(y + t) Delta^beta(y) dy.
IntegrationResult I_alpha_beta(const ConeDescriptor& cone, double alpha, double beta, const RealVector& t,
                               const IntegralSpec& spec);

/// Integral over V of |Delta^{-alpha}((x + iy)/i)| dx.
IntegrationResult I_alpha(const ConeDescriptor& cone, double alpha, const RealVector& y, const IntegralSpec& spec);

/// Integral over the tube of |B(zeta, z0)|^p delta^beta(zeta) with the
/// unweighted kernel Delta^{-2n/r}((zeta - conj z0)/i) and Lebesgue measure.
IntegrationResult fr_kernel_integral(const ConeDescriptor& cone, double p, double beta, const TubePoint& z0,
                                     const IntegralSpec& spec);

/// Integral over the tube of Delta^tau(Im w) / |Delta^{tau1}((w - conj z)/i)| dv(w).
IntegrationResult fr_estimate_5(const ConeDescriptor& cone, double tau, double tau1, const TubePoint& z,
                                const IntegralSpec& spec);

} // namespace bergman
