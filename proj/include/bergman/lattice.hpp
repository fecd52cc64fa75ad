#pragma once

#include <iosfwd>
#include <vector>

#include "bergman/cone.hpp"
#include "bergman/integral_spec.hpp"
#include "bergman/quad.hpp"
#include "bergman/tube.hpp"

namespace bergman {

/// Invariant distance: l2 norm of the logarithms of the spectral values of
/// P(y2^{-1/2}) y1.
double cone_distance(const ConeDescriptor& cone, const RealVector& y1, const RealVector& y2);

/// Product ball {d(Im z, Im c) < rho} x {|Re z - Re c| < rho Delta^{1/r}(Im c)}.
struct BallSpec {
    TubePoint center;
    double radius = 0.5;
};

bool ball_contains(const ConeDescriptor& cone, const BallSpec& ball, const TubePoint& z);

/// Nodes exactly covering the ball: y = P(c^{1/2}) exp(x') with x' in the
/// spectral-norm ball, x in a Euclidean ball, both in polar coordinates.
/// Weights are for Lebesgue measure du dv.
TubeNodes ball_nodes(const ConeDescriptor& cone, const BallSpec& ball, int density, int angular);

/// Integral of f over the ball against Delta^alpha(Im z) dv(z).
IntegrationResult ball_integral(const ConeDescriptor& cone, const BallSpec& ball, const TubeIntegrand& f,
                                double alpha, const IntegralSpec& spec);

/// Weighted volume nu_alpha(B) = integral of Delta^alpha(Im z) over the ball.
IntegrationResult ball_volume(const ConeDescriptor& cone, const BallSpec& ball, double alpha,
                              const IntegralSpec& spec);

/// Truncated tube: |x_i| <= x_max, delta(z) in [delta_min, delta_max]. For
/// rank above one, Im z / Delta^{1/r}(Im z) stays within cone distance
/// `spread` of e.
struct Region {
    double x_max = 4.0;
    double delta_min = 0.1;
    double delta_max = 10.0;
    double spread = 1.0;
};

bool region_contains(const ConeDescriptor& cone, const Region& region, const TubePoint& z);

/// Deterministic pseudo-random sample of the region, uniform in log delta and x.
std::vector<TubePoint> sample_region(const ConeDescriptor& cone, const Region& region, std::size_t count,
                                     std::uint64_t seed);

/// Invariant measure Delta^{-2n/r}(y) dv of the region for the half line;
/// estimated from samples otherwise.
double region_invariant_measure(const ConeDescriptor& cone, const Region& region);

struct Lattice {
    ConeDescriptor cone = ConeDescriptor::half_line();
    std::vector<TubePoint> points;
    double r = 0.5;
    double R = 0.75;
    int multiplicity = 0;
    Region region;
};

struct LatticeOptions {
    std::size_t samples = 20000;
    std::size_t repair_samples = 20000;
    int repair_rounds = 4;
    /// Points are inserted while any sample is outside every ball of radius r(1 - shrink).
    double shrink = 0.05;
    std::size_t point_budget = 200000;
    std::uint64_t seed = 2024;
};

Lattice build_lattice(const ConeDescriptor& cone, const Region& region, double r,
                      const LatticeOptions& options = {});

/// Indices of lattice points whose ball of the given radius contains z.
std::vector<std::size_t> covering_points(const Lattice& lattice, const TubePoint& z, double radius);

struct LatticeReport {
    std::size_t samples = 0;
    double covering_rate = 0.0;
    int max_multiplicity = 0;
    /// Two-sided constants C with ratio in [1/C, C].
    double delta_constant = 1.0;
    double kernel_constant = 1.0;
    /// Kernel constant per lattice point, for the uniformity check.
    std::vector<double> kernel_constants;
};

LatticeReport check_lattice(const Lattice& lattice, const std::vector<TubePoint>& samples, double nu);

void export_lattice(const Lattice& lattice, std::ostream& out);
Lattice import_lattice(std::istream& in);

// ---------------------------------------------------------------------------
// Sampling and atomic decomposition

/// Sum over lattice points of |f(a_j)|^p Delta^{nu+n/r}(Im a_j).
double sampling_norm(const ConeDescriptor& cone, const TubeIntegrand& f, const Lattice& lattice, double p,
                     double nu);

/// Invariant measure per lattice point; multiplying sampling_norm by it gives a
/// quantity comparable across lattice radii.
double lattice_cell_measure(const Lattice& lattice);

struct AtomicCoefficients {
    std::vector<cdouble> lambda;
    double nu = 0.0;
    double p = 2.0;
    /// Relative weighted residual of the analysis fit.
    double residual = 0.0;
};

/// sum_j lambda_j B_nu(z, a_j) Delta^{nu+n/r}(Im a_j).
cdouble atomic_synthesize(const Lattice& lattice, const AtomicCoefficients& coeffs, const TubePoint& z,
                          const CalibratedConstant& constant);

/// sum_j |lambda_j|^p Delta^{nu+n/r}(Im a_j).
double coefficient_norm(const Lattice& lattice, const AtomicCoefficients& coeffs);

struct AnalyzeOptions {
    /// Gauss points per unit of log delta and per x-panel of width delta.
    int density = 4;
    /// Ridge weight relative to the largest diagonal entry of the normal matrix.
    double regularization = 1e-10;
    double tolerance = 0.05;
};

/// Weighted regularized least squares for the synthesis system on a grid
/// over the lattice region, against the A^2_nu weight Delta^{nu - n/r}.
AtomicCoefficients atomic_analyze(const TubeIntegrand& f, const Lattice& lattice, double nu, double p,
                                  const CalibratedConstant& constant, const AnalyzeOptions& options = {});

// ---------------------------------------------------------------------------

struct SubmeanReport {
    double value_at_center = 0.0;
    double ball_average = 0.0;
    /// Smallest C with chi(z0) <= C * average.
    double fitted_constant = 0.0;
    bool holds = false;
};

/// Compares chi(z0) with its average over B(z0, rho) for Lebesgue measure.
SubmeanReport verify_submean(const ConeDescriptor& cone, const std::function<double(const TubePoint&)>& chi,
                             const TubePoint& z0, double rho, double cap, const IntegralSpec& spec);

} // namespace bergman
