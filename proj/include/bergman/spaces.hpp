#pragma once

#include <vector>

#include "bergman/cone.hpp"
#include "bergman/integral_spec.hpp"
#include "bergman/lattice.hpp"
#include "bergman/quad.hpp"
#include "bergman/tube.hpp"

namespace bergman {

// ---------------------------------------------------------------------------
// Probe functions

struct ProbeTerm {
    cdouble coefficient = 1.0;
    double gamma = 1.0;
    TubePoint base;
};

/// f(z) = sum of c * Delta^{-gamma}((z - conj w0)/i).
struct ProbeFunction {
    ConeDescriptor cone = ConeDescriptor::half_line();
    std::vector<ProbeTerm> terms;

    cdouble operator()(const TubePoint& z) const;
    TubeIntegrand integrand() const;
};

ProbeFunction single_probe(const ConeDescriptor& cone, double gamma, const TubePoint& base, cdouble coefficient = 1.0);

cdouble probe_eval(const ProbeFunction& f, const TubePoint& z);

/// a f + b g on a common cone.
ProbeFunction combine(const ProbeFunction& f, cdouble a, const ProbeFunction& g, cdouble b);

// ---------------------------------------------------------------------------
// Norms

/// Display: Delta^nu(y) dy as in the mixed-norm definition.
/// Measure: Delta^{nu - n/r}(y) dy as in dV_nu.
enum class WeightConvention { Display, Measure };

std::string to_string(WeightConvention c);

struct MixedNormParams {
    double p = 2.0;
    double q = 2.0;
    double nu = 0.0;
    WeightConvention convention = WeightConvention::Display;
};

struct NormResult {
    double value = 0.0;
    double error_estimate = 0.0;
    Verdict verdict = Verdict::Undecided;
    bool converged = false;
    long long evaluations = 0;
    WeightConvention convention = WeightConvention::Display;
};

/// Weight exponent of y for the given convention.
double weight_exponent(const ConeDescriptor& cone, double nu, WeightConvention convention);

/// (int_Omega (int_V |f(x + iy)|^p dx)^{q/p} w(y) dy)^{1/q}. p or q infinite
/// takes suprema over the quadrature nodes at spec.cutoff instead.
NormResult mixed_norm(const ConeDescriptor& cone, const TubeIntegrand& f, const MixedNormParams& params,
                      const IntegralSpec& spec);

struct SupNormOptions {
    /// Evaluations allowed per cutoff for the start grid.
    long long budget = 20000;
    int refinement_rounds = 3;
    int starts = 8;
};

struct SupNormReport {
    /// Largest value found: a lower bound for the supremum.
    double value = 0.0;
    /// Extrapolated supremum minus value; heuristic.
    double gap = 0.0;
    Verdict verdict = Verdict::Undecided;
    TubePoint argmax;
    std::vector<double> ladder_values;
};

/// sup |f(z)| Delta^tau(Im z). The search runs on every rung of spec.ladder
/// (or at spec.cutoff alone); growth along the ladder gives Diverged.
SupNormReport sup_norm(const ConeDescriptor& cone, const TubeIntegrand& f, double tau, const IntegralSpec& spec,
                       const SupNormOptions& options = {});

using ProductFunction = std::function<cdouble(const std::vector<TubePoint>&)>;

struct ProductParams {
    std::vector<double> p;
    std::vector<double> nu;
};

/// Iterated norm on the m-fold product, innermost variable z_1, factor j with
/// measure Delta^{nu_j - n/r}(y_j) dx_j dy_j.
NormResult product_norm(const ConeDescriptor& cone, const ProductFunction& f, const ProductParams& params,
                        const IntegralSpec& spec);

/// (int (int_{B(w,rho)} |f|^p Delta^alpha dv)^{q/p} dv(w))^{1/q}.
NormResult herz_norm(const ConeDescriptor& cone, const TubeIntegrand& f, double p, double q, double alpha, double rho,
                     const IntegralSpec& outer, const IntegralSpec& ball);

/// Lattice form: the outer integral becomes a sum over lattice points, each
/// weighted by the Lebesgue volume of B(a_k, r).
NormResult herz_norm_discrete(const Lattice& lattice, const TubeIntegrand& f, double p, double q, double alpha,
                              double rho, const IntegralSpec& ball);

/// <f, g>_nu = int f conj(g) Delta^{nu - n/r}(Im z) dv(z).
IntegrationResult pairing(const ConeDescriptor& cone, const TubeIntegrand& f, const TubeIntegrand& g, double nu,
                          const IntegralSpec& spec);

// ---------------------------------------------------------------------------

struct RangeReport {
    double q_nu = 0.0;
    double q_lo = 0.0;
    double q_hi = 0.0;
    bool nonempty = false;
};

/// q_nu = 1 + nu/(n/r - 1), q_hi = min(p, p') q_nu, q_lo = q_hi'.
/// RankOneDegenerate when n/r = 1.
RangeReport projection_range(double p, double nu, const ConeDescriptor& cone);

} // namespace bergman
