#pragma once

#include <string>
#include <vector>

#include "bergman/cone.hpp"
#include "bergman/integral_spec.hpp"
#include "bergman/quad.hpp"
#include "bergman/spaces.hpp"
#include "bergman/tube.hpp"

namespace bergman {

/// Integral of F over the tube in coordinates centred at z:
/// w = Re z + P((Im z)^{1/2}) w', dv(w) = Delta(Im z)^{2n/r} dv(w').
IntegrationResult integrate_centered(const ConeDescriptor& cone, const TubePoint& z, const TubeIntegrand& F,
                                     const IntegralSpec& spec);

/// Integral of F split by a smooth partition into a piece near z and a piece
/// near the anchor, each integrated in its own centred frame. Operators use
/// the anchor ie, where the probe inputs live.
IntegrationResult integrate_two_centre(const ConeDescriptor& cone, const TubePoint& z, const TubePoint& anchor,
                                       const TubeIntegrand& F, const IntegralSpec& spec);

/// P_nu f(z) = int B_nu(z, w) f(w) Delta^{nu - n/r}(Im w) dv(w).
IntegrationResult bergman_project(const ConeDescriptor& cone, const TubeIntegrand& f, double nu, const TubePoint& z,
                                  const CalibratedConstant& constant, const IntegralSpec& spec);

/// Delta^alpha(Im z) int B_gamma(z, w) f(w) Delta^beta(Im w) dv(w), where
/// B_gamma = c Delta^{-gamma - n/r}((z - conj w)/i) with c = constant.value.
/// absolute replaces B_gamma by |B_gamma|.
IntegrationResult T_operator(const ConeDescriptor& cone, const TubeIntegrand& f, double alpha, double beta,
                             double gamma, const TubePoint& z, bool absolute, const CalibratedConstant& constant,
                             const IntegralSpec& spec);

/// int f(w) prod Delta^{beta_j - n/r}(Im w_j) / Delta^{beta_j + n/r}((z_j - conj w_j)/i) dv(w_j)
/// on fixed tensor nodes, so the output is exactly analytic in each z_j.
IntegrationResult product_T(const ConeDescriptor& cone, const ProductFunction& f, const std::vector<double>& betas,
                            const std::vector<TubePoint>& z, const IntegralSpec& spec);

/// Separable input f = f_1 (x) ... (x) f_m: product of single-factor operators.
IntegrationResult product_T_separable(const ConeDescriptor& cone, const std::vector<TubeIntegrand>& factors,
                                      const std::vector<double>& betas, const std::vector<TubePoint>& z,
                                      const IntegralSpec& spec);

/// Delta(Im w)^{-m 2n/r + sum y_j} int g(z) prod Delta(Im z_j)^{x_j} / Delta^{x_j + y_j}((w - conj z_j)/i) dv(z_j).
IntegrationResult R_operator(const ConeDescriptor& cone, const ProductFunction& g, const std::vector<double>& x,
                             const std::vector<double>& y, const TubePoint& w, const IntegralSpec& spec);

/// R for g = g_1 (x) ... (x) g_m; factor integrals use the two-centre split at w.
IntegrationResult R_operator_separable(const ConeDescriptor& cone, const std::vector<TubeIntegrand>& g,
                                       const std::vector<double>& x, const std::vector<double>& y,
                                       const TubePoint& w, const IntegralSpec& spec);

/// max_j |dF/dx_j + i dF/dy_j| / max_j (|dF/dx_j| + |dF/dy_j|) by central differences.
double cauchy_riemann_residual(const std::function<cdouble(const TubePoint&)>& F, const TubePoint& z, double h);

// ---------------------------------------------------------------------------
// Operator norms

enum class OperatorKind { Projection, T, TPlus };

struct OperatorSpec {
    OperatorKind kind = OperatorKind::TPlus;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 1.0;
    CalibratedConstant constant;

    static OperatorSpec projection(double nu, const CalibratedConstant& c);
    /// gamma = alpha + beta + n/r.
    static OperatorSpec theorem_a(const ConeDescriptor& cone, double alpha, double beta, bool absolute);
    /// alpha = 0, gamma = nu + m, beta = nu - n/r.
    static OperatorSpec theorem_b(const ConeDescriptor& cone, double nu, double m);
};

/// Evaluates the operator at z.
IntegrationResult apply_operator(const ConeDescriptor& cone, const OperatorSpec& op, const TubeIntegrand& f,
                                 const TubePoint& z, const IntegralSpec& spec);

struct RatioSample {
    double input_norm = 0.0;
    double output_norm = 0.0;
    Verdict output_verdict = Verdict::Undecided;
};

struct OperatorNormReport {
    double lower_bound = 0.0;
    std::vector<RatioSample> ratio_samples;
    std::vector<RatioSample> boundary_samples;
    bool blowup_flag = false;
    std::string reason;
};

struct OperatorNormOptions {
    /// Pointwise operator evaluation; a single cutoff keeps the output smooth in z.
    IntegralSpec inner;
    /// Norm quadrature for input and output.
    IntegralSpec outer;
    /// Ratio growth along the boundary family that counts as blowup.
    double growth_factor = 2.0;
    OperatorNormOptions();
};

/// Lower-bound protocol: the largest output/input ratio over the corpus.
/// `boundary` is a family ordered toward the edge of its input space; the
/// flag is raised when the operator integral diverges, when an output norm
/// diverges, or when the ratios grow monotonically by growth_factor along it.
OperatorNormReport estimate_operator_norm(const ConeDescriptor& cone, const OperatorSpec& op,
                                          const MixedNormParams& in, const MixedNormParams& out,
                                          const std::vector<TubeIntegrand>& corpus,
                                          const std::vector<TubeIntegrand>& boundary,
                                          const OperatorNormOptions& options = {});

/// Delta^t(Im w) |f(w)|: the family used for boundary refinement.
TubeIntegrand boundary_profile(const ConeDescriptor& cone, const TubeIntegrand& f, double t);

// ---------------------------------------------------------------------------
// Weighted R inequality

struct Theorem2Params {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> s;
};

/// s_j > -1 and m s_j + 1 > m(2n/r - y_j) - (m - 1) 2n/r; x_j > -1 and x_j + y_j > 0.
bool theorem2_conditions(const ConeDescriptor& cone, const Theorem2Params& params);

struct Theorem2Sample {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

struct Theorem2Report {
    bool conditions_hold = false;
    std::vector<Theorem2Sample> samples;
    /// Max ratio over the corpus, and the same over each dilated corpus.
    double fitted_constant = 0.0;
    std::vector<double> dilations;
    std::vector<double> dilated_constants;
    /// Largest relative deviation of a dilated constant from fitted_constant.
    double stability = 0.0;
    bool holds = false;
};

/// int |R g(w)| Delta(Im w)^{(m-1) 2n/r + sum s_j} dv(w) <= C prod int g_j Delta^{s_j} dv
/// for separable non-negative g. The exponent bound s_j < p in the statement
/// names an unbound p; it is not enforced.
Theorem2Report theorem2_check(const ConeDescriptor& cone, const Theorem2Params& params,
                              const std::vector<std::vector<TubeIntegrand>>& corpus, const std::vector<double>& dilations,
                              double tolerance, const IntegralSpec& inner, const IntegralSpec& outer);

// ---------------------------------------------------------------------------
// Product decomposition

struct DecompositionParams {
    int m = 2;
    double beta = 4.0;
    /// Weight exponents for A^1 with measure Delta^alpha dv.
    std::vector<double> alphas;
    /// Base point of the common kernel-power probes.
    TubePoint base;
    std::vector<double> dilations{1, 2, 4, 8};
    std::uint64_t seed = 7;
    double hypothesis_tolerance = 1e-3;
};

struct DecompositionReport {
    /// Exponent of each probe: (beta + 2n/r)/m.
    double probe_exponent = 0.0;
    /// alpha from the homogeneity relation alpha = sum alpha_j + (m - 1) 2n/r.
    double alpha = 0.0;
    std::string relation;
    double hypothesis_residual = 0.0;
    double lhs_norm = 0.0;
    double rhs_norm = 0.0;
    double ratio = 0.0;
    std::vector<double> dilated_ratios;
    /// max |ratio(lambda)/ratio(1) - 1|.
    double dilation_spread = 0.0;
    Verdict lhs_verdict = Verdict::Undecided;
    Verdict rhs_verdict = Verdict::Undecided;
};

/// Throws HypothesisFailed when the representation residual exceeds tolerance.
DecompositionReport decomposition_check(const ConeDescriptor& cone, const DecompositionParams& params,
                                        const CalibratedConstant& constant, const IntegralSpec& spec);

} // namespace bergman
