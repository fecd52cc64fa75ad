#include "bergman/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <random>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

namespace {

// Affine automorphism w' -> Re z + P((Im z)^{1/2}) w' of the tube.
struct Frame {
    RealVector x;
    bool scalar = false;
    double s = 1.0;
    Eigen::MatrixXd P;
    double jacobian = 1.0;

    TubePoint map(const TubePoint& w) const
    {
        if (scalar) return TubePoint{x + s * w.x, s * w.y};
        RealVector u = x + RealVector(P * w.x.matrix());
        RealVector v = P * w.y.matrix();
        return TubePoint{u, v};
    }
};

Frame frame_at(const ConeDescriptor& cone, const TubePoint& z)
{
    Frame f;
    f.x = z.x;
    if (cone.kind() == ConeKind::HalfLine) {
        f.scalar = true;
        f.s = z.y(0);
        f.jacobian = f.s * f.s;
        return f;
    }
    f.P = quadratic_representation(cone, jordan_power(cone, z.y, 0.5));
    const double d = std::abs(f.P.determinant());
    f.jacobian = d * d;
    return f;
}

double delta_real(const ConeDescriptor& cone, const RealVector& y) { return determinant(cone, y); }

cdouble kernel_power(const ConeDescriptor& cone, const TubePoint& z, const TubePoint& w, double exponent)
{
    return delta_power(cone, kernel_argument(z, w), cdouble(-exponent));
}

double squared_distance(const TubePoint& a, const TubePoint& b)
{
    return (a.x - b.x).squaredNorm() + (a.y - b.y).squaredNorm();
}

// Splits F by the partition |w - a|^4/(|w - z|^4 + |w - a|^4) so each piece is
// integrated in the frame of its own centre: z for the kernel peak, a for the
// input. Euclidean distance matches the resolution of the tensor rules, which
// grows with distance from the frame centre.
TubeIntegrand partition_piece(const ConeDescriptor& cone, const TubePoint& z, const TubePoint& a,
                              const TubeIntegrand& F, bool near_z)
{
    (void)cone;
    return [z, a, &F, near_z](const TubePoint& w) {
        const double dz = squared_distance(w, z), da = squared_distance(w, a);
        const double wz = da * da, wa = dz * dz;
        const double sum = wz + wa;
        if (!(sum > 0.0)) return near_z ? F(w) : cdouble(0.0);
        return F(w) * ((near_z ? wz : wa) / sum);
    };
}

// Power of two by which a frame's cutoff must grow so that the frame reaches
// the other centre.
double reach_factor(const ConeDescriptor& cone, const TubePoint& centre, const TubePoint& other, double R)
{
    const double scale = std::pow(determinant(cone, centre.y), 1.0 / cone.rank());
    const double need = 2.0 * std::sqrt(squared_distance(centre, other)) / (R * scale);
    return need <= 1.0 ? 1.0 : std::exp2(std::ceil(std::log2(need)));
}

IntegralSpec widened(const IntegralSpec& spec, double factor)
{
    IntegralSpec s = spec;
    s.cutoff *= factor;
    for (double& r : s.ladder) r *= factor;
    if (s.base_cutoff > 0.0) s.base_cutoff *= factor;
    return s;
}

// Fixed tensor rules evaluated in the frames of z and of the anchor; no error estimate.
class CenteredRule {
public:
    CenteredRule(const ConeDescriptor& cone, const IntegralSpec& spec, const TubePoint& anchor)
        : cone_(cone), spec_(spec), anchor_(anchor), afr_(frame_at(cone, anchor))
    {
    }

    cdouble operator()(const TubePoint& z, const TubeIntegrand& F) const
    {
        const Frame fr = frame_at(cone_, z);
        const TubeNodes& nz = nodes(reach_factor(cone_, z, anchor_, spec_.cutoff));
        const TubeNodes& na = nodes(reach_factor(cone_, anchor_, z, spec_.cutoff));
        const TubeIntegrand Fz = partition_piece(cone_, z, anchor_, F, true);
        const TubeIntegrand Fa = partition_piece(cone_, z, anchor_, F, false);
        cdouble s = 0.0, t = 0.0;
        for (std::size_t k = 0; k < nz.size(); ++k) s += nz.weights[k] * Fz(fr.map(nz.points[k]));
        for (std::size_t k = 0; k < na.size(); ++k) t += na.weights[k] * Fa(afr_.map(na.points[k]));
        return s * fr.jacobian + t * afr_.jacobian;
    }

private:
    const TubeNodes& nodes(double factor) const
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(factor);
        if (it == cache_.end()) {
            const IntegralSpec s = widened(spec_, factor);
            it = cache_.emplace(factor, std::make_unique<TubeNodes>(tube_nodes(cone_, s.cutoff, s.density, s, 0.0))).first;
        }
        return *it->second;
    }

    ConeDescriptor cone_;
    IntegralSpec spec_;
    TubePoint anchor_;
    Frame afr_;
    mutable std::mutex mutex_;
    mutable std::map<double, std::unique_ptr<TubeNodes>> cache_;
};

TubeIntegrand dilate(const TubeIntegrand& f, double lambda)
{
    return [f, lambda](const TubePoint& z) { return f(z.scaled(lambda)); };
}

} // namespace

IntegrationResult integrate_centered(const ConeDescriptor& cone, const TubePoint& z, const TubeIntegrand& F,
                                     const IntegralSpec& spec)
{
    const Frame fr = frame_at(cone, z);
    IntegralSpec s = spec;
    s.weight_exponent = 0.0;
    IntegrationResult r = integrate_tube(cone, [&](const TubePoint& w) { return F(fr.map(w)); }, s);
    r.value *= fr.jacobian;
    r.error_estimate *= fr.jacobian;
    for (double& v : r.ladder_values) v *= fr.jacobian;
    return r;
}

IntegrationResult integrate_two_centre(const ConeDescriptor& cone, const TubePoint& z, const TubePoint& anchor,
                                       const TubeIntegrand& F, const IntegralSpec& spec)
{
    IntegrationResult a = integrate_centered(cone, z, partition_piece(cone, z, anchor, F, true),
                                             widened(spec, reach_factor(cone, z, anchor, spec.cutoff)));
    const IntegrationResult b = integrate_centered(cone, anchor, partition_piece(cone, z, anchor, F, false),
                                                   widened(spec, reach_factor(cone, anchor, z, spec.cutoff)));
    a.value += b.value;
    a.error_estimate += b.error_estimate;
    a.evaluations += b.evaluations;
    a.converged = a.converged && b.converged;
    if (b.verdict == Verdict::Diverged || (b.verdict == Verdict::Undecided && a.verdict == Verdict::Converged)) {
        a.verdict = b.verdict;
    }
    const std::size_t k = std::min(a.ladder_values.size(), b.ladder_values.size());
    a.ladder_values.resize(k);
    for (std::size_t i = 0; i < k; ++i) a.ladder_values[i] += b.ladder_values[i];
    return a;
}

IntegrationResult T_operator(const ConeDescriptor& cone, const TubeIntegrand& f, double alpha, double beta,
                             double gamma, const TubePoint& z, bool absolute, const CalibratedConstant& constant,
                             const IntegralSpec& spec)
{
    const double e = gamma + cone.n_over_r();
    if (!(e > 0.0)) throw DomainError("T operator needs gamma + n/r > 0");
    const TubeIntegrand F = [&](const TubePoint& w) {
        cdouble k = kernel_power(cone, z, w, e);
        if (absolute) k = std::abs(k);
        return k * f(w) * std::pow(delta_real(cone, w.y), beta);
    };
    IntegrationResult r = integrate_two_centre(cone, z, tube_base_point(cone), F, spec);
    const double scale = constant.value * std::pow(delta_of(cone, z), alpha);
    r.value *= scale;
    r.error_estimate *= std::abs(scale);
    for (double& v : r.ladder_values) v *= std::abs(scale);
    return r;
}

IntegrationResult bergman_project(const ConeDescriptor& cone, const TubeIntegrand& f, double nu, const TubePoint& z,
                                  const CalibratedConstant& constant, const IntegralSpec& spec)
{
    if (!(nu > cone.n_over_r() - 1.0)) throw DomainError("projection needs nu > n/r - 1");
    return T_operator(cone, f, 0.0, nu - cone.n_over_r(), nu, z, false, constant, spec);
}

IntegrationResult product_T(const ConeDescriptor& cone, const ProductFunction& f, const std::vector<double>& betas,
                            const std::vector<TubePoint>& z, const IntegralSpec& spec)
{
    const std::size_t m = betas.size();
    if (m == 0 || z.size() != m) throw DomainError("product T needs one beta per factor");
    std::vector<double> weights(m);
    for (std::size_t j = 0; j < m; ++j) weights[j] = betas[j] - cone.n_over_r();
    const double nr = cone.n_over_r();
    return integrate_product_tube(
        cone, int(m),
        [&](const std::vector<TubePoint>& w) {
            cdouble k = f(w);
            for (std::size_t j = 0; j < m; ++j) k *= kernel_power(cone, z[j], w[j], betas[j] + nr);
            return k;
        },
        weights, spec);
}

IntegrationResult product_T_separable(const ConeDescriptor& cone, const std::vector<TubeIntegrand>& factors,
                                      const std::vector<double>& betas, const std::vector<TubePoint>& z,
                                      const IntegralSpec& spec)
{
    const std::size_t m = betas.size();
    if (m == 0 || z.size() != m || factors.size() != m) throw DomainError("product T needs one beta per factor");
    IntegrationResult out;
    out.value = 1.0;
    out.converged = true;
    out.verdict = Verdict::Converged;
    double rel = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        IntegralSpec s = spec;
        s.weight_exponent = betas[j] - cone.n_over_r();
        const IntegrationResult r = integrate_tube(
            cone, [&](const TubePoint& w) { return factors[j](w) * kernel_power(cone, z[j], w, betas[j] + cone.n_over_r()); },
            s);
        out.value *= r.value;
        rel += r.error_estimate / std::max(std::abs(r.value), 1e-300);
        out.evaluations += r.evaluations;
        out.converged = out.converged && r.converged;
        if (r.verdict == Verdict::Diverged) out.verdict = Verdict::Diverged;
        else if (r.verdict == Verdict::Undecided && out.verdict != Verdict::Diverged) out.verdict = Verdict::Undecided;
    }
    out.error_estimate = rel * std::abs(out.value);
    return out;
}

namespace {

void check_R(const ConeDescriptor& cone, const std::vector<double>& x, const std::vector<double>& y, std::size_t m)
{
    (void)cone;
    if (m == 0 || x.size() != m || y.size() != m) throw DomainError("R operator needs x and y per factor");
    for (std::size_t j = 0; j < m; ++j) {
        if (!(x[j] > -1.0)) throw DomainError("R operator needs x_j > -1");
        if (!(x[j] + y[j] > 0.0)) throw DomainError("R operator needs x_j + y_j > 0");
    }
}

double R_prefactor_exponent(const ConeDescriptor& cone, const std::vector<double>& y)
{
    double s = -double(y.size()) * 2.0 * cone.n_over_r();
    for (double v : y) s += v;
    return s;
}

} // namespace

IntegrationResult R_operator(const ConeDescriptor& cone, const ProductFunction& g, const std::vector<double>& x,
                             const std::vector<double>& y, const TubePoint& w, const IntegralSpec& spec)
{
    const std::size_t m = x.size();
    check_R(cone, x, y, m);
    IntegrationResult r = integrate_product_tube(
        cone, int(m),
        [&](const std::vector<TubePoint>& z) {
            cdouble k = g(z);
            for (std::size_t j = 0; j < m; ++j) k *= kernel_power(cone, w, z[j], x[j] + y[j]);
            return k;
        },
        x, spec);
    const double pre = std::pow(delta_of(cone, w), R_prefactor_exponent(cone, y));
    r.value *= pre;
    r.error_estimate *= pre;
    for (double& v : r.ladder_values) v *= pre;
    return r;
}

IntegrationResult R_operator_separable(const ConeDescriptor& cone, const std::vector<TubeIntegrand>& g,
                                       const std::vector<double>& x, const std::vector<double>& y,
                                       const TubePoint& w, const IntegralSpec& spec)
{
    const std::size_t m = x.size();
    check_R(cone, x, y, m);
    if (g.size() != m) throw DomainError("R operator needs one factor per exponent");
    IntegrationResult out;
    out.value = std::pow(delta_of(cone, w), R_prefactor_exponent(cone, y));
    out.converged = true;
    out.verdict = Verdict::Converged;
    double rel = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const IntegrationResult r = integrate_two_centre(
            cone, w, tube_base_point(cone),
            [&](const TubePoint& z) {
                return g[j](z) * std::pow(delta_real(cone, z.y), x[j]) * kernel_power(cone, w, z, x[j] + y[j]);
            },
            spec);
        out.value *= r.value;
        rel += r.error_estimate / std::max(std::abs(r.value), 1e-300);
        out.evaluations += r.evaluations;
        out.converged = out.converged && r.converged;
        if (r.verdict == Verdict::Diverged) out.verdict = Verdict::Diverged;
        else if (r.verdict == Verdict::Undecided && out.verdict != Verdict::Diverged) out.verdict = Verdict::Undecided;
    }
    out.error_estimate = rel * std::abs(out.value);
    return out;
}

double cauchy_riemann_residual(const std::function<cdouble(const TubePoint&)>& F, const TubePoint& z, double h)
{
    double num = 0.0, den = 0.0;
    for (int j = 0; j < z.x.size(); ++j) {
        TubePoint a = z, b = z, c = z, d = z;
        a.x(j) += h;
        b.x(j) -= h;
        c.y(j) += h;
        d.y(j) -= h;
        const cdouble dx = (F(a) - F(b)) / (2.0 * h);
        const cdouble dy = (F(c) - F(d)) / (2.0 * h);
        num = std::max(num, std::abs(dx + cdouble(0.0, 1.0) * dy));
        den = std::max(den, std::abs(dx) + std::abs(dy));
    }
    return den > 0.0 ? num / den : 0.0;
}

// ---------------------------------------------------------------------------
// Operator norms

OperatorSpec OperatorSpec::projection(double nu, const CalibratedConstant& c)
{
    OperatorSpec op;
    op.kind = OperatorKind::Projection;
    op.gamma = nu;
    op.constant = c;
    return op;
}

OperatorSpec OperatorSpec::theorem_a(const ConeDescriptor& cone, double alpha, double beta, bool absolute)
{
    OperatorSpec op;
    op.kind = absolute ? OperatorKind::TPlus : OperatorKind::T;
    op.alpha = alpha;
    op.beta = beta;
    op.gamma = alpha + beta + cone.n_over_r();
    op.constant = unit_constant(op.gamma);
    return op;
}

OperatorSpec OperatorSpec::theorem_b(const ConeDescriptor& cone, double nu, double m)
{
    OperatorSpec op;
    op.kind = OperatorKind::T;
    op.alpha = 0.0;
    op.beta = nu - cone.n_over_r();
    op.gamma = nu + m;
    op.constant = unit_constant(op.gamma);
    return op;
}

namespace {

double op_beta(const ConeDescriptor& cone, const OperatorSpec& op)
{
    return op.kind == OperatorKind::Projection ? op.gamma - cone.n_over_r() : op.beta;
}

double op_alpha(const OperatorSpec& op) { return op.kind == OperatorKind::Projection ? 0.0 : op.alpha; }

TubeIntegrand op_integrand(const ConeDescriptor& cone, const OperatorSpec& op, const TubeIntegrand& f,
                           const TubePoint& z)
{
    const double e = op.gamma + cone.n_over_r();
    const double beta = op_beta(cone, op);
    const bool absolute = op.kind == OperatorKind::TPlus;
    return [&cone, f, z, e, beta, absolute](const TubePoint& w) {
        cdouble k = kernel_power(cone, z, w, e);
        if (absolute) k = std::abs(k);
        return k * f(w) * std::pow(delta_real(cone, w.y), beta);
    };
}

} // namespace

IntegrationResult apply_operator(const ConeDescriptor& cone, const OperatorSpec& op, const TubeIntegrand& f,
                                 const TubePoint& z, const IntegralSpec& spec)
{
    if (op.kind == OperatorKind::Projection) return bergman_project(cone, f, op.gamma, z, op.constant, spec);
    return T_operator(cone, f, op.alpha, op.beta, op.gamma, z, op.kind == OperatorKind::TPlus, op.constant, spec);
}

TubeIntegrand boundary_profile(const ConeDescriptor& cone, const TubeIntegrand& f, double t)
{
    return [cone, f, t](const TubePoint& z) { return cdouble(std::pow(determinant(cone, z.y), t) * std::abs(f(z))); };
}

OperatorNormOptions::OperatorNormOptions()
{
    inner.cutoff = 1024;
    inner.ladder = {64, 128, 256, 512, 1024};
    inner.density = 4;
    outer.cutoff = 64;
    outer.ladder = {8, 16, 32, 64};
    outer.density = 4;
}

OperatorNormReport estimate_operator_norm(const ConeDescriptor& cone, const OperatorSpec& op,
                                          const MixedNormParams& in, const MixedNormParams& out,
                                          const std::vector<TubeIntegrand>& corpus,
                                          const std::vector<TubeIntegrand>& boundary,
                                          const OperatorNormOptions& options)
{
    OperatorNormReport report;
    if (op.gamma + cone.n_over_r() <= 0.0) throw DomainError("operator needs gamma + n/r > 0");
    const TubePoint base = tube_base_point(cone);
    IntegralSpec single = options.inner;
    single.ladder.clear();
    const CenteredRule rule(cone, single, tube_base_point(cone));
    const double scale = op.constant.value;
    const double alpha = op_alpha(op);

    auto sample = [&](const TubeIntegrand& f) {
        RatioSample s;
        // The defining integral at the base point, along the inner ladder.
        const IntegrationResult at_base = integrate_centered(cone, base, op_integrand(cone, op, f, base), options.inner);
        if (at_base.verdict == Verdict::Diverged) {
            s.output_verdict = Verdict::Diverged;
            s.output_norm = std::numeric_limits<double>::infinity();
            return s;
        }
        const NormResult ni = mixed_norm(cone, f, in, options.outer);
        s.input_norm = ni.value;
        const TubeIntegrand Tf = [&](const TubePoint& z) {
            return scale * std::pow(delta_of(cone, z), alpha) * rule(z, op_integrand(cone, op, f, z));
        };
        const NormResult no = mixed_norm(cone, Tf, out, options.outer);
        s.output_norm = no.value;
        s.output_verdict = no.verdict;
        return s;
    };

    auto ratio = [](const RatioSample& s) { return s.input_norm > 0.0 ? s.output_norm / s.input_norm : 0.0; };
    for (const auto& f : corpus) {
        const RatioSample s = sample(f);
        report.ratio_samples.push_back(s);
        if (s.output_verdict == Verdict::Diverged && report.reason.empty()) {
            report.blowup_flag = true;
            report.reason = std::isinf(s.output_norm) ? "operator integral diverges" : "output norm diverges";
        }
        if (std::isfinite(s.output_norm)) report.lower_bound = std::max(report.lower_bound, ratio(s));
    }
    for (const auto& f : boundary) {
        const RatioSample s = sample(f);
        report.boundary_samples.push_back(s);
        if (s.output_verdict == Verdict::Diverged && report.reason.empty()) {
            report.blowup_flag = true;
            report.reason = std::isinf(s.output_norm) ? "operator integral diverges" : "output norm diverges";
        }
        if (std::isfinite(s.output_norm)) report.lower_bound = std::max(report.lower_bound, ratio(s));
    }
    if (report.boundary_samples.size() >= 2 && !report.blowup_flag) {
        bool monotone = true;
        for (std::size_t k = 1; k < report.boundary_samples.size(); ++k) {
            monotone = monotone && ratio(report.boundary_samples[k]) > ratio(report.boundary_samples[k - 1]);
        }
        const double first = ratio(report.boundary_samples.front());
        const double last = ratio(report.boundary_samples.back());
        if (monotone && first > 0.0 && last >= options.growth_factor * first) {
            report.blowup_flag = true;
            report.reason = "ratio grows toward the boundary";
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Weighted R inequality

bool theorem2_conditions(const ConeDescriptor& cone, const Theorem2Params& params)
{
    const std::size_t m = params.x.size();
    if (m == 0 || params.y.size() != m || params.s.size() != m) return false;
    const double k = 2.0 * cone.n_over_r();
    for (std::size_t j = 0; j < m; ++j) {
        if (!(params.x[j] > -1.0) || !(params.x[j] + params.y[j] > 0.0)) return false;
        if (!(params.s[j] > -1.0)) return false;
        if (!(double(m) * params.s[j] + 1.0 > double(m) * (k - params.y[j]) - double(m - 1) * k)) return false;
    }
    return true;
}

Theorem2Report theorem2_check(const ConeDescriptor& cone, const Theorem2Params& params,
                              const std::vector<std::vector<TubeIntegrand>>& corpus, const std::vector<double>& dilations,
                              double tolerance, const IntegralSpec& inner, const IntegralSpec& outer)
{
    Theorem2Report report;
    report.conditions_hold = theorem2_conditions(cone, params);
    if (!report.conditions_hold) return report;
    const std::size_t m = params.x.size();
    IntegralSpec single = inner;
    single.ladder.clear();
    const CenteredRule rule(cone, single, tube_base_point(cone));
    const double pre = R_prefactor_exponent(cone, params.y);
    double sum_s = 0.0;
    for (double s : params.s) sum_s += s;

    auto constant_for = [&](double lambda, bool keep) {
        double best = 0.0;
        for (const auto& probe : corpus) {
            if (probe.size() != m) throw DomainError("theorem 2 probes need one factor per exponent");
            std::vector<TubeIntegrand> g;
            for (const auto& f : probe) g.push_back(dilate(f, lambda));
            const TubeIntegrand Rg = [&](const TubePoint& w) {
                cdouble v = std::pow(delta_of(cone, w), pre);
                for (std::size_t j = 0; j < m; ++j) {
                    const double xj = params.x[j], ej = params.x[j] + params.y[j];
                    v *= rule(w, [&](const TubePoint& z) {
                        return g[j](z) * std::pow(delta_real(cone, z.y), xj) * kernel_power(cone, w, z, ej);
                    });
                }
                return cdouble(std::abs(v));
            };
            IntegralSpec so = outer;
            so.weight_exponent = double(m - 1) * 2.0 * cone.n_over_r() + sum_s;
            const double lhs = integrate_tube(cone, Rg, so).real();
            double rhs = 1.0;
            for (std::size_t j = 0; j < m; ++j) {
                IntegralSpec sj = outer;
                sj.weight_exponent = params.s[j];
                rhs *= integrate_tube(cone, [&](const TubePoint& z) { return cdouble(std::abs(g[j](z))); }, sj).real();
            }
            Theorem2Sample s{lhs, rhs, rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity()};
            if (keep) report.samples.push_back(s);
            best = std::max(best, s.ratio);
        }
        return best;
    };

    report.fitted_constant = constant_for(1.0, true);
    report.dilations = dilations;
    for (double lambda : dilations) {
        const double c = lambda == 1.0 ? report.fitted_constant : constant_for(lambda, false);
        report.dilated_constants.push_back(c);
        report.stability = std::max(report.stability, std::abs(c / report.fitted_constant - 1.0));
    }
    report.holds = std::isfinite(report.fitted_constant) && report.fitted_constant > 0.0 &&
                   report.stability <= tolerance;
    return report;
}

// ---------------------------------------------------------------------------
// Product decomposition

DecompositionReport decomposition_check(const ConeDescriptor& cone, const DecompositionParams& params,
                                        const CalibratedConstant& constant, const IntegralSpec& spec)
{
    const int m = params.m;
    if (m < 1 || params.alphas.size() != std::size_t(m)) throw DomainError("decomposition needs one alpha per factor");
    for (double a : params.alphas) {
        if (!(a > -1.0)) throw DomainError("decomposition needs alpha_j > -1");
    }
    const double nr = cone.n_over_r();
    if (std::abs(constant.nu - (params.beta + nr)) > 1e-9) {
        throw DomainError("decomposition constant must belong to nu = beta + n/r");
    }
    DecompositionReport report;
    const double a = (params.beta + 2.0 * nr) / m;
    report.probe_exponent = a;
    double sum = 0.0;
    for (double v : params.alphas) sum += v;
    report.alpha = sum + double(m - 1) * 2.0 * nr;
    report.relation = "alpha = sum alpha_j + (m - 1) 2n/r";

    const TubePoint base = params.base.x.size() == 0 ? tube_base_point(cone) : params.base;
    const TubeIntegrand f = [&cone, base, a](const TubePoint& z) { return kernel_power(cone, z, base, a); };

    // Representation residual at random tuples omega.
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<TubePoint> omega;
        for (int j = 0; j < m; ++j) {
            RealVector x(cone.dim()), u(cone.dim());
            for (int i = 0; i < cone.dim(); ++i) {
                x(i) = 2.0 * U(rng);
                u(i) = U(rng) / std::sqrt(double(cone.dim()));
            }
            omega.push_back(TubePoint{base.x + x, jordan_exp(cone, u)});
        }
        cdouble lhs = 1.0;
        for (const auto& w : omega) lhs *= f(w);
        IntegralSpec s = spec;
        s.weight_exponent = params.beta;
        const IntegrationResult r = integrate_tube(
            cone,
            [&](const TubePoint& z) {
                cdouble v = std::pow(f(z), double(m));
                for (const auto& w : omega) v *= kernel_power(cone, w, z, a);
                return v;
            },
            s);
        const cdouble rhs = constant.value * r.value;
        report.hypothesis_residual = std::max(report.hypothesis_residual, std::abs(lhs - rhs) / std::abs(lhs));
    }
    if (report.hypothesis_residual > params.hypothesis_tolerance) {
        throw HypothesisFailed("product representation residual " + std::to_string(report.hypothesis_residual));
    }

    auto norm = [&](const TubeIntegrand& g, double alpha, Verdict& verdict) {
        const NormResult r = mixed_norm(cone, g, MixedNormParams{1.0, 1.0, alpha, WeightConvention::Display}, spec);
        if (r.verdict == Verdict::Diverged) verdict = Verdict::Diverged;
        else if (r.verdict == Verdict::Undecided && verdict != Verdict::Diverged) verdict = Verdict::Undecided;
        return r.value;
    };
    std::vector<double> lambdas = params.dilations;
    if (lambdas.empty() || lambdas.front() != 1.0) lambdas.insert(lambdas.begin(), 1.0);
    for (double lambda : lambdas) {
        const TubeIntegrand fl = dilate(f, lambda);
        Verdict lv = Verdict::Converged, rv = Verdict::Converged;
        const double lhs = norm([&](const TubePoint& z) { return std::pow(fl(z), double(m)); }, report.alpha, lv);
        double rhs = 1.0;
        for (double aj : params.alphas) rhs *= norm(fl, aj, rv);
        const double ratio = lhs / rhs;
        if (lambda == 1.0 && report.dilated_ratios.empty()) {
            report.lhs_norm = lhs;
            report.rhs_norm = rhs;
            report.ratio = ratio;
            report.lhs_verdict = lv;
            report.rhs_verdict = rv;
        }
        report.dilated_ratios.push_back(ratio);
        report.dilation_spread = std::max(report.dilation_spread, std::abs(ratio / report.ratio - 1.0));
    }
    return report;
}

} // namespace bergman
