#include "bergman/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

// ---------------------------------------------------------------------------
// Probes

cdouble ProbeFunction::operator()(const TubePoint& z) const { return probe_eval(*this, z); }

TubeIntegrand ProbeFunction::integrand() const
{
    return [f = *this](const TubePoint& z) { return probe_eval(f, z); };
}

ProbeFunction single_probe(const ConeDescriptor& cone, double gamma, const TubePoint& base, cdouble coefficient)
{
    if (!(gamma > 0.0)) throw DomainError("probe exponent must be positive");
    if (!contains(cone, base.y)) throw DomainError("probe base point must lie in the tube");
    ProbeFunction f;
    f.cone = cone;
    f.terms.push_back(ProbeTerm{coefficient, gamma, base});
    return f;
}

cdouble probe_eval(const ProbeFunction& f, const TubePoint& z)
{
    cdouble s = 0.0;
    for (const auto& t : f.terms) {
        s += t.coefficient * delta_power(f.cone, kernel_argument(z, t.base), cdouble(-t.gamma));
    }
    return s;
}

ProbeFunction combine(const ProbeFunction& f, cdouble a, const ProbeFunction& g, cdouble b)
{
    if (!(f.cone == g.cone)) throw DomainError("probes live on different cones");
    ProbeFunction h;
    h.cone = f.cone;
    for (auto t : f.terms) {
        t.coefficient *= a;
        h.terms.push_back(t);
    }
    for (auto t : g.terms) {
        t.coefficient *= b;
        h.terms.push_back(t);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Norms

std::string to_string(WeightConvention c)
{
    return c == WeightConvention::Display ? "display" : "measure";
}

double weight_exponent(const ConeDescriptor& cone, double nu, WeightConvention convention)
{
    return convention == WeightConvention::Display ? nu : nu - cone.n_over_r();
}

namespace {

double base_radius(const IntegralSpec& spec) { return spec.base_cutoff > 0.0 ? spec.base_cutoff : spec.cutoff; }

NormResult root_of(const IntegrationResult& r, double q, WeightConvention convention)
{
    NormResult out;
    const double v = std::max(r.real(), 0.0);
    out.value = std::pow(v, 1.0 / q);
    out.error_estimate = v > 0.0 ? out.value * r.error_estimate / (q * v) : 0.0;
    out.verdict = r.verdict;
    out.converged = r.converged;
    out.evaluations = r.evaluations;
    out.convention = convention;
    return out;
}

// Supremum variants evaluated on the nodes at spec.cutoff.
NormResult mixed_norm_sup(const ConeDescriptor& cone, const TubeIntegrand& f, const MixedNormParams& params,
                          const IntegralSpec& spec)
{
    const double w = weight_exponent(cone, params.nu, params.convention);
    const NodeSet ys = cone_nodes(cone, spec.cutoff, spec.density, spec);
    const NodeSet xs = base_nodes(cone.dim(), base_radius(spec), spec.density, spec);
    const bool p_inf = std::isinf(params.p), q_inf = std::isinf(params.q);
    std::vector<double> slice(ys.size());
    parallel_for(ys.size(), [&](std::size_t i) {
        TubePoint z{RealVector(cone.dim()), ys.points[i]};
        double s = 0.0;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            z.x = xs.points[j];
            const double a = std::abs(f(z));
            s = p_inf ? std::max(s, a) : s + xs.weights[j] * std::pow(a, params.p);
        }
        slice[i] = p_inf ? s : std::pow(s, 1.0 / params.p);
    });
    NormResult out;
    out.convention = params.convention;
    out.evaluations = static_cast<long long>(ys.size() * xs.size());
    out.verdict = Verdict::Undecided;
    out.converged = true;
    if (q_inf) {
        for (double s : slice) out.value = std::max(out.value, s);
    } else {
        double total = 0.0;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            total += ys.weights[i] * std::pow(determinant(cone, ys.points[i]), w) * std::pow(slice[i], params.q);
        }
        out.value = std::pow(total, 1.0 / params.q);
    }
    return out;
}

} // namespace

NormResult mixed_norm(const ConeDescriptor& cone, const TubeIntegrand& f, const MixedNormParams& params,
                      const IntegralSpec& spec)
{
    if (!(params.p >= 1.0) || !(params.q >= 1.0)) throw DomainError("mixed norm needs p, q >= 1");
    if (std::isinf(params.p) || std::isinf(params.q)) return mixed_norm_sup(cone, f, params, spec);
    IntegralSpec s = spec;
    s.weight_exponent = weight_exponent(cone, params.nu, params.convention);
    const double p = params.p, ratio = params.q / params.p;
    const IntegrationResult r = integrate_tube_iterated(
        cone, [&](const TubePoint& z) { return cdouble(std::pow(std::abs(f(z)), p)); },
        [ratio](cdouble inner, const RealVector&) { return cdouble(std::pow(std::max(inner.real(), 0.0), ratio)); }, s);
    return root_of(r, params.q, params.convention);
}

IntegrationResult pairing(const ConeDescriptor& cone, const TubeIntegrand& f, const TubeIntegrand& g, double nu,
                          const IntegralSpec& spec)
{
    IntegralSpec s = spec;
    s.weight_exponent = nu - cone.n_over_r();
    if (!(s.weight_exponent > -1.0)) throw DomainError("pairing needs nu > n/r - 1");
    return integrate_tube(cone, [&](const TubePoint& z) { return f(z) * std::conj(g(z)); }, s);
}

// ---------------------------------------------------------------------------
// Supremum search

namespace {

// Unit-determinant shapes: e plus normalised coarse cone nodes.
std::vector<RealVector> search_shapes(const ConeDescriptor& cone, const IntegralSpec& spec)
{
    std::vector<RealVector> shapes{identity(cone)};
    if (cone.dim() == 1) return shapes;
    IntegralSpec coarse = spec;
    coarse.angular = 4;
    const NodeSet nodes = cone_nodes(cone, std::exp(1.0), 1, coarse);
    const std::size_t step = std::max<std::size_t>(1, nodes.size() / 24);
    for (std::size_t i = 0; i < nodes.size(); i += step) {
        const RealVector& y = nodes.points[i];
        shapes.push_back(y / std::pow(determinant(cone, y), 1.0 / cone.rank()));
    }
    return shapes;
}

struct SearchPoint {
    TubePoint z;
    double value;
};

class SupSearch {
public:
    SupSearch(const ConeDescriptor& cone, const TubeIntegrand& f, double tau, double R)
        : cone_(cone), f_(f), tau_(tau), R_(R)
    {
    }

    double objective(const TubePoint& z) const
    {
        if (!contains(cone_, z.y)) return -1.0;
        const double d = determinant(cone_, z.y);
        const double lo = std::pow(R_, -cone_.rank()), hi = std::pow(R_, cone_.rank());
        if (d < lo || d > hi || z.x.cwiseAbs().maxCoeff() > R_) return -1.0;
        const double a = std::abs(f_(z));
        if (a == 0.0) return 0.0;
        return std::exp(std::log(a) + tau_ * std::log(d));
    }

    // Compass search in x and in y through y -> P(y^{1/2}) exp(h e_i).
    SearchPoint refine(SearchPoint best, int rounds) const
    {
        const int n = cone_.dim();
        double hx = 0.5, hy = 0.5;
        for (int round = 0; round < rounds; ++round) {
            for (int sweep = 0; sweep < 20; ++sweep) {
                bool moved = false;
                const double scale = std::pow(determinant(cone_, best.z.y), 1.0 / cone_.rank());
                for (int i = 0; i < n; ++i) {
                    for (double sgn : {-1.0, 1.0}) {
                        TubePoint c = best.z;
                        c.x(i) += sgn * hx * scale;
                        const double v = objective(c);
                        if (v > best.value) {
                            best = {c, v};
                            moved = true;
                        }
                    }
                }
                const Eigen::MatrixXd P = quadratic_representation(cone_, jordan_power(cone_, best.z.y, 0.5));
                for (int i = 0; i < n; ++i) {
                    for (double sgn : {-1.0, 1.0}) {
                        RealVector u = RealVector::Zero(n);
                        u(i) = sgn * hy;
                        TubePoint c = best.z;
                        c.y = P * Eigen::VectorXd(jordan_exp(cone_, u));
                        const double v = objective(c);
                        if (v > best.value) {
                            best = {c, v};
                            moved = true;
                        }
                    }
                }
                if (!moved) break;
            }
            hx *= 0.25;
            hy *= 0.25;
        }
        return best;
    }

private:
    ConeDescriptor cone_;
    const TubeIntegrand& f_;
    double tau_;
    double R_;
};

} // namespace

SupNormReport sup_norm(const ConeDescriptor& cone, const TubeIntegrand& f, double tau, const IntegralSpec& spec,
                       const SupNormOptions& options)
{
    if (!(tau >= 0.0)) throw DomainError("sup norm needs tau >= 0");
    const int n = cone.dim();
    const std::vector<double> radii = spec.ladder.empty() ? std::vector<double>{spec.cutoff} : spec.ladder;
    const std::vector<RealVector> shapes = search_shapes(cone, spec);
    const std::vector<double> offsets{0.5, 1.0, 2.0, 4.0};
    const std::size_t per_t = shapes.size() * (1 + 2 * std::size_t(n) * offsets.size());

    SupNormReport report;
    SearchPoint overall{tube_base_point(cone), -1.0};
    for (double R : radii) {
        const SupSearch search(cone, f, tau, R);
        const double logR = std::log(R);
        int t_count = std::max(2, int(std::ceil(8.0 * logR)) + 1);
        while (t_count > 2 && double(t_count) * double(per_t) > double(options.budget)) t_count = t_count * 3 / 4;

        std::vector<TubePoint> cand;
        for (int k = 0; k < t_count; ++k) {
            const double t = std::exp(-logR + 2.0 * logR * k / (t_count - 1));
            for (const auto& g : shapes) {
                const RealVector y = t * g;
                cand.push_back(TubePoint{RealVector::Zero(n), y});
                for (int i = 0; i < n; ++i) {
                    for (double c : offsets) {
                        for (double sgn : {-1.0, 1.0}) {
                            TubePoint z{RealVector::Zero(n), y};
                            z.x(i) = sgn * c * t;
                            cand.push_back(z);
                        }
                    }
                }
            }
        }
        std::vector<double> val(cand.size());
        parallel_for(cand.size(), [&](std::size_t i) { val[i] = search.objective(cand[i]); });
        std::vector<std::size_t> order(cand.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        const std::size_t starts = std::min<std::size_t>(std::size_t(options.starts), order.size());
        std::partial_sort(order.begin(), order.begin() + long(starts), order.end(),
                          [&](std::size_t a, std::size_t b) { return val[a] > val[b] || (val[a] == val[b] && a < b); });
        std::vector<SearchPoint> refined(starts);
        parallel_for(starts, [&](std::size_t s) {
            refined[s] = search.refine(SearchPoint{cand[order[s]], val[order[s]]}, options.refinement_rounds);
        });
        SearchPoint best = refined.front();
        for (const auto& r : refined) {
            if (r.value > best.value) best = r;
        }
        report.ladder_values.push_back(best.value);
        if (best.value >= overall.value) overall = best;
    }
    report.value = report.ladder_values.back();
    report.argmax = overall.z;
    if (report.ladder_values.size() >= 4) {
        const LadderAnalysis a = divergence_probe(report.ladder_values, radii, spec.tolerance);
        report.verdict = a.verdict;
        if (a.verdict == Verdict::Converged) report.gap = std::max(0.0, a.extrapolated - report.value);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Product and Herz norms

NormResult product_norm(const ConeDescriptor& cone, const ProductFunction& f, const ProductParams& params,
                        const IntegralSpec& spec)
{
    const std::size_t m = params.p.size();
    if (m == 0 || params.nu.size() != m) throw DomainError("product norm needs matching p and nu vectors");
    for (std::size_t j = 0; j < m; ++j) {
        if (!(params.p[j] >= 1.0)) throw DomainError("product norm needs p_j >= 1");
        if (!(params.nu[j] > cone.n_over_r() - 1.0)) throw DomainError("product norm needs nu_j > n/r - 1");
    }
    const int n = cone.dim();
    const double bR = spec.base_cutoff;
    LevelFunction level = [&](double R, int density) {
        const NodeSet ys = cone_nodes(cone, R, density, spec);
        const NodeSet xs = base_nodes(n, bR > 0.0 ? bR : R, density, spec);
        std::vector<std::vector<double>> yw(m, std::vector<double>(ys.size()));
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < ys.size(); ++i) {
                yw[j][i] = ys.weights[i] * std::pow(determinant(cone, ys.points[i]), params.nu[j] - cone.n_over_r());
            }
        }
        // I_j with z_{j+1..m} fixed in args; args[j] is overwritten.
        std::function<double(std::size_t, std::vector<TubePoint>&)> integral = [&](std::size_t j,
                                                                                   std::vector<TubePoint>& args) {
            double total = 0.0;
            for (std::size_t i = 0; i < ys.size(); ++i) {
                args[j].y = ys.points[i];
                double s = 0.0;
                for (std::size_t k = 0; k < xs.size(); ++k) {
                    args[j].x = xs.points[k];
                    const double g = j == 0 ? std::abs(f(args)) : std::pow(integral(j - 1, args), 1.0 / params.p[j - 1]);
                    s += xs.weights[k] * std::pow(g, params.p[j]);
                }
                total += s * yw[j][i];
            }
            return total;
        };
        const std::size_t top = m - 1;
        std::vector<double> partial(ys.size());
        parallel_for(ys.size(), [&](std::size_t i) {
            std::vector<TubePoint> args(m, TubePoint{RealVector::Zero(n), identity(cone)});
            args[top].y = ys.points[i];
            double s = 0.0;
            for (std::size_t k = 0; k < xs.size(); ++k) {
                args[top].x = xs.points[k];
                const double g = top == 0 ? std::abs(f(args))
                                          : std::pow(integral(top - 1, args), 1.0 / params.p[top - 1]);
                s += xs.weights[k] * std::pow(g, params.p[top]);
            }
            partial[i] = s * yw[top][i];
        });
        double total = 0.0;
        for (double v : partial) total += v;
        return LevelValue{cdouble(total), static_cast<long long>(std::pow(double(ys.size() * xs.size()), double(m)))};
    };
    CountFunction count = [&](double R, int density) {
        return static_cast<long long>(std::pow(double(tube_node_count(cone, R, density, spec)), double(m)));
    };
    return root_of(ladder_integrate(level, count, spec), params.p.back(), WeightConvention::Measure);
}

namespace {

void check_herz(double p, double q, double alpha, double rho)
{
    if (!(p >= 1.0) || !(q >= 1.0)) throw DomainError("Herz norm needs p, q >= 1");
    if (!(alpha > -1.0)) throw DomainError("Herz norm needs alpha > -1");
    if (!(rho > 0.0)) throw DomainError("Herz norm needs a positive ball radius");
}

double local_mass(const ConeDescriptor& cone, const TubeIntegrand& f, const BallSpec& ball, double p, double alpha,
                  const IntegralSpec& spec)
{
    return ball_integral(cone, ball, [&](const TubePoint& z) { return cdouble(std::pow(std::abs(f(z)), p)); }, alpha,
                         spec)
        .real();
}

} // namespace

NormResult herz_norm(const ConeDescriptor& cone, const TubeIntegrand& f, double p, double q, double alpha, double rho,
                     const IntegralSpec& outer, const IntegralSpec& ball)
{
    check_herz(p, q, alpha, rho);
    IntegralSpec s = outer;
    s.weight_exponent = 0.0;
    const IntegrationResult r = integrate_tube(
        cone,
        [&](const TubePoint& w) {
            return cdouble(std::pow(std::max(local_mass(cone, f, BallSpec{w, rho}, p, alpha, ball), 0.0), q / p));
        },
        s);
    return root_of(r, q, WeightConvention::Display);
}

NormResult herz_norm_discrete(const Lattice& lattice, const TubeIntegrand& f, double p, double q, double alpha,
                              double rho, const IntegralSpec& ball)
{
    check_herz(p, q, alpha, rho);
    const ConeDescriptor& cone = lattice.cone;
    std::vector<double> terms(lattice.points.size());
    parallel_for(terms.size(), [&](std::size_t k) {
        const TubePoint& a = lattice.points[k];
        const double mass = std::max(local_mass(cone, f, BallSpec{a, rho}, p, alpha, ball), 0.0);
        terms[k] = std::pow(mass, q / p) * ball_volume(cone, BallSpec{a, lattice.r}, 0.0, ball).real();
    });
    double total = 0.0;
    for (double t : terms) total += t;
    IntegrationResult r;
    r.value = total;
    r.converged = true;
    r.evaluations = static_cast<long long>(terms.size());
    return root_of(r, q, WeightConvention::Display);
}

RangeReport projection_range(double p, double nu, const ConeDescriptor& cone)
{
    if (!(p >= 1.0)) throw DomainError("projection range needs p >= 1");
    const double d = cone.n_over_r() - 1.0;
    if (std::abs(d) < 1e-14) {
        throw RankOneDegenerate("q_nu = 1 + nu/(n/r - 1) is undefined for n/r = 1");
    }
    RangeReport r;
    r.q_nu = 1.0 + nu / d;
    const double pc = p == 1.0 ? std::numeric_limits<double>::infinity() : p / (p - 1.0);
    r.q_hi = std::min(p, pc) * r.q_nu;
    r.q_lo = r.q_hi > 1.0 ? r.q_hi / (r.q_hi - 1.0) : std::numeric_limits<double>::infinity();
    r.nonempty = r.q_lo < r.q_hi;
    return r;
}

} // namespace bergman
