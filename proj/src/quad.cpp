#include "bergman/quad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Converged: return "Converged";
    case Verdict::Diverged: return "Diverged";
    case Verdict::Undecided: return "Undecided";
    }
    return "Undecided";
}

namespace {

constexpr double kPi = std::numbers::pi;

double weight_factor(const ConeDescriptor& cone, const RealVector& y, double w)
{
    if (w == 0.0) return 1.0;
    return std::pow(determinant(cone, y), w);
}

std::vector<double> rungs(const IntegralSpec& spec)
{
    if (spec.ladder.empty()) return {spec.cutoff};
    return spec.ladder;
}

/// Sum of a[i] in fixed order, computed in fixed-size blocks in parallel.
cdouble blocked_sum(std::size_t count, const std::function<cdouble(std::size_t)>& term)
{
    constexpr std::size_t kBlock = 2048;
    const std::size_t blocks = (count + kBlock - 1) / kBlock;
    std::vector<cdouble> partial(blocks);
    parallel_for(blocks, [&](std::size_t b) {
        cdouble s = 0.0;
        const std::size_t end = std::min(count, (b + 1) * kBlock);
        for (std::size_t i = b * kBlock; i < end; ++i) s += term(i);
        partial[b] = s;
    });
    cdouble total = 0.0;
    for (const cdouble& p : partial) total += p;
    return total;
}

using Level = LevelValue;
using LevelFn = LevelFunction;
using CountFn = CountFunction;

struct RungResult {
    cdouble value;
    double error;
    bool within_tolerance;
    long long evaluations;
};

RungResult run_rung(const LevelFn& level, const CountFn& count, double R, const IntegralSpec& spec)
{
    int density = spec.density;
    long long evaluations = 0;
    for (;;) {
        const int coarse_density = std::max(1, density / 2);
        if (count(R, density) + count(R, coarse_density) > spec.node_budget) {
            throw BudgetExceeded("quadrature needs " + std::to_string(count(R, density)) +
                                 " nodes, budget is " + std::to_string(spec.node_budget));
        }
        const Level fine = level(R, density);
        const Level coarse = density > 1 ? level(R, coarse_density) : fine;
        evaluations += fine.evaluations + coarse.evaluations;
        const double error = std::abs(fine.value - coarse.value);
        const bool ok = error <= spec.tolerance * std::max(std::abs(fine.value), 1e-300);
        if (ok || !spec.require_tolerance) return {fine.value, error, ok, evaluations};
        if (count(R, 2 * density) + count(R, density) > spec.node_budget) {
            throw BudgetExceeded("tolerance " + std::to_string(spec.tolerance) + " not reached within node budget");
        }
        density *= 2;
    }
}

} // namespace

IntegrationResult ladder_integrate(const LevelFunction& level, const CountFunction& count, const IntegralSpec& spec)
{
    const std::vector<double> radii = rungs(spec);
    IntegrationResult result;
    std::vector<double> used;
    RungResult last{};
    bool all_ok = true;
    for (double R : radii) {
        last = run_rung(level, count, R, spec);
        all_ok = last.within_tolerance;
        used.push_back(R);
        result.ladder_values.push_back(last.value.real());
        result.evaluations += last.evaluations;
        if (spec.early_stop && used.size() >= 4) {
            const LadderAnalysis a = divergence_probe(result.ladder_values, used, spec.tolerance);
            const double tail = std::abs(a.extrapolated - last.value.real());
            if (a.verdict == Verdict::Converged && tail <= spec.tolerance * std::abs(a.extrapolated)) break;
        }
    }
    result.value = last.value;
    result.error_estimate = last.error;
    if (used.size() >= 4) {
        const LadderAnalysis a = divergence_probe(result.ladder_values, used, spec.tolerance);
        result.verdict = a.verdict;
        if (a.verdict == Verdict::Converged) {
            // Uncertainty of the tail correction: how much the extrapolated
            // value moved when the top rung was added.
            double moved = std::abs(a.extrapolated - last.value.real());
            if (used.size() >= 5) {
                const std::vector<double> pv(result.ladder_values.begin(), result.ladder_values.end() - 1);
                const std::vector<double> pr(used.begin(), used.end() - 1);
                const LadderAnalysis prev = divergence_probe(pv, pr, spec.tolerance);
                if (prev.verdict == Verdict::Converged) moved = std::abs(a.extrapolated - prev.extrapolated);
            }
            result.error_estimate = std::max(result.error_estimate, moved);
            result.value = cdouble(a.extrapolated, last.value.imag());
        }
    } else if (used.size() == 1) {
        // A single truncation cannot be classified.
        result.verdict = Verdict::Undecided;
    }
    const double scale = std::max(std::abs(result.value), 1e-300);
    result.converged = all_ok && result.verdict != Verdict::Diverged &&
                       result.error_estimate <= spec.tolerance * scale;
    if (radii.size() == 1) result.converged = all_ok;
    return result;
}

namespace {

IntegrationResult run_ladder(const LevelFn& level, const CountFn& count, const IntegralSpec& spec)
{
    return ladder_integrate(level, count, spec);
}

// ---------------------------------------------------------------------------
// Monte Carlo samplers

struct ConeSample {
    RealVector y;
    double density;
};

double sphere_area(int k) { return 2.0 * std::pow(kPi, (k + 1) / 2.0) / std::tgamma((k + 1) / 2.0); }

double sample_gamma(std::mt19937_64& rng, double shape)
{
    std::gamma_distribution<double> g(shape, 1.0);
    return g(rng);
}

RealVector sample_sphere(std::mt19937_64& rng, int k)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    RealVector d(k + 1);
    for (int i = 0; i <= k; ++i) d(i) = normal(rng);
    return d / d.norm();
}

double log_normaliser(const ConeDescriptor& cone, double beta)
{
    switch (cone.kind()) {
    case ConeKind::HalfLine: return std::lgamma(beta + 1.0);
    case ConeKind::Lorentz: {
        const int n = cone.dim();
        const double a = beta + 1.0, b = (n - 1) / 2.0;
        const double log_beta_fn = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
        return std::lgamma(2.0 * beta + n) + std::log(sphere_area(n - 2)) + std::log(0.5) + log_beta_fn;
    }
    case ConeKind::SPD: {
        const int r = cone.rank();
        const double a = beta + (r + 1) / 2.0;
        double lg = r * (r - 1) / 4.0 * std::log(kPi);
        for (int j = 0; j < r; ++j) lg += std::lgamma(a - j / 2.0);
        return lg + r * (r - 1) / 2.0 * std::log(std::numbers::sqrt2);
    }
    case ConeKind::Product: {
        double total = 0.0;
        for (const auto& f : cone.factors()) total += log_normaliser(f, beta);
        return total;
    }
    }
    return 0.0;
}

RealVector sample_cone_point(const ConeDescriptor& cone, double beta, std::mt19937_64& rng)
{
    switch (cone.kind()) {
    case ConeKind::HalfLine: {
        RealVector y(1);
        y(0) = sample_gamma(rng, beta + 1.0);
        return y;
    }
    case ConeKind::Lorentz: {
        const int n = cone.dim();
        const double ga = sample_gamma(rng, beta + 1.0), gb = sample_gamma(rng, (n - 1) / 2.0);
        const double s = ga / (ga + gb);
        const double ch = 1.0 / std::sqrt(s);
        const double sh = std::sqrt(std::max(0.0, ch * ch - 1.0));
        const double t = sample_gamma(rng, 2.0 * beta + n) / ch;
        RealVector y(n);
        y(0) = t * ch;
        y.tail(n - 1) = t * sh * sample_sphere(rng, n - 2);
        return y;
    }
    case ConeKind::SPD: {
        const int r = cone.rank();
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        SmallMatrix L = SmallMatrix::Zero(r, r);
        for (int i = 0; i < r; ++i) {
            L(i, i) = std::sqrt(sample_gamma(rng, (2.0 * beta + r - i + 1) / 2.0));
            for (int j = 0; j < i; ++j) L(i, j) = normal(rng);
        }
        return spd_coords(SmallMatrix(L * L.transpose()));
    }
    case ConeKind::Product: {
        RealVector y(cone.dim());
        int offset = 0;
        for (const auto& f : cone.factors()) {
            y.segment(offset, f.dim()) = sample_cone_point(f, beta, rng);
            offset += f.dim();
        }
        return y;
    }
    }
    throw DomainError("unknown cone kind");
}

double mc_beta(const IntegralSpec& spec) { return spec.weight_exponent > -1.0 ? spec.weight_exponent : 0.0; }

ConeSample sample_cone(const ConeDescriptor& cone, double beta, double log_z, std::mt19937_64& rng)
{
    RealVector y = sample_cone_point(cone, beta, rng);
    const double trace = inner(y, identity(cone));
    const double log_p = -trace + beta * std::log(determinant(cone, y)) - log_z;
    return {y, std::exp(log_p)};
}

struct BaseSample {
    RealVector x;
    double density;
};

BaseSample sample_base(int n, std::mt19937_64& rng)
{
    std::cauchy_distribution<double> cauchy(0.0, 1.0);
    RealVector x(n);
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
        x(i) = cauchy(rng);
        p *= 1.0 / (kPi * (1.0 + x(i) * x(i)));
    }
    return {x, p};
}

IntegrationResult mc_finish(const std::vector<cdouble>& samples)
{
    const double N = static_cast<double>(samples.size());
    cdouble mean = 0.0;
    for (const auto& s : samples) mean += s;
    mean /= N;
    double var = 0.0;
    for (const auto& s : samples) var += std::norm(s - mean);
    var /= std::max(1.0, N - 1.0);
    IntegrationResult out;
    out.value = mean;
    out.error_estimate = std::sqrt(var / N);
    out.evaluations = static_cast<long long>(samples.size());
    return out;
}

IntegrationResult mc_result(std::vector<cdouble> samples, const IntegralSpec& spec)
{
    IntegrationResult out = mc_finish(samples);
    out.converged = out.error_estimate <= spec.tolerance * std::abs(out.value);
    if (!out.converged && spec.require_tolerance) {
        throw BudgetExceeded("Monte Carlo standard error above tolerance");
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------

IntegrationResult integrate_cone(const ConeDescriptor& cone, const ConeIntegrand& f, const IntegralSpec& spec)
{
    const double w = spec.weight_exponent;
    if (spec.method == Method::MonteCarloImportance) {
        const double beta = mc_beta(spec);
        const double log_z = log_normaliser(cone, beta);
        std::mt19937_64 rng(spec.seed);
        std::vector<cdouble> samples(static_cast<std::size_t>(spec.mc_samples));
        for (auto& s : samples) {
            const ConeSample c = sample_cone(cone, beta, log_z, rng);
            s = f(c.y) * weight_factor(cone, c.y, w) / c.density;
        }
        return mc_result(std::move(samples), spec);
    }
    LevelFn level = [&](double R, int density) {
        const NodeSet nodes = cone_nodes(cone, R, density, spec);
        const cdouble v = blocked_sum(nodes.size(), [&](std::size_t i) {
            return nodes.weights[i] * weight_factor(cone, nodes.points[i], w) * f(nodes.points[i]);
        });
        return Level{v, static_cast<long long>(nodes.size())};
    };
    CountFn count = [&](double R, int density) { return cone_node_count(cone, R, density, spec); };
    return run_ladder(level, count, spec);
}

IntegrationResult integrate_base(int n, const ConeIntegrand& f, const IntegralSpec& spec)
{
    if (n < 1 || n > kMaxDim) throw DomainError("base dimension out of range");
    if (spec.method == Method::MonteCarloImportance) {
        std::mt19937_64 rng(spec.seed);
        std::vector<cdouble> samples(static_cast<std::size_t>(spec.mc_samples));
        for (auto& s : samples) {
            const BaseSample b = sample_base(n, rng);
            s = f(b.x) / b.density;
        }
        return mc_result(std::move(samples), spec);
    }
    LevelFn level = [&](double R, int density) {
        const NodeSet nodes = base_nodes(n, R, density, spec);
        const cdouble v = blocked_sum(nodes.size(), [&](std::size_t i) { return nodes.weights[i] * f(nodes.points[i]); });
        return Level{v, static_cast<long long>(nodes.size())};
    };
    CountFn count = [&](double R, int density) {
        return static_cast<long long>(std::pow(static_cast<double>(line_rule(R, spec.line_scale, density).size()), n));
    };
    return run_ladder(level, count, spec);
}

namespace {

double base_cutoff(const IntegralSpec& spec, double R) { return spec.base_cutoff > 0.0 ? spec.base_cutoff : R; }

long long tube_count(const ConeDescriptor& cone, double R, int density, const IntegralSpec& spec)
{
    const double line = static_cast<double>(line_rule(base_cutoff(spec, R), spec.line_scale, density).size());
    return cone_node_count(cone, R, density, spec) * static_cast<long long>(std::pow(line, cone.dim()));
}

} // namespace

long long tube_node_count(const ConeDescriptor& cone, double R, int density, const IntegralSpec& spec)
{
    return tube_count(cone, R, density, spec);
}

TubeNodes tube_nodes(const ConeDescriptor& cone, double R, int density, const IntegralSpec& spec,
                     double weight_exponent)
{
    const NodeSet ys = cone_nodes(cone, R, density, spec);
    const NodeSet xs = base_nodes(cone.dim(), base_cutoff(spec, R), density, spec);
    TubeNodes out;
    out.points.reserve(ys.size() * xs.size());
    out.weights.reserve(ys.size() * xs.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double wy = ys.weights[i] * weight_factor(cone, ys.points[i], weight_exponent);
        for (std::size_t j = 0; j < xs.size(); ++j) {
            out.points.push_back(TubePoint{xs.points[j], ys.points[i]});
            out.weights.push_back(wy * xs.weights[j]);
        }
    }
    return out;
}

IntegrationResult integrate_tube_iterated(const ConeDescriptor& cone, const TubeIntegrand& inner,
                                          const std::function<cdouble(cdouble, const RealVector&)>& outer,
                                          const IntegralSpec& spec)
{
    const double w = spec.weight_exponent;
    const int n = cone.dim();
    LevelFn level = [&](double R, int density) {
        const NodeSet ys = cone_nodes(cone, R, density, spec);
        const NodeSet xs = base_nodes(n, base_cutoff(spec, R), density, spec);
        std::vector<cdouble> partial(ys.size());
        parallel_for(ys.size(), [&](std::size_t i) {
            TubePoint z{RealVector(n), ys.points[i]};
            cdouble s = 0.0;
            for (std::size_t j = 0; j < xs.size(); ++j) {
                z.x = xs.points[j];
                s += xs.weights[j] * inner(z);
            }
            partial[i] = outer(s, ys.points[i]) * ys.weights[i] * weight_factor(cone, ys.points[i], w);
        });
        cdouble total = 0.0;
        for (const auto& p : partial) total += p;
        return Level{total, static_cast<long long>(ys.size() * xs.size())};
    };
    CountFn count = [&](double R, int density) { return tube_count(cone, R, density, spec); };
    return run_ladder(level, count, spec);
}

IntegrationResult integrate_tube(const ConeDescriptor& cone, const TubeIntegrand& f, const IntegralSpec& spec)
{
    const double w = spec.weight_exponent;
    const int n = cone.dim();
    if (spec.method == Method::MonteCarloImportance) {
        const double beta = mc_beta(spec);
        const double log_z = log_normaliser(cone, beta);
        std::mt19937_64 rng(spec.seed);
        std::vector<cdouble> samples(static_cast<std::size_t>(spec.mc_samples));
        for (auto& s : samples) {
            const ConeSample c = sample_cone(cone, beta, log_z, rng);
            const BaseSample b = sample_base(n, rng);
            s = f(TubePoint{b.x, c.y}) * weight_factor(cone, c.y, w) / (c.density * b.density);
        }
        return mc_result(std::move(samples), spec);
    }
    LevelFn level = [&](double R, int density) {
        const NodeSet ys = cone_nodes(cone, R, density, spec);
        const NodeSet xs = base_nodes(n, base_cutoff(spec, R), density, spec);
        std::vector<cdouble> partial(ys.size());
        parallel_for(ys.size(), [&](std::size_t i) {
            TubePoint z{RealVector(n), ys.points[i]};
            cdouble s = 0.0;
            for (std::size_t j = 0; j < xs.size(); ++j) {
                z.x = xs.points[j];
                s += xs.weights[j] * f(z);
            }
            partial[i] = s * ys.weights[i] * weight_factor(cone, ys.points[i], w);
        });
        cdouble total = 0.0;
        for (const auto& p : partial) total += p;
        return Level{total, static_cast<long long>(ys.size() * xs.size())};
    };
    CountFn count = [&](double R, int density) { return tube_count(cone, R, density, spec); };
    return run_ladder(level, count, spec);
}

IntegrationResult integrate_product_tube(const ConeDescriptor& cone, int m, const ProductIntegrand& f,
                                         const std::vector<double>& weights, const IntegralSpec& spec)
{
    if (m < 1) throw DomainError("product order must be positive");
    if (!weights.empty() && static_cast<int>(weights.size()) != m) throw DomainError("one weight per factor required");
    const int n = cone.dim();
    auto weight_of = [&](int j) { return weights.empty() ? 0.0 : weights[j]; };
    if (spec.method == Method::MonteCarloImportance) {
        std::mt19937_64 rng(spec.seed);
        std::vector<cdouble> samples(static_cast<std::size_t>(spec.mc_samples));
        std::vector<double> betas(m), log_z(m);
        for (int j = 0; j < m; ++j) {
            betas[j] = weight_of(j) > -1.0 ? weight_of(j) : 0.0;
            log_z[j] = log_normaliser(cone, betas[j]);
        }
        std::vector<TubePoint> pts(m);
        for (auto& s : samples) {
            double factor = 1.0;
            for (int j = 0; j < m; ++j) {
                const ConeSample c = sample_cone(cone, betas[j], log_z[j], rng);
                const BaseSample b = sample_base(n, rng);
                pts[j] = TubePoint{b.x, c.y};
                factor *= weight_factor(cone, c.y, weight_of(j)) / (c.density * b.density);
            }
            s = f(pts) * factor;
        }
        return mc_result(std::move(samples), spec);
    }
    LevelFn level = [&](double R, int density) {
        const NodeSet ys = cone_nodes(cone, R, density, spec);
        const NodeSet xs = base_nodes(n, base_cutoff(spec, R), density, spec);
        // Single-factor tube nodes; the weight differs per factor.
        std::vector<TubePoint> points;
        std::vector<std::vector<double>> w(m);
        points.reserve(ys.size() * xs.size());
        for (std::size_t i = 0; i < ys.size(); ++i) {
            for (std::size_t j = 0; j < xs.size(); ++j) points.push_back(TubePoint{xs.points[j], ys.points[i]});
        }
        for (int k = 0; k < m; ++k) {
            w[k].reserve(points.size());
            for (std::size_t i = 0; i < ys.size(); ++i) {
                const double wy = ys.weights[i] * weight_factor(cone, ys.points[i], weight_of(k));
                for (std::size_t j = 0; j < xs.size(); ++j) w[k].push_back(wy * xs.weights[j]);
            }
        }
        const std::size_t N = points.size();
        // Parallel over the outermost (last) factor; inner factors nested in order.
        std::vector<cdouble> partial(N);
        parallel_for(N, [&](std::size_t outer) {
            std::vector<TubePoint> tuple(m);
            tuple[m - 1] = points[outer];
            std::function<cdouble(int)> rec = [&](int k) -> cdouble {
                if (k < 0) return f(tuple);
                cdouble s = 0.0;
                for (std::size_t i = 0; i < N; ++i) {
                    tuple[k] = points[i];
                    s += w[k][i] * rec(k - 1);
                }
                return s;
            };
            partial[outer] = w[m - 1][outer] * rec(m - 2);
        });
        cdouble total = 0.0;
        for (const auto& p : partial) total += p;
        long long evals = 1;
        for (int k = 0; k < m; ++k) evals *= static_cast<long long>(N);
        return Level{total, evals};
    };
    CountFn count = [&](double R, int density) {
        const double single = static_cast<double>(tube_count(cone, R, density, spec));
        return static_cast<long long>(std::min(9e18, std::pow(single, m)));
    };
    return run_ladder(level, count, spec);
}

// ---------------------------------------------------------------------------

LadderAnalysis divergence_probe(const std::vector<double>& values, const std::vector<double>& radii, double tolerance)
{
    LadderAnalysis out;
    out.last_ratio = std::nan("");
    if (values.size() != radii.size()) throw DomainError("ladder values and radii differ in length");
    for (std::size_t i = 1; i < radii.size(); ++i) {
        if (!(radii[i] > radii[i - 1])) throw DomainError("ladder radii must be strictly increasing");
    }
    if (values.empty()) return out;
    const std::size_t k = values.size();
    out.extrapolated = values.back();
    if (k < 4) return out;

    const double v = values[k - 1];
    std::vector<double> d(k - 1);
    for (std::size_t i = 1; i < k; ++i) d[i - 1] = values[i] - values[i - 1];
    // Increments per doubling of the radius, so uneven ladders compare fairly.
    auto per_doubling = [&](std::size_t i) {
        return std::abs(d[i]) / std::log2(radii[i + 1] / radii[i]);
    };
    const std::size_t m = d.size();
    const double scale = std::max(std::abs(v), 1e-300);
    const double r1 = per_doubling(m - 1) / std::max(per_doubling(m - 2), 1e-300);
    const double r0 = per_doubling(m - 2) / std::max(per_doubling(m - 3), 1e-300);
    out.last_ratio = r1;

    const double growth = std::abs(values[k - 2]) > 0 ? std::abs(v / values[k - 2]) - 1.0 : INFINITY;
    const double growth_prev = std::abs(values[k - 3]) > 0 ? std::abs(values[k - 2] / values[k - 3]) - 1.0 : INFINITY;
    const bool negligible = std::abs(d[m - 1]) <= tolerance * scale && std::abs(d[m - 2]) <= 10.0 * tolerance * scale;
    if (negligible) {
        out.verdict = Verdict::Converged;
        return out;
    }
    // Geometrically decaying increments win over large early growth: a slow
    // power tail can still add 10% per doubling at small radii.
    if (r1 <= 0.85 && r0 <= 0.85) {
        out.verdict = Verdict::Converged;
        const double rho = r1;
        out.extrapolated = v + d[m - 1] * rho / (1.0 - rho);
        return out;
    }
    if (growth > 0.1 && growth_prev > 0.1) {
        out.verdict = Verdict::Diverged;
        return out;
    }
    if (r1 >= 0.9 && r0 >= 0.9) {
        // Increments do not decay: at least logarithmic growth.
        out.verdict = Verdict::Diverged;
        return out;
    }
    // Quadrature error can alternate between rungs. Every other rung then
    // gives cleaner increments; each step spans two rungs, hence the square.
    if (k >= 7) {
        auto pair_step = [&](std::size_t hi) {
            return std::abs(values[hi] - values[hi - 2]) / std::log2(radii[hi] / radii[hi - 2]);
        };
        const double q1 = pair_step(k - 1) / std::max(pair_step(k - 3), 1e-300);
        const double q0 = pair_step(k - 3) / std::max(pair_step(k - 5), 1e-300);
        if (q1 <= 0.85 * 0.85 && q0 <= 0.85 * 0.85) {
            out.verdict = Verdict::Converged;
            out.extrapolated = v + (values[k - 1] - values[k - 3]) * q1 / (1.0 - q1);
        }
    }
    return out;
}

LadderAnalysis divergence_probe(const std::function<double(double)>& truncated, const std::vector<double>& radii,
                                double tolerance)
{
    std::vector<double> values;
    values.reserve(radii.size());
    for (double R : radii) values.push_back(truncated(R));
    return divergence_probe(values, radii, tolerance);
}

std::vector<double> log_grid(double lo, double hi, int points)
{
    if (!(lo > 0.0) || !(hi > lo) || points < 2) throw DomainError("invalid logarithmic grid");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    return g;
}

ExponentFit fit_exponent(const std::vector<double>& lambdas, const std::vector<double>& values)
{
    if (lambdas.size() != values.size()) throw DomainError("grid and values differ in length");
    if (lambdas.size() < 5) throw DomainError("exponent fit needs at least five grid points");
    const auto [mn, mx] = std::minmax_element(lambdas.begin(), lambdas.end());
    if (!(*mn > 0.0) || *mx / *mn < 100.0 * (1.0 - 1e-12)) {
        throw DomainError("exponent fit grid must span at least two decades");
    }
    const std::size_t N = lambdas.size();
    std::vector<double> X(N), Y(N);
    for (std::size_t i = 0; i < N; ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
            throw NonPositiveValue("family value " + std::to_string(values[i]) + " at lambda " +
                                   std::to_string(lambdas[i]) + " is not positive");
        }
        X[i] = std::log(lambdas[i]);
        Y[i] = std::log(values[i]);
    }
    double mx_ = 0, my = 0;
    for (std::size_t i = 0; i < N; ++i) mx_ += X[i], my += Y[i];
    mx_ /= N;
    my /= N;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < N; ++i) {
        sxx += (X[i] - mx_) * (X[i] - mx_);
        sxy += (X[i] - mx_) * (Y[i] - my);
        syy += (Y[i] - my) * (Y[i] - my);
    }
    ExponentFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx_;
    double sse = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const double e = Y[i] - fit.intercept - fit.slope * X[i];
        sse += e * e;
    }
    fit.r_squared = syy > 0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    fit.stderr_slope = N > 2 ? std::sqrt(sse / (N - 2) / sxx) : 0.0;
    fit.lambdas = lambdas;
    fit.values = values;
    return fit;
}

ExponentFit detect_exponent(const std::function<double(double)>& family, const std::vector<double>& lambdas)
{
    std::vector<double> values;
    values.reserve(lambdas.size());
    for (double l : lambdas) values.push_back(family(l));
    return fit_exponent(lambdas, values);
}

// ---------------------------------------------------------------------------

IntegrationResult I_alpha_beta(const ConeDescriptor& cone, double alpha, double beta, const RealVector& t,
                               const IntegralSpec& spec)
{
    if (!contains(cone, t)) throw DomainError("shift t must lie in the cone");
    IntegralSpec s = spec;
    s.weight_exponent = beta;
    return integrate_cone(
        cone, [&](const RealVector& y) { return cdouble(std::pow(determinant(cone, RealVector(y + t)), alpha)); }, s);
}

IntegrationResult I_alpha(const ConeDescriptor& cone, double alpha, const RealVector& y, const IntegralSpec& spec)
{
    if (!contains(cone, y)) throw DomainError("y must lie in the cone");
    const int n = cone.dim();
    return integrate_base(
        n,
        [&](const RealVector& x) {
            ComplexVector zeta(n);
            for (int i = 0; i < n; ++i) zeta(i) = cdouble(y(i), -x(i));
            return cdouble(std::pow(std::abs(complex_determinant(cone, zeta)), -alpha));
        },
        spec);
}

IntegrationResult fr_kernel_integral(const ConeDescriptor& cone, double p, double beta, const TubePoint& z0,
                                     const IntegralSpec& spec)
{
    if (p < 1.0) throw DomainError("Forelli-Rudin exponent p must be at least 1");
    IntegralSpec s = spec;
    s.weight_exponent = beta;
    const double power = -2.0 * cone.n_over_r() * p;
    return integrate_tube(
        cone,
        [&](const TubePoint& zeta) {
            return cdouble(std::pow(std::abs(complex_determinant(cone, kernel_argument(zeta, z0))), power));
        },
        s);
}

IntegrationResult fr_estimate_5(const ConeDescriptor& cone, double tau, double tau1, const TubePoint& z,
                                const IntegralSpec& spec)
{
    IntegralSpec s = spec;
    s.weight_exponent = tau;
    return integrate_tube(
        cone,
        [&](const TubePoint& w) {
            return cdouble(std::pow(std::abs(complex_determinant(cone, kernel_argument(w, z))), -tau1));
        },
        s);
}

} // namespace bergman
