#include "bergman/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

double cone_distance(const ConeDescriptor& cone, const RealVector& y1, const RealVector& y2)
{
    if (!contains(cone, y1) || !contains(cone, y2)) throw DomainError("cone distance needs points inside the cone");
    if (cone.kind() == ConeKind::HalfLine) return std::abs(std::log(y1(0) / y2(0)));
    if (cone.kind() == ConeKind::Product) {
        const auto a = split(cone, y1), b = split(cone, y2);
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = cone_distance(cone.factors()[i], a[i], b[i]);
            s += d * d;
        }
        return std::sqrt(s);
    }
    const RealVector a = jordan_power(cone, y2, -0.5);
    const Eigen::MatrixXd P = quadratic_representation(cone, a);
    const RealVector rel = P * Eigen::VectorXd(y1);
    const SpectralDecomposition sd = spectral_decompose(cone, rel);
    double s = 0.0;
    for (double l : sd.eigenvalues) {
        const double g = std::log(l);
        s += g * g;
    }
    return std::sqrt(s);
}

bool ball_contains(const ConeDescriptor& cone, const BallSpec& ball, const TubePoint& z)
{
    if (!contains(cone, z.y)) return false;
    const double scale = ball.radius * std::pow(determinant(cone, ball.center.y), 1.0 / cone.rank());
    if ((z.x - ball.center.x).norm() >= scale) return false;
    return cone_distance(cone, z.y, ball.center.y) < ball.radius;
}

namespace {

// Jacobian determinant of the Jordan exponential at x on a simple factor.
double exp_jacobian_simple(const ConeDescriptor& cone, const RealVector& x)
{
    if (cone.rank() == 1) return std::exp(x(0));
    const SpectralDecomposition sd = spectral_decompose(cone, x);
    const double d = cone.peirce_d();
    double jac = 1.0;
    const auto& s = sd.eigenvalues;
    for (double si : s) jac *= std::exp(si);
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            const double diff = s[i] - s[j];
            const double q = std::abs(diff) < 1e-12 ? std::exp(0.5 * (s[i] + s[j]))
                                                    : (std::exp(s[i]) - std::exp(s[j])) / diff;
            jac *= std::pow(q, d);
        }
    }
    return jac;
}

double exp_jacobian(const ConeDescriptor& cone, const RealVector& x)
{
    if (cone.kind() != ConeKind::Product) return exp_jacobian_simple(cone, x);
    const auto parts = split(cone, x);
    double jac = 1.0;
    for (std::size_t i = 0; i < parts.size(); ++i) jac *= exp_jacobian(cone.factors()[i], parts[i]);
    return jac;
}

// Polar nodes for the Euclidean ball of radius rho in R^n: points and weights.
NodeSet euclidean_ball_nodes(int n, double rho, int density, int angular)
{
    const Rule1D radial = gauss_legendre(density);
    const SphereRule sphere = sphere_rule(n - 1, angular);
    NodeSet set;
    for (std::size_t a = 0; a < radial.size(); ++a) {
        const double t = 0.5 * rho * (radial.nodes[a] + 1.0);
        const double wt = 0.5 * rho * radial.weights[a] * std::pow(t, n - 1);
        for (std::size_t b = 0; b < sphere.directions.size(); ++b) {
            set.points.push_back(t * sphere.directions[b]);
            set.weights.push_back(wt * sphere.weights[b]);
        }
    }
    return set;
}

} // namespace

TubeNodes ball_nodes(const ConeDescriptor& cone, const BallSpec& ball, int density, int angular)
{
    if (!(ball.radius > 0.0)) throw DomainError("ball radius must be positive");
    const int n = cone.dim();
    const RealVector& y0 = ball.center.y;
    const RealVector root = jordan_power(cone, y0, 0.5);
    const Eigen::MatrixXd P = quadratic_representation(cone, root);
    const double detP = std::abs(P.determinant());
    const RealVector D = spectral_norm_scale(cone);
    double inv_scale = 1.0;
    for (int i = 0; i < n; ++i) inv_scale /= D(i);

    const NodeSet cone_part = euclidean_ball_nodes(n, ball.radius, density, angular);
    const double xr = ball.radius * std::pow(determinant(cone, y0), 1.0 / cone.rank());
    const NodeSet x_part = euclidean_ball_nodes(n, xr, density, angular);

    TubeNodes out;
    out.points.reserve(cone_part.size() * x_part.size());
    for (std::size_t a = 0; a < cone_part.size(); ++a) {
        RealVector xp(n);
        for (int i = 0; i < n; ++i) xp(i) = cone_part.points[a](i) / D(i);
        const RealVector g = jordan_exp(cone, xp);
        const RealVector y = P * Eigen::VectorXd(g);
        const double wy = cone_part.weights[a] * inv_scale * exp_jacobian(cone, xp) * detP;
        for (std::size_t b = 0; b < x_part.size(); ++b) {
            out.points.push_back(TubePoint{RealVector(ball.center.x + x_part.points[b]), y});
            out.weights.push_back(wy * x_part.weights[b]);
        }
    }
    return out;
}

IntegrationResult ball_integral(const ConeDescriptor& cone, const BallSpec& ball, const TubeIntegrand& f,
                                double alpha, const IntegralSpec& spec)
{
    auto level = [&](int density) {
        const TubeNodes nodes = ball_nodes(cone, ball, density, spec.angular);
        cdouble s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double w = alpha == 0.0 ? 1.0 : std::pow(determinant(cone, nodes.points[i].y), alpha);
            s += nodes.weights[i] * w * f(nodes.points[i]);
        }
        return std::make_pair(s, static_cast<long long>(nodes.size()));
    };
    const auto fine = level(spec.density);
    const auto coarse = level(std::max(1, spec.density / 2));
    IntegrationResult r;
    r.value = fine.first;
    r.error_estimate = std::abs(fine.first - coarse.first);
    r.evaluations = fine.second + coarse.second;
    r.converged = r.error_estimate <= spec.tolerance * std::abs(r.value) || r.value == 0.0;
    r.verdict = Verdict::Converged;
    return r;
}

IntegrationResult ball_volume(const ConeDescriptor& cone, const BallSpec& ball, double alpha, const IntegralSpec& spec)
{
    if (!(alpha > -1.0)) throw DomainError("ball weight exponent must exceed -1");
    return ball_integral(cone, ball, [](const TubePoint&) { return cdouble(1.0); }, alpha, spec);
}

// ---------------------------------------------------------------------------
// Regions

namespace {

double log_delta_of(const ConeDescriptor& cone, const TubePoint& z) { return std::log(determinant(cone, z.y)); }

double shape_distance(const ConeDescriptor& cone, const RealVector& y)
{
    if (cone.rank() == 1) return 0.0;
    const RealVector unit = y / std::pow(determinant(cone, y), 1.0 / cone.rank());
    return cone_distance(cone, unit, identity(cone));
}

} // namespace

bool region_contains(const ConeDescriptor& cone, const Region& region, const TubePoint& z)
{
    if (!contains(cone, z.y)) return false;
    if (z.x.cwiseAbs().maxCoeff() > region.x_max) return false;
    const double d = determinant(cone, z.y);
    if (d < region.delta_min || d > region.delta_max) return false;
    return shape_distance(cone, z.y) <= region.spread;
}

std::vector<TubePoint> sample_region(const ConeDescriptor& cone, const Region& region, std::size_t count,
                                     std::uint64_t seed)
{
    if (!(region.delta_min > 0.0) || !(region.delta_max > region.delta_min) || !(region.x_max > 0.0)) {
        throw DomainError("invalid lattice region");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-region.x_max, region.x_max);
    std::uniform_real_distribution<double> ul(std::log(region.delta_min), std::log(region.delta_max));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int n = cone.dim(), r = cone.rank();
    const RealVector D = spectral_norm_scale(cone);
    std::vector<TubePoint> out;
    out.reserve(count);
    while (out.size() < count) {
        RealVector x(n);
        for (int i = 0; i < n; ++i) x(i) = ux(rng);
        const double t = std::exp(ul(rng) / r);
        RealVector y = RealVector::Constant(1, t);
        if (r > 1 || n > 1) {
            // Shape: exp of a random point in the spectral ball, normalised to unit determinant.
            RealVector u(n);
            for (int i = 0; i < n; ++i) u(i) = unit(rng);
            if (u.norm() > 1.0) continue;
            for (int i = 0; i < n; ++i) u(i) *= region.spread / D(i);
            RealVector g = jordan_exp(cone, u);
            g /= std::pow(determinant(cone, g), 1.0 / r);
            if (shape_distance(cone, g) > region.spread) continue;
            y = t * g;
        }
        out.push_back(TubePoint{x, y});
    }
    return out;
}

double region_invariant_measure(const ConeDescriptor& cone, const Region& region)
{
    if (cone.kind() != ConeKind::HalfLine) {
        throw DomainError("closed-form region measure is available for the half line only");
    }
    return 2.0 * region.x_max * (1.0 / region.delta_min - 1.0 / region.delta_max);
}

// ---------------------------------------------------------------------------
// Lattices

namespace {

// Buckets on log delta. A ball of radius rho spans at most sqrt(rank) rho in log delta.
class LatticeIndex {
public:
    LatticeIndex(const ConeDescriptor& cone, double r) : cone_(cone), width_(std::sqrt(double(cone.rank())) * r) {}

    void insert(const TubePoint& a)
    {
        buckets_[key(log_delta_of(cone_, a))].push_back(points_.size());
        points_.push_back(a);
    }

    std::vector<std::size_t> covering(const TubePoint& z, double radius, bool first_only = false) const
    {
        std::vector<std::size_t> hits;
        const long k = key(log_delta_of(cone_, z));
        const long span = static_cast<long>(std::ceil(std::sqrt(double(cone_.rank())) * radius / width_)) + 1;
        for (long b = k - span; b <= k + span; ++b) {
            const auto it = buckets_.find(b);
            if (it == buckets_.end()) continue;
            for (std::size_t j : it->second) {
                if (ball_contains(cone_, BallSpec{points_[j], radius}, z)) {
                    hits.push_back(j);
                    if (first_only) return hits;
                }
            }
        }
        std::sort(hits.begin(), hits.end());
        return hits;
    }

    const std::vector<TubePoint>& points() const { return points_; }

private:
    long key(double logd) const { return static_cast<long>(std::floor(logd / width_)); }

    ConeDescriptor cone_;
    double width_;
    std::map<long, std::vector<std::size_t>> buckets_;
    std::vector<TubePoint> points_;
};

LatticeIndex make_index(const Lattice& lattice)
{
    LatticeIndex index(lattice.cone, lattice.r);
    for (const auto& a : lattice.points) index.insert(a);
    return index;
}

// Half line: a regular grid in (log y, x/y) with step r/8. Other cones: random samples.
std::vector<TubePoint> construction_samples(const ConeDescriptor& cone, const Region& region, double r,
                                            const LatticeOptions& options)
{
    if (cone.kind() != ConeKind::HalfLine) return sample_region(cone, region, options.samples, options.seed);
    const double h = r / 8.0;
    const double l0 = std::log(region.delta_min), l1 = std::log(region.delta_max);
    std::vector<TubePoint> out;
    for (int i = 0; l0 + i * h <= l1 + 1e-12; ++i) {
        const double y = std::exp(l0 + i * h);
        const double step = h * y;
        for (double x = -region.x_max; x <= region.x_max + 1e-12; x += step) {
            out.push_back(TubePoint{RealVector::Constant(1, x), RealVector::Constant(1, y)});
        }
    }
    return out;
}

} // namespace

Lattice build_lattice(const ConeDescriptor& cone, const Region& region, double r, const LatticeOptions& options)
{
    if (!(r > 0.0) || !(r < 1.0)) throw DomainError("lattice radius must lie in (0, 1)");
    Lattice lattice;
    lattice.cone = cone;
    lattice.r = r;
    lattice.R = 0.5 * (1.0 + r);
    lattice.region = region;

    std::vector<TubePoint> samples = construction_samples(cone, region, r, options);
    std::vector<double> keys(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) keys[i] = log_delta_of(cone, samples[i]);
    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (keys[a] != keys[b]) return keys[a] < keys[b];
        return samples[a].x(0) < samples[b].x(0);
    });

    LatticeIndex index(cone, r);
    auto add = [&](const TubePoint& z) {
        index.insert(z);
        if (index.points().size() > options.point_budget) {
            throw BudgetExceeded("lattice point budget of " + std::to_string(options.point_budget) + " exceeded");
        }
    };
    const double inner = r * (1.0 - options.shrink);
    for (std::size_t i : order) {
        if (index.covering(samples[i], inner, true).empty()) add(samples[i]);
    }

    std::vector<TubePoint> all = samples;
    for (int round = 0; round < options.repair_rounds; ++round) {
        const auto fresh = sample_region(cone, region, options.repair_samples, options.seed + 1000 + round);
        std::size_t added = 0;
        for (const auto& z : fresh) {
            if (index.covering(z, r, true).empty()) {
                add(z);
                ++added;
            }
        }
        all.insert(all.end(), fresh.begin(), fresh.end());
        if (added == 0) break;
    }

    lattice.points = index.points();
    std::vector<int> counts(all.size());
    parallel_for(all.size(), [&](std::size_t i) { counts[i] = int(index.covering(all[i], lattice.R).size()); });
    lattice.multiplicity = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
    return lattice;
}

std::vector<std::size_t> covering_points(const Lattice& lattice, const TubePoint& z, double radius)
{
    return make_index(lattice).covering(z, radius);
}

LatticeReport check_lattice(const Lattice& lattice, const std::vector<TubePoint>& samples, double nu)
{
    const ConeDescriptor& cone = lattice.cone;
    const LatticeIndex index = make_index(lattice);
    const CalibratedConstant unit = unit_constant(nu);
    const std::size_t m = lattice.points.size();
    std::vector<double> diag(m);
    for (std::size_t k = 0; k < m; ++k) diag[k] = std::abs(kernel(cone, nu, lattice.points[k], lattice.points[k], unit));

    struct SampleResult {
        std::vector<std::size_t> inner;
        std::vector<double> kernel_ratio;
        int multiplicity = 0;
        double delta_ratio = 1.0;
    };
    std::vector<SampleResult> results(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        SampleResult& res = results[i];
        const TubePoint& z = samples[i];
        res.inner = index.covering(z, lattice.r);
        res.multiplicity = int(index.covering(z, lattice.R).size());
        const double dz = delta_of(cone, z);
        for (std::size_t k : res.inner) {
            const double da = delta_of(cone, lattice.points[k]);
            res.delta_ratio = std::max({res.delta_ratio, dz / da, da / dz});
            res.kernel_ratio.push_back(std::abs(kernel(cone, nu, z, lattice.points[k], unit)) / diag[k]);
        }
    });

    LatticeReport report;
    report.samples = samples.size();
    std::vector<double> lo(m, 1.0), hi(m, 1.0);
    std::size_t covered = 0;
    for (const auto& res : results) {
        if (!res.inner.empty()) ++covered;
        report.max_multiplicity = std::max(report.max_multiplicity, res.multiplicity);
        report.delta_constant = std::max(report.delta_constant, res.delta_ratio);
        for (std::size_t j = 0; j < res.inner.size(); ++j) {
            const std::size_t k = res.inner[j];
            lo[k] = std::min(lo[k], res.kernel_ratio[j]);
            hi[k] = std::max(hi[k], res.kernel_ratio[j]);
        }
    }
    report.covering_rate = samples.empty() ? 1.0 : double(covered) / double(samples.size());
    report.kernel_constants.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        report.kernel_constants[k] = std::max(hi[k], 1.0 / lo[k]);
        report.kernel_constant = std::max(report.kernel_constant, report.kernel_constants[k]);
    }
    return report;
}

void export_lattice(const Lattice& lattice, std::ostream& out)
{
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    const Region& g = lattice.region;
    out << "bergman-lattice 1\n";
    out << "cone " << lattice.cone.name() << "\n";
    out << "r " << num(lattice.r) << " R " << num(lattice.R) << " m " << lattice.multiplicity << "\n";
    out << "region " << num(g.x_max) << ' ' << num(g.delta_min) << ' ' << num(g.delta_max) << ' ' << num(g.spread)
        << "\n";
    out << "points " << lattice.points.size() << "\n";
    for (const auto& a : lattice.points) {
        for (int i = 0; i < a.x.size(); ++i) out << num(a.x(i)) << ' ';
        for (int i = 0; i < a.y.size(); ++i) out << (i ? " " : "") << num(a.y(i));
        out << "\n";
    }
}

Lattice import_lattice(std::istream& in)
{
    auto fail = [](const std::string& what) { return DomainError("malformed lattice file: " + what); };
    std::string word, name;
    int version = 0;
    if (!(in >> word >> version) || word != "bergman-lattice" || version != 1) throw fail("header");
    if (!(in >> word >> name) || word != "cone") throw fail("cone line");
    Lattice lattice;
    lattice.cone = ConeDescriptor::parse(name);
    std::string wr, wR, wm;
    if (!(in >> wr >> lattice.r >> wR >> lattice.R >> wm >> lattice.multiplicity) || wr != "r" || wR != "R" ||
        wm != "m") {
        throw fail("radius line");
    }
    Region& g = lattice.region;
    if (!(in >> word >> g.x_max >> g.delta_min >> g.delta_max >> g.spread) || word != "region") throw fail("region");
    std::size_t count = 0;
    if (!(in >> word >> count) || word != "points") throw fail("point count");
    const int n = lattice.cone.dim();
    lattice.points.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        TubePoint a{RealVector(n), RealVector(n)};
        for (int i = 0; i < n; ++i) in >> a.x(i);
        for (int i = 0; i < n; ++i) in >> a.y(i);
        if (!in) throw fail("point " + std::to_string(k));
        lattice.points.push_back(a);
    }
    return lattice;
}


// ---------------------------------------------------------------------------
// Sampling and atoms

double sampling_norm(const ConeDescriptor& cone, const TubeIntegrand& f, const Lattice& lattice, double p, double nu)
{
    if (!(p >= 1.0)) throw DomainError("sampling norm needs p >= 1");
    if (!(nu > cone.n_over_r() - 1.0)) throw DomainError("sampling norm needs nu > n/r - 1");
    double s = 0.0;
    for (const auto& a : lattice.points) {
        s += std::pow(std::abs(f(a)), p) * std::pow(delta_of(cone, a), nu + cone.n_over_r());
    }
    return s;
}

double lattice_cell_measure(const Lattice& lattice)
{
    if (lattice.points.empty()) throw DomainError("empty lattice");
    return region_invariant_measure(lattice.cone, lattice.region) / double(lattice.points.size());
}

cdouble atomic_synthesize(const Lattice& lattice, const AtomicCoefficients& coeffs, const TubePoint& z,
                          const CalibratedConstant& constant)
{
    if (coeffs.lambda.size() != lattice.points.size()) throw DomainError("coefficient count does not match lattice");
    const ConeDescriptor& cone = lattice.cone;
    const double shift = coeffs.nu + cone.n_over_r();
    cdouble s = 0.0;
    for (std::size_t j = 0; j < lattice.points.size(); ++j) {
        if (coeffs.lambda[j] == 0.0) continue;
        const TubePoint& a = lattice.points[j];
        s += coeffs.lambda[j] * kernel(cone, coeffs.nu, z, a, constant) * std::pow(delta_of(cone, a), shift);
    }
    return s;
}

double coefficient_norm(const Lattice& lattice, const AtomicCoefficients& coeffs)
{
    if (coeffs.lambda.size() != lattice.points.size()) throw DomainError("coefficient count does not match lattice");
    const double shift = coeffs.nu + lattice.cone.n_over_r();
    double s = 0.0;
    for (std::size_t j = 0; j < coeffs.lambda.size(); ++j) {
        s += std::pow(std::abs(coeffs.lambda[j]), coeffs.p) * std::pow(delta_of(lattice.cone, lattice.points[j]), shift);
    }
    return s;
}

AtomicCoefficients atomic_analyze(const TubeIntegrand& f, const Lattice& lattice, double nu, double p,
                                  const CalibratedConstant& constant, const AnalyzeOptions& options)
{
    const ConeDescriptor& cone = lattice.cone;
    if (cone.kind() != ConeKind::HalfLine) throw DomainError("atomic analysis is implemented for the half line");
    if (!(nu > 0.0)) throw DomainError("atomic analysis needs nu > 0");
    const Region& g = lattice.region;

    // Grid: panels of width 1/2 in log y, panels of width y in x, weight y^{nu-1} dx dy.
    std::vector<TubePoint> grid;
    std::vector<double> weight;
    const Rule1D sr = composite_gauss(2.0 * std::log(g.delta_min), 2.0 * std::log(g.delta_max), options.density);
    for (std::size_t a = 0; a < sr.size(); ++a) {
        const double y = std::exp(0.5 * sr.nodes[a]);
        const double wy = 0.5 * y * sr.weights[a] * std::pow(y, nu - 1.0);
        const Rule1D tr = composite_gauss(-g.x_max / y, g.x_max / y, options.density);
        for (std::size_t b = 0; b < tr.size(); ++b) {
            grid.push_back(TubePoint{RealVector::Constant(1, y * tr.nodes[b]), RealVector::Constant(1, y)});
            weight.push_back(wy * y * tr.weights[b]);
        }
    }

    const Eigen::Index rows = Eigen::Index(grid.size()), cols = Eigen::Index(lattice.points.size());
    if (cols == 0) throw DomainError("empty lattice");
    Eigen::MatrixXcd A(rows + cols, cols);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(rows + cols);
    const double shift = nu + cone.n_over_r();
    std::vector<double> scale(static_cast<std::size_t>(cols));
    for (Eigen::Index j = 0; j < cols; ++j) scale[std::size_t(j)] = std::pow(delta_of(cone, lattice.points[std::size_t(j)]), shift);
    parallel_for(std::size_t(rows), [&](std::size_t i) {
        const double sw = std::sqrt(weight[i]);
        for (Eigen::Index j = 0; j < cols; ++j) {
            A(Eigen::Index(i), j) = sw * scale[std::size_t(j)] * kernel(cone, nu, grid[i], lattice.points[std::size_t(j)], constant);
        }
        rhs(Eigen::Index(i)) = sw * f(grid[i]);
    });
    const double max_diag = A.topRows(rows).colwise().squaredNorm().maxCoeff();
    const double ridge = std::sqrt(options.regularization * max_diag);
    A.bottomRows(cols).setZero();
    A.bottomRows(cols).diagonal().setConstant(ridge);

    const Eigen::VectorXcd lambda = A.householderQr().solve(rhs);
    const double fnorm = rhs.head(rows).norm();
    const double res = (A.topRows(rows) * lambda - rhs.head(rows)).norm();

    AtomicCoefficients out;
    out.nu = nu;
    out.p = p;
    out.lambda.assign(lambda.data(), lambda.data() + cols);
    out.residual = fnorm > 0.0 ? res / fnorm : res;
    if (out.residual > options.tolerance) {
        throw IllConditioned("atomic fit residual " + std::to_string(out.residual) + " exceeds tolerance");
    }
    return out;
}

// ---------------------------------------------------------------------------

SubmeanReport verify_submean(const ConeDescriptor& cone, const std::function<double(const TubePoint&)>& chi,
                             const TubePoint& z0, double rho, double cap, const IntegralSpec& spec)
{
    const BallSpec ball{z0, rho};
    const IntegrationResult mass = ball_integral(cone, ball, [&](const TubePoint& z) { return cdouble(chi(z)); }, 0.0, spec);
    const IntegrationResult vol = ball_volume(cone, ball, 0.0, spec);
    SubmeanReport report;
    report.value_at_center = chi(z0);
    report.ball_average = mass.real() / vol.real();
    if (report.ball_average > 0.0) {
        report.fitted_constant = report.value_at_center / report.ball_average;
    } else {
        report.fitted_constant = report.value_at_center > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    report.holds = report.fitted_constant <= cap;
    return report;
}

} // namespace bergman
