#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "bergman/errors.hpp"
#include "bergman/quad.hpp"

namespace bergman {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

Rule1D compute_gauss_legendre(int n)
{
    Rule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = x;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        if (n == 1) {
            rule.nodes[0] = 0.0;
            rule.weights[0] = 2.0;
            return rule;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

} // namespace

Rule1D gauss_legendre(int n)
{
    if (n < 1) throw DomainError("Gauss-Legendre order must be positive");
    static std::mutex mutex;
    static std::map<int, Rule1D> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

Rule1D composite_gauss(double a, double b, int density)
{
    if (!(b > a)) throw DomainError("empty integration interval");
    const Rule1D base = gauss_legendre(density);
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) - 1e-12)));
    const double width = (b - a) / panels;
    Rule1D rule;
    rule.nodes.reserve(static_cast<std::size_t>(panels) * density);
    rule.weights.reserve(rule.nodes.capacity());
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        for (std::size_t k = 0; k < base.size(); ++k) {
            rule.nodes.push_back(lo + 0.5 * width * (base.nodes[k] + 1.0));
            rule.weights.push_back(0.5 * width * base.weights[k]);
        }
    }
    return rule;
}

Rule1D radial_rule(double R, int density)
{
    if (!(R > 1.0)) throw DomainError("radial cutoff must exceed 1");
    const double L = std::log(R);
    Rule1D rule = composite_gauss(-L, L, density);
    for (std::size_t k = 0; k < rule.size(); ++k) {
        const double y = std::exp(rule.nodes[k]);
        rule.nodes[k] = y;
        rule.weights[k] *= y;
    }
    return rule;
}

Rule1D line_rule(double R, double scale, int density)
{
    if (!(R > 0.0) || !(scale > 0.0)) throw DomainError("line cutoff and scale must be positive");
    const double T = std::asinh(R / scale);
    Rule1D rule = composite_gauss(-T, T, density);
    for (std::size_t k = 0; k < rule.size(); ++k) {
        const double t = rule.nodes[k];
        rule.nodes[k] = scale * std::sinh(t);
        rule.weights[k] *= scale * std::cosh(t);
    }
    return rule;
}

Rule1D periodic_rule(int m)
{
    if (m < 1) throw DomainError("periodic rule needs at least one node");
    Rule1D rule;
    for (int k = 0; k < m; ++k) {
        rule.nodes.push_back(2.0 * kPi * k / m);
        rule.weights.push_back(2.0 * kPi / m);
    }
    return rule;
}

SphereRule sphere_rule(int k, int angular)
{
    if (k < 0) throw DomainError("sphere dimension must be non-negative");
    SphereRule out;
    if (k == 0) {
        // S^0 = {-1, +1}.
        for (double s : {1.0, -1.0}) {
            RealVector d(1);
            d(0) = s;
            out.directions.push_back(d);
            out.weights.push_back(1.0);
        }
        return out;
    }
    const Rule1D phi = periodic_rule(angular);
    const Rule1D theta_base = gauss_legendre(std::max(2, angular));
    // Recursive product over polar angles theta_1..theta_{k-1} and azimuth phi.
    std::vector<double> angles(k);
    std::function<void(int, double)> rec = [&](int level, double weight) {
        if (level == k - 1) {
            for (std::size_t j = 0; j < phi.size(); ++j) {
                angles[level] = phi.nodes[j];
                RealVector d(k + 1);
                double s = 1.0;
                for (int i = 0; i < k - 1; ++i) {
                    d(i) = s * std::cos(angles[i]);
                    s *= std::sin(angles[i]);
                }
                d(k - 1) = s * std::cos(angles[k - 1]);
                d(k) = s * std::sin(angles[k - 1]);
                out.directions.push_back(d);
                out.weights.push_back(weight * phi.weights[j]);
            }
            return;
        }
        const int power = k - 1 - level;
        for (std::size_t j = 0; j < theta_base.size(); ++j) {
            const double th = 0.5 * kPi * (theta_base.nodes[j] + 1.0);
            angles[level] = th;
            rec(level + 1, weight * 0.5 * kPi * theta_base.weights[j] * std::pow(std::sin(th), power));
        }
    };
    rec(0, 1.0);
    return out;
}

namespace {

// Factor-level chart: list of 1-D rules and a map from chart coordinates to
// (cone point, Jacobian).
struct Chart {
    std::vector<Rule1D> axes;
    std::function<double(const std::vector<double>&, RealVector&)> map;
};

NodeSet tensorize(const Chart& chart, int dim)
{
    NodeSet set;
    std::vector<double> coords(chart.axes.size());
    std::function<void(std::size_t, double)> rec = [&](std::size_t axis, double weight) {
        if (axis == chart.axes.size()) {
            RealVector y(dim);
            const double jac = chart.map(coords, y);
            set.points.push_back(y);
            set.weights.push_back(weight * jac);
            return;
        }
        const Rule1D& r = chart.axes[axis];
        for (std::size_t k = 0; k < r.size(); ++k) {
            coords[axis] = r.nodes[k];
            rec(axis + 1, weight * r.weights[k]);
        }
    };
    rec(0, 1.0);
    return set;
}

NodeSet lorentz_nodes(int n, double R, int density, const IntegralSpec& spec)
{
    const Rule1D t = radial_rule(R, density);
    const Rule1D u = composite_gauss(0.0, std::log(R), density);
    const SphereRule sphere = sphere_rule(n - 2, spec.angular);
    NodeSet set;
    set.points.reserve(t.size() * u.size() * sphere.directions.size());
    for (std::size_t a = 0; a < t.size(); ++a) {
        for (std::size_t b = 0; b < u.size(); ++b) {
            const double ch = std::cosh(u.nodes[b]), sh = std::sinh(u.nodes[b]);
            const double jac = std::pow(t.nodes[a], n - 1) * std::pow(sh, n - 2);
            for (std::size_t c = 0; c < sphere.directions.size(); ++c) {
                RealVector y(n);
                y(0) = t.nodes[a] * ch;
                y.tail(n - 1) = t.nodes[a] * sh * sphere.directions[c];
                set.points.push_back(y);
                set.weights.push_back(t.weights[a] * u.weights[b] * sphere.weights[c] * jac);
            }
        }
    }
    return set;
}

NodeSet spd_nodes(int r, double R, int density, const IntegralSpec& spec)
{
    Chart chart;
    const Rule1D diag = radial_rule(R, density);
    const Rule1D off = line_rule(R, spec.line_scale, density);
    for (int i = 0; i < r; ++i) chart.axes.push_back(diag);
    for (int i = 0; i < r * (r - 1) / 2; ++i) chart.axes.push_back(off);
    chart.map = [r](const std::vector<double>& c, RealVector& y) {
        SmallMatrix L = SmallMatrix::Zero(r, r);
        double jac = std::pow(2.0, r) * std::pow(kSqrt2, r * (r - 1) / 2);
        for (int i = 0; i < r; ++i) {
            L(i, i) = c[i];
            jac *= std::pow(c[i], r - i);
        }
        int k = r;
        for (int i = 1; i < r; ++i) {
            for (int j = 0; j < i; ++j) L(i, j) = c[k++];
        }
        y = spd_coords(SmallMatrix(L * L.transpose()));
        return jac;
    };
    return tensorize(chart, r * (r + 1) / 2);
}

} // namespace

NodeSet cone_nodes(const ConeDescriptor& cone, double R, int density, const IntegralSpec& spec)
{
    switch (cone.kind()) {
    case ConeKind::HalfLine: {
        const Rule1D rule = radial_rule(R, density);
        NodeSet set;
        for (std::size_t k = 0; k < rule.size(); ++k) {
            RealVector y(1);
            y(0) = rule.nodes[k];
            set.points.push_back(y);
            set.weights.push_back(rule.weights[k]);
        }
        return set;
    }
    case ConeKind::Lorentz: return lorentz_nodes(cone.dim(), R, density, spec);
    case ConeKind::SPD: return spd_nodes(cone.rank(), R, density, spec);
    case ConeKind::Product: {
        NodeSet set;
        set.points.push_back(RealVector(0));
        set.weights.push_back(1.0);
        for (const auto& f : cone.factors()) {
            const NodeSet part = cone_nodes(f, R, density, spec);
            NodeSet next;
            for (std::size_t a = 0; a < set.size(); ++a) {
                for (std::size_t b = 0; b < part.size(); ++b) {
                    RealVector y(set.points[a].size() + part.points[b].size());
                    y << set.points[a], part.points[b];
                    next.points.push_back(y);
                    next.weights.push_back(set.weights[a] * part.weights[b]);
                }
            }
            set = std::move(next);
        }
        return set;
    }
    }
    throw DomainError("unknown cone kind");
}

long long cone_node_count(const ConeDescriptor& cone, double R, int density, const IntegralSpec& spec)
{
    const long long radial = static_cast<long long>(radial_rule(R, density).size());
    switch (cone.kind()) {
    case ConeKind::HalfLine: return radial;
    case ConeKind::Lorentz: {
        const long long u = static_cast<long long>(composite_gauss(0.0, std::log(R), density).size());
        long long sphere = cone.dim() == 3 ? spec.angular : 1;
        if (cone.dim() > 3) {
            sphere = spec.angular;
            for (int i = 0; i < cone.dim() - 3; ++i) sphere *= std::max(2, spec.angular);
        }
        return radial * u * sphere;
    }
    case ConeKind::SPD: {
        const int r = cone.rank();
        const long long off = static_cast<long long>(line_rule(R, spec.line_scale, density).size());
        long long total = 1;
        for (int i = 0; i < r; ++i) total *= radial;
        for (int i = 0; i < r * (r - 1) / 2; ++i) total *= off;
        return total;
    }
    case ConeKind::Product: {
        long long total = 1;
        for (const auto& f : cone.factors()) total *= cone_node_count(f, R, density, spec);
        return total;
    }
    }
    return 0;
}

NodeSet base_nodes(int n, double R, int density, const IntegralSpec& spec)
{
    const Rule1D rule = line_rule(R, spec.line_scale, density);
    NodeSet set;
    std::vector<std::size_t> idx(n, 0);
    const std::size_t m = rule.size();
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= m;
    set.points.reserve(total);
    set.weights.reserve(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        RealVector x(n);
        double w = 1.0;
        for (int i = n - 1; i >= 0; --i) {
            const std::size_t k = rem % m;
            rem /= m;
            x(i) = rule.nodes[k];
            w *= rule.weights[k];
        }
        set.points.push_back(x);
        set.weights.push_back(w);
    }
    return set;
}

} // namespace bergman
