#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "bergman/errors.hpp"
#include "bergman/ops.hpp"

using namespace bergman;

namespace {

RealVector scalar(double v) { return (RealVector(1) << v).finished(); }

TubePoint hp(double x, double y) { return TubePoint{scalar(x), scalar(y)}; }

const ConeDescriptor H = ConeDescriptor::half_line();

TubeIntegrand probe(double gamma, const TubePoint& base = hp(0, 1))
{
    return single_probe(H, gamma, base).integrand();
}

TubeIntegrand abs_probe(double gamma, const TubePoint& base = hp(0, 1))
{
    const TubeIntegrand f = probe(gamma, base);
    return [f](const TubePoint& z) { return cdouble(std::abs(f(z))); };
}

IntegralSpec single(int density, double cutoff)
{
    IntegralSpec s;
    s.density = density;
    s.cutoff = cutoff;
    s.ladder = {};
    return s;
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb, double whole,
               double eps, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = f(0.5 * (a + m)), rm = f(0.5 * (m + b));
    const double left = (m - a) / 6 * (fa + 4 * lm + fm), right = (b - m) / 6 * (fm + 4 * rm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15 * eps) return left + right + (left + right - whole) / 15;
    return simpson(f, a, m, fa, lm, fm, left, eps / 2, depth - 1) + simpson(f, m, b, fm, rm, fb, right, eps / 2, depth - 1);
}

double adaptive(const std::function<double(double)>& f, double a, double b, double eps)
{
    const double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), eps, 30);
}

// Half-plane integral of g(u, v) du dv in coordinates around c:
// u = x_c + y_c tan(phi), v = y_c t/(1 - t).
double plane_integral(const std::function<double(double, double)>& g, const TubePoint& c, double eps)
{
    const double xc = c.x(0), yc = c.y(0);
    const auto inner = [&](double t) {
        const double v = yc * t / (1 - t), dv = yc / ((1 - t) * (1 - t));
        const auto h = [&](double phi) {
            const double sec = 1 / std::cos(phi);
            return g(xc + yc * std::tan(phi), v) * yc * sec * sec;
        };
        const double lim = 0.5 * std::numbers::pi - 1e-9;
        return adaptive(h, -lim, lim, eps) * dv;
    };
    return adaptive(inner, 1e-12, 1 - 1e-9, eps);
}

OperatorNormOptions coarse_options()
{
    OperatorNormOptions o;
    o.inner.density = 3;
    o.inner.cutoff = 128;
    o.inner.ladder = {16, 32, 64, 128};
    o.outer.density = 3;
    o.outer.ladder = {8, 16, 32, 64};
    return o;
}

} // namespace

TEST_CASE("projection reproduces kernel-power probes")
{
    const double nu = 2.0;
    const CalibratedConstant c{nu, half_plane_constant(nu), 0.0};
    const TubeIntegrand f = probe(nu + 2.0);
    IntegralSpec s;
    s.density = 6;
    s.ladder = {64, 128, 256, 512, 1024};
    for (const TubePoint& z : {hp(0.3, 0.7), hp(3.0, 0.01), hp(-2.0, 5.0)}) {
        const IntegrationResult r = bergman_project(H, f, nu, z, c, s);
        CHECK(std::abs(r.value - f(z)) <= 1e-3 * std::abs(f(z)));
    }
    CHECK_THROWS_AS(bergman_project(H, f, -0.5, hp(0, 1), c, s), DomainError);
}

TEST_CASE("T+ agrees with an independent planar integral")
{
    const double alpha = 0.5, beta = 1.0, gamma = alpha + beta + 1.0;
    const TubePoint z = hp(1.0, 0.2);
    const TubePoint base = hp(0.5, 1.5);
    const TubeIntegrand f = abs_probe(3.0, base);
    const IntegrationResult r = T_operator(H, f, alpha, beta, gamma, z, true, unit_constant(gamma), single(6, 1024));
    const auto g = [&](double u, double v) {
        const double d2 = (u - z.x(0)) * (u - z.x(0)) + (v + z.y(0)) * (v + z.y(0));
        const double p2 = (u - base.x(0)) * (u - base.x(0)) + (v + base.y(0)) * (v + base.y(0));
        return std::pow(d2, -0.5 * (gamma + 1)) * std::pow(p2, -1.5) * std::pow(v, beta);
    };
    const double oracle = std::pow(z.y(0), alpha) * plane_integral(g, z, 1e-11);
    CHECK(r.value.real() == doctest::Approx(oracle).epsilon(1e-3));
    CHECK(std::abs(r.value.imag()) < 1e-12);
    CHECK_THROWS_AS(T_operator(H, f, 0, 0, -1.5, z, true, unit_constant(1), single(3, 64)), DomainError);
}

TEST_CASE("operator outputs satisfy Cauchy-Riemann")
{
    const TubeIntegrand f = probe(3.0);
    const double beta = 1.0, gamma = 2.0;
    const IntegralSpec s = single(8, 4096);
    const auto Tf = [&](const TubePoint& z) {
        return T_operator(H, f, 0.0, beta, gamma, z, false, unit_constant(gamma), s).value;
    };
    CHECK(cauchy_riemann_residual(Tf, hp(0.4, 0.8), 1e-3) <= 1e-4);

    const TubeIntegrand g = probe(4.0, hp(0.5, 1.0));
    const ProductFunction F = [&](const std::vector<TubePoint>& w) { return f(w[0]) * g(w[1]); };
    const IntegralSpec ps = single(3, 64);
    const std::vector<double> betas{2.0, 3.0};
    const TubePoint z1 = hp(0.2, 0.9), z2 = hp(-0.5, 1.3);
    const auto in_first = [&](const TubePoint& z) { return product_T(H, F, betas, {z, z2}, ps).value; };
    const auto in_second = [&](const TubePoint& z) { return product_T(H, F, betas, {z1, z}, ps).value; };
    CHECK(cauchy_riemann_residual(in_first, z1, 1e-3) <= 1e-4);
    CHECK(cauchy_riemann_residual(in_second, z2, 1e-3) <= 1e-4);
}

TEST_CASE("product T factors on separable inputs")
{
    const TubeIntegrand f = probe(3.0), g = probe(4.0, hp(0.5, 1.0));
    const ProductFunction F = [&](const std::vector<TubePoint>& w) { return f(w[0]) * g(w[1]); };
    const IntegralSpec s = single(3, 64);
    const std::vector<double> betas{2.0, 3.0};
    const std::vector<TubePoint> z{hp(0.2, 0.9), hp(-0.5, 1.3)};
    const cdouble joint = product_T(H, F, betas, z, s).value;
    const cdouble split = product_T_separable(H, {f, g}, betas, z, s).value;
    CHECK(std::abs(joint - split) <= 1e-6 * std::abs(split));

    // m = 1 is the single-tube operator with matching exponents.
    const cdouble one = product_T(H, [&](const std::vector<TubePoint>& w) { return f(w[0]); }, {2.0}, {z[0]},
                                  single(6, 1024)).value;
    const cdouble T = T_operator(H, f, 0.0, 1.0, 2.0, z[0], false, unit_constant(2.0), single(6, 1024)).value;
    CHECK(std::abs(one - T) <= 1e-3 * std::abs(T));
}

TEST_CASE("R operator single factor against a planar integral")
{
    const std::vector<double> x{1.0}, y{1.0};
    const TubePoint w = hp(0.3, 0.6);
    const TubeIntegrand g = abs_probe(3.0);
    const IntegrationResult r = R_operator_separable(H, {g}, x, y, w, single(6, 1024));
    // Delta(v)^{-2 + y} int g(z) v^x ((w - conj z)/i)^{-(x + y)} dz
    const auto part = [&](bool imag) {
        return plane_integral(
            [&](double u, double v) {
                const cdouble zeta = cdouble(w.y(0) + v, -(w.x(0) - u));
                const cdouble k = std::pow(zeta, -(x[0] + y[0]));
                const double gv = std::pow(u * u + (v + 1) * (v + 1), -1.5) * std::pow(v, x[0]);
                return gv * (imag ? k.imag() : k.real());
            },
            w, 1e-11);
    };
    const double pre = std::pow(w.y(0), -2.0 + y[0]);
    const cdouble oracle = pre * cdouble(part(false), part(true));
    CHECK(std::abs(r.value - oracle) <= 1e-3 * std::abs(oracle));

    const ProductFunction G = [&](const std::vector<TubePoint>& z) { return g(z[0]); };
    IntegralSpec s;
    s.density = 6;
    s.ladder = {64, 128, 256, 512, 1024};
    const IntegrationResult joint = R_operator(H, G, x, y, w, s);
    CHECK(std::abs(joint.value - oracle) <= 2e-3 * std::abs(oracle));

    CHECK_THROWS_AS(R_operator_separable(H, {g}, {-1.0}, {2.0}, w, single(3, 64)), DomainError);
    CHECK_THROWS_AS(R_operator_separable(H, {g}, {0.5}, {-0.5}, w, single(3, 64)), DomainError);
}

TEST_CASE("weighted R inequality conditions")
{
    CHECK(theorem2_conditions(H, {{1, 1}, {1, 1}, {0, 0.5}}));
    // m s_j + 1 > m(2n/r - y_j) - (m - 1) 2n/r reads s_j > 1/2 - y_j here.
    CHECK_FALSE(theorem2_conditions(H, {{1, 1}, {0.25, 1}, {0.2, 0.5}}));
    CHECK_FALSE(theorem2_conditions(H, {{1, 1}, {1, 1}, {-1, 0.5}}));
    CHECK_FALSE(theorem2_conditions(H, {{-1, 1}, {2, 1}, {0, 0}}));
    CHECK_FALSE(theorem2_conditions(H, {{1}, {1, 1}, {0}}));
    const Theorem2Report bad = theorem2_check(H, {{1, 1}, {1, 1}, {-2, 0}}, {}, {1}, 0.2, single(3, 64), single(3, 64));
    CHECK_FALSE(bad.conditions_hold);
    CHECK_FALSE(bad.holds);
}

TEST_CASE("weighted R inequality constant is dilation stable")
{
    IntegralSpec outer;
    outer.density = 3;
    outer.ladder = {8, 16, 32, 64};
    const Theorem2Report r = theorem2_check(H, {{1, 1}, {1, 1}, {0, 0.5}}, {{abs_probe(3.0), abs_probe(4.0)}}, {1, 2},
                                            0.2, single(3, 128), outer);
    REQUIRE(r.conditions_hold);
    REQUIRE(r.samples.size() == 1);
    CHECK(r.samples[0].lhs > 0.0);
    CHECK(r.samples[0].rhs > 0.0);
    CHECK(r.fitted_constant == doctest::Approx(r.samples[0].ratio));
    CHECK(r.stability <= 0.2);
    CHECK(r.holds);
}

TEST_CASE("operator norm protocol")
{
    const OperatorNormOptions o = coarse_options();
    const MixedNormParams p2{2, 2, 1.0};

    SUBCASE("bounded inside the admissible range")
    {
        const OperatorSpec op = OperatorSpec::theorem_a(H, 0.0, 1.0, true);
        const OperatorNormReport r = estimate_operator_norm(H, op, p2, p2, {abs_probe(3.0)}, {}, o);
        CHECK_FALSE(r.blowup_flag);
        CHECK(r.lower_bound > 0.1);
        CHECK(r.lower_bound < 10.0);
    }
    SUBCASE("weight beta <= -1 makes the operator integral diverge")
    {
        const OperatorSpec op = OperatorSpec::theorem_a(H, 0.5, -1.2, true);
        const OperatorNormReport r = estimate_operator_norm(H, op, p2, p2, {abs_probe(3.0)}, {}, o);
        CHECK(r.blowup_flag);
        CHECK(r.reason == "operator integral diverges");
    }
    SUBCASE("alpha + beta <= -1 blows up at the boundary")
    {
        const OperatorSpec op = OperatorSpec::theorem_a(H, -1.0, -0.25, true);
        const MixedNormParams p{2, 2, 0.75};
        const OperatorNormReport r = estimate_operator_norm(H, op, p, p, {abs_probe(3.0)}, {}, o);
        CHECK(r.blowup_flag);
        CHECK(r.reason == "output norm diverges");
    }
    SUBCASE("projection is an isometry on its range")
    {
        const double nu = 2.0;
        const OperatorSpec op = OperatorSpec::projection(nu, CalibratedConstant{nu, half_plane_constant(nu), 0.0});
        const MixedNormParams p{2, 2, nu, WeightConvention::Measure};
        const OperatorNormReport r = estimate_operator_norm(H, op, p, p, {probe(4.0)}, {}, o);
        CHECK_FALSE(r.blowup_flag);
        CHECK(r.lower_bound == doctest::Approx(1.0).epsilon(2e-2));
    }
}

TEST_CASE("boundary profiles and monotone growth")
{
    const TubeIntegrand f = boundary_profile(H, probe(3.0), -0.5);
    const TubePoint z = hp(0.3, 0.25);
    CHECK(f(z).real() == doctest::Approx(std::pow(0.25, -0.5) * std::abs(probe(3.0)(z))));
    CHECK(f(z).imag() == 0.0);
}

TEST_CASE("product decomposition on common-base probes")
{
    IntegralSpec s;
    s.density = 6;
    s.ladder = {16, 32, 64, 128, 256, 512, 1024};
    const CalibratedConstant c{5.0, half_plane_constant(5.0), 0.0};

    DecompositionParams one;
    one.m = 1;
    one.alphas = {0.0};
    const DecompositionReport r1 = decomposition_check(H, one, c, s);
    CHECK(r1.probe_exponent == doctest::Approx(6.0));
    CHECK(r1.hypothesis_residual <= 1e-3);
    CHECK(r1.ratio == doctest::Approx(1.0).epsilon(1e-3));

    DecompositionParams two;
    two.alphas = {0.0, 0.0};
    const DecompositionReport r2 = decomposition_check(H, two, c, s);
    CHECK(r2.probe_exponent == doctest::Approx(3.0));
    CHECK(r2.alpha == doctest::Approx(2.0));
    CHECK(r2.hypothesis_residual <= 1e-3);
    CHECK(r2.dilated_ratios.size() == 4);
    CHECK(r2.dilation_spread <= 0.03);
    CHECK(r2.lhs_verdict == Verdict::Converged);
    CHECK(r2.rhs_verdict == Verdict::Converged);

    // alpha_2 beyond the finiteness range of the factor norm.
    DecompositionParams bad = two;
    bad.alphas = {0.0, 1.5};
    CHECK(decomposition_check(H, bad, c, s).rhs_verdict == Verdict::Diverged);

    CHECK_THROWS_AS(decomposition_check(H, two, CalibratedConstant{5.0, 1.1 * c.value, 0.0}, s), HypothesisFailed);
    CHECK_THROWS_AS(decomposition_check(H, two, CalibratedConstant{4.0, c.value, 0.0}, s), DomainError);
}

TEST_CASE("index relation follows from dilation homogeneity")
{
    // ||f_l^2||_{A^1_a} / ||f_l||_{A^1_0}^2 is flat in l only when a = 2.
    IntegralSpec s;
    s.density = 6;
    s.ladder = {16, 32, 64, 128, 256, 512, 1024};
    const TubeIntegrand f = probe(3.0);
    const auto ratio = [&](double a, double l) {
        const TubeIntegrand fl = [&](const TubePoint& z) { return f(z.scaled(l)); };
        const TubeIntegrand sq = [&](const TubePoint& z) { return fl(z) * fl(z); };
        const double lhs = mixed_norm(H, sq, {1, 1, a}, s).value;
        const double rhs = mixed_norm(H, fl, {1, 1, 0.0}, s).value;
        return lhs / (rhs * rhs);
    };
    CHECK(ratio(2.0, 8.0) == doctest::Approx(ratio(2.0, 1.0)).epsilon(1e-3));
    // Off the relation the ratio scales like l^{-(a - 2)}.
    CHECK(ratio(2.5, 8.0) / ratio(2.5, 1.0) == doctest::Approx(std::pow(8.0, -0.5)).epsilon(1e-2));
}
