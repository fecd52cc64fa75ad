#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bergman/errors.hpp"
#include "bergman/quad.hpp"

using namespace bergman;

namespace {

constexpr double kPi = std::numbers::pi;

RealVector scalar(double v) { return (RealVector(1) << v).finished(); }

IntegralSpec quick_spec()
{
    IntegralSpec s;
    s.density = 6;
    s.tolerance = 1e-8;
    return s;
}

// Closed form of the 1-D base integral of (x^2 + y^2)^{-alpha/2}.
double half_line_I_alpha(double alpha, double y)
{
    return std::sqrt(kPi) * std::tgamma((alpha - 1) / 2) / std::tgamma(alpha / 2) * std::pow(y, 1 - alpha);
}

// Independent check of the closed form: substitution x = y tan(theta) turns the
// integral into y^{1-alpha} * int cos^{alpha-2}, evaluated by a fine midpoint rule.
double half_line_I_alpha_midpoint(double alpha, double y)
{
    const int N = 200000;
    double s = 0.0;
    for (int k = 0; k < N; ++k) {
        const double th = -kPi / 2 + (k + 0.5) * kPi / N;
        s += std::pow(std::cos(th), alpha - 2);
    }
    return s * kPi / N * std::pow(y, 1 - alpha);
}

} // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly")
{
    for (int n : {1, 2, 3, 5, 8, 16}) {
        const Rule1D r = gauss_legendre(n);
        double wsum = 0.0;
        for (double w : r.weights) wsum += w;
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
        for (int deg = 0; deg <= 2 * n - 1; ++deg) {
            double s = 0.0;
            for (std::size_t k = 0; k < r.size(); ++k) s += r.weights[k] * std::pow(r.nodes[k], deg);
            const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            CHECK(std::abs(s - exact) < 1e-13);
        }
    }
}

TEST_CASE("sphere rules have the right area")
{
    for (int k : {1, 2, 3, 4}) {
        const SphereRule s = sphere_rule(k, 16);
        double total = 0.0;
        for (double w : s.weights) total += w;
        const double area = 2 * std::pow(kPi, (k + 1) / 2.0) / std::tgamma((k + 1) / 2.0);
        CHECK(total == doctest::Approx(area).epsilon(1e-10));
        for (const auto& d : s.directions) CHECK(d.norm() == doctest::Approx(1.0));
    }
}

TEST_CASE("half-line cone integrals")
{
    const auto h = ConeDescriptor::half_line();
    IntegralSpec spec = quick_spec();
    const auto r = integrate_cone(h, [](const RealVector& y) { return cdouble(std::exp(-y(0)) * y(0)); }, spec);
    CHECK(r.real() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.verdict == Verdict::Converged);
    CHECK(integrate_cone(h, [](const RealVector& y) { return cdouble(std::exp(-y(0)) * y(0)); }, IntegralSpec{}).converged);
    CHECK(r.error_estimate >= 0.0);
    const auto t = I_alpha_beta(h, -3.0, 0.0, scalar(2.0), spec);
    CHECK(t.real() == doctest::Approx(0.125).epsilon(1e-6));
    CHECK(I_alpha_beta(h, -3.0, -1.0, scalar(2.0), IntegralSpec{}).verdict == Verdict::Diverged);
}

TEST_CASE("base integrals")
{
    IntegralSpec spec = quick_spec();
    spec.ladder = {16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384};
    const auto a = integrate_base(1, [](const RealVector& x) { return cdouble(1.0 / (1 + x(0) * x(0))); }, spec);
    CHECK(a.real() == doctest::Approx(kPi).epsilon(1e-6));
    const auto b = integrate_base(1, [](const RealVector& x) { return cdouble(std::exp(-x(0) * x(0))); }, spec);
    CHECK(b.real() == doctest::Approx(std::sqrt(kPi)).epsilon(1e-6));
    // The closed form is itself checked against an independent rule first.
    CHECK(half_line_I_alpha(3.0, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(half_line_I_alpha_midpoint(3.0, 1.0) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(half_line_I_alpha_midpoint(4.5, 0.7) == doctest::Approx(half_line_I_alpha(4.5, 0.7)).epsilon(1e-8));
    const auto h = ConeDescriptor::half_line();
    CHECK(I_alpha(h, 3.0, scalar(1.0), spec).real() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(I_alpha(h, 2.5, scalar(0.4), spec).real() == doctest::Approx(half_line_I_alpha(2.5, 0.4)).epsilon(1e-4));
}

TEST_CASE("linearity and scaling substitution")
{
    // A single truncation keeps the rule linear; ladder extrapolation is not.
    IntegralSpec spec = quick_spec();
    spec.ladder.clear();
    spec.cutoff = 256;
    for (const auto& c : {ConeDescriptor::half_line(), ConeDescriptor::lorentz(3), ConeDescriptor::spd(2)}) {
        const RealVector e = identity(c);
        ConeIntegrand f = [&](const RealVector& y) { return cdouble(std::exp(-inner(y, e)) * std::sqrt(determinant(c, y))); };
        ConeIntegrand g = [&](const RealVector& y) { return cdouble(0, 1) * std::exp(-2 * inner(y, e)) * y(0); };
        const cdouble F = integrate_cone(c, f, spec).value, G = integrate_cone(c, g, spec).value;
        const cdouble L = integrate_cone(c, [&](const RealVector& y) { return 2.0 * f(y) - 3.0 * g(y); }, spec).value;
        CHECK(std::abs(L - (2.0 * F - 3.0 * G)) <= 1e-9 * std::abs(L));
        const double lam = 2.0;
        const IntegralSpec ladder = quick_spec();
        const cdouble S = integrate_cone(c, [&](const RealVector& y) { return f(RealVector(lam * y)); }, ladder).value;
        const cdouble F1 = integrate_cone(c, f, ladder).value;
        CHECK(std::abs(S - std::pow(lam, -c.dim()) * F1) <= 1e-4 * std::abs(S));
    }
}

TEST_CASE("Lorentz cone volume with exponential weight by two methods")
{
    const auto lor = ConeDescriptor::lorentz(3);
    ConeIntegrand f = [](const RealVector& y) { return cdouble(std::exp(-y(0))); };
    IntegralSpec spec = quick_spec();
    const auto t = integrate_cone(lor, f, spec);
    IntegralSpec mc = spec;
    mc.method = Method::MonteCarloImportance;
    mc.mc_samples = 100000;
    const auto m = integrate_cone(lor, f, mc);
    // Exact: Gamma(3) * 2 pi / 2.
    CHECK(t.real() == doctest::Approx(2 * kPi).epsilon(1e-5));
    CHECK(std::abs(m.real() / t.real() - 1.0) <= 0.01);
}

TEST_CASE("tensor and Monte Carlo agree on an integrand corpus")
{
    IntegralSpec spec;
    spec.ladder = {16, 32, 64, 128, 256, 512};
    spec.density = 6;
    IntegralSpec mc = spec;
    mc.method = Method::MonteCarloImportance;
    mc.mc_samples = 100000;
    for (const auto& c : {ConeDescriptor::half_line(), ConeDescriptor::lorentz(3), ConeDescriptor::spd(2)}) {
        const RealVector e = identity(c);
        int agree = 0;
        for (int k = 0; k < 20; ++k) {
            const double a = 1.0 + 0.05 * k, b = 0.1 * (k % 7), q = 0.2 * (k % 3);
            ConeIntegrand f = [&](const RealVector& y) {
                return cdouble(std::exp(-a * inner(y, e)) * std::pow(determinant(c, y), b) * (1.0 + q * y(0) * y(0)));
            };
            IntegralSpec m = mc;
            m.seed = 1000 + k;
            const auto t = integrate_cone(c, f, spec);
            const auto s = integrate_cone(c, f, m);
            const double sigma = std::hypot(t.error_estimate, s.error_estimate);
            if (std::abs(t.real() - s.real()) <= 3.0 * sigma) ++agree;
        }
        CHECK(agree == 20);
    }
}

TEST_CASE("divergence probe")
{
    const std::vector<double> radii = {16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    CHECK(divergence_probe([](double R) { return std::log1p(R); }, radii).verdict == Verdict::Diverged);
    CHECK(divergence_probe([](double R) { return 1.0 - std::exp(-R); }, radii).verdict == Verdict::Converged);
    CHECK(divergence_probe([](double R) { return R; }, radii).verdict == Verdict::Diverged);
    CHECK(divergence_probe([](double R) { return 1.0 - std::pow(R, -0.3); }, radii).verdict == Verdict::Converged);
    const auto short_ladder = divergence_probe(std::vector<double>{1, 2, 3}, {1, 2, 4});
    CHECK(short_ladder.verdict == Verdict::Undecided);
    CHECK_THROWS_AS(divergence_probe(std::vector<double>{1, 2, 3, 4}, {1, 2, 2, 4}), DomainError);
    // Odd rungs carry an extra error of alternating size: the rung-to-rung
    // ratios are useless, every other rung still decays like 2^-R.
    {
        std::vector<double> vals;
        for (std::size_t i = 0; i < radii.size(); ++i) {
            const double tail = std::pow(2.0, -static_cast<double>(i));
            vals.push_back(1.0 - tail + (i % 2 ? 0.3 : 0.0) * tail);
        }
        const auto a = divergence_probe(vals, radii);
        CHECK(a.verdict == Verdict::Converged);
        CHECK(a.extrapolated == doctest::Approx(1.0).epsilon(1e-3));
        // Even on an alternating ladder, a logarithmic climb stays divergent.
        std::vector<double> logv;
        for (std::size_t i = 0; i < radii.size(); ++i) logv.push_back(std::log(radii[i]) + (i % 2 ? 0.2 : 0.0));
        CHECK(divergence_probe(logv, radii).verdict != Verdict::Converged);
    }
    // Slow convergence just above the I_alpha boundary on the half line.
    const auto h = ConeDescriptor::half_line();
    IntegralSpec spec;
    spec.early_stop = false;
    spec.ladder = {16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384};
    const auto r = I_alpha(h, 1.3, scalar(1.0), spec);
    CHECK(r.verdict == Verdict::Converged);
    CHECK(r.real() == doctest::Approx(half_line_I_alpha(1.3, 1.0)).epsilon(1e-2));
}

TEST_CASE("exponent fits")
{
    const auto lor = ConeDescriptor::lorentz(3);
    const auto grid = log_grid(0.1, 10.0, 9);
    const auto fit = detect_exponent([&](double l) { return std::pow(determinant(lor, RealVector(l * identity(lor))), 1.5); }, grid);
    CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK_THROWS_AS(detect_exponent([](double) { return 1.0; }, {1, 2, 4, 8, 16}), DomainError);
    CHECK_THROWS_AS(detect_exponent([](double) { return 1.0; }, {1, 10}), DomainError);
    CHECK_THROWS_AS(detect_exponent([](double l) { return l - 1.0; }, grid), NonPositiveValue);

    const auto h = ConeDescriptor::half_line();
    IntegralSpec spec;
    const double alpha = 3.0;
    const auto ia = detect_exponent([&](double l) { return I_alpha(h, alpha, scalar(l), spec).real(); }, grid);
    CHECK(ia.slope == doctest::Approx(1 - alpha).epsilon(0.02));
    CHECK(ia.r_squared >= 0.999);
    const auto iab = detect_exponent([&](double l) { return I_alpha_beta(h, -3.0, 0.5, scalar(l), spec).real(); }, grid);
    CHECK(iab.slope == doctest::Approx(-3.0 + 0.5 + 1).epsilon(0.02));
}

TEST_CASE("Forelli-Rudin integrals on the half line")
{
    const auto h = ConeDescriptor::half_line();
    IntegralSpec spec;
    const auto grid = log_grid(0.1, 10.0, 7);
    auto pt = [&](double l) { return make_tube_point(h, scalar(0.0), scalar(l)); };
    const auto fr = detect_exponent([&](double l) { return fr_kernel_integral(h, 2.0, 1.0, pt(l), spec).real(); }, grid);
    CHECK(fr.slope == doctest::Approx(-1.0).epsilon(0.02));
    CHECK(fr.r_squared >= 0.999);
    CHECK(fr_kernel_integral(h, 2.0, 2.0, pt(1.0), spec).verdict == Verdict::Diverged);
    CHECK(fr_kernel_integral(h, 2.0, -1.0, pt(1.0), spec).verdict == Verdict::Diverged);
    const auto e5 = detect_exponent([&](double l) { return fr_estimate_5(h, 0.0, 3.0, pt(l), spec).real(); }, grid);
    CHECK(e5.slope == doctest::Approx(-1.0).epsilon(0.02));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ratio = e5.values[i] / std::pow(grid[i], -1.0);
        CHECK(ratio == doctest::Approx(e5.values[0] / std::pow(grid[0], -1.0)).epsilon(0.03));
    }
    CHECK(fr_estimate_5(h, -1.0, 3.0, pt(1.0), spec).verdict == Verdict::Diverged);
}

TEST_CASE("budget is enforced")
{
    IntegralSpec spec;
    spec.node_budget = 10;
    CHECK_THROWS_AS(integrate_cone(ConeDescriptor::lorentz(3), [](const RealVector&) { return cdouble(1.0); }, spec),
                    BudgetExceeded);
}
