#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bergman/errors.hpp"
#include "bergman/quad.hpp"
#include "bergman/tube.hpp"

using namespace bergman;

namespace {

std::vector<ConeDescriptor> corpus()
{
    return {ConeDescriptor::half_line(), ConeDescriptor::lorentz(3), ConeDescriptor::lorentz(4),
            ConeDescriptor::spd(2), ConeDescriptor::spd(3),
            ConeDescriptor::product({ConeDescriptor::half_line(), ConeDescriptor::half_line()})};
}

RealVector random_cone_point(const ConeDescriptor& cone, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0), s(-3.0, 3.0);
    for (;;) {
        RealVector v = identity(cone);
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += 0.9 * u(rng);
        if (contains(cone, v)) return std::exp(s(rng)) * v;
    }
}

TubePoint random_tube_point(const ConeDescriptor& cone, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 3.0);
    RealVector x(cone.dim());
    for (int i = 0; i < cone.dim(); ++i) x(i) = g(rng);
    return make_tube_point(cone, x, random_cone_point(cone, rng));
}

double rel(cdouble a, cdouble b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Half-plane oracle with measure v^{nu-1} du dv: reproducing at z = i gives
// c * 2^{-nu-1} = c^2 J with J = sqrt(pi) Gamma(nu+1/2)/Gamma(nu+1) * B(nu, nu+1).
double half_plane_oracle(double nu)
{
    const double inner = std::sqrt(std::numbers::pi) * std::tgamma(nu + 0.5) / std::tgamma(nu + 1.0);
    const double beta = std::tgamma(nu) * std::tgamma(nu + 1.0) / std::tgamma(2.0 * nu + 1.0);
    return std::pow(2.0, -nu - 1.0) / (inner * beta);
}

} // namespace

TEST_CASE("delta_of examples")
{
    const auto h = ConeDescriptor::half_line();
    CHECK(delta_of(h, tube_base_point(h)) == 1.0);
    const auto lor = ConeDescriptor::lorentz(3);
    TubePoint z = tube_base_point(lor);
    z.x << 5, -2, 7;
    CHECK(delta_of(lor, z) == doctest::Approx(1.0));
    RealVector y(3);
    y << 2, 1, 0;
    CHECK(delta_of(lor, make_tube_point(lor, RealVector::Zero(3), y)) == doctest::Approx(3.0));
    y << 1, 2, 0;
    CHECK_THROWS_AS(make_tube_point(lor, RealVector::Zero(3), y), DomainError);
}

TEST_CASE("delta_power examples and laws")
{
    const auto h = ConeDescriptor::half_line();
    const TubePoint i = tube_base_point(h);
    CHECK(rel(delta_power(h, kernel_argument(i, i), -3.0), 0.125) < 1e-15);
    std::mt19937_64 rng(21);
    for (const auto& c : corpus()) {
        const ComplexVector e = identity(c).cast<cdouble>();
        CHECK(rel(delta_power(c, e, cdouble(-2.7, 0.4)), 1.0) < 1e-14);
        for (int trial = 0; trial < 50; ++trial) {
            const TubePoint z = random_tube_point(c, rng), w = random_tube_point(c, rng);
            const ComplexVector zeta = kernel_argument(z, w);
            const cdouble s1(1.3, 0.2), s2(-2.1, 0.5);
            CHECK(rel(delta_power(c, zeta, s1 + s2), delta_power(c, zeta, s1) * delta_power(c, zeta, s2)) < 1e-12);
            CHECK(rel(delta_power(c, zeta, 1.0), complex_determinant(c, zeta)) < 1e-12);
            const RealVector y = random_cone_point(c, rng);
            CHECK(rel(delta_power(c, y.cast<cdouble>(), -1.7), std::pow(determinant(c, y), -1.7)) < 1e-12);
            // |Delta((x + iy)/i)| >= Delta(y).
            ComplexVector a(c.dim());
            for (int k = 0; k < c.dim(); ++k) a(k) = cdouble(w.y(k), -z.x(k));
            CHECK(std::abs(complex_determinant(c, a)) >= determinant(c, w.y) * (1 - 1e-12));
        }
    }
    ComplexVector neg(1);
    neg << -2.0;
    CHECK_THROWS_AS(delta_power(h, neg, 0.5), BranchCutError);
}

TEST_CASE("delta_power is continuous along a right half-plane path")
{
    const auto lor = ConeDescriptor::lorentz(3);
    TubePoint w = tube_base_point(lor);
    cdouble prev = 0.0;
    for (int k = 0; k <= 4000; ++k) {
        const double t = -20.0 + 40.0 * k / 4000.0;
        TubePoint z = tube_base_point(lor);
        z.x << t, 0.5 * t, 0.0;
        const cdouble v = delta_power(lor, kernel_argument(z, w), cdouble(-2.5, 0.0));
        if (k > 0) CHECK(std::abs(v - prev) <= 0.05 * std::max(std::abs(v), std::abs(prev)) + 1e-12);
        prev = v;
    }
}

TEST_CASE("kernel domain is branch safe")
{
    std::mt19937_64 rng(99);
    for (const auto& c : corpus()) {
        int violations = 0;
        for (int trial = 0; trial < 10000; ++trial) {
            const TubePoint z = random_tube_point(c, rng), w = random_tube_point(c, rng);
            const cdouble d = complex_determinant(c, kernel_argument(z, w));
            if (d.imag() == 0.0 && d.real() <= 0.0) ++violations;
            if (c.kind() != ConeKind::SPD || c.rank() < 3) {
                if (d.real() <= 0.0 && std::abs(d.imag()) < 1e-300) ++violations;
            }
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("kernel symmetries")
{
    std::mt19937_64 rng(31);
    for (const auto& c : corpus()) {
        const double nu = c.n_over_r() + 0.5;
        const CalibratedConstant k = unit_constant(nu);
        for (int trial = 0; trial < 50; ++trial) {
            const TubePoint z = random_tube_point(c, rng), w = random_tube_point(c, rng);
            const cdouble b = kernel(c, nu, z, w, k);
            CHECK(rel(b, std::conj(kernel(c, nu, w, z, k))) < 1e-10);
            RealVector a(c.dim());
            for (int i = 0; i < c.dim(); ++i) a(i) = 0.37 * (i + 1) - 1.0;
            CHECK(rel(kernel(c, nu, z.translated(a), w.translated(a), k), b) < 1e-10);
            const double l = 2.3;
            const double expect = std::pow(l, -c.rank() * (nu + c.n_over_r()));
            CHECK(rel(kernel(c, nu, z.scaled(l), w.scaled(l), k), expect * b) < 1e-10);
        }
        CHECK_THROWS_AS(kernel(c, c.n_over_r() - 1.0, tube_base_point(c), tube_base_point(c), k), DomainError);
    }
    const auto h = ConeDescriptor::half_line();
    const CalibratedConstant k{2.0, 1.7, 0.0};
    CHECK(rel(kernel(h, 2.0, tube_base_point(h), tube_base_point(h), k), 1.7 / 8.0) < 1e-14);
}

TEST_CASE("half-plane constant agrees with the independent oracle")
{
    for (double nu : {0.5, 1.0, 2.0, 3.5}) CHECK(half_plane_constant(nu) == doctest::Approx(half_plane_oracle(nu)).epsilon(1e-12));
    CHECK(half_plane_constant(2.0) == doctest::Approx(4.0 / std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("calibration on the half line")
{
    const auto h = ConeDescriptor::half_line();
    IntegralSpec spec;
    spec.tolerance = 1e-6;
    const CalibratedConstant c = calibrate_constant(h, 2.0, spec);
    CHECK(c.value == doctest::Approx(half_plane_oracle(2.0)).epsilon(5e-3));
    CHECK(std::abs(c.value / half_plane_oracle(2.0) - 1.0) < 1e-5);
    CHECK(c.calibration_error <= spec.tolerance);

    IntegralSpec fine = spec;
    fine.density *= 2;
    const CalibratedConstant c2 = calibrate_constant(h, 2.0, fine);
    CHECK(std::abs(c2.value / c.value - 1.0) < 1e-3);

    // Reproduction at fresh points for a probe that was not used to calibrate.
    const double nu = 2.0;
    const TubePoint w0 = make_tube_point(h, (RealVector(1) << 0.3).finished(), (RealVector(1) << 0.8).finished());
    auto f = [&](const TubePoint& w) { return delta_power(h, kernel_argument(w, w0), -5.0); };
    IntegralSpec s = spec;
    s.weight_exponent = nu - 1.0;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(std::log(0.3), std::log(3.0));
    for (int k = 0; k < 5; ++k) {
        const TubePoint z = make_tube_point(h, (RealVector(1) << ux(rng)).finished(),
                                            (RealVector(1) << std::exp(uy(rng))).finished());
        const IntegrationResult r =
            integrate_tube(h, [&](const TubePoint& w) { return kernel(h, nu, z, w, c) * f(w); }, s);
        CHECK(rel(r.value, f(z)) <= 1e-3);
    }
    CHECK_THROWS_AS(calibrate_constant(h, -0.5, spec), DomainError);
}

TEST_CASE("wave operator")
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    for (const auto& c : {ConeDescriptor::half_line(), ConeDescriptor::lorentz(3), ConeDescriptor::spd(2),
                          ConeDescriptor::lorentz(4)}) {
        const int n = c.dim();
        for (int trial = 0; trial < 5; ++trial) {
            ComplexVector zeta(n);
            RealVector x(n);
            for (int i = 0; i < n; ++i) {
                zeta(i) = cdouble(g(rng), 0.3 * g(rng));
                x(i) = g(rng);
            }
            ComplexField f = [&](const RealVector& p) {
                cdouble s = 0.0;
                for (int i = 0; i < n; ++i) s += p(i) * zeta(i);
                return std::exp(cdouble(0, 1) * s);
            };
            const WaveResult w = wave_apply(c, f, x);
            const cdouble expect = complex_determinant(c, zeta) * f(x);
            CHECK(rel(w.value, expect) <= 1e-6);
            ComplexField one = [](const RealVector&) { return cdouble(2.5, 0.0); };
            CHECK(std::abs(wave_apply(c, one, x).value) < 1e-8);
            ComplexField g2 = [&](const RealVector& p) { return std::exp(-p.squaredNorm() / 4.0) + cdouble(0, 0); };
            ComplexField lin = [&](const RealVector& p) { return 2.0 * f(p) - 3.0 * g2(p); };
            const cdouble a = wave_apply(c, lin, x).value;
            const cdouble b = 2.0 * w.value - 3.0 * wave_apply(c, g2, x).value;
            CHECK(std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b)));
        }
    }
    CHECK_THROWS_AS(wave_apply(ConeDescriptor::half_line(), [](const RealVector&) { return cdouble(1.0); },
                               RealVector::Zero(1), 0.0),
                    DomainError);
}
