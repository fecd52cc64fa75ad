#include "bergman/tube.hpp"

#include <cmath>
#include <numbers>

#include "bergman/errors.hpp"

namespace bergman {

ComplexVector TubePoint::z() const
{
    ComplexVector out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = cdouble(x(i), y(i));
    return out;
}

TubePoint make_tube_point(const ConeDescriptor& cone, RealVector x, RealVector y)
{
    if (x.size() != cone.dim() || y.size() != cone.dim()) throw DomainError("tube point has wrong dimension");
    if (!contains(cone, y)) throw DomainError("imaginary part is not inside the cone " + cone.name());
    return {std::move(x), std::move(y)};
}

TubePoint tube_base_point(const ConeDescriptor& cone)
{
    return {RealVector::Zero(cone.dim()), identity(cone)};
}

CalibratedConstant unit_constant(double nu) { return {nu, 1.0, 0.0}; }

double delta_of(const ConeDescriptor& cone, const TubePoint& z) { return determinant(cone, z.y); }

ComplexVector kernel_argument(const TubePoint& z, const TubePoint& w)
{
    ComplexVector out(z.x.size());
    for (Eigen::Index i = 0; i < z.x.size(); ++i) out(i) = cdouble(z.y(i) + w.y(i), -(z.x(i) - w.x(i)));
    return out;
}

namespace {

cdouble principal_log(cdouble d)
{
    if (d.imag() == 0.0 && d.real() <= 0.0) {
        throw BranchCutError("Delta(zeta) lies on the closed negative real axis");
    }
    return std::log(d);
}

} // namespace

cdouble log_delta(const ConeDescriptor& cone, const ComplexVector& zeta)
{
    switch (cone.kind()) {
    case ConeKind::Product: {
        cdouble total = 0.0;
        auto parts = split(cone, zeta);
        for (std::size_t i = 0; i < parts.size(); ++i) total += log_delta(cone.factors()[i], parts[i]);
        return total;
    }
    case ConeKind::SPD:
        if (cone.rank() >= 3) {
            const int r = cone.rank();
            SmallComplexMatrix m = spd_matrix(r, zeta);
            SmallMatrix a = m.real(), b = m.imag();
            Eigen::LLT<SmallMatrix> llt(a);
            if (llt.info() == Eigen::Success) {
                SmallMatrix Linv = llt.matrixL().solve(SmallMatrix::Identity(r, r));
                SmallMatrix rel = Linv * b * Linv.transpose();
                Eigen::SelfAdjointEigenSolver<SmallMatrix> es(SmallMatrix(0.5 * (rel + rel.transpose())));
                cdouble total = std::log(a.determinant());
                for (int j = 0; j < r; ++j) total += std::log(cdouble(1.0, es.eigenvalues()(j)));
                return total;
            }
        }
        return principal_log(complex_determinant(cone, zeta));
    default: return principal_log(complex_determinant(cone, zeta));
    }
}

cdouble delta_power(const ConeDescriptor& cone, const ComplexVector& zeta, cdouble s)
{
    if (s == cdouble(1.0, 0.0)) {
        // Still validate the branch domain so the contract is uniform.
        (void)log_delta(cone, zeta);
        return complex_determinant(cone, zeta);
    }
    return std::exp(s * log_delta(cone, zeta));
}

cdouble kernel(const ConeDescriptor& cone, double nu, const TubePoint& z, const TubePoint& w,
               const CalibratedConstant& constant)
{
    if (!(nu > cone.n_over_r() - 1.0)) throw DomainError("kernel index must exceed n/r - 1");
    return constant.value * delta_power(cone, kernel_argument(z, w), -(nu + cone.n_over_r()));
}

double half_plane_constant(double nu) { return std::pow(2.0, nu - 1.0) * nu / std::numbers::pi; }

namespace {

// 1-D central stencils: offsets and weights for d^k/dx^k with unit step.
struct Stencil {
    std::vector<int> offsets;
    std::vector<double> weights;
};

const Stencil& stencil(int order)
{
    static const std::vector<Stencil> table = {
        {{0}, {1.0}},
        {{-1, 1}, {-0.5, 0.5}},
        {{-1, 0, 1}, {1.0, -2.0, 1.0}},
        {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}},
        {{-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}},
    };
    if (order < 0 || order >= static_cast<int>(table.size())) {
        throw DomainError("derivative order " + std::to_string(order) + " not supported");
    }
    return table[order];
}

cdouble mixed_partial(const ComplexField& f, const RealVector& x, const std::vector<int>& alpha, double h)
{
    // Recursive tensor application, axis by axis.
    std::function<cdouble(RealVector&, std::size_t)> apply = [&](RealVector& p, std::size_t axis) -> cdouble {
        if (axis == alpha.size()) return f(p);
        if (alpha[axis] == 0) return apply(p, axis + 1);
        const Stencil& st = stencil(alpha[axis]);
        const double base = p(static_cast<Eigen::Index>(axis));
        cdouble total = 0.0;
        for (std::size_t k = 0; k < st.offsets.size(); ++k) {
            p(static_cast<Eigen::Index>(axis)) = base + st.offsets[k] * h;
            total += st.weights[k] * apply(p, axis + 1);
        }
        p(static_cast<Eigen::Index>(axis)) = base;
        return total / std::pow(h, alpha[axis]);
    };
    RealVector p = x;
    return apply(p, 0);
}

cdouble wave_at_step(const Polynomial& poly, const ComplexField& f, const RealVector& x, double h)
{
    cdouble total = 0.0;
    for (const auto& [alpha, c] : poly) {
        int degree = 0;
        for (int a : alpha) degree += a;
        // (1/i)^degree
        cdouble factor = std::pow(cdouble(0.0, -1.0), degree);
        total += c * factor * mixed_partial(f, x, alpha, h);
    }
    return total;
}

} // namespace

WaveResult wave_apply(const ConeDescriptor& cone, const ComplexField& f, const RealVector& x, double step)
{
    if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
    const Polynomial poly = determinant_polynomial(cone);
    const cdouble d0 = wave_at_step(poly, f, x, step);
    const cdouble d1 = wave_at_step(poly, f, x, step / 2);
    const cdouble d2 = wave_at_step(poly, f, x, step / 4);
    const cdouble r0 = (4.0 * d1 - d0) / 3.0;
    const cdouble r1 = (4.0 * d2 - d1) / 3.0;
    const cdouble r = (16.0 * r1 - r0) / 15.0;
    return {r, std::abs(r - r1)};
}

} // namespace bergman
