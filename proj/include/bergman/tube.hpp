#pragma once

#include <functional>

#include "bergman/cone.hpp"
#include "bergman/integral_spec.hpp"

namespace bergman {

/// z = x + i y with y strictly inside the cone.
struct TubePoint {
    RealVector x;
    RealVector y;

    ComplexVector z() const;
    TubePoint translated(const RealVector& a) const { return {x + a, y}; }
    TubePoint scaled(double lambda) const { return {lambda * x, lambda * y}; }
};

/// Validating constructor; throws DomainError when y is not in the open cone.
TubePoint make_tube_point(const ConeDescriptor& cone, RealVector x, RealVector y);
/// i*e, the base point of the tube.
TubePoint tube_base_point(const ConeDescriptor& cone);

/// Weighted Bergman kernel constant c_nu: B_nu(z,w) = c_nu Delta^{-nu-n/r}((z - conj w)/i).
struct CalibratedConstant {
    double nu = 0.0;
    double value = 1.0;
    double calibration_error = 0.0;
};

/// Constant 1; the bare kernel power.
CalibratedConstant unit_constant(double nu);

/// delta(z) = Delta(Im z).
double delta_of(const ConeDescriptor& cone, const TubePoint& z);

/// (z - conj w)/i = (y + v) - i (x - u).
ComplexVector kernel_argument(const TubePoint& z, const TubePoint& w);

/// Log Delta(zeta). Principal logarithm, except on SPD(r >= 3) factors with
/// Re zeta positive definite where the analytic continuation from the cone
/// is used; products add factor logarithms.
cdouble log_delta(const ConeDescriptor& cone, const ComplexVector& zeta);

/// exp(s Log Delta(zeta)); BranchCutError when Delta(zeta) lies on (-inf, 0].
cdouble delta_power(const ConeDescriptor& cone, const ComplexVector& zeta, cdouble s);

/// B_nu(z, w); requires nu > n/r - 1.
cdouble kernel(const ConeDescriptor& cone, double nu, const TubePoint& z, const TubePoint& w,
               const CalibratedConstant& constant);

/// Fixes c_nu by requiring the reproducing identity for the probe
/// Delta^{-gamma}((z + ie)/i) at z = ie.
CalibratedConstant calibrate_constant(const ConeDescriptor& cone, double nu, const IntegralSpec& spec);

/// Half-plane closed form c_nu = 2^{nu-1} nu / pi.
double half_plane_constant(double nu);

struct WaveResult {
    cdouble value;
    double error_estimate;
};

using ComplexField = std::function<cdouble(const RealVector&)>;

/// Delta((1/i) d/dx) applied to f at x by tensorized central differences with
/// two Richardson levels (steps h, h/2, h/4).
WaveResult wave_apply(const ConeDescriptor& cone, const ComplexField& f, const RealVector& x,
                      double step = 1e-2);

} // namespace bergman
