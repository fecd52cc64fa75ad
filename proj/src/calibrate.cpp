#include <cmath>

#include "bergman/errors.hpp"
#include "bergman/quad.hpp"
#include "bergman/tube.hpp"

namespace bergman {

// The constant is fixed by reproducing f(w) = Delta^{-gamma}((w + ie)/i) at ie:
//   c = f(ie) / int Delta^{-nu-n/r}((ie - conj w)/i) f(w) Delta^{nu-n/r}(v) du dv.
CalibratedConstant calibrate_constant(const ConeDescriptor& cone, double nu, const IntegralSpec& spec)
{
    const double nr = cone.n_over_r();
    if (!(nu > nr - 1.0)) throw DomainError("kernel index must exceed n/r - 1");
    const double gamma = nu + 2.0 * nr;
    const TubePoint base = tube_base_point(cone);
    auto probe = [&](const TubePoint& w) { return delta_power(cone, kernel_argument(w, base), -gamma); };

    IntegralSpec s = spec;
    s.weight_exponent = nu - nr;
    s.require_tolerance = true;
    IntegrationResult r;
    try {
        r = integrate_tube(
            cone,
            [&](const TubePoint& w) {
                return delta_power(cone, kernel_argument(base, w), -(nu + nr)) * probe(w);
            },
            s);
    } catch (const BudgetExceeded& e) {
        throw CalibrationFailed(std::string("calibration integral did not reach tolerance: ") + e.what());
    }
    if (r.verdict == Verdict::Diverged) throw CalibrationFailed("calibration integral diverged");
    const cdouble target = probe(base);
    const cdouble c = target / r.value;
    const double rel_error = r.error_estimate / std::abs(r.value);
    if (std::abs(c.imag()) > 1e-6 * std::abs(c) || rel_error > spec.tolerance) {
        throw CalibrationFailed("calibration residual " + std::to_string(rel_error) + " exceeds tolerance");
    }
    return {nu, c.real(), rel_error};
}

} // namespace bergman
