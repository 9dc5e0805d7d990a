#include "omkit/backaction.hpp"

#include "omkit/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>

namespace omkit {

namespace {

void validate_all(const OperatingPoint& op, const OptomechanicalCoupling& g, const OpticalMode& mode,
                  const MechanicalMode& mech)
{
    op.validate();
    g.validate();
    mode.validate();
    mech.validate();
}

// Threshold expression with no precondition on the ordering of the rates, so
// root searches may step outside the physical region.
double threshold_formula(double gamma_i, double gamma_t, double omega_o, const MechanicalMode& mech,
                         const OptomechanicalCoupling& g)
{
    const double wm = mech.omega_m();
    const double gom = g.g_om(mech);
    const double half_t = 0.5 * gamma_t;
    return mech.m_eff * omega_o / (2.0 * gom * gom) * (mech.gamma_m() * gamma_i / (wm * gamma_t)) * half_t * half_t
           * (4.0 * wm * wm + half_t * half_t);
}

} // namespace

double OptomechanicalCoupling::g_om(const MechanicalMode& mech) const
{
    return g0 / zero_point_motion(mech);
}

void OptomechanicalCoupling::validate() const
{
    require(std::isfinite(g0) && g0 > 0.0, "coupling: g0 must be positive");
}

OperatingPoint OperatingPoint::from_dropped_power(double detuning, double dropped_power, const OpticalMode& mode)
{
    return {detuning, intracavity_photons(dropped_power, mode), dropped_power};
}

void OperatingPoint::validate() const
{
    require(std::isfinite(detuning), "operating point: detuning must be finite");
    require(std::isfinite(photon_number) && photon_number >= 0.0,
            "operating point: photon number must be non-negative");
    require(std::isfinite(dropped_power) && dropped_power >= 0.0,
            "operating point: dropped power must be non-negative");
}

void OperatingPoint::validate_consistency(const OpticalMode& mode, double rel_tol) const
{
    validate();
    const double expected = intracavity_photons(dropped_power, mode);
    const double scale = std::max(std::abs(expected), std::abs(photon_number));
    require(std::abs(expected - photon_number) <= rel_tol * scale,
            "operating point: photon number inconsistent with dropped power");
}

double damping_shift(const OperatingPoint& op, const OptomechanicalCoupling& g, const OpticalMode& mode,
                     const MechanicalMode& mech)
{
    validate_all(op, g, mode, mech);
    const double go = mode.gamma_loaded();
    const double q = 0.25 * go * go;
    const double wm = mech.omega_m();
    const double red = op.detuning + wm;
    const double blue = op.detuning - wm;
    return g.g0 * g.g0 * op.photon_number * (go / (q + red * red) - go / (q + blue * blue));
}

double optical_spring_shift(const OperatingPoint& op, const OptomechanicalCoupling& g, const OpticalMode& mode,
                            const MechanicalMode& mech)
{
    validate_all(op, g, mode, mech);
    const double go = mode.gamma_loaded();
    const double q = 0.25 * go * go;
    const double wm = mech.omega_m();
    const double minus = op.detuning - wm;
    const double plus = op.detuning + wm;
    return g.g0 * g.g0 * op.photon_number * (minus / (q + minus * minus) + plus / (q + plus * plus));
}

double frequency_shift(const OperatingPoint& op, const OptomechanicalCoupling& g, const OpticalMode& mode,
                       const MechanicalMode& mech, double alpha)
{
    require(std::isfinite(alpha), "frequency_shift: alpha must be finite");
    return optical_spring_shift(op, g, mode, mech) + alpha * op.dropped_power;
}

double cooperativity(const OperatingPoint& op, const OptomechanicalCoupling& g, const OpticalMode& mode,
                     const MechanicalMode& mech)
{
    validate_all(op, g, mode, mech);
    return op.photon_number * g.g0 * g.g0 / (mode.gamma_loaded() * mech.gamma_m());
}

double threshold_power(const OpticalMode& mode, const MechanicalMode& mech, const OptomechanicalCoupling& g)
{
    mode.validate();
    mech.validate();
    g.validate();
    return threshold_formula(mode.gamma_intrinsic(), mode.gamma_loaded(), mode.omega_o(), mech, g);
}

ImpliedIntrinsicQ intrinsic_q_for_threshold(double target_power, const OpticalMode& mode,
                                            const MechanicalMode& mech, const OptomechanicalCoupling& g)
{
    require(target_power > 0.0, "intrinsic_q_for_threshold: target power must be positive");
    require(mode.lambda_o > 0.0 && mode.q_loaded > 0.0, "intrinsic_q_for_threshold: need lambda_o and q_loaded");
    mech.validate();
    g.validate();

    const double omega_o = mode.omega_o();
    const double gamma_t = mode.gamma_loaded();
    // Solve in log Q_i; the residual is monotone decreasing in Q_i.
    auto residual = [&](double log_q) {
        return std::log(threshold_formula(omega_o / std::exp(log_q), gamma_t, omega_o, mech, g) / target_power);
    };
    const double lo = std::log(1e2);
    const double hi = std::log(1e10);
    if (residual(lo) < 0.0 || residual(hi) > 0.0) {
        throw NonConvergence("intrinsic_q_for_threshold: target power not reachable for Q_i in [1e2, 1e10]");
    }
    std::uintmax_t iterations = 200;
    const auto r = boost::math::tools::toms748_solve(residual, lo, hi, boost::math::tools::eps_tolerance<double>(50),
                                                     iterations);
    const double q_i = std::exp(0.5 * (r.first + r.second));
    return {q_i, q_i >= mode.q_loaded};
}

SelfOscillation is_self_oscillating(const OperatingPoint& op, const OptomechanicalCoupling& g,
                                    const OpticalMode& mode, const MechanicalMode& mech)
{
    const double margin = mech.gamma_m() + damping_shift(op, g, mode, mech);
    return {margin <= 0.0, margin};
}

} // namespace omkit
