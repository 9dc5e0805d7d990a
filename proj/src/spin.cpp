#include "omkit/spin.hpp"

#include "omkit/errors.hpp"

#include <cmath>

namespace omkit {

void SpinSusceptibility::validate() const
{
    require(std::isfinite(ground_state_d) && ground_state_d > 0.0, "spin: ground_state_d must be positive");
    require(std::isfinite(excited_state_factor) && excited_state_factor > 0.0,
            "spin: excited_state_factor must be positive");
    require(location_derating > 0.0 && location_derating <= 1.0, "spin: location_derating must lie in (0, 1]");
}

double single_phonon_coupling(double zero_point_strain, const SpinSusceptibility& spin)
{
    spin.validate();
    require(std::isfinite(zero_point_strain) && zero_point_strain >= 0.0,
            "spin: zero-point strain must be non-negative");
    return spin.ground_state_d * spin.location_derating * zero_point_strain;
}

double single_phonon_coupling(const MechanicalMode& mech, const SpinSusceptibility& spin)
{
    mech.validate();
    return single_phonon_coupling(zero_point_strain(mech), spin);
}

double driven_coupling(const MechanicalMode& mech, const SpinSusceptibility& spin, double amplitude)
{
    require(std::isfinite(amplitude) && amplitude >= 0.0, "spin: amplitude must be non-negative");
    return single_phonon_coupling(mech, spin) * (amplitude / zero_point_motion(mech));
}

double excited_state_coupling(const MechanicalMode& mech, const SpinSusceptibility& spin)
{
    return single_phonon_coupling(mech, spin) * spin.excited_state_factor;
}

} // namespace omkit
