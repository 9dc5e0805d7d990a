#include "omkit/mechanics.hpp"

#include "omkit/constants.hpp"
#include "omkit/errors.hpp"

#include <cmath>

namespace omkit {

double MechanicalMode::omega_m() const { return kTwoPi * f_m; }
double MechanicalMode::gamma_m() const { return omega_m() / q_m; }

void MechanicalMode::validate() const
{
    require(std::isfinite(f_m) && f_m > 0.0, "mechanics: f_m must be positive");
    require(std::isfinite(q_m) && q_m > 0.0, "mechanics: q_m must be positive");
    require(std::isfinite(m_eff) && m_eff > 0.0, "mechanics: m_eff must be positive");
    require(std::isfinite(strain_per_meter) && strain_per_meter >= 0.0,
            "mechanics: strain_per_meter must be non-negative");
}

double zero_point_motion(const MechanicalMode& mode)
{
    mode.validate();
    return std::sqrt(kHbar / (2.0 * mode.m_eff * mode.omega_m()));
}

double zero_point_strain(const MechanicalMode& mode)
{
    return mode.strain_per_meter * zero_point_motion(mode);
}

double thermal_amplitude(const MechanicalMode& mode, double temperature)
{
    mode.validate();
    require(temperature >= 0.0, "thermal_amplitude: temperature must be non-negative");
    const double w = mode.omega_m();
    return std::sqrt(kBoltzmann * temperature / (mode.m_eff * w * w));
}

double combine_quality_factors(std::span<const double> partials)
{
    require(!partials.empty(), "combine_quality_factors: no partial quality factors given");
    double inverse = 0.0;
    for (const double q : partials) {
        require(std::isfinite(q) && q > 0.0, "combine_quality_factors: partials must be positive");
        inverse += 1.0 / q;
    }
    return 1.0 / inverse;
}

double thermal_occupancy(const MechanicalMode& mode, double temperature)
{
    mode.validate();
    require(temperature >= 0.0, "thermal_occupancy: temperature must be non-negative");
    if (temperature == 0.0) {
        return 0.0;
    }
    const double x = kHbar * mode.omega_m() / (kBoltzmann * temperature);
    return 1.0 / std::expm1(x);
}

double qf_product(const MechanicalMode& mode)
{
    mode.validate();
    return mode.q_m * mode.f_m;
}

double coherence_ratio(const MechanicalMode& mode, double temperature)
{
    return mode.q_m / thermal_occupancy(mode, temperature);
}

} // namespace omkit
