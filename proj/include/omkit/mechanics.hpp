#pragma once

#include <span>

namespace omkit {

// Default strain per unit displacement for the radial breathing mode; peak
// zero-point strain 3e-10 over a 0.32 fm zero-point amplitude.
inline constexpr double kDefaultStrainPerMeter = 9.4e5;   // 1/m

struct MechanicalMode {
    double f_m = 0.0;                                   // Hz
    double q_m = 0.0;
    double m_eff = 0.0;                                 // kg
    double strain_per_meter = kDefaultStrainPerMeter;   // 1/m

    [[nodiscard]] double omega_m() const;
    [[nodiscard]] double gamma_m() const;   // rad/s

    void validate() const;
};

// x_zpm = sqrt(hbar / (2 m_eff omega_m)).
[[nodiscard]] double zero_point_motion(const MechanicalMode& mode);

// Peak zero-point strain, strain_per_meter * x_zpm.
[[nodiscard]] double zero_point_strain(const MechanicalMode& mode);

// Equipartition amplitude sqrt(k_B T / (m_eff omega_m^2)).
[[nodiscard]] double thermal_amplitude(const MechanicalMode& mode, double temperature);

// Q = (sum_j 1/Q_j)^-1 over independent loss channels.
[[nodiscard]] double combine_quality_factors(std::span<const double> partials);

// Bose-Einstein occupancy at the mode frequency.
[[nodiscard]] double thermal_occupancy(const MechanicalMode& mode, double temperature);

[[nodiscard]] double qf_product(const MechanicalMode& mode);

// Q_m / n_th: number of coherent oscillations before a thermal phonon enters.
// Values above one satisfy the room-temperature coherence criterion.
[[nodiscard]] double coherence_ratio(const MechanicalMode& mode, double temperature);

} // namespace omkit
