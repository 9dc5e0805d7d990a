#pragma once

#include "omkit/optics.hpp"

#include <optional>
#include <vector>

namespace omkit {

// Lumped thermal response of the cavity. The thermo-optic coefficient `a`
// folds expansion and index change together with their mode overlap factors.
struct ThermalModel {
    double a = 0.0;                   // 1/K
    double conductance = 0.0;         // W/K, cavity mode volume to surroundings
    double absorbed_fraction = 0.0;   // gamma_abs / gamma_tot
    double softening_alpha = 0.0;     // rad/s per W of dropped power

    void validate() const;
};

struct ThermoOpticInputs {
    double expansion = 1.0e-6;        // 1/K
    double dn_dT = 1.0e-5;            // 1/K
    double refractive_index = 2.4;
    double eta_strain = 1.0;
    double eta_thermal = 1.0;
};

// a = eta_eps * eps + eta_T * (1/n) dn/dT. Diamond room-temperature defaults.
[[nodiscard]] double thermo_optic_coefficient(const ThermoOpticInputs& in = {});

[[nodiscard]] double shifted_wavelength(double delta_T, double lambda_o, double a);

// Inverse of shifted_wavelength.
[[nodiscard]] double temperature_rise_from_shift(double shifted_lambda, double lambda_o, double a);

// Heat in (absorbed fraction of P_d) balances heat out (K dT).
[[nodiscard]] double equilibrium_temperature(double dropped_power, const ThermalModel& model);

// Thermal lineshape parameter in wavelength units:
// d = lambda_o (a / K) (gamma_abs / gamma_tot) P_i, so that the resonance
// sits at lambda_o + d (1 - T).
[[nodiscard]] double thermal_shift_parameter(double lambda_o, const ThermalModel& model, double input_power);

struct SweepRequest {
    std::vector<double> lambda_s;     // m, monotone in scan direction
    double input_power = 0.0;         // W
    ScanDirection scan_direction = ScanDirection::up;
};

struct BistableSweep {
    SweepTrace trace;
    std::vector<double> thermal_shift;   // m, resonance displacement u at each sample
};

// Quasi-static thermally-broadened sweep. At each sample solves
// u = d (1 - T(lambda_s - lambda_o - u)) and follows the root nearest to the
// previous sample's shift, which produces scan-direction hysteresis.
// Throws NonConvergence if a root cannot be refined.
[[nodiscard]] BistableSweep bistable_sweep_detailed(const SweepRequest& request, const OpticalMode& mode,
                                                    double d_param);
[[nodiscard]] SweepTrace bistable_sweep(const SweepRequest& request, const OpticalMode& mode, double d_param);

// Residual of the thermal fixed point, g(u) = u - d (1 - T).
[[nodiscard]] double thermal_fixed_point_residual(double u, double lambda_s, const OpticalMode& mode,
                                                  double d_param);

struct LineshapeParameters {
    double lambda_o = 0.0;   // m, cold-cavity resonance
    double d = 0.0;          // m
};

// Per-sample detuning omega_s - omega_o' (rad/s) with the thermal shift
// d (1 - T) removed.
[[nodiscard]] std::vector<double> extract_detuning(const SweepTrace& trace, const LineshapeParameters& fitted);

// Midpoint wavelength of the largest transmission step between adjacent
// samples (in wavelength order). Empty for traces with fewer than two samples.
[[nodiscard]] std::optional<double> jump_wavelength(const SweepTrace& trace);

} // namespace omkit
