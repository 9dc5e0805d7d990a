#pragma once

#include <complex>
#include <string_view>
#include <vector>

namespace omkit {

// Fiber-coupled whispering-gallery mode. Quality factors are dimensionless;
// all decay rates derived from them are angular (rad/s, energy decay).
struct OpticalMode {
    double lambda_o = 0.0;            // m
    double q_intrinsic = 0.0;
    double q_loaded = 0.0;
    double doublet_splitting = 0.0;   // rad/s, separation of the two dips; 0 = singlet

    [[nodiscard]] double omega_o() const;
    [[nodiscard]] double gamma_intrinsic() const;
    [[nodiscard]] double gamma_loaded() const;
    [[nodiscard]] double gamma_external() const;
    [[nodiscard]] bool is_doublet() const { return doublet_splitting > 0.0; }

    // Throws ValidationError naming the first violated invariant.
    void validate() const;
};

enum class ScanDirection { up, down };

[[nodiscard]] std::string_view to_string(ScanDirection dir);
[[nodiscard]] ScanDirection scan_direction_from_string(std::string_view s);

// Wavelength scan of normalized fiber transmission, samples in scan order.
struct SweepTrace {
    std::vector<double> lambda_s;       // m
    std::vector<double> transmission;   // normalized, [0, 1]
    double input_power = 0.0;           // W
    ScanDirection scan_direction = ScanDirection::up;

    [[nodiscard]] std::size_t size() const { return lambda_s.size(); }
    void validate() const;
};

// Lorentzian cavity response 1 / (i delta + gamma_loaded / 2).
[[nodiscard]] std::complex<double> cavity_response(double delta, const OpticalMode& mode);

// Complex forward transmission amplitude t(detuning).
[[nodiscard]] std::complex<double> transmission_amplitude(double detuning, const OpticalMode& mode);

// |t|^2. Detuning is omega_s - omega_o in rad/s.
[[nodiscard]] double transmission(double detuning, const OpticalMode& mode);

// Power fraction coupled back into the counter-propagating fiber mode.
// Identically zero for a singlet.
[[nodiscard]] double reflection(double detuning, const OpticalMode& mode);

[[nodiscard]] double dropped_power(double transmission, double input_power);

// Steady-state photon number from dropped power: P_d = hbar omega_o gamma_i N.
[[nodiscard]] double intracavity_photons(double dropped_power, const OpticalMode& mode);

// Photon number obtained directly from the driven cavity field amplitudes
// (summed over both standing-wave modes for a doublet).
[[nodiscard]] double intracavity_photons_from_field(double detuning, double input_power,
                                                    const OpticalMode& mode);

// Angular detuning for a laser sitting delta_lambda above the resonance
// wavelength. Longer wavelength means red detuning, hence the sign.
[[nodiscard]] double detuning_from_wavelength_offset(double delta_lambda, double lambda_o);
[[nodiscard]] double wavelength_offset_from_detuning(double detuning, double lambda_o);

// Loaded linewidth expressed in wavelength (m).
[[nodiscard]] double loaded_linewidth_wavelength(const OpticalMode& mode);

} // namespace omkit
