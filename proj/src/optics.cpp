#include "omkit/optics.hpp"

#include "omkit/constants.hpp"
#include "omkit/errors.hpp"

#include <cmath>
#include <string>

namespace omkit {

double OpticalMode::omega_o() const { return kTwoPi * kSpeedOfLight / lambda_o; }
double OpticalMode::gamma_intrinsic() const { return omega_o() / q_intrinsic; }
double OpticalMode::gamma_loaded() const { return omega_o() / q_loaded; }
double OpticalMode::gamma_external() const { return gamma_loaded() - gamma_intrinsic(); }

void OpticalMode::validate() const
{
    require(std::isfinite(lambda_o) && lambda_o > 0.0, "optics: lambda_o must be positive");
    require(std::isfinite(q_intrinsic) && q_intrinsic > 0.0, "optics: q_intrinsic must be positive");
    require(std::isfinite(q_loaded) && q_loaded > 0.0, "optics: q_loaded must be positive");
    require(q_loaded <= q_intrinsic, "optics: q_loaded must not exceed q_intrinsic");
    require(std::isfinite(doublet_splitting) && doublet_splitting >= 0.0,
            "optics: doublet_splitting must be non-negative");
}

std::string_view to_string(ScanDirection dir)
{
    return dir == ScanDirection::up ? "up" : "down";
}

ScanDirection scan_direction_from_string(std::string_view s)
{
    if (s == "up") {
        return ScanDirection::up;
    }
    if (s == "down") {
        return ScanDirection::down;
    }
    throw ValidationError("scan direction must be 'up' or 'down', got '" + std::string(s) + "'");
}

void SweepTrace::validate() const
{
    require(lambda_s.size() == transmission.size(), "sweep: lambda and transmission lengths differ");
    require(!lambda_s.empty(), "sweep: trace is empty");
    require(std::isfinite(input_power) && input_power >= 0.0, "sweep: input power must be non-negative");
    const double sign = scan_direction == ScanDirection::up ? 1.0 : -1.0;
    for (std::size_t i = 0; i < lambda_s.size(); ++i) {
        require(std::isfinite(lambda_s[i]), "sweep: non-finite wavelength");
        require(transmission[i] >= 0.0 && transmission[i] <= 1.0,
                "sweep: transmission outside [0, 1] at sample " + std::to_string(i));
        if (i > 0) {
            require(sign * (lambda_s[i] - lambda_s[i - 1]) > 0.0,
                    "sweep: wavelengths not strictly monotone in scan direction at sample "
                        + std::to_string(i));
        }
    }
}

std::complex<double> cavity_response(double delta, const OpticalMode& mode)
{
    return 1.0 / std::complex<double>(0.5 * mode.gamma_loaded(), delta);
}

std::complex<double> transmission_amplitude(double detuning, const OpticalMode& mode)
{
    require(std::isfinite(detuning), "transmission: detuning must be finite");
    const double gex = mode.gamma_external();
    if (!mode.is_doublet()) {
        return 1.0 - gex * cavity_response(detuning, mode);
    }
    const double beta = 0.5 * mode.doublet_splitting;
    return 1.0
           - 0.5 * gex * (cavity_response(detuning - beta, mode) + cavity_response(detuning + beta, mode));
}

double transmission(double detuning, const OpticalMode& mode)
{
    mode.validate();
    return std::norm(transmission_amplitude(detuning, mode));
}

double reflection(double detuning, const OpticalMode& mode)
{
    mode.validate();
    require(std::isfinite(detuning), "reflection: detuning must be finite");
    if (!mode.is_doublet()) {
        return 0.0;
    }
    const double beta = 0.5 * mode.doublet_splitting;
    const auto r = 0.5 * mode.gamma_external()
                   * (cavity_response(detuning - beta, mode) - cavity_response(detuning + beta, mode));
    return std::norm(r);
}

double dropped_power(double transmission, double input_power)
{
    require(input_power >= 0.0, "dropped_power: input power must be non-negative");
    require(transmission >= 0.0 && transmission <= 1.0, "dropped_power: transmission outside [0, 1]");
    return (1.0 - transmission) * input_power;
}

double intracavity_photons(double dropped_power, const OpticalMode& mode)
{
    mode.validate();
    require(dropped_power >= 0.0, "intracavity_photons: dropped power must be non-negative");
    const double gi = mode.gamma_intrinsic();
    require(gi > 0.0, "intracavity_photons: intrinsic decay rate is zero");
    return dropped_power / (kHbar * mode.omega_o() * gi);
}

double intracavity_photons_from_field(double detuning, double input_power, const OpticalMode& mode)
{
    mode.validate();
    require(input_power >= 0.0, "intracavity_photons_from_field: input power must be non-negative");
    // |s_in|^2 in photons per second.
    const double flux = input_power / (kHbar * mode.omega_o());
    const double gex = mode.gamma_external();
    if (!mode.is_doublet()) {
        return gex * std::norm(cavity_response(detuning, mode)) * flux;
    }
    const double beta = 0.5 * mode.doublet_splitting;
    return 0.5 * gex
           * (std::norm(cavity_response(detuning - beta, mode)) + std::norm(cavity_response(detuning + beta, mode)))
           * flux;
}

double detuning_from_wavelength_offset(double delta_lambda, double lambda_o)
{
    return -kTwoPi * kSpeedOfLight * delta_lambda / (lambda_o * lambda_o);
}

double wavelength_offset_from_detuning(double detuning, double lambda_o)
{
    return -detuning * lambda_o * lambda_o / (kTwoPi * kSpeedOfLight);
}

double loaded_linewidth_wavelength(const OpticalMode& mode)
{
    return mode.lambda_o / mode.q_loaded;
}

} // namespace omkit
