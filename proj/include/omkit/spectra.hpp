#pragma once

#include "omkit/backaction.hpp"
#include "omkit/mechanics.hpp"
#include "omkit/optics.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace omkit {

// Photodetected power spectrum, frequency in Hz, psd in detector units per Hz.
struct SpectrumTrace {
    std::vector<double> freq_hz;
    std::vector<double> psd;
    double input_power = 0.0;   // W
    double detuning = 0.0;      // rad/s
    double rbw_hz = 0.0;
    std::optional<std::uint64_t> seed;

    [[nodiscard]] std::size_t size() const { return freq_hz.size(); }
    // Trapezoidal integral of psd over frequency.
    [[nodiscard]] double area() const;
    void validate() const;
};

// Single-sided displacement spectral density on an angular-frequency grid,
// normalized so that <x^2> = integral S_xx d omega / 2 pi.
struct DisplacementPSD {
    std::vector<double> omega;   // rad/s
    std::vector<double> s_xx;    // m^2 per Hz

    [[nodiscard]] std::size_t size() const { return omega.size(); }
    // Trapezoidal estimate of <x^2>.
    [[nodiscard]] double variance() const;
};

// Mechanical response dressed by backaction.
struct EffectiveMechanics {
    double gamma_eff = 0.0;   // rad/s
    double omega_eff = 0.0;   // rad/s

    [[nodiscard]] static EffectiveMechanics bare(const MechanicalMode& mech);
};

// Uniform grid of n angular frequencies spanning center +/- half_span, clipped at 0.
[[nodiscard]] std::vector<double> frequency_grid(double center, double half_span, std::size_t n);

// Thermally driven oscillator spectrum. The bath couples at the intrinsic
// gamma_m while the susceptibility uses gamma_eff.
[[nodiscard]] double lorentzian_sxx_value(double omega, const MechanicalMode& mech, const EffectiveMechanics& eff,
                                          double temperature);
[[nodiscard]] DisplacementPSD lorentzian_sxx(const MechanicalMode& mech, const EffectiveMechanics& eff,
                                             double temperature, const std::vector<double>& omega);

// <x^2> = (k_B T / m omega_eff^2) (gamma_m / gamma_eff).
[[nodiscard]] double displacement_variance(const MechanicalMode& mech, const EffectiveMechanics& eff,
                                           double temperature);

// Exact integral of lorentzian_sxx_value over [omega_lo, omega_hi] / 2 pi.
// omega_hi may be +infinity.
[[nodiscard]] double band_variance(const MechanicalMode& mech, const EffectiveMechanics& eff, double temperature,
                                   double omega_lo, double omega_hi);

// Direct-detection transfer function H(omega, Delta) mapping cavity-frequency
// fluctuations at omega onto transmitted-power fluctuations (singlet modes
// only), in units of 1/(rad/s)^2.
[[nodiscard]] double transduction_gain(double omega, const OperatingPoint& op, const OpticalMode& mode);

struct SpectrumNoise {
    std::uint64_t seed = 0;
    // Number of averaged spectra; each bin is scaled by a Gamma(n, 1/n) variate.
    double averages = 100.0;
};

// S_P = g_om^2 P_i^2 S_xx H + noise_floor, optionally with seeded
// multiplicative averaging noise on the total.
[[nodiscard]] SpectrumTrace synthesize_sp(const DisplacementPSD& sxx, const OperatingPoint& op,
                                          const OpticalMode& mode, const MechanicalMode& mech,
                                          const OptomechanicalCoupling& g, double input_power, double noise_floor,
                                          const std::optional<SpectrumNoise>& noise = std::nullopt);

// Rescales a trace to the reference input power at fixed detuning:
// S~ = S_P (P_ref / P_i)^2, so that equal mechanical energy gives equal area.
[[nodiscard]] SpectrumTrace normalize_sp(const SpectrumTrace& trace, double reference_power);

// x_om = x_th sqrt((A_om / A_th) (P_th / P_om)^2).
[[nodiscard]] double calibrate_amplitude(double area_driven, double area_thermal, double p_thermal,
                                         double p_driven, double x_th);

struct LangevinOptions {
    double sample_rate_factor = 4.0;   // sample rate in units of f_eff
    double segment_linewidths = 20.0;  // Welch segment length in units of 2 pi / gamma_eff
    int realizations = 1;              // independent trajectories averaged
};

// Time-domain estimate of S_xx: exact-discretization integration of the
// damped oscillator driven by a white thermal force (single-sided force PSD
// 4 k_B T m_eff gamma_m), Welch-averaged with a Hann window and 50% overlap.
// Deterministic in (seed, options, duration). Throws ValidationError when the
// duration holds fewer than two Welch segments.
[[nodiscard]] DisplacementPSD langevin_oracle(const MechanicalMode& mech, const EffectiveMechanics& eff,
                                              double temperature, double duration, std::uint64_t seed,
                                              const LangevinOptions& options = {});

} // namespace omkit
