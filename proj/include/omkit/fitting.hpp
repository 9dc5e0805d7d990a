#pragma once

#include "omkit/backaction.hpp"
#include "omkit/optimize.hpp"
#include "omkit/optics.hpp"
#include "omkit/spectra.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace omkit {

struct FitParameter {
    std::string name;
    double estimate = 0.0;
    double ci95 = 0.0;   // half-width of the 95% confidence interval
    std::string units;
};

struct StartDiagnostic {
    std::vector<double> initial;   // physical parameters at the start, in FitResult order
    double residual_rms = 0.0;
    FitStatus status = FitStatus::max_iterations;
    int evaluations = 0;
};

struct FitResult {
    std::vector<FitParameter> parameters;
    double residual_rms = 0.0;
    double initial_residual_rms = 0.0;
    FitStatus status = FitStatus::max_iterations;
    int iterations = 0;
    std::vector<StartDiagnostic> starts;   // multi-start fits only

    // Throws ValidationError for an unknown name.
    [[nodiscard]] const FitParameter& at(std::string_view name) const;
    [[nodiscard]] double estimate(std::string_view name) const { return at(name).estimate; }
    [[nodiscard]] double ci95(std::string_view name) const { return at(name).ci95; }
};

enum class CovarianceKind {
    standard,   // s^2 (J^T J)^-1
    sandwich,   // heteroscedasticity-consistent (HC1)
};

struct LorentzianGuess {
    double f0 = 0.0;     // Hz
    double fwhm = 0.0;   // Hz
    double area = 0.0;   // psd units * Hz
    double floor = 0.0;  // psd units
};

struct LorentzianFitOptions {
    CovarianceKind covariance = CovarianceKind::sandwich;
    LevenbergMarquardtOptions solver{};
};

// Least-squares fit of floor + (2A/pi) w / (4 (f - f0)^2 + w^2).
// Parameters: f0 [Hz], fwhm [Hz], area [psd*Hz], floor [psd].
[[nodiscard]] FitResult fit_lorentzian_psd(const SpectrumTrace& trace,
                                           const std::optional<LorentzianGuess>& guess = std::nullopt,
                                           const LorentzianFitOptions& options = {});

// Evaluate the fitted Lorentzian model at f.
[[nodiscard]] double lorentzian_model(double f, double f0, double fwhm, double area, double floor);

struct DampingSample {
    double detuning = 0.0;        // rad/s
    double photon_number = 0.0;
    double dgamma = 0.0;          // rad/s
    double sigma = 1.0;           // rad/s, one standard deviation
};

// Closed-form weighted least squares for g0 (delta gamma_m is linear in g0^2).
// Parameter: g0 [rad/s].
[[nodiscard]] FitResult fit_g0(const std::vector<DampingSample>& data, const OpticalMode& mode,
                               const MechanicalMode& mech);

struct SpringSample {
    double detuning = 0.0;        // rad/s
    double photon_number = 0.0;
    double dropped_power = 0.0;   // W
    double domega = 0.0;          // rad/s
};

// Regression through the origin of (delta omega_m - optical spring) on P_d
// with g0 held fixed. Parameter: alpha [rad/s/W].
[[nodiscard]] FitResult fit_alpha(const std::vector<SpringSample>& data, const OptomechanicalCoupling& g,
                                  const OpticalMode& mode, const MechanicalMode& mech);

struct BistableFitOptions {
    bool fit_thermal = true;      // fit d; otherwise d = 0
    bool fit_splitting = false;   // fit a doublet splitting; otherwise singlet
    bool undercoupled = true;     // transmission alone cannot tell Q_i from Q_ex
    int starts = 6;
    int max_evaluations = 3000;   // per start
};

// Multi-start simplex fit of the thermally broadened lineshape.
// Parameters: lambda_o [m], q_intrinsic, q_external, d [m], splitting [rad/s].
// Throws ValidationError when both thermal and doublet fitting are requested.
[[nodiscard]] FitResult fit_bistable_lineshape(const SweepTrace& trace, const BistableFitOptions& options = {});

// Convenience: rebuild the optical mode from a lineshape fit.
[[nodiscard]] OpticalMode mode_from_lineshape_fit(const FitResult& fit);

} // namespace omkit
