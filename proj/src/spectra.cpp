#include "omkit/spectra.hpp"

#include "omkit/constants.hpp"
#include "omkit/errors.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <random>

namespace omkit {

double SpectrumTrace::area() const
{
    double a = 0.0;
    for (std::size_t i = 1; i < freq_hz.size(); ++i) {
        a += 0.5 * (psd[i] + psd[i - 1]) * (freq_hz[i] - freq_hz[i - 1]);
    }
    return a;
}

void SpectrumTrace::validate() const
{
    require(freq_hz.size() == psd.size(), "spectrum: frequency and psd lengths differ");
    require(!freq_hz.empty(), "spectrum: trace is empty");
    for (std::size_t i = 0; i < freq_hz.size(); ++i) {
        require(std::isfinite(freq_hz[i]) && std::isfinite(psd[i]), "spectrum: non-finite sample");
        require(psd[i] >= 0.0, "spectrum: negative psd");
        if (i > 0) {
            require(freq_hz[i] > freq_hz[i - 1], "spectrum: frequency not strictly increasing");
        }
    }
    require(input_power >= 0.0, "spectrum: input power must be non-negative");
}

double DisplacementPSD::variance() const
{
    double a = 0.0;
    for (std::size_t i = 1; i < omega.size(); ++i) {
        a += 0.5 * (s_xx[i] + s_xx[i - 1]) * (omega[i] - omega[i - 1]);
    }
    return a / kTwoPi;
}

EffectiveMechanics EffectiveMechanics::bare(const MechanicalMode& mech)
{
    return {mech.gamma_m(), mech.omega_m()};
}

std::vector<double> frequency_grid(double center, double half_span, std::size_t n)
{
    require(n >= 2, "frequency_grid: need at least two points");
    require(half_span > 0.0, "frequency_grid: span must be positive");
    const double lo = std::max(0.0, center - half_span);
    const double hi = center + half_span;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

namespace {

void validate_effective(const EffectiveMechanics& eff)
{
    require(std::isfinite(eff.gamma_eff) && eff.gamma_eff > 0.0,
            "effective damping must be positive (self-oscillating modes have no stationary thermal spectrum)");
    require(std::isfinite(eff.omega_eff) && eff.omega_eff > 0.0, "effective frequency must be positive");
}

} // namespace

double lorentzian_sxx_value(double omega, const MechanicalMode& mech, const EffectiveMechanics& eff,
                            double temperature)
{
    const double w0sq = eff.omega_eff * eff.omega_eff;
    const double detune = w0sq - omega * omega;
    const double damp = eff.gamma_eff * omega;
    return 4.0 * kBoltzmann * temperature * mech.gamma_m() / mech.m_eff / (detune * detune + damp * damp);
}

DisplacementPSD lorentzian_sxx(const MechanicalMode& mech, const EffectiveMechanics& eff, double temperature,
                               const std::vector<double>& omega)
{
    mech.validate();
    validate_effective(eff);
    require(temperature >= 0.0, "lorentzian_sxx: temperature must be non-negative");
    DisplacementPSD out;
    out.omega = omega;
    out.s_xx.reserve(omega.size());
    for (const double w : omega) {
        out.s_xx.push_back(lorentzian_sxx_value(w, mech, eff, temperature));
    }
    return out;
}

double displacement_variance(const MechanicalMode& mech, const EffectiveMechanics& eff, double temperature)
{
    mech.validate();
    validate_effective(eff);
    return kBoltzmann * temperature / (mech.m_eff * eff.omega_eff * eff.omega_eff) * (mech.gamma_m() / eff.gamma_eff);
}

double band_variance(const MechanicalMode& mech, const EffectiveMechanics& eff, double temperature,
                     double omega_lo, double omega_hi)
{
    mech.validate();
    validate_effective(eff);
    require(omega_lo >= 0.0 && omega_hi > omega_lo, "band_variance: need 0 <= omega_lo < omega_hi");
    using cd = std::complex<double>;
    // 1/|w0^2 - w^2 + i g w|^2 = -Im[1/(w D(w))] / g, and 1/(w D) splits into
    // partial fractions over the roots r1, r2 of w^2 - i g w - w0^2 (both in
    // the upper half plane, so log(w - r) is continuous on the real axis).
    const double g = eff.gamma_eff;
    const double w0 = eff.omega_eff;
    const cd disc = std::sqrt(cd(w0 * w0 - 0.25 * g * g, 0.0));
    const cd r1 = cd(0.0, 0.5 * g) + disc;
    const cd r2 = cd(0.0, 0.5 * g) - disc;
    const cd b = -1.0 / (r1 * (r1 - r2));
    const cd c = -1.0 / (r2 * (r2 - r1));
    auto antiderivative = [&](double w) {
        if (std::isinf(w)) {
            return cd(0.0, 0.0);
        }
        return b * std::log(cd(w, 0.0) - r1) + c * std::log(cd(w, 0.0) - r2);
    };
    const double integral = -(antiderivative(omega_hi) - antiderivative(omega_lo)).imag() / g;
    const double prefactor = 4.0 * kBoltzmann * temperature * mech.gamma_m() / mech.m_eff;
    return prefactor * integral / kTwoPi;
}

double transduction_gain(double omega, const OperatingPoint& op, const OpticalMode& mode)
{
    mode.validate();
    require(!mode.is_doublet(), "transduction_gain: doublet modes are not supported");
    require(std::isfinite(omega) && std::isfinite(op.detuning), "transduction_gain: non-finite input");
    const double delta = op.detuning;
    const auto t = transmission_amplitude(delta, mode);
    const auto l0 = cavity_response(delta, mode);
    const auto lp = cavity_response(delta + omega, mode);
    const auto lm = cavity_response(delta - omega, mode);
    const auto k = mode.gamma_external() * (std::conj(t) * lp * l0 - t * std::conj(lm * l0));
    return std::norm(k);
}

SpectrumTrace synthesize_sp(const DisplacementPSD& sxx, const OperatingPoint& op, const OpticalMode& mode,
                            const MechanicalMode& mech, const OptomechanicalCoupling& g, double input_power,
                            double noise_floor, const std::optional<SpectrumNoise>& noise)
{
    require(sxx.omega.size() == sxx.s_xx.size(), "synthesize_sp: displacement grid and values differ in length");
    require(!sxx.omega.empty(), "synthesize_sp: empty displacement spectrum");
    require(input_power >= 0.0, "synthesize_sp: input power must be non-negative");
    require(noise_floor >= 0.0, "synthesize_sp: noise floor must be non-negative");
    op.validate();
    g.validate();
    const double gom = g.g_om(mech);
    const double scale = gom * gom * input_power * input_power;

    SpectrumTrace out;
    out.input_power = input_power;
    out.detuning = op.detuning;
    out.rbw_hz = sxx.size() > 1 ? to_hz(sxx.omega[1] - sxx.omega[0]) : 0.0;
    out.freq_hz.reserve(sxx.size());
    out.psd.reserve(sxx.size());

    std::optional<std::mt19937_64> rng;
    std::optional<std::gamma_distribution<double>> gamma;
    if (noise) {
        require(noise->averages > 0.0, "synthesize_sp: averages must be positive");
        rng.emplace(noise->seed);
        gamma.emplace(noise->averages, 1.0 / noise->averages);
        out.seed = noise->seed;
    }
    for (std::size_t i = 0; i < sxx.size(); ++i) {
        const double w = sxx.omega[i];
        double value = scale * sxx.s_xx[i] * transduction_gain(w, op, mode) + noise_floor;
        if (noise) {
            value *= (*gamma)(*rng);
        }
        out.freq_hz.push_back(to_hz(w));
        out.psd.push_back(value);
    }
    out.validate();
    return out;
}

SpectrumTrace normalize_sp(const SpectrumTrace& trace, double reference_power)
{
    require(trace.input_power > 0.0, "normalize_sp: trace has no input power metadata");
    require(reference_power > 0.0, "normalize_sp: reference power must be positive");
    SpectrumTrace out = trace;
    const double factor = (reference_power / trace.input_power) * (reference_power / trace.input_power);
    for (double& v : out.psd) {
        v *= factor;
    }
    return out;
}

double calibrate_amplitude(double area_driven, double area_thermal, double p_thermal, double p_driven, double x_th)
{
    require(area_driven > 0.0 && area_thermal > 0.0, "calibrate_amplitude: areas must be positive");
    require(p_thermal > 0.0 && p_driven > 0.0, "calibrate_amplitude: powers must be positive");
    require(x_th >= 0.0, "calibrate_amplitude: thermal amplitude must be non-negative");
    const double power_ratio = p_thermal / p_driven;
    return x_th * std::sqrt(area_driven / area_thermal * power_ratio * power_ratio);
}

} // namespace omkit
