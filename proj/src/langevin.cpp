#include "omkit/spectra.hpp"

#include "omkit/constants.hpp"
#include "omkit/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <random>

namespace omkit {

namespace {

// One step of x'' + gamma x' + w0^2 x = F/m over dt, solved exactly: the
// deterministic part is exp(A dt) and the noise covariance is
// Sigma_inf - Phi Sigma_inf Phi^T, with Sigma_inf the stationary covariance.
struct ExactStep {
    double p11, p12, p21, p22;   // Phi
    double l11, l21, l22;        // Cholesky factor of the step covariance
    double sigma_x, sigma_v;     // stationary standard deviations
};

ExactStep make_step(double gamma, double w0, double dt, double variance_x, double variance_v)
{
    using cd = std::complex<double>;
    const cd s = std::sqrt(cd(0.25 * gamma * gamma - w0 * w0, 0.0));
    const cd st = s * dt;
    const double c = std::cosh(st).real();
    const double sn = std::abs(s) > 0.0 ? (std::sinh(st) / s).real() : dt;
    const double decay = std::exp(-0.5 * gamma * dt);

    ExactStep step{};
    step.p11 = decay * (c + 0.5 * gamma * sn);
    step.p12 = decay * sn;
    step.p21 = -decay * w0 * w0 * sn;
    step.p22 = decay * (c - 0.5 * gamma * sn);

    const double q11 = variance_x - (step.p11 * step.p11 * variance_x + step.p12 * step.p12 * variance_v);
    const double q12 = -(step.p11 * step.p21 * variance_x + step.p12 * step.p22 * variance_v);
    const double q22 = variance_v - (step.p21 * step.p21 * variance_x + step.p22 * step.p22 * variance_v);
    step.l11 = std::sqrt(std::max(0.0, q11));
    step.l21 = step.l11 > 0.0 ? q12 / step.l11 : 0.0;
    step.l22 = std::sqrt(std::max(0.0, q22 - step.l21 * step.l21));
    step.sigma_x = std::sqrt(variance_x);
    step.sigma_v = std::sqrt(variance_v);
    return step;
}

struct FftwPlan {
    fftw_plan plan = nullptr;
    ~FftwPlan()
    {
        if (plan) {
            fftw_destroy_plan(plan);
        }
    }
};

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

} // namespace

DisplacementPSD langevin_oracle(const MechanicalMode& mech, const EffectiveMechanics& eff, double temperature,
                                double duration, std::uint64_t seed, const LangevinOptions& options)
{
    mech.validate();
    require(eff.gamma_eff > 0.0, "langevin_oracle: effective damping must be positive");
    require(eff.omega_eff > 0.0, "langevin_oracle: effective frequency must be positive");
    require(temperature >= 0.0, "langevin_oracle: temperature must be non-negative");
    require(options.sample_rate_factor > 2.0, "langevin_oracle: sample rate must exceed Nyquist");
    require(options.segment_linewidths > 0.0, "langevin_oracle: segment length must be positive");
    require(options.realizations >= 1, "langevin_oracle: need at least one realization");

    const double f_eff = to_hz(eff.omega_eff);
    const double fs = options.sample_rate_factor * f_eff;
    const double dt = 1.0 / fs;
    const double linewidth_time = kTwoPi / eff.gamma_eff;
    auto nseg = static_cast<std::size_t>(std::llround(options.segment_linewidths * linewidth_time * fs));
    nseg += nseg % 2;
    const auto total = static_cast<std::size_t>(std::floor(duration * fs));
    require(nseg >= 16, "langevin_oracle: Welch segment too short");
    require(total >= 2 * nseg,
            "langevin_oracle: duration too short, need at least "
                + std::to_string(2.0 * options.segment_linewidths) + " linewidth-times");

    const double variance_v = kBoltzmann * temperature * mech.gamma_m() / (mech.m_eff * eff.gamma_eff);
    const double variance_x = variance_v / (eff.omega_eff * eff.omega_eff);
    const ExactStep step = make_step(eff.gamma_eff, eff.omega_eff, dt, variance_x, variance_v);

    std::vector<double> window(nseg);
    double window_power = 0.0;
    for (std::size_t n = 0; n < nseg; ++n) {
        window[n] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(n) / static_cast<double>(nseg)));
        window_power += window[n] * window[n];
    }

    const std::size_t nbins = nseg / 2 + 1;
    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * nseg)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nbins)));
    FftwPlan plan;
    plan.plan = fftw_plan_dft_r2c_1d(static_cast<int>(nseg), in.get(), out.get(), FFTW_ESTIMATE);

    std::vector<double> accum(nbins, 0.0);
    std::size_t segments = 0;
    std::vector<double> buffer(nseg);
    const std::size_t hop = nseg / 2;

    auto process_segment = [&]() {
        for (std::size_t n = 0; n < nseg; ++n) {
            in.get()[n] = buffer[n] * window[n];
        }
        fftw_execute(plan.plan);
        for (std::size_t k = 0; k < nbins; ++k) {
            const double re = out.get()[k][0];
            const double im = out.get()[k][1];
            accum[k] += re * re + im * im;
        }
        ++segments;
    };

    for (int r = 0; r < options.realizations; ++r) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal(0.0, 1.0);

        // Start in the stationary state so no transient needs discarding.
        double x = step.sigma_x * normal(rng);
        double v = step.sigma_v * normal(rng);
        std::size_t filled = 0;
        for (std::size_t i = 0; i < total; ++i) {
            const double z1 = normal(rng);
            const double z2 = normal(rng);
            const double xn = step.p11 * x + step.p12 * v + step.l11 * z1;
            const double vn = step.p21 * x + step.p22 * v + step.l21 * z1 + step.l22 * z2;
            x = xn;
            v = vn;
            buffer[filled++] = x;
            if (filled == nseg) {
                process_segment();
                std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(hop), buffer.end(), buffer.begin());
                filled = nseg - hop;
            }
        }
    }

    DisplacementPSD psd;
    psd.omega.resize(nbins);
    psd.s_xx.resize(nbins);
    const double norm = 1.0 / (fs * window_power * static_cast<double>(segments));
    for (std::size_t k = 0; k < nbins; ++k) {
        const bool edge = k == 0 || (k == nbins - 1);
        psd.omega[k] = kTwoPi * fs * static_cast<double>(k) / static_cast<double>(nseg);
        psd.s_xx[k] = (edge ? 1.0 : 2.0) * accum[k] * norm;
    }
    return psd;
}

} // namespace omkit
