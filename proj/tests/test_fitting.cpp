#include "doctest.h"

#include "omkit/constants.hpp"
#include "omkit/errors.hpp"
#include "omkit/fitting.hpp"
#include "omkit/optimize.hpp"
#include "omkit/synthetic.hpp"
#include "omkit/thermal.hpp"

#include <cmath>

using namespace omkit;

namespace {

OpticalMode device() { return {1530e-9, 6.4e4, 6.0e4, 0.0}; }
MechanicalMode rbm() { return {2.1e9, 9000.0, 40e-15, kDefaultStrainPerMeter}; }
OptomechanicalCoupling g26() { return {to_angular(26e3)}; }

SpectrumTrace lorentzian_trace(double f0, double w, double area, double floor, double half_span, int n)
{
    SpectrumTrace t;
    t.input_power = 1e-3;
    for (int i = 0; i < n; ++i) {
        const double f = f0 - half_span + 2.0 * half_span * i / (n - 1);
        t.freq_hz.push_back(f);
        t.psd.push_back(lorentzian_model(f, f0, w, area, floor));
    }
    return t;
}

SweepRequest sweep_grid(const OpticalMode& m, double below, double above, int n)
{
    const double lw = loaded_linewidth_wavelength(m);
    SweepRequest r;
    r.input_power = 1e-3;
    for (int i = 0; i < n; ++i) {
        r.lambda_s.push_back(m.lambda_o - below * lw + (below + above) * lw * i / (n - 1));
    }
    return r;
}

} // namespace

TEST_CASE("Levenberg-Marquardt solves Rosenbrock and flags rank deficiency")
{
    LeastSquaresProblem rosen;
    rosen.n_residuals = 2;
    rosen.residuals = [](std::span<const double> p, std::span<double> r) {
        r[0] = 10.0 * (p[1] - p[0] * p[0]);
        r[1] = 1.0 - p[0];
    };
    const auto sol = levenberg_marquardt(rosen, {-1.2, 1.0});
    CHECK(sol.status == FitStatus::converged);
    CHECK(sol.params[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.params[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.cost <= sol.initial_cost);

    LeastSquaresProblem degenerate;
    degenerate.n_residuals = 3;
    degenerate.residuals = [](std::span<const double> p, std::span<double> r) {
        for (int i = 0; i < 3; ++i) {
            r[static_cast<std::size_t>(i)] = (p[0] + p[1]) * i - 2.0 * i;
        }
    };
    CHECK(levenberg_marquardt(degenerate, {0.0, 0.0}).status == FitStatus::singular);
}

TEST_CASE("Nelder-Mead never accepts a worse best vertex")
{
    auto f = [](std::span<const double> x) {
        return std::pow(x[0] - 3.0, 2) + 10.0 * std::pow(x[1] + 1.0, 2) + std::pow(x[2], 4);
    };
    const auto r = nelder_mead(f, {0.0, 0.0, 1.0});
    CHECK(r.value <= r.initial_value);
    CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-4));
    CHECK(r.x[1] == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("Lorentzian fit: noiseless recovery, with and without a guess")
{
    const auto t = lorentzian_trace(2.1e9, 2.33e5, 4e-3, 2e-8, 2.5e6, 801);
    for (const auto& guess : {std::optional<LorentzianGuess>{}, std::optional<LorentzianGuess>{{2.1e9 + 5e4, 3e5, 3e-3, 0.0}}}) {
        const auto fit = fit_lorentzian_psd(t, guess);
        CHECK(fit.status == FitStatus::converged);
        CHECK(fit.estimate("f0") == doctest::Approx(2.1e9).epsilon(1e-6));
        CHECK(fit.estimate("fwhm") == doctest::Approx(2.33e5).epsilon(1e-6));
        CHECK(fit.estimate("area") == doctest::Approx(4e-3).epsilon(1e-6));
        CHECK(fit.estimate("floor") == doctest::Approx(2e-8).epsilon(1e-6));
        CHECK(fit.residual_rms <= fit.initial_residual_rms);
        for (const auto& p : fit.parameters) {
            CHECK(p.ci95 >= 0.0);
        }
    }
}

TEST_CASE("Lorentzian fit: noisy thermal trace and determinism")
{
    const auto mech = rbm();
    const auto m = device();
    const auto sxx = lorentzian_sxx(mech, EffectiveMechanics::bare(mech), 295.0,
                                    frequency_grid(mech.omega_m(), 10.0 * mech.gamma_m(), 1001));
    const OperatingPoint op{0.3 * m.gamma_loaded(), 0.0, 0.0};
    const auto clean = synthesize_sp(sxx, op, m, mech, g26(), 1e-3, 0.0);
    const double peak = *std::max_element(clean.psd.begin(), clean.psd.end());
    const auto noisy = synthesize_sp(sxx, op, m, mech, g26(), 1e-3, 0.1 * peak, SpectrumNoise{42, 100.0});
    const auto a = fit_lorentzian_psd(noisy);
    const auto b = fit_lorentzian_psd(noisy);
    CHECK(a.estimate("f0") / a.estimate("fwhm") == doctest::Approx(9000.0).epsilon(0.05));
    CHECK(std::abs(a.estimate("fwhm") - to_hz(mech.gamma_m())) <= a.ci95("fwhm"));
    CHECK(a.estimate("fwhm") == b.estimate("fwhm"));
    CHECK(a.ci95("fwhm") == b.ci95("fwhm"));
}

TEST_CASE("Lorentzian fit: preconditions and failure modes")
{
    const auto narrow = lorentzian_trace(2.1e9, 2.33e5, 4e-3, 0.0, 2.0e5, 101);
    CHECK_THROWS_AS((void)fit_lorentzian_psd(narrow), ValidationError);
    SpectrumTrace flat = lorentzian_trace(2.1e9, 2.33e5, 0.0, 1.0, 2.5e6, 101);
    CHECK_THROWS_AS((void)fit_lorentzian_psd(flat), NonConvergence);
    auto t = lorentzian_trace(2.1e9, 2.33e5, 4e-3, 0.0, 2.5e6, 101);
    t.psd[3] = -1.0;
    CHECK_THROWS_AS((void)fit_lorentzian_psd(t), ValidationError);
    CHECK_THROWS_AS((void)FitResult{}.at("f0"), ValidationError);
}

TEST_CASE("g0 fit: exact point, scale equivariance, rejection of an all-zero model")
{
    const auto m = device();
    const auto mech = rbm();
    const OperatingPoint op{0.8 * mech.omega_m(), 4e5, 0.0};
    const double y = damping_shift(op, g26(), m, mech);
    CHECK(fit_g0({{op.detuning, op.photon_number, y, 1.0}}, m, mech).estimate("g0")
          == doctest::Approx(g26().g0).epsilon(1e-12));

    std::vector<DampingSample> data;
    for (int i = 0; i < 8; ++i) {
        const double d = mech.omega_m() * (0.2 + 0.2 * i);
        const OperatingPoint p{d, 3e5 + 1e4 * i, 0.0};
        data.push_back({d, p.photon_number, damping_shift(p, g26(), m, mech) * (1.0 + 0.03 * ((i % 3) - 1)), 2e4});
    }
    const double base = fit_g0(data, m, mech).estimate("g0");
    auto scaled = data;
    for (auto& s : scaled) {
        s.dgamma *= 4.0;
        s.sigma *= 4.0;
    }
    CHECK(fit_g0(scaled, m, mech).estimate("g0") == doctest::Approx(2.0 * base).epsilon(1e-14));
    auto more_photons = data;
    for (auto& s : more_photons) {
        s.photon_number *= 3.0;
    }
    const double g_more = fit_g0(more_photons, m, mech).estimate("g0");
    CHECK(g_more * g_more == doctest::Approx(base * base / 3.0).epsilon(1e-13));

    CHECK_THROWS_AS((void)fit_g0({{0.0, 4e5, 1.0, 1.0}, {0.0, 2e5, 1.0, 1.0}}, m, mech), ValidationError);
    CHECK_THROWS_AS((void)fit_g0({}, m, mech), ValidationError);
    CHECK_THROWS_AS((void)fit_g0({{op.detuning, op.photon_number, -y, 1.0}}, m, mech), NonConvergence);
}

TEST_CASE("g0 fit: noisy sweep recovers 26 kHz with honest intervals")
{
    const auto m = device();
    const auto mech = rbm();
    BackactionSweepSpec spec;
    spec.detunings = interior_detunings(0.0, 2.0 * mech.omega_m(), 12);
    spec.input_power = input_power_for_peak_photons(6.5e5, m);
    spec.sigma_dgamma = to_angular(40e3);
    int covered = 0;
    for (int r = 0; r < 40; ++r) {
        spec.seed = 300u + static_cast<unsigned>(r);
        const auto fit = fit_g0(damping_samples(synthesize_backaction(spec, m, mech, g26(), 0.0)), m, mech);
        covered += std::abs(fit.estimate("g0") - g26().g0) <= fit.ci95("g0") ? 1 : 0;
    }
    CHECK(covered >= 34);
}

TEST_CASE("alpha fit: zero and known softening")
{
    const auto m = device();
    const auto mech = rbm();
    BackactionSweepSpec spec;
    spec.detunings = interior_detunings(0.0, 2.0 * mech.omega_m(), 16);
    spec.input_power = 6.4e-3;
    spec.sigma_domega = to_angular(2e3);
    spec.seed = 11;
    const auto none = fit_alpha(spring_samples(synthesize_backaction(spec, m, mech, g26(), 0.0)), g26(), m, mech);
    CHECK(std::abs(none.estimate("alpha")) <= none.ci95("alpha"));
    const double alpha = to_angular(-220e3) / 1e-3;
    const auto fit = fit_alpha(spring_samples(synthesize_backaction(spec, m, mech, g26(), alpha)), g26(), m, mech);
    CHECK(fit.estimate("alpha") == doctest::Approx(alpha).epsilon(0.03));
    CHECK(fit.ci95("alpha") > 0.0);

    std::vector<SpringSample> flat{{1e9, 1e5, 1e-3, -1e5}, {2e9, 1e5, 1e-3, -2e5}};
    CHECK_THROWS_AS((void)fit_alpha(flat, g26(), m, mech), ValidationError);
    CHECK_THROWS_AS((void)fit_alpha({flat[0]}, g26(), m, mech), ValidationError);
}

TEST_CASE("lineshape fit: cold singlet recovers both quality factors")
{
    const auto m = device();
    const auto trace = bistable_sweep(sweep_grid(m, 5.0, 5.0, 301), m, 0.0);
    BistableFitOptions opt;
    opt.fit_thermal = false;
    const auto fit = fit_bistable_lineshape(trace, opt);
    CHECK(fit.estimate("q_intrinsic") == doctest::Approx(6.4e4).epsilon(0.01));
    CHECK(fit.estimate("q_external") == doctest::Approx(9.6e5).epsilon(0.01));
    CHECK(fit.estimate("d") == 0.0);
    CHECK(fit.starts.size() >= 5);
    CHECK(fit.residual_rms <= fit.initial_residual_rms);

    // The over-coupled branch gives the mirror solution with identical transmission.
    opt.undercoupled = false;
    const auto mirror = fit_bistable_lineshape(trace, opt);
    CHECK(mirror.estimate("q_intrinsic") == doctest::Approx(9.6e5).epsilon(0.01));
    CHECK(mirror.estimate("q_external") == doctest::Approx(6.4e4).epsilon(0.01));
}

TEST_CASE("lineshape fit: shark fin with d = 3 linewidths")
{
    const auto m = device();
    const double lw = loaded_linewidth_wavelength(m);
    const double d = 3.0 * lw;
    const auto trace = bistable_sweep(sweep_grid(m, 4.0, 7.0, 401), m, d);
    const auto a = fit_bistable_lineshape(trace);
    CHECK(std::abs(a.estimate("lambda_o") - m.lambda_o) <= 0.02 * lw);
    CHECK(a.estimate("d") == doctest::Approx(d).epsilon(0.02));
    const auto b = fit_bistable_lineshape(trace);
    CHECK(a.estimate("d") == b.estimate("d"));
    CHECK(a.residual_rms == b.residual_rms);

    // A rebuilt forward model reproduces the data.
    const auto refit = bistable_sweep(sweep_grid(m, 4.0, 7.0, 401), mode_from_lineshape_fit(a), a.estimate("d"));
    for (std::size_t i = 0; i < trace.size(); ++i) {
        CHECK(refit.transmission[i] == doctest::Approx(trace.transmission[i]).epsilon(1e-2).scale(1.0));
    }
}

TEST_CASE("lineshape fit: doublet splitting")
{
    auto m = device();
    m.doublet_splitting = 1.2 * m.gamma_loaded();
    const auto trace = bistable_sweep(sweep_grid(m, 5.0, 5.0, 301), m, 0.0);
    BistableFitOptions opt;
    opt.fit_thermal = false;
    opt.fit_splitting = true;
    const auto fit = fit_bistable_lineshape(trace, opt);
    CHECK(fit.estimate("splitting") == doctest::Approx(m.doublet_splitting).epsilon(0.05));

    opt.fit_thermal = true;
    CHECK_THROWS_AS((void)fit_bistable_lineshape(trace, opt), ValidationError);
}
