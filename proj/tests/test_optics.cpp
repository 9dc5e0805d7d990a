#include "doctest.h"

#include "omkit/constants.hpp"
#include "omkit/errors.hpp"
#include "omkit/optics.hpp"

#include <cmath>
#include <random>

using namespace omkit;

namespace {

OpticalMode device() { return {1530e-9, 6.4e4, 6.0e4, 0.0}; }

// Random but physical modes for property checks.
OpticalMode random_mode(std::mt19937_64& rng, bool doublet)
{
    std::uniform_real_distribution<double> lam(1500e-9, 1600e-9);
    std::uniform_real_distribution<double> qi(1e4, 1e6);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    OpticalMode m;
    m.lambda_o = lam(rng);
    m.q_intrinsic = qi(rng);
    m.q_loaded = m.q_intrinsic * frac(rng);
    if (doublet) {
        m.doublet_splitting = frac(rng) * 3.0 * m.gamma_loaded();
    }
    return m;
}

} // namespace

TEST_CASE("decay rates follow from the quality factors")
{
    const auto m = device();
    CHECK(m.omega_o() == doctest::Approx(kTwoPi * kSpeedOfLight / 1530e-9).epsilon(1e-15));
    CHECK(m.gamma_intrinsic() == doctest::Approx(m.omega_o() / 6.4e4).epsilon(1e-15));
    CHECK(m.gamma_external() == doctest::Approx(m.gamma_loaded() - m.gamma_intrinsic()).epsilon(1e-15));
    CHECK(to_hz(m.gamma_loaded()) == doctest::Approx(3.266e9).epsilon(1e-3));
}

TEST_CASE("resonant transmission against the mpmath oracle")
{
    const OpticalMode m{1530e-9, 6.4e4, 5.9e4, 0.0};
    CHECK(transmission(0.0, m) == doctest::Approx(0.7119140625).epsilon(1e-13));
    // Critical coupling empties the fiber on resonance.
    const OpticalMode critical{1530e-9, 6.0e4, 3.0e4, 0.0};
    CHECK(transmission(0.0, critical) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("photon number from dropped power")
{
    CHECK(intracavity_photons(1.5e-3, device()) == doctest::Approx(600588.19461694256).epsilon(1e-13));
    CHECK(intracavity_photons(13e-3, device()) == doctest::Approx(5205097.6866801689).epsilon(1e-13));
    CHECK(intracavity_photons(0.0, device()) == 0.0);
    // The quoted ~2.8e6 at 13 mW is only reproduced to within a factor of two.
    const double ratio = intracavity_photons(13e-3, device()) / 2.8e6;
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
}

TEST_CASE("singlet: transmission bounded, no reflection, far detuning transparent")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> det(-5.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const auto m = random_mode(rng, false);
        const double d = det(rng) * m.gamma_loaded();
        const double t = transmission(d, m);
        CHECK(t >= 0.0);
        CHECK(t <= 1.0);
        CHECK(reflection(d, m) == 0.0);
        CHECK(transmission(-d, m) == doctest::Approx(t).epsilon(1e-14));
    }
    CHECK(transmission(1e4 * device().gamma_loaded(), device()) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("energy balance: 1 - T - R equals intrinsic loss of the stored photons")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> det(-4.0, 4.0);
    for (bool doublet : {false, true}) {
        for (int i = 0; i < 200; ++i) {
            const auto m = random_mode(rng, doublet);
            const double d = det(rng) * m.gamma_loaded();
            const double p = 1e-3;
            const double n = intracavity_photons_from_field(d, p, m);
            const double lost = m.gamma_intrinsic() * n * kHbar * m.omega_o() / p;
            CHECK(1.0 - transmission(d, m) - reflection(d, m) == doctest::Approx(lost).epsilon(1e-10));
        }
    }
}

TEST_CASE("singlet photon number from the field matches the dropped-power route")
{
    const auto m = device();
    for (double x : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
        const double d = x * m.gamma_loaded();
        const double pd = dropped_power(transmission(d, m), 2e-3);
        CHECK(intracavity_photons_from_field(d, 2e-3, m) == doctest::Approx(intracavity_photons(pd, m)).epsilon(1e-12));
    }
}

TEST_CASE("doublet: two dips at +/- half the splitting")
{
    auto m = device();
    m.doublet_splitting = 4.0 * m.gamma_loaded();
    const double beta = 0.5 * m.doublet_splitting;
    CHECK(transmission(beta, m) < transmission(0.0, m));
    CHECK(transmission(-beta, m) == doctest::Approx(transmission(beta, m)).epsilon(1e-12));
    m.doublet_splitting = 0.0;
    const auto singlet = m;
    auto tiny = m;
    tiny.doublet_splitting = 1e-9 * m.gamma_loaded();
    CHECK(transmission(0.3e9, tiny) == doctest::Approx(transmission(0.3e9, singlet)).epsilon(1e-9));
}

TEST_CASE("wavelength offset and detuning convert both ways")
{
    const double lam = 1530e-9;
    CHECK(detuning_from_wavelength_offset(10e-12, lam) < 0.0);   // red of resonance
    for (double dl : {-40e-12, -1e-12, 0.0, 3e-12, 400e-12}) {
        CHECK(wavelength_offset_from_detuning(detuning_from_wavelength_offset(dl, lam), lam)
              == doctest::Approx(dl).epsilon(1e-14));
    }
    CHECK(loaded_linewidth_wavelength(device()) == doctest::Approx(25.5e-12).epsilon(1e-12));
}

TEST_CASE("invalid modes and traces are rejected")
{
    auto m = device();
    m.q_loaded = 7e4;
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m = device();
    m.lambda_o = -1.0;
    CHECK_THROWS_AS((void)transmission(0.0, m), ValidationError);
    CHECK_THROWS_AS((void)transmission(std::nan(""), device()), ValidationError);

    SweepTrace t;
    t.lambda_s = {1.0e-6, 1.1e-6, 1.05e-6};
    t.transmission = {1.0, 0.5, 1.0};
    CHECK_THROWS_AS(t.validate(), ValidationError);
    t.lambda_s = {1.2e-6, 1.1e-6, 1.0e-6};
    CHECK_THROWS_AS(t.validate(), ValidationError);   // descending but labelled up
    t.scan_direction = ScanDirection::down;
    CHECK_NOTHROW(t.validate());
    t.transmission[1] = 1.2;
    CHECK_THROWS_AS(t.validate(), ValidationError);

    CHECK(scan_direction_from_string("down") == ScanDirection::down);
    CHECK_THROWS_AS((void)scan_direction_from_string("sideways"), ValidationError);
}
