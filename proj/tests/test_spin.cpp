#include "doctest.h"

#include "omkit/constants.hpp"
#include "omkit/errors.hpp"
#include "omkit/spin.hpp"

using namespace omkit;

namespace {
MechanicalMode rbm() { return {2.1e9, 9000.0, 40e-15, kDefaultStrainPerMeter}; }
}

TEST_CASE("single-phonon coupling from the zero-point strain")
{
    const SpinSusceptibility spin{20e9, 1e5, 1.0};
    CHECK(single_phonon_coupling(3e-10, spin) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(single_phonon_coupling(3e-10, {10e9, 1e5, 1.0}) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(single_phonon_coupling(0.0, spin) == 0.0);
    CHECK(single_phonon_coupling(rbm(), spin) == doctest::Approx(20e9 * zero_point_strain(rbm())).epsilon(1e-15));
}

TEST_CASE("driven coupling is linear in amplitude")
{
    const SpinSusceptibility spin{20e9, 1e5, 1.0};
    const auto m = rbm();
    const double x_zpm = zero_point_motion(m);
    CHECK(driven_coupling(m, spin, x_zpm) == doctest::Approx(single_phonon_coupling(m, spin)).epsilon(1e-14));
    CHECK(driven_coupling(m, spin, 0.0) == 0.0);
    const double one = driven_coupling(m, spin, 1e-12);
    CHECK(driven_coupling(m, spin, 31e-12) == doctest::Approx(31.0 * one).epsilon(1e-14));
    CHECK(driven_coupling(m, spin, 31e-12) == doctest::Approx(0.6e6).epsilon(0.1));
    CHECK_THROWS_AS((void)driven_coupling(m, spin, -1e-12), ValidationError);
}

TEST_CASE("excited-state estimate and location derating")
{
    const auto m = rbm();
    const SpinSusceptibility spin{20e9, 1e5, 1.0};
    CHECK(excited_state_coupling(m, spin) == doctest::Approx(1e5 * single_phonon_coupling(m, spin)));
    CHECK(excited_state_coupling(m, spin) == doctest::Approx(0.6e6).epsilon(0.1));
    const SpinSusceptibility deep{20e9, 1e5, 0.5};
    CHECK(single_phonon_coupling(m, deep) == doctest::Approx(0.5 * single_phonon_coupling(m, spin)));
    CHECK_THROWS_AS((SpinSusceptibility{-1.0, 1e5, 1.0}.validate()), ValidationError);
    CHECK_THROWS_AS((SpinSusceptibility{20e9, 0.0, 1.0}.validate()), ValidationError);
    CHECK_THROWS_AS((SpinSusceptibility{20e9, 1e5, 1.5}.validate()), ValidationError);
}
