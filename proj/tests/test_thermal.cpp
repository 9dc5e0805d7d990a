#include "doctest.h"

#include "omkit/errors.hpp"
#include "omkit/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace omkit;

namespace {

OpticalMode device() { return {1530e-9, 6.4e4, 6.0e4, 0.0}; }

SweepRequest ramp(const OpticalMode& m, double d, int n, ScanDirection dir)
{
    const double lw = loaded_linewidth_wavelength(m);
    SweepRequest r;
    r.input_power = 1e-3;
    r.scan_direction = dir;
    for (int i = 0; i < n; ++i) {
        r.lambda_s.push_back(m.lambda_o - 4.0 * lw + (d + 8.0 * lw) * i / (n - 1));
    }
    if (dir == ScanDirection::down) {
        std::reverse(r.lambda_s.begin(), r.lambda_s.end());
    }
    return r;
}

// Every root of the fixed point in [0, d], located by a dense sign scan.
std::vector<double> all_roots(double lambda_s, const OpticalMode& m, double d)
{
    std::vector<double> roots;
    const int n = 200000;
    double prev = thermal_fixed_point_residual(0.0, lambda_s, m, d);
    if (prev == 0.0) {
        roots.push_back(0.0);
    }
    for (int i = 1; i <= n; ++i) {
        const double u = d * i / n;
        const double g = thermal_fixed_point_residual(u, lambda_s, m, d);
        if ((g < 0.0) != (prev < 0.0) || g == 0.0) {
            roots.push_back(u);
        }
        prev = g;
    }
    return roots;
}

} // namespace

TEST_CASE("thermo-optic coefficient and temperature rise against the oracle")
{
    const double a = thermo_optic_coefficient();
    CHECK(a == doctest::Approx(5.1666666666666667e-6).epsilon(1e-15));
    CHECK(shifted_wavelength(50.0, 1530e-9, a) - 1530e-9 == doctest::Approx(3.9525e-10).epsilon(1e-9));
    CHECK(temperature_rise_from_shift(1530e-9 + 400e-12, 1530e-9, a) == doctest::Approx(50.600885515496521).epsilon(1e-12));
    CHECK_THROWS_AS((void)shifted_wavelength(-1.0, 1530e-9, a), ValidationError);
}

TEST_CASE("temperature and wavelength maps are inverse")
{
    const double a = thermo_optic_coefficient();
    for (double dT : {0.0, 0.5, 12.0, 80.0}) {
        CHECK(temperature_rise_from_shift(shifted_wavelength(dT, 1530e-9, a), 1530e-9, a)
              == doctest::Approx(dT).epsilon(1e-9));
    }
}

TEST_CASE("heat balance and lineshape parameter")
{
    const ThermalModel th{thermo_optic_coefficient(), 3.4e-6, 0.1, 0.0};
    // 170 uW absorbed into 3.4 uW/K gives 50 K.
    CHECK(equilibrium_temperature(1.7e-3, th) == doctest::Approx(50.0).epsilon(1e-12));
    const double d = thermal_shift_parameter(1530e-9, th, 2e-3);
    // d (1 - T) with (1 - T) = P_d / P_i reproduces the equilibrium shift.
    const double pd = 0.8e-3;
    CHECK(d * (pd / 2e-3) == doctest::Approx(shifted_wavelength(equilibrium_temperature(pd, th), 1530e-9, th.a) - 1530e-9)
                                 .epsilon(1e-12));
    ThermalModel bad = th;
    bad.conductance = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("d = 0 reproduces the cold-cavity transmission")
{
    const auto m = device();
    const auto req = ramp(m, 0.0, 101, ScanDirection::up);
    const auto s = bistable_sweep(req, m, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double det = detuning_from_wavelength_offset(req.lambda_s[i] - m.lambda_o, m.lambda_o);
        CHECK(s.transmission[i] == doctest::Approx(transmission(det, m)).epsilon(1e-14));
    }
}

TEST_CASE("every sample solves the fixed point")
{
    const auto m = device();
    const double d = 3.0 * loaded_linewidth_wavelength(m);
    for (auto dir : {ScanDirection::up, ScanDirection::down}) {
        const auto s = bistable_sweep_detailed(ramp(m, d, 401, dir), m, d);
        for (std::size_t i = 0; i < s.trace.size(); ++i) {
            CHECK(std::abs(thermal_fixed_point_residual(s.thermal_shift[i], s.trace.lambda_s[i], m, d)) <= 1e-12 * d);
            CHECK(s.thermal_shift[i] >= 0.0);
            CHECK(s.thermal_shift[i] <= d);
        }
    }
}

TEST_CASE("branch following matches a brute-force nearest-root oracle")
{
    const auto m = device();
    const double d = 3.0 * loaded_linewidth_wavelength(m);
    for (auto dir : {ScanDirection::up, ScanDirection::down}) {
        const auto req = ramp(m, d, 121, dir);
        const auto s = bistable_sweep_detailed(req, m, d);
        double prev = 0.0;
        for (std::size_t i = 0; i < req.lambda_s.size(); ++i) {
            const auto roots = all_roots(req.lambda_s[i], m, d);
            REQUIRE(!roots.empty());
            const double nearest = *std::min_element(roots.begin(), roots.end(), [&](double a, double b) {
                return std::abs(a - prev) < std::abs(b - prev);
            });
            CHECK(s.thermal_shift[i] == doctest::Approx(nearest).epsilon(1e-4).scale(d));
            prev = s.thermal_shift[i];
        }
    }
}

TEST_CASE("hysteresis: up-scan drags the resonance further than the down-scan")
{
    // Critically coupled, so the full thermal shift d is reachable on the hot branch.
    const OpticalMode m{1530e-9, 1.2e5, 6.0e4, 0.0};
    const double lw = loaded_linewidth_wavelength(m);
    const double d = 3.0 * lw;
    const auto up = bistable_sweep(ramp(m, d, 801, ScanDirection::up), m, d);
    const auto down = bistable_sweep(ramp(m, d, 801, ScanDirection::down), m, d);
    const auto jump_up = jump_wavelength(up);
    const auto jump_down = jump_wavelength(down);
    REQUIRE(jump_up.has_value());
    REQUIRE(jump_down.has_value());
    CHECK(*jump_up > *jump_down + lw);
    // The up-scan minimum sits near lambda_o + d.
    const auto imin = std::min_element(up.transmission.begin(), up.transmission.end()) - up.transmission.begin();
    CHECK(std::abs(up.lambda_s[static_cast<std::size_t>(imin)] - (m.lambda_o + d)) < 0.5 * lw);
}

TEST_CASE("detuning extraction removes the thermal shift")
{
    const auto m = device();
    const double d = 2.0 * loaded_linewidth_wavelength(m);
    const auto req = ramp(m, d, 301, ScanDirection::up);
    const auto s = bistable_sweep_detailed(req, m, d);
    const auto det = extract_detuning(s.trace, {m.lambda_o, d});
    for (std::size_t i = 0; i < det.size(); ++i) {
        const double expect =
            detuning_from_wavelength_offset(req.lambda_s[i] - m.lambda_o - s.thermal_shift[i], m.lambda_o);
        CHECK(det[i] == doctest::Approx(expect).epsilon(1e-9).scale(m.gamma_loaded()));
    }
}

TEST_CASE("sweep request validation")
{
    const auto m = device();
    SweepRequest r = ramp(m, 0.0, 11, ScanDirection::up);
    CHECK_THROWS_AS((void)bistable_sweep(r, m, -1e-12), ValidationError);
    r.scan_direction = ScanDirection::down;
    CHECK_THROWS_AS((void)bistable_sweep(r, m, 0.0), ValidationError);
    SweepTrace single;
    single.lambda_s = {1.0e-6};
    single.transmission = {1.0};
    CHECK_FALSE(jump_wavelength(single).has_value());
}
