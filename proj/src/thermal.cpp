#include "omkit/thermal.hpp"

#include "omkit/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace omkit {

namespace {

constexpr double kBracketStepsPerLinewidth = 50.0;
constexpr std::uintmax_t kMaxRefineIterations = 200;

double cold_transmission(double lambda_offset, const OpticalMode& mode)
{
    const double detuning = detuning_from_wavelength_offset(lambda_offset, mode.lambda_o);
    return std::norm(transmission_amplitude(detuning, mode));
}

double residual(double u, double lambda_s, const OpticalMode& mode, double d)
{
    return u - d * (1.0 - cold_transmission(lambda_s - mode.lambda_o - u, mode));
}

// Root of the fixed-point residual in [0, d] nearest to `u_prev`. Brackets are
// grown symmetrically around u_prev in steps of `step`, so the first sign change
// found is the closest root to grid resolution.
double nearest_root(double lambda_s, const OpticalMode& mode, double d, double u_prev, double step)
{
    auto g = [&](double u) { return residual(u, lambda_s, mode, d); };
    u_prev = std::clamp(u_prev, 0.0, d);
    const double g_prev = g(u_prev);
    if (g_prev == 0.0) {
        return u_prev;
    }

    double lo_a = u_prev, lo_ga = g_prev;   // downward frontier
    double hi_a = u_prev, hi_ga = g_prev;   // upward frontier
    std::pair<double, double> bracket{};
    bool found = false;
    while (!found) {
        const bool can_down = lo_a > 0.0;
        const bool can_up = hi_a < d;
        if (!can_down && !can_up) {
            break;
        }
        if (can_down) {
            const double b = std::max(0.0, lo_a - step);
            const double gb = g(b);
            if (gb == 0.0) {
                return b;
            }
            if ((gb < 0.0) != (lo_ga < 0.0)) {
                bracket = {b, lo_a};
                found = true;
            }
            lo_a = b;
            lo_ga = gb;
        }
        if (!found && can_up) {
            const double b = std::min(d, hi_a + step);
            const double gb = g(b);
            if (gb == 0.0) {
                return b;
            }
            if ((gb < 0.0) != (hi_ga < 0.0)) {
                bracket = {hi_a, b};
                found = true;
            }
            hi_a = b;
            hi_ga = gb;
        }
    }
    if (!found) {
        throw NonConvergence("bistable_sweep: no sign change of the thermal residual in [0, d] at lambda_s = "
                             + std::to_string(lambda_s));
    }

    std::uintmax_t iterations = kMaxRefineIterations;
    const auto tol = boost::math::tools::eps_tolerance<double>(52);
    const auto r = boost::math::tools::toms748_solve(g, bracket.first, bracket.second, tol, iterations);
    if (iterations >= kMaxRefineIterations) {
        throw NonConvergence("bistable_sweep: root refinement exceeded iteration budget at lambda_s = "
                             + std::to_string(lambda_s));
    }
    return 0.5 * (r.first + r.second);
}

} // namespace

void ThermalModel::validate() const
{
    require(std::isfinite(a) && a > 0.0, "thermal: a must be positive");
    require(std::isfinite(conductance) && conductance > 0.0, "thermal: conductance must be positive");
    require(absorbed_fraction >= 0.0 && absorbed_fraction <= 1.0, "thermal: absorbed_fraction outside [0, 1]");
    require(std::isfinite(softening_alpha), "thermal: softening_alpha must be finite");
}

double thermo_optic_coefficient(const ThermoOpticInputs& in)
{
    require(in.refractive_index > 0.0, "thermo_optic_coefficient: refractive index must be positive");
    return in.eta_strain * in.expansion + in.eta_thermal * in.dn_dT / in.refractive_index;
}

double shifted_wavelength(double delta_T, double lambda_o, double a)
{
    require(delta_T >= 0.0, "shifted_wavelength: temperature rise must be non-negative");
    return lambda_o * (1.0 + a * delta_T);
}

double temperature_rise_from_shift(double shifted_lambda, double lambda_o, double a)
{
    require(a > 0.0 && lambda_o > 0.0, "temperature_rise_from_shift: a and lambda_o must be positive");
    return (shifted_lambda / lambda_o - 1.0) / a;
}

double equilibrium_temperature(double dropped_power, const ThermalModel& model)
{
    model.validate();
    require(dropped_power >= 0.0, "equilibrium_temperature: dropped power must be non-negative");
    return model.absorbed_fraction * dropped_power / model.conductance;
}

double thermal_shift_parameter(double lambda_o, const ThermalModel& model, double input_power)
{
    model.validate();
    require(input_power >= 0.0, "thermal_shift_parameter: input power must be non-negative");
    return lambda_o * (model.a / model.conductance) * model.absorbed_fraction * input_power;
}

double thermal_fixed_point_residual(double u, double lambda_s, const OpticalMode& mode, double d_param)
{
    return residual(u, lambda_s, mode, d_param);
}

BistableSweep bistable_sweep_detailed(const SweepRequest& request, const OpticalMode& mode, double d_param)
{
    mode.validate();
    require(std::isfinite(d_param) && d_param >= 0.0, "bistable_sweep: d must be non-negative");

    BistableSweep out;
    out.trace.lambda_s = request.lambda_s;
    out.trace.input_power = request.input_power;
    out.trace.scan_direction = request.scan_direction;
    out.trace.transmission.reserve(request.lambda_s.size());
    out.thermal_shift.reserve(request.lambda_s.size());

    const double step = std::min(d_param, loaded_linewidth_wavelength(mode) / kBracketStepsPerLinewidth);
    double u = 0.0;
    for (const double lambda_s : request.lambda_s) {
        if (d_param > 0.0) {
            u = nearest_root(lambda_s, mode, d_param, u, step);
        }
        out.thermal_shift.push_back(u);
        out.trace.transmission.push_back(
            std::clamp(cold_transmission(lambda_s - mode.lambda_o - u, mode), 0.0, 1.0));
    }
    out.trace.validate();
    return out;
}

SweepTrace bistable_sweep(const SweepRequest& request, const OpticalMode& mode, double d_param)
{
    return bistable_sweep_detailed(request, mode, d_param).trace;
}

std::vector<double> extract_detuning(const SweepTrace& trace, const LineshapeParameters& fitted)
{
    require(fitted.lambda_o > 0.0, "extract_detuning: lambda_o must be positive");
    require(fitted.d >= 0.0, "extract_detuning: d must be non-negative");
    std::vector<double> out;
    out.reserve(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double offset = trace.lambda_s[i] - fitted.lambda_o - fitted.d * (1.0 - trace.transmission[i]);
        out.push_back(detuning_from_wavelength_offset(offset, fitted.lambda_o));
    }
    return out;
}

std::optional<double> jump_wavelength(const SweepTrace& trace)
{
    if (trace.size() < 2) {
        return std::nullopt;
    }
    std::vector<std::size_t> order(trace.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t l, std::size_t r) { return trace.lambda_s[l] < trace.lambda_s[r]; });
    double best = -1.0;
    double where = 0.0;
    for (std::size_t k = 1; k < order.size(); ++k) {
        const double step = std::abs(trace.transmission[order[k]] - trace.transmission[order[k - 1]]);
        if (step > best) {
            best = step;
            where = 0.5 * (trace.lambda_s[order[k]] + trace.lambda_s[order[k - 1]]);
        }
    }
    return where;
}

} // namespace omkit
