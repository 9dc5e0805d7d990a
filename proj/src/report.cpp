#include "omkit/report.hpp"

#include "omkit/errors.hpp"
#include "omkit/mechanics.hpp"
#include "omkit/spin.hpp"
#include "omkit/thermal.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace omkit {

std::vector<ReportEntry> cmd_report(const DeviceConfig& config, const ReportInputs& inputs)
{
    config.validate();
    const auto& op = inputs.operating;
    op.validate();
    require(inputs.temperature >= 0.0, "report: temperature must be non-negative");
    const auto& mech = config.mechanics;
    const auto& optics = config.optics;
    const auto& g = config.coupling;
    const double temp = inputs.temperature;

    std::vector<ReportEntry> out;
    auto add = [&](std::string name, double value, std::string units, std::string formula) {
        out.push_back({std::move(name), value, std::move(units), std::move(formula)});
    };

    add("x_zpm", zero_point_motion(mech), "m", "sqrt(hbar / (2 m_eff omega_m))");
    add("x_th", thermal_amplitude(mech, temp), "m", "sqrt(k_B T / (m_eff omega_m^2))");
    add("n_th", thermal_occupancy(mech, temp), "", "1 / (exp(hbar omega_m / k_B T) - 1)");
    add("qf_product", qf_product(mech), "Hz", "Q_m f_m");
    add("coherence_ratio", coherence_ratio(mech, temp), "", "Q_m / n_th");
    add("sideband_ratio", optics.gamma_loaded() / mech.omega_m(), "", "gamma_o / omega_m");
    add("cooperativity", cooperativity(op, g, optics, mech), "", "N g0^2 / (gamma_o gamma_m)");
    add("damping_shift", damping_shift(op, g, optics, mech), "rad/s",
        "g0^2 N [gamma_o / (gamma_o^2/4 + (Delta + omega_m)^2) - gamma_o / (gamma_o^2/4 + (Delta - omega_m)^2)]");
    add("spring_shift", optical_spring_shift(op, g, optics, mech), "rad/s",
        "g0^2 N [(Delta - omega_m) / (gamma_o^2/4 + (Delta - omega_m)^2) + (Delta + omega_m) / (gamma_o^2/4 + (Delta + omega_m)^2)]");
    add("frequency_shift", frequency_shift(op, g, optics, mech, config.thermal.softening_alpha), "rad/s",
        "spring_shift + alpha P_d");
    add("threshold_power", threshold_power(optics, mech, g), "W",
        "m_eff omega_o / (2 g_om^2) (gamma_m gamma_i / (omega_m gamma_o)) (gamma_o/2)^2 (4 omega_m^2 + (gamma_o/2)^2)");
    add("temperature_rise", equilibrium_temperature(op.dropped_power, config.thermal), "K",
        "(gamma_abs / gamma_tot) P_d / K");
    add("spin_single_phonon_coupling", single_phonon_coupling(mech, config.spin), "Hz", "d_spin eps_zpm");
    add("spin_excited_state_coupling", excited_state_coupling(mech, config.spin), "Hz",
        "excited_state_factor d_spin eps_zpm");
    if (inputs.oscillation_amplitude) {
        add("spin_driven_coupling", driven_coupling(mech, config.spin, *inputs.oscillation_amplitude), "Hz",
            "(d_spin eps_zpm) x_om / x_zpm");
    }
    return out;
}

std::string format_report_json(const DeviceConfig& config, const std::vector<ReportEntry>& entries)
{
    nlohmann::ordered_json doc;
    doc["device"] = config.name;
    auto list = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        list.push_back({{"name", e.name}, {"value", e.value}, {"units", e.units}, {"formula", e.formula}});
    }
    doc["entries"] = list;
    return doc.dump(2) + "\n";
}

std::string format_report_csv(const std::vector<ReportEntry>& entries)
{
    std::string out = "name,value,units,formula\n";
    for (const auto& e : entries) {
        out += fmt::format("{},{},{},\"{}\"\n", e.name, e.value, e.units, e.formula);
    }
    return out;
}

} // namespace omkit
