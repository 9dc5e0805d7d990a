#pragma once

#include "omkit/backaction.hpp"
#include "omkit/fitting.hpp"
#include "omkit/mechanics.hpp"
#include "omkit/optics.hpp"
#include "omkit/spectra.hpp"
#include "omkit/spin.hpp"
#include "omkit/synthetic.hpp"
#include "omkit/thermal.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace omkit {

struct DeviceConfig {
    std::string name;
    OpticalMode optics;
    MechanicalMode mechanics;
    ThermalModel thermal;
    OptomechanicalCoupling coupling;
    SpinSusceptibility spin;

    void validate() const;
};

// Built-in preset: the 5 um diamond microdisk with a 2.1 GHz breathing mode.
[[nodiscard]] DeviceConfig default_device();

[[nodiscard]] DeviceConfig parse_device_config(std::string_view json_text);
[[nodiscard]] std::string format_device_config(const DeviceConfig& config);
[[nodiscard]] DeviceConfig read_device_config(const std::filesystem::path& path);
void write_device_config(const std::filesystem::path& path, const DeviceConfig& config);

// Acquisition metadata lives in a JSON sidecar with the same stem.
[[nodiscard]] std::filesystem::path sidecar_path(const std::filesystem::path& csv);

// lambda_m,transmission
void write_sweep(const std::filesystem::path& csv, const SweepTrace& trace);
[[nodiscard]] SweepTrace read_sweep(const std::filesystem::path& csv);

// freq_hz,psd
void write_spectrum(const std::filesystem::path& csv, const SpectrumTrace& trace);
[[nodiscard]] SpectrumTrace read_spectrum(const std::filesystem::path& csv);

// detuning_rad_s,photon_number,dropped_power_w,dgamma_rad_s,domega_rad_s,sigma_rad_s
[[nodiscard]] std::string format_backaction_csv(const std::vector<BackactionRecord>& records);
void write_backaction(const std::filesystem::path& csv, const std::vector<BackactionRecord>& records);
[[nodiscard]] std::vector<BackactionRecord> read_backaction(const std::filesystem::path& csv);

[[nodiscard]] std::string format_fit_report(const FitResult& fit);
[[nodiscard]] FitResult parse_fit_report(std::string_view json_text);

enum class Environment { ambient, low_pressure, cryogenic };

[[nodiscard]] std::string_view to_string(Environment env);
[[nodiscard]] Environment environment_from_string(std::string_view s);

struct SurveyEntry {
    std::string label;
    std::string material;
    std::string structure;
    double qf_hz = 0.0;
    Environment environment = Environment::ambient;

    void validate() const;
};

// label,material,structure,qf_hz,environment
[[nodiscard]] std::vector<SurveyEntry> parse_survey(std::string_view csv_text);
[[nodiscard]] std::vector<SurveyEntry> read_survey(const std::filesystem::path& csv);
[[nodiscard]] std::string format_survey(const std::vector<SurveyEntry>& entries);
// Descending Q*f; ties broken by label so the order is total.
[[nodiscard]] std::vector<SurveyEntry> sort_survey(std::vector<SurveyEntry> entries);
// rank,label,environment,qf_hz,log10_qf_hz for scatter plots grouped by environment.
[[nodiscard]] std::string format_survey_plot_data(const std::vector<SurveyEntry>& sorted);

[[nodiscard]] std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

} // namespace omkit
