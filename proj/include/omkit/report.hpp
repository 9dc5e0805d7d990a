#pragma once

#include "omkit/backaction.hpp"
#include "omkit/constants.hpp"
#include "omkit/io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace omkit {

struct ReportEntry {
    std::string name;
    double value = 0.0;
    std::string units;
    std::string formula;
};

struct ReportInputs {
    OperatingPoint operating;                  // photon number and dropped power at the drive
    std::optional<double> oscillation_amplitude;   // m, self-oscillation amplitude x_om
    double temperature = kRoomTemperature;     // K
};

// Headline figures of merit for a device at an operating point. Pure: the
// same inputs always yield the same entries in the same order.
[[nodiscard]] std::vector<ReportEntry> cmd_report(const DeviceConfig& config, const ReportInputs& inputs);

[[nodiscard]] std::string format_report_json(const DeviceConfig& config, const std::vector<ReportEntry>& entries);
[[nodiscard]] std::string format_report_csv(const std::vector<ReportEntry>& entries);

} // namespace omkit
