#pragma once

#include <numbers>

namespace omkit {

// CODATA 2018 exact / recommended values, SI units.
inline constexpr double kSpeedOfLight = 299792458.0;     // m/s
inline constexpr double kHbar = 1.054571817e-34;         // J s
inline constexpr double kBoltzmann = 1.380649e-23;       // J/K
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kRoomTemperature = 295.0;        // K

[[nodiscard]] constexpr double to_angular(double hz) { return kTwoPi * hz; }
[[nodiscard]] constexpr double to_hz(double rad_per_s) { return rad_per_s / kTwoPi; }

} // namespace omkit
