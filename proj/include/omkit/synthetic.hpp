#pragma once

#include "omkit/backaction.hpp"
#include "omkit/fitting.hpp"

#include <cstdint>
#include <vector>

namespace omkit {

// Photon number and dropped power at each detuning follow the cold-cavity
// lineshape for a fixed input power.
struct BackactionSweepSpec {
    std::vector<double> detunings;   // rad/s
    double input_power = 0.0;        // W
    double sigma_dgamma = 0.0;       // rad/s, Gaussian noise on delta gamma_m
    double sigma_domega = 0.0;       // rad/s, Gaussian noise on delta omega_m
    std::uint64_t seed = 0;
};

struct BackactionRecord {
    double detuning = 0.0;        // rad/s
    double photon_number = 0.0;
    double dropped_power = 0.0;   // W
    double dgamma = 0.0;          // rad/s
    double domega = 0.0;          // rad/s
    double sigma_dgamma = 0.0;    // rad/s
};

[[nodiscard]] std::vector<BackactionRecord> synthesize_backaction(const BackactionSweepSpec& spec,
                                                                  const OpticalMode& mode,
                                                                  const MechanicalMode& mech,
                                                                  const OptomechanicalCoupling& g, double alpha);

// Evenly spaced detunings strictly inside (lo, hi).
[[nodiscard]] std::vector<double> interior_detunings(double lo, double hi, std::size_t n);

// Input power that puts `photon_number` in the cavity on resonance.
[[nodiscard]] double input_power_for_peak_photons(double photon_number, const OpticalMode& mode);

[[nodiscard]] std::vector<DampingSample> damping_samples(const std::vector<BackactionRecord>& records);
[[nodiscard]] std::vector<SpringSample> spring_samples(const std::vector<BackactionRecord>& records);

} // namespace omkit
