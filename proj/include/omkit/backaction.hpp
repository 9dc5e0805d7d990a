#pragma once

#include "omkit/mechanics.hpp"
#include "omkit/optics.hpp"

namespace omkit {

struct OptomechanicalCoupling {
    double g0 = 0.0;   // rad/s, single-photon coupling rate

    // g_om = g0 / x_zpm in rad/(s m).
    [[nodiscard]] double g_om(const MechanicalMode& mech) const;
    void validate() const;
};

struct OperatingPoint {
    double detuning = 0.0;        // rad/s, omega_s - omega_o
    double photon_number = 0.0;
    double dropped_power = 0.0;   // W

    // Fills photon_number from dropped power for the given mode.
    [[nodiscard]] static OperatingPoint from_dropped_power(double detuning, double dropped_power,
                                                           const OpticalMode& mode);
    void validate() const;
    // Additionally requires photon_number == intracavity_photons(dropped_power) to rel_tol.
    void validate_consistency(const OpticalMode& mode, double rel_tol = 1e-6) const;
};

// Radiation-pressure damping change delta gamma_m (rad/s). Uses the loaded
// optical decay rate. Negative on the blue side (anti-damping).
[[nodiscard]] double damping_shift(const OperatingPoint& op, const OptomechanicalCoupling& g,
                                   const OpticalMode& mode, const MechanicalMode& mech);

// Optical-spring part of delta omega_m (rad/s).
[[nodiscard]] double optical_spring_shift(const OperatingPoint& op, const OptomechanicalCoupling& g,
                                          const OpticalMode& mode, const MechanicalMode& mech);

// Optical spring plus static thermal softening alpha * P_d.
[[nodiscard]] double frequency_shift(const OperatingPoint& op, const OptomechanicalCoupling& g,
                                     const OpticalMode& mode, const MechanicalMode& mech, double alpha);

// C = N g0^2 / (gamma_o gamma_m) with the loaded optical rate.
[[nodiscard]] double cooperativity(const OperatingPoint& op, const OptomechanicalCoupling& g,
                                   const OpticalMode& mode, const MechanicalMode& mech);

// Dropped-power threshold for self-oscillation at the optimal blue detuning
// (Delta ~ omega_m), in W.
[[nodiscard]] double threshold_power(const OpticalMode& mode, const MechanicalMode& mech,
                                     const OptomechanicalCoupling& g);

struct ImpliedIntrinsicQ {
    double q_intrinsic = 0.0;
    // False when the solution is below the loaded Q, i.e. not realizable by
    // adding fiber loading to the cavity.
    bool consistent_with_loading = false;
};

// Intrinsic Q that makes threshold_power equal `target_power` with the loaded
// Q of `mode` held fixed. Root search over Q_i in [1e2, 1e10].
[[nodiscard]] ImpliedIntrinsicQ intrinsic_q_for_threshold(double target_power, const OpticalMode& mode,
                                                          const MechanicalMode& mech,
                                                          const OptomechanicalCoupling& g);

struct SelfOscillation {
    bool oscillating = false;
    double margin = 0.0;   // gamma_m + delta gamma_m, rad/s; <= 0 means oscillating
};

[[nodiscard]] SelfOscillation is_self_oscillating(const OperatingPoint& op, const OptomechanicalCoupling& g,
                                                  const OpticalMode& mode, const MechanicalMode& mech);

} // namespace omkit
