#pragma once

#include "omkit/mechanics.hpp"

namespace omkit {

// NV-center strain response. Kept distinct from the thermal lineshape
// parameter, which shares the letter d in most write-ups.
struct SpinSusceptibility {
    double ground_state_d = 20.0e9;        // Hz per unit strain
    double excited_state_factor = 1.0e5;   // excited-state / ground-state susceptibility
    double location_derating = 1.0;       // strain at the NV relative to the mode maximum, (0, 1]

    void validate() const;
};

// Single-phonon coupling g/2pi in Hz, from the mode's zero-point strain.
[[nodiscard]] double single_phonon_coupling(const MechanicalMode& mech, const SpinSusceptibility& spin);
// Same, for an explicitly supplied zero-point strain.
[[nodiscard]] double single_phonon_coupling(double zero_point_strain, const SpinSusceptibility& spin);

// Coherently driven coupling G/2pi in Hz for a mechanical amplitude in m.
[[nodiscard]] double driven_coupling(const MechanicalMode& mech, const SpinSusceptibility& spin, double amplitude);

// Excited-state single-phonon coupling, g/2pi times the excited-state factor.
[[nodiscard]] double excited_state_coupling(const MechanicalMode& mech, const SpinSusceptibility& spin);

} // namespace omkit
