#include "omkit/synthetic.hpp"

#include "omkit/errors.hpp"

#include <random>

namespace omkit {

std::vector<double> interior_detunings(double lo, double hi, std::size_t n)
{
    require(n >= 1, "interior_detunings: need at least one point");
    require(hi > lo, "interior_detunings: empty interval");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    }
    return out;
}

double input_power_for_peak_photons(double photon_number, const OpticalMode& mode)
{
    mode.validate();
    require(photon_number >= 0.0, "photon number must be non-negative");
    const double per_watt = intracavity_photons_from_field(0.0, 1.0, mode);
    return photon_number / per_watt;
}

std::vector<BackactionRecord> synthesize_backaction(const BackactionSweepSpec& spec, const OpticalMode& mode,
                                                    const MechanicalMode& mech, const OptomechanicalCoupling& g,
                                                    double alpha)
{
    mode.validate();
    mech.validate();
    g.validate();
    require(spec.input_power >= 0.0, "synthesize_backaction: input power must be non-negative");
    require(spec.sigma_dgamma >= 0.0 && spec.sigma_domega >= 0.0, "synthesize_backaction: sigma must be non-negative");

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<BackactionRecord> out;
    out.reserve(spec.detunings.size());
    for (const double delta : spec.detunings) {
        const double pd = dropped_power(transmission(delta, mode), spec.input_power);
        const auto op = OperatingPoint::from_dropped_power(delta, pd, mode);
        BackactionRecord r;
        r.detuning = delta;
        r.photon_number = op.photon_number;
        r.dropped_power = pd;
        r.sigma_dgamma = spec.sigma_dgamma;
        // Two draws per point, always, so the damping noise does not depend
        // on whether spring noise is requested.
        const double n1 = unit(rng);
        const double n2 = unit(rng);
        r.dgamma = damping_shift(op, g, mode, mech) + spec.sigma_dgamma * n1;
        r.domega = frequency_shift(op, g, mode, mech, alpha) + spec.sigma_domega * n2;
        out.push_back(r);
    }
    return out;
}

std::vector<DampingSample> damping_samples(const std::vector<BackactionRecord>& records)
{
    std::vector<DampingSample> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back({r.detuning, r.photon_number, r.dgamma, r.sigma_dgamma > 0.0 ? r.sigma_dgamma : 1.0});
    }
    return out;
}

std::vector<SpringSample> spring_samples(const std::vector<BackactionRecord>& records)
{
    std::vector<SpringSample> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back({r.detuning, r.photon_number, r.dropped_power, r.domega});
    }
    return out;
}

} // namespace omkit
