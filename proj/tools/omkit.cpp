// omkit: command-line front end for the microdisk optomechanics toolkit.

#include "omkit/backaction.hpp"
#include "omkit/constants.hpp"
#include "omkit/errors.hpp"
#include "omkit/fitting.hpp"
#include "omkit/io.hpp"
#include "omkit/report.hpp"
#include "omkit/selftest.hpp"
#include "omkit/spectra.hpp"
#include "omkit/spin.hpp"
#include "omkit/synthetic.hpp"
#include "omkit/thermal.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

using namespace omkit;
using Json = nlohmann::ordered_json;

namespace {

struct Common {
    std::string config;
    std::string in;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string scan_dir = "up";
    std::string format = "json";
};

DeviceConfig load_config(const Common& c)
{
    return c.config.empty() ? default_device() : read_device_config(c.config);
}

void emit(const Common& c, const std::string& text)
{
    if (c.out.empty()) {
        std::cout << text;
    } else {
        write_text(c.out, text);
    }
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

// Text output for commands that return named scalars.
std::string scalars(const Common& c, const Json& values)
{
    if (c.format == "json") {
        return json_text(values);
    }
    std::string out = "name,value\n";
    for (const auto& [k, v] : values.items()) {
        out += fmt::format("{},{}\n", k, v.dump());
    }
    return out;
}

std::string fit_text(const Common& c, const FitResult& fit)
{
    if (c.format == "json") {
        return format_fit_report(fit);
    }
    std::string out = "parameter,estimate,ci95,units\n";
    for (const auto& p : fit.parameters) {
        out += fmt::format("{},{},{},{}\n", p.name, p.estimate, p.ci95, p.units);
    }
    return out;
}

std::vector<double> linspace(double a, double b, std::size_t n)
{
    require(n >= 2, "need at least two points");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

std::string require_out(const Common& c, const char* what)
{
    if (c.out.empty()) {
        throw ValidationError(std::string(what) + " requires --out <path.csv>");
    }
    return c.out;
}

void add_common(CLI::App* cmd, Common& c, bool with_in, bool with_format = true)
{
    cmd->add_option("--config", c.config, "device configuration JSON (default: built-in preset)");
    if (with_in) {
        cmd->add_option("--in", c.in, "input CSV")->required();
    }
    cmd->add_option("--out", c.out, "output path (default: stdout)");
    if (with_format) {
        cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Microdisk cavity optomechanics modeling and analysis"};
    app.require_subcommand(1);
    Common c;

    // report
    auto* report = app.add_subcommand("report", "figures of merit for a device at an operating point");
    add_common(report, c, false);
    double rep_detuning_hz = 0.0, rep_pd = 0.0, rep_temp = kRoomTemperature;
    std::optional<double> rep_photons, rep_xom;
    report->add_option("--detuning-hz", rep_detuning_hz, "laser detuning Delta/2pi");
    report->add_option("--dropped-power-w", rep_pd, "dropped power P_d");
    report->add_option("--photons", rep_photons, "intracavity photon number (default: from P_d)");
    report->add_option("--x-om-m", rep_xom, "self-oscillation amplitude");
    report->add_option("--temperature-k", rep_temp, "bath temperature");

    // transmission
    auto* trans = app.add_subcommand("transmission", "cold-cavity transmission spectrum");
    add_common(trans, c, false, false);
    double tr_span = 5.0, tr_power = 1e-3;
    std::size_t tr_points = 401;
    trans->add_option("--span-linewidths", tr_span, "half-span around the resonance");
    trans->add_option("--points", tr_points);
    trans->add_option("--input-power-w", tr_power);
    trans->add_option("--scan-dir", c.scan_dir)->check(CLI::IsMember({"up", "down"}));

    // bistable-sweep
    auto* sweep = app.add_subcommand("bistable-sweep", "thermally broadened transmission sweep");
    add_common(sweep, c, false, false);
    double sw_power = 1e-3, sw_below = 4.0, sw_above = 4.0;
    std::optional<double> sw_d;
    std::size_t sw_points = 801;
    sweep->add_option("--input-power-w", sw_power);
    sweep->add_option("--d-m", sw_d, "thermal lineshape parameter (default: from the thermal model)");
    sweep->add_option("--below-linewidths", sw_below);
    sweep->add_option("--above-linewidths", sw_above, "margin beyond lambda_o + d");
    sweep->add_option("--points", sw_points);
    sweep->add_option("--scan-dir", c.scan_dir)->check(CLI::IsMember({"up", "down"}));

    // fit-lineshape
    auto* fitls = app.add_subcommand("fit-lineshape", "fit lambda_o, Q_i, Q_ex, d (and splitting) to a sweep");
    add_common(fitls, c, true);
    BistableFitOptions ls_opt;
    bool ls_cold = false, ls_over = false;
    fitls->add_flag("--cold", ls_cold, "no thermal broadening (d = 0)");
    fitls->add_flag("--doublet", ls_opt.fit_splitting, "fit a doublet splitting (implies --cold)");
    fitls->add_flag("--overcoupled", ls_over, "take the over-coupled branch");
    fitls->add_option("--starts", ls_opt.starts);

    // psd-synth
    auto* psd = app.add_subcommand("psd-synth", "synthesize a photodetected mechanical spectrum");
    add_common(psd, c, false, false);
    double ps_detuning_hz = 0.0, ps_power = 1e-3, ps_floor_rel = 0.1, ps_avg = 100.0, ps_span = 10.0,
           ps_temp = kRoomTemperature;
    std::size_t ps_points = 1001;
    bool ps_backaction = false;
    psd->add_option("--detuning-hz", ps_detuning_hz, "Delta/2pi (default: 0.3 gamma_o/2pi)");
    psd->add_option("--input-power-w", ps_power);
    psd->add_option("--floor-rel", ps_floor_rel, "noise floor relative to the peak");
    psd->add_option("--averages", ps_avg, "spectra averaged per bin (noise only with --seed)");
    psd->add_option("--span-linewidths", ps_span);
    psd->add_option("--points", ps_points);
    psd->add_option("--temperature-k", ps_temp);
    psd->add_flag("--backaction", ps_backaction, "dress the mode with damping and spring at this drive");
    psd->add_option("--seed", c.seed);

    // fit-psd
    auto* fitpsd = app.add_subcommand("fit-psd", "Lorentzian fit of a spectrum");
    add_common(fitpsd, c, true);
    std::string psd_cov = "sandwich";
    fitpsd->add_option("--covariance", psd_cov)->check(CLI::IsMember({"standard", "sandwich"}));

    // backaction-sweep
    auto* ba = app.add_subcommand("backaction-sweep", "damping and spring shifts versus detuning");
    add_common(ba, c, false, false);
    double ba_lo = 0.0, ba_hi = 0.0, ba_power = 6.4e-3, ba_sg = 0.0, ba_sw = 0.0;
    std::optional<double> ba_alpha;
    std::size_t ba_points = 12;
    ba->add_option("--detuning-min-hz", ba_lo, "default: 0");
    ba->add_option("--detuning-max-hz", ba_hi, "default: 2 f_m");
    ba->add_option("--points", ba_points);
    ba->add_option("--input-power-w", ba_power);
    ba->add_option("--sigma-dgamma-hz", ba_sg, "Gaussian noise on delta gamma_m / 2pi");
    ba->add_option("--sigma-domega-hz", ba_sw, "Gaussian noise on delta omega_m / 2pi");
    ba->add_option("--alpha-rad-s-per-w", ba_alpha, "default: thermal.softening_alpha_rad_s_per_w");
    ba->add_option("--seed", c.seed);

    // fit-g0 / fit-alpha
    auto* fg0 = app.add_subcommand("fit-g0", "fit g0 to damping data");
    add_common(fg0, c, true);
    auto* falpha = app.add_subcommand("fit-alpha", "fit the softening coefficient with g0 fixed");
    add_common(falpha, c, true);
    std::optional<double> fa_g0;
    falpha->add_option("--g0-rad-s", fa_g0, "default: coupling.g0_rad_s");

    // threshold
    auto* thr = app.add_subcommand("threshold", "self-oscillation threshold power");
    add_common(thr, c, false);
    std::optional<double> thr_target;
    thr->add_option("--target-power-w", thr_target, "solve for the intrinsic Q giving this threshold");

    // calibrate-amplitude
    auto* cal = app.add_subcommand("calibrate-amplitude", "oscillation amplitude from thermal/driven spectra");
    add_common(cal, c, false);
    std::string cal_thermal, cal_driven;
    std::optional<double> cal_xth;
    cal->add_option("--thermal", cal_thermal, "low-power reference spectrum CSV")->required();
    cal->add_option("--driven", cal_driven, "driven spectrum CSV")->required();
    cal->add_option("--x-th-m", cal_xth, "thermal amplitude (default: equipartition at 295 K)");

    // spin
    auto* sp = app.add_subcommand("spin", "NV strain coupling estimates");
    add_common(sp, c, false);
    std::optional<double> sp_amp, sp_strain;
    sp->add_option("--amplitude-m", sp_amp, "mechanical amplitude");
    sp->add_option("--strain-zpm", sp_strain, "override the zero-point strain");

    // survey
    auto* sv = app.add_subcommand("survey", "sort a Q*f survey table");
    add_common(sv, c, true, false);
    std::string sv_plot;
    sv->add_option("--plot-data", sv_plot, "write rank/log10 plot data CSV here");

    // selftest
    auto* st = app.add_subcommand("selftest", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*report) {
            const auto cfg = load_config(c);
            ReportInputs in;
            const double det = to_angular(rep_detuning_hz);
            in.operating = rep_photons ? OperatingPoint{det, *rep_photons, rep_pd}
                                       : OperatingPoint::from_dropped_power(det, rep_pd, cfg.optics);
            in.oscillation_amplitude = rep_xom;
            in.temperature = rep_temp;
            const auto entries = cmd_report(cfg, in);
            emit(c, c.format == "json" ? format_report_json(cfg, entries) : format_report_csv(entries));
        } else if (*trans || *sweep) {
            const auto cfg = load_config(c);
            const double lw = loaded_linewidth_wavelength(cfg.optics);
            SweepRequest req;
            req.scan_direction = scan_direction_from_string(c.scan_dir);
            double d = 0.0;
            if (*trans) {
                req.input_power = tr_power;
                req.lambda_s = linspace(cfg.optics.lambda_o - tr_span * lw, cfg.optics.lambda_o + tr_span * lw, tr_points);
            } else {
                req.input_power = sw_power;
                d = sw_d ? *sw_d : thermal_shift_parameter(cfg.optics.lambda_o, cfg.thermal, sw_power);
                req.lambda_s = linspace(cfg.optics.lambda_o - sw_below * lw, cfg.optics.lambda_o + d + sw_above * lw,
                                        sw_points);
            }
            if (req.scan_direction == ScanDirection::down) {
                std::reverse(req.lambda_s.begin(), req.lambda_s.end());
            }
            write_sweep(require_out(c, "sweep output"), bistable_sweep(req, cfg.optics, d));
        } else if (*fitls) {
            ls_opt.undercoupled = !ls_over;
            ls_opt.fit_thermal = !(ls_cold || ls_opt.fit_splitting);
            emit(c, fit_text(c, fit_bistable_lineshape(read_sweep(c.in), ls_opt)));
        } else if (*psd) {
            const auto cfg = load_config(c);
            const auto& mech = cfg.mechanics;
            const double det = ps_detuning_hz != 0.0 ? to_angular(ps_detuning_hz) : 0.3 * cfg.optics.gamma_loaded();
            const double pd = dropped_power(transmission(det, cfg.optics), ps_power);
            const auto op = OperatingPoint::from_dropped_power(det, pd, cfg.optics);
            EffectiveMechanics eff = EffectiveMechanics::bare(mech);
            if (ps_backaction) {
                eff.gamma_eff += damping_shift(op, cfg.coupling, cfg.optics, mech);
                eff.omega_eff += frequency_shift(op, cfg.coupling, cfg.optics, mech, cfg.thermal.softening_alpha);
            }
            const auto grid = frequency_grid(eff.omega_eff, ps_span * eff.gamma_eff, ps_points);
            const auto sxx = lorentzian_sxx(mech, eff, ps_temp, grid);
            const double gom = cfg.coupling.g_om(mech);
            const double peak = gom * gom * ps_power * ps_power * lorentzian_sxx_value(eff.omega_eff, mech, eff, ps_temp)
                                * transduction_gain(eff.omega_eff, op, cfg.optics);
            std::optional<SpectrumNoise> noise;
            if (c.seed) {
                noise = SpectrumNoise{*c.seed, ps_avg};
            }
            write_spectrum(require_out(c, "psd-synth"),
                           synthesize_sp(sxx, op, cfg.optics, mech, cfg.coupling, ps_power, ps_floor_rel * peak, noise));
        } else if (*fitpsd) {
            LorentzianFitOptions opt;
            opt.covariance = psd_cov == "standard" ? CovarianceKind::standard : CovarianceKind::sandwich;
            emit(c, fit_text(c, fit_lorentzian_psd(read_spectrum(c.in), std::nullopt, opt)));
        } else if (*ba) {
            const auto cfg = load_config(c);
            const double hi = ba_hi > 0.0 ? to_angular(ba_hi) : 2.0 * cfg.mechanics.omega_m();
            BackactionSweepSpec spec;
            spec.detunings = interior_detunings(to_angular(ba_lo), hi, ba_points);
            spec.input_power = ba_power;
            spec.sigma_dgamma = to_angular(ba_sg);
            spec.sigma_domega = to_angular(ba_sw);
            spec.seed = c.seed.value_or(0);
            const auto rec = synthesize_backaction(spec, cfg.optics, cfg.mechanics, cfg.coupling,
                                                   ba_alpha.value_or(cfg.thermal.softening_alpha));
            emit(c, format_backaction_csv(rec));
        } else if (*fg0) {
            const auto cfg = load_config(c);
            emit(c, fit_text(c, fit_g0(damping_samples(read_backaction(c.in)), cfg.optics, cfg.mechanics)));
        } else if (*falpha) {
            const auto cfg = load_config(c);
            const OptomechanicalCoupling g{fa_g0.value_or(cfg.coupling.g0)};
            emit(c, fit_text(c, fit_alpha(spring_samples(read_backaction(c.in)), g, cfg.optics, cfg.mechanics)));
        } else if (*thr) {
            const auto cfg = load_config(c);
            Json j;
            if (thr_target) {
                const auto q = intrinsic_q_for_threshold(*thr_target, cfg.optics, cfg.mechanics, cfg.coupling);
                j["target_power_w"] = *thr_target;
                j["q_intrinsic"] = q.q_intrinsic;
                j["consistent_with_loading"] = q.consistent_with_loading;
            } else {
                j["threshold_power_w"] = threshold_power(cfg.optics, cfg.mechanics, cfg.coupling);
            }
            emit(c, scalars(c, j));
        } else if (*cal) {
            const auto cfg = load_config(c);
            const auto th = read_spectrum(cal_thermal);
            const auto dr = read_spectrum(cal_driven);
            const double a_th = fit_lorentzian_psd(th).estimate("area");
            const double a_dr = fit_lorentzian_psd(dr).estimate("area");
            const double x_th = cal_xth.value_or(thermal_amplitude(cfg.mechanics, kRoomTemperature));
            Json j;
            j["area_thermal"] = a_th;
            j["area_driven"] = a_dr;
            j["x_th_m"] = x_th;
            j["x_om_m"] = calibrate_amplitude(a_dr, a_th, th.input_power, dr.input_power, x_th);
            emit(c, scalars(c, j));
        } else if (*sp) {
            const auto cfg = load_config(c);
            Json j;
            const double g_single = sp_strain ? single_phonon_coupling(*sp_strain, cfg.spin)
                                              : single_phonon_coupling(cfg.mechanics, cfg.spin);
            j["single_phonon_coupling_hz"] = g_single;
            j["excited_state_coupling_hz"] = g_single * cfg.spin.excited_state_factor;
            if (sp_amp) {
                require(*sp_amp >= 0.0, "spin: amplitude must be non-negative");
                j["driven_coupling_hz"] = g_single * (*sp_amp / zero_point_motion(cfg.mechanics));
            }
            emit(c, scalars(c, j));
        } else if (*sv) {
            const auto sorted = sort_survey(read_survey(c.in));
            emit(c, format_survey(sorted));
            if (!sv_plot.empty()) {
                write_text(sv_plot, format_survey_plot_data(sorted));
            }
        } else if (*st) {
            return run_acceptance_suite(std::cout) == 0 ? 0 : 1;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
