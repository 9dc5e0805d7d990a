#include "omkit/fitting.hpp"

#include "omkit/constants.hpp"
#include "omkit/errors.hpp"
#include "omkit/thermal.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace omkit {

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double quantile95(double dof)
{
    if (!(dof >= 1.0)) {
        return 1.959963984540054;
    }
    const boost::math::students_t_distribution<double> t(dof);
    return boost::math::quantile(t, 0.975);
}

// Covariance of the parameters at a least-squares optimum. Returns an empty
// matrix when J^T J is singular.
Matrix parameter_covariance(const std::vector<double>& jacobian, const std::vector<double>& residuals,
                            std::size_t np, CovarianceKind kind)
{
    const auto nr = static_cast<Eigen::Index>(residuals.size());
    const auto p = static_cast<Eigen::Index>(np);
    const Eigen::Map<const Matrix> J(jacobian.data(), nr, p);
    const Eigen::Map<const Eigen::VectorXd> r(residuals.data(), nr);
    const Matrix jtj = J.transpose() * J;
    Eigen::FullPivLU<Matrix> lu(jtj);
    lu.setThreshold(1e-13);
    if (!lu.isInvertible()) {
        return {};
    }
    const Matrix inv = lu.inverse();
    const double dof = static_cast<double>(nr - p);
    if (kind == CovarianceKind::standard || dof <= 0.0) {
        const double s2 = dof > 0.0 ? r.squaredNorm() / dof : 0.0;
        return s2 * inv;
    }
    Matrix meat = Matrix::Zero(p, p);
    for (Eigen::Index i = 0; i < nr; ++i) {
        meat += (r[i] * r[i]) * J.row(i).transpose() * J.row(i);
    }
    return (static_cast<double>(nr) / dof) * inv * meat * inv;
}

double rms(const std::vector<double>& r)
{
    if (r.empty()) {
        return 0.0;
    }
    return std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0) / static_cast<double>(r.size()));
}

} // namespace

const FitParameter& FitResult::at(std::string_view name) const
{
    for (const auto& p : parameters) {
        if (p.name == name) {
            return p;
        }
    }
    throw ValidationError("fit result has no parameter '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Lorentzian PSD

double lorentzian_model(double f, double f0, double fwhm, double area, double floor)
{
    const double u = f - f0;
    return floor + (2.0 * area / std::numbers::pi) * fwhm / (4.0 * u * u + fwhm * fwhm);
}

namespace {

LorentzianGuess auto_guess(const SpectrumTrace& trace)
{
    const auto& y = trace.psd;
    const auto& f = trace.freq_hz;
    const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());

    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t nlow = std::max<std::size_t>(1, sorted.size() / 10);
    const double floor = std::accumulate(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(nlow), 0.0)
                         / static_cast<double>(nlow);
    const double height = y[peak] - floor;
    if (!(height > 0.0)) {
        throw NonConvergence("fit_lorentzian_psd: no peak above the floor");
    }
    const double half = floor + 0.5 * height;
    std::size_t left = peak;
    while (left > 0 && y[left] > half) {
        --left;
    }
    std::size_t right = peak;
    while (right + 1 < y.size() && y[right] > half) {
        ++right;
    }
    double fwhm = f[right] - f[left];
    if (!(fwhm > 0.0)) {
        fwhm = f.size() > 1 ? 2.0 * (f[1] - f[0]) : 1.0;
    }
    return {f[peak], fwhm, 0.5 * std::numbers::pi * height * fwhm, floor};
}

} // namespace

FitResult fit_lorentzian_psd(const SpectrumTrace& trace, const std::optional<LorentzianGuess>& guess,
                             const LorentzianFitOptions& options)
{
    trace.validate();
    require(trace.size() >= 8, "fit_lorentzian_psd: need at least 8 samples");
    const LorentzianGuess g0 = guess ? *guess : auto_guess(trace);
    require(g0.fwhm > 0.0, "fit_lorentzian_psd: initial linewidth must be positive");
    const double span = trace.freq_hz.back() - trace.freq_hz.front();
    require(span >= 3.0 * g0.fwhm, "fit_lorentzian_psd: trace must span at least 3 linewidths around the peak");

    const double f_ref = g0.f0;
    const double w_ref = g0.fwhm;
    const double y_ref = std::max(*std::max_element(trace.psd.begin(), trace.psd.end()), 1e-300);
    const double a_ref = y_ref * w_ref;
    const std::size_t n = trace.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = (trace.freq_hz[i] - f_ref) / w_ref;
    }

    LeastSquaresProblem problem;
    problem.n_residuals = n;
    problem.residuals = [&](std::span<const double> p, std::span<double> r) {
        for (std::size_t i = 0; i < n; ++i) {
            const double u = x[i] - p[0];
            const double model = p[3] + (2.0 * p[2] / std::numbers::pi) * p[1] / (4.0 * u * u + p[1] * p[1]);
            r[i] = model - trace.psd[i] / y_ref;
        }
    };
    problem.jacobian = [&](std::span<const double> p, std::span<double> jac) {
        const double c = 2.0 / std::numbers::pi;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = x[i] - p[0];
            const double den = 4.0 * u * u + p[1] * p[1];
            const double den2 = den * den;
            jac[i * 4 + 0] = c * p[2] * p[1] * 8.0 * u / den2;
            jac[i * 4 + 1] = c * p[2] * (4.0 * u * u - p[1] * p[1]) / den2;
            jac[i * 4 + 2] = c * p[1] / den;
            jac[i * 4 + 3] = 1.0;
        }
    };

    const std::vector<double> start{(g0.f0 - f_ref) / w_ref, 1.0, g0.area / a_ref, g0.floor / y_ref};
    const auto sol = levenberg_marquardt(problem, start, options.solver);

    const double f0 = f_ref + w_ref * sol.params[0];
    const double fwhm = w_ref * std::abs(sol.params[1]);
    const double area = a_ref * sol.params[2];
    const double floor = y_ref * sol.params[3];
    if (!(area > 0.0)) {
        throw NonConvergence("fit_lorentzian_psd: fitted peak lies below the floor");
    }

    FitResult out;
    out.status = sol.status;
    out.iterations = sol.iterations;
    out.residual_rms = y_ref * rms(sol.residuals);
    out.initial_residual_rms = y_ref * std::sqrt(2.0 * sol.initial_cost / static_cast<double>(n));

    const Matrix cov = parameter_covariance(sol.jacobian, sol.residuals, 4, options.covariance);
    const double q = quantile95(static_cast<double>(n) - 4.0);
    auto half_width = [&](int k, double scale) {
        if (cov.size() == 0) {
            return std::numeric_limits<double>::infinity();
        }
        return q * scale * std::sqrt(std::max(0.0, cov(k, k)));
    };
    if (cov.size() == 0) {
        out.status = FitStatus::singular;
    }
    out.parameters = {
        {"f0", f0, half_width(0, w_ref), "Hz"},
        {"fwhm", fwhm, half_width(1, w_ref), "Hz"},
        {"area", area, half_width(2, a_ref), "psd*Hz"},
        {"floor", floor, half_width(3, y_ref), "psd"},
    };
    return out;
}

// ---------------------------------------------------------------------------
// g0 and alpha

FitResult fit_g0(const std::vector<DampingSample>& data, const OpticalMode& mode, const MechanicalMode& mech)
{
    require(!data.empty(), "fit_g0: dataset is empty");
    mode.validate();
    mech.validate();
    const OptomechanicalCoupling unit{1.0};

    std::vector<double> model(data.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& s = data[i];
        require(s.sigma > 0.0 && std::isfinite(s.sigma), "fit_g0: sigma must be positive");
        require(std::isfinite(s.dgamma), "fit_g0: non-finite damping change");
        model[i] = damping_shift({s.detuning, s.photon_number, 0.0}, unit, mode, mech);
        const double w = 1.0 / (s.sigma * s.sigma);
        sxy += w * model[i] * s.dgamma;
        sxx += w * model[i] * model[i];
    }
    require(sxx > 0.0, "fit_g0: model is identically zero at every sample (check detuning and photon number)");

    const double g0_sq = sxy / sxx;
    if (!(g0_sq > 0.0)) {
        throw NonConvergence("fit_g0: data imply a non-positive g0^2");
    }
    const double g0 = std::sqrt(g0_sq);

    double chi2 = 0.0;
    std::vector<double> resid(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        resid[i] = data[i].dgamma - g0_sq * model[i];
        chi2 += resid[i] * resid[i] / (data[i].sigma * data[i].sigma);
    }
    const double dof = static_cast<double>(data.size()) - 1.0;
    const double reduced = dof > 0.0 ? chi2 / dof : 0.0;
    // Input errors set the floor; excess scatter inflates the interval.
    const bool inflate = reduced > 1.0;
    const double var_g0_sq = (inflate ? reduced : 1.0) / sxx;
    const double q = inflate ? quantile95(dof) : quantile95(0.0);
    const double ci = q * std::sqrt(var_g0_sq) / (2.0 * g0);

    FitResult out;
    out.parameters = {{"g0", g0, ci, "rad/s"}};
    out.residual_rms = rms(resid);
    out.status = FitStatus::converged;
    out.iterations = 1;
    return out;
}

FitResult fit_alpha(const std::vector<SpringSample>& data, const OptomechanicalCoupling& g, const OpticalMode& mode,
                    const MechanicalMode& mech)
{
    require(data.size() >= 2, "fit_alpha: need at least two samples");
    g.validate();
    double mean_p = 0.0;
    for (const auto& s : data) {
        require(s.dropped_power >= 0.0, "fit_alpha: dropped power must be non-negative");
        mean_p += s.dropped_power;
    }
    mean_p /= static_cast<double>(data.size());
    double var_p = 0.0;
    for (const auto& s : data) {
        var_p += (s.dropped_power - mean_p) * (s.dropped_power - mean_p);
    }
    require(var_p > 0.0, "fit_alpha: dropped power has zero variance");

    std::vector<double> y(data.size());
    double spy = 0.0;
    double spp = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& s = data[i];
        y[i] = s.domega - optical_spring_shift({s.detuning, s.photon_number, s.dropped_power}, g, mode, mech);
        spy += s.dropped_power * y[i];
        spp += s.dropped_power * s.dropped_power;
    }
    const double alpha = spy / spp;
    std::vector<double> resid(data.size());
    double rss = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        resid[i] = y[i] - alpha * data[i].dropped_power;
        rss += resid[i] * resid[i];
    }
    const double dof = static_cast<double>(data.size()) - 1.0;
    const double ci = quantile95(dof) * std::sqrt(rss / dof / spp);

    FitResult out;
    out.parameters = {{"alpha", alpha, ci, "rad/s/W"}};
    out.residual_rms = rms(resid);
    out.status = FitStatus::converged;
    out.iterations = 1;
    return out;
}

// ---------------------------------------------------------------------------
// Bistable lineshape

namespace {

struct LineshapeGeometry {
    double lambda_ref = 0.0;      // m, wavelength of minimum transmission
    double linewidth_ref = 0.0;   // m, apparent dip width (FWHM)
    double depth = 0.0;           // 1 - T_min
};

LineshapeGeometry measure_geometry(const SweepTrace& trace)
{
    const auto& t = trace.transmission;
    const auto imin = static_cast<std::size_t>(std::min_element(t.begin(), t.end()) - t.begin());
    LineshapeGeometry g;
    g.lambda_ref = trace.lambda_s[imin];
    g.depth = 1.0 - t[imin];
    require(g.depth > 1e-6, "fit_bistable_lineshape: trace shows no resonance dip");
    const double half = 1.0 - 0.5 * g.depth;
    double lo = trace.lambda_s[imin];
    double hi = lo;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (t[i] <= half) {
            lo = std::min(lo, trace.lambda_s[i]);
            hi = std::max(hi, trace.lambda_s[i]);
        }
    }
    const double spacing = std::abs(trace.lambda_s.back() - trace.lambda_s.front())
                           / static_cast<double>(std::max<std::size_t>(1, trace.size() - 1));
    g.linewidth_ref = std::max(hi - lo, 2.0 * spacing);
    return g;
}

struct PhysicalParams {
    double lambda_o, q_intrinsic, q_external, d, splitting;
};

// Unconstrained simplex coordinates <-> physical parameters.
struct Parameterization {
    LineshapeGeometry geom;
    BistableFitOptions options;

    [[nodiscard]] double q_ref() const { return geom.lambda_ref / geom.linewidth_ref; }

    [[nodiscard]] PhysicalParams to_physical(std::span<const double> x) const
    {
        const double q_loaded = q_ref() * std::exp(x[1]);
        const double sig = 1.0 / (1.0 + std::exp(-x[2]));
        // Fraction of the loaded rate that is external coupling.
        const double rho = options.undercoupled ? 0.5 * sig : 0.5 + 0.5 * sig;
        PhysicalParams p{};
        p.lambda_o = geom.lambda_ref + geom.linewidth_ref * x[0];
        p.q_intrinsic = q_loaded / (1.0 - rho);
        p.q_external = q_loaded / rho;
        p.d = options.fit_thermal ? geom.linewidth_ref * std::abs(x[3]) : 0.0;
        const double gamma_ref = kTwoPi * kSpeedOfLight / geom.lambda_ref / q_ref();
        p.splitting = options.fit_splitting ? gamma_ref * std::abs(x[4]) : 0.0;
        return p;
    }
};

OpticalMode mode_of(const PhysicalParams& p)
{
    OpticalMode m;
    m.lambda_o = p.lambda_o;
    m.q_intrinsic = p.q_intrinsic;
    m.q_loaded = 1.0 / (1.0 / p.q_intrinsic + 1.0 / p.q_external);
    m.doublet_splitting = p.splitting;
    return m;
}

std::vector<double> lineshape_residuals(const SweepTrace& trace, const PhysicalParams& p)
{
    const SweepRequest req{trace.lambda_s, trace.input_power, trace.scan_direction};
    const auto model = bistable_sweep(req, mode_of(p), p.d);
    std::vector<double> r(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        r[i] = model.transmission[i] - trace.transmission[i];
    }
    return r;
}

double lineshape_rms(const SweepTrace& trace, const PhysicalParams& p)
{
    try {
        return rms(lineshape_residuals(trace, p));
    } catch (const NonConvergence&) {
        return std::numeric_limits<double>::max();
    } catch (const ValidationError&) {
        return std::numeric_limits<double>::max();
    }
}

std::vector<double> as_vector(const PhysicalParams& p)
{
    return {p.lambda_o, p.q_intrinsic, p.q_external, p.d, p.splitting};
}

} // namespace

FitResult fit_bistable_lineshape(const SweepTrace& trace, const BistableFitOptions& options)
{
    trace.validate();
    require(!(options.fit_thermal && options.fit_splitting),
            "fit_bistable_lineshape: combined doublet + bistability fitting is unsupported");
    require(options.starts >= 1, "fit_bistable_lineshape: need at least one start");
    require(trace.size() >= 8, "fit_bistable_lineshape: need at least 8 samples");

    const LineshapeGeometry geom = measure_geometry(trace);
    const Parameterization param{geom, options};
    auto objective = [&](std::span<const double> x) { return lineshape_rms(trace, param.to_physical(x)); };

    // Coupling start from the dip depth, T_min = (1 - 2 rho)^2 for a singlet.
    const double rho_guess = std::clamp(0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - geom.depth))), 0.02, 0.48);
    const double sig = options.undercoupled ? 2.0 * rho_guess : std::clamp(2.0 * (1.0 - rho_guess) - 1.0, 0.04, 0.96);
    const double x2 = std::log(sig / (1.0 - sig));

    // Starts spread the apparent width between thermal drag and linewidth.
    std::vector<std::vector<double>> starts;
    const int ns = options.starts;
    for (int k = 0; k < ns; ++k) {
        const double frac = options.fit_thermal ? static_cast<double>(k) / static_cast<double>(ns) : 0.0;
        const double width = std::max(1.0 - frac, 0.05);
        const double d_units = frac / std::max(geom.depth, 1e-3);
        double lambda_units = -d_units * geom.depth;
        if (!options.fit_thermal) {
            // Spread the resonance guess around the minimum instead.
            lambda_units = 0.5 * (static_cast<double>(k) - 0.5 * static_cast<double>(ns - 1)) / static_cast<double>(ns);
        }
        const double split_units = options.fit_splitting ? 0.5 + static_cast<double>(k) * 0.5 : 0.0;
        starts.push_back({lambda_units, -std::log(width), x2, d_units, split_units});
    }

    NelderMeadOptions nm;
    nm.max_evaluations = options.max_evaluations;
    nm.ftol = 1e-13;
    nm.xtol = 1e-9;
    nm.initial_step = {0.2, 0.2, 0.5, 0.2, 0.2};

    FitResult out;
    MinimizeResult best;
    best.value = std::numeric_limits<double>::max();
    bool any_converged = false;
    for (const auto& s : starts) {
        auto r = nelder_mead(objective, s, nm);
        // Restart from the optimum to undo premature simplex collapse.
        for (int polish = 0; polish < 2; ++polish) {
            auto again = nelder_mead(objective, r.x, nm);
            again.evaluations += r.evaluations;
            again.initial_value = r.initial_value;
            if (again.value > r.value) {
                break;
            }
            r = again;
        }
        any_converged = any_converged || r.status == FitStatus::converged;
        out.starts.push_back({as_vector(param.to_physical(s)), r.value, r.status, r.evaluations});
        out.iterations += r.iterations;
        if (r.value < best.value) {
            best = r;
        }
    }

    const PhysicalParams p = param.to_physical(best.x);
    out.residual_rms = best.value;
    out.initial_residual_rms = best.initial_value;
    out.status = best.status == FitStatus::converged || any_converged ? best.status : FitStatus::max_iterations;

    // Local linearization for confidence intervals over the fitted parameters.
    std::vector<int> fitted{0, 1, 2};
    if (options.fit_thermal) {
        fitted.push_back(3);
    }
    if (options.fit_splitting) {
        fitted.push_back(4);
    }
    const std::vector<double> center = as_vector(p);
    const double lw = loaded_linewidth_wavelength(mode_of(p));
    const double gamma_t = mode_of(p).gamma_loaded();
    const std::vector<double> steps{1e-4 * lw, 1e-5 * p.q_intrinsic, 1e-5 * p.q_external, 1e-4 * lw, 1e-4 * gamma_t};
    const std::size_t n = trace.size();
    const std::size_t np = fitted.size();
    std::vector<double> jac(n * np, 0.0);
    std::vector<double> resid;
    bool jac_ok = true;
    try {
        resid = lineshape_residuals(trace, p);
        for (std::size_t j = 0; j < np; ++j) {
            const int k = fitted[j];
            auto up = center;
            auto down = center;
            up[static_cast<std::size_t>(k)] += steps[static_cast<std::size_t>(k)];
            double span = steps[static_cast<std::size_t>(k)];
            if ((k == 3 || k == 4) && center[static_cast<std::size_t>(k)] < steps[static_cast<std::size_t>(k)]) {
                // one-sided at the lower bound
            } else {
                down[static_cast<std::size_t>(k)] -= steps[static_cast<std::size_t>(k)];
                span *= 2.0;
            }
            auto to_p = [](const std::vector<double>& v) { return PhysicalParams{v[0], v[1], v[2], v[3], v[4]}; };
            const auto ru = lineshape_residuals(trace, to_p(up));
            const auto rd = lineshape_residuals(trace, to_p(down));
            // Columns in units of the step keep J^T J well conditioned.
            const double unit = steps[static_cast<std::size_t>(k)];
            for (std::size_t i = 0; i < n; ++i) {
                jac[i * np + j] = (ru[i] - rd[i]) / span * unit;
            }
        }
    } catch (const std::exception&) {
        jac_ok = false;
    }
    Matrix cov;
    if (jac_ok) {
        cov = parameter_covariance(jac, resid, np, CovarianceKind::standard);
    }
    const double q = quantile95(static_cast<double>(n) - static_cast<double>(np));
    std::vector<double> ci(5, 0.0);
    for (std::size_t j = 0; j < np; ++j) {
        const auto k = static_cast<std::size_t>(fitted[j]);
        const auto jj = static_cast<Eigen::Index>(j);
        ci[k] = cov.size() == 0 ? std::numeric_limits<double>::infinity()
                                : q * steps[k] * std::sqrt(std::max(0.0, cov(jj, jj)));
    }

    out.parameters = {
        {"lambda_o", p.lambda_o, ci[0], "m"},
        {"q_intrinsic", p.q_intrinsic, ci[1], ""},
        {"q_external", p.q_external, ci[2], ""},
        {"d", p.d, ci[3], "m"},
        {"splitting", p.splitting, ci[4], "rad/s"},
    };
    return out;
}

OpticalMode mode_from_lineshape_fit(const FitResult& fit)
{
    return mode_of({fit.estimate("lambda_o"), fit.estimate("q_intrinsic"), fit.estimate("q_external"),
                    fit.estimate("d"), fit.estimate("splitting")});
}

} // namespace omkit
