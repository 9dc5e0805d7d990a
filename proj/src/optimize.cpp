#include "omkit/optimize.hpp"

#include "omkit/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace omkit {

std::string_view to_string(FitStatus status)
{
    switch (status) {
    case FitStatus::converged:
        return "converged";
    case FitStatus::max_iterations:
        return "max-iterations";
    case FitStatus::singular:
        return "singular";
    }
    return "unknown";
}

void numeric_jacobian(const ResidualFunction& f, std::span<const double> params, std::size_t n_residuals,
                      std::span<double> jacobian)
{
    const std::size_t np = params.size();
    std::vector<double> p(params.begin(), params.end());
    std::vector<double> rp(n_residuals), rm(n_residuals);
    for (std::size_t j = 0; j < np; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(params[j]));
        p[j] = params[j] + h;
        f(p, rp);
        p[j] = params[j] - h;
        f(p, rm);
        p[j] = params[j];
        for (std::size_t i = 0; i < n_residuals; ++i) {
            jacobian[i * np + j] = (rp[i] - rm[i]) / (2.0 * h);
        }
    }
}

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

double half_norm2(const std::vector<double>& r)
{
    return 0.5 * std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
}

} // namespace

LeastSquaresSolution levenberg_marquardt(const LeastSquaresProblem& problem, std::vector<double> initial,
                                         const LevenbergMarquardtOptions& options)
{
    require(static_cast<bool>(problem.residuals), "levenberg_marquardt: residual function missing");
    require(problem.n_residuals >= initial.size(), "levenberg_marquardt: fewer residuals than parameters");

    const std::size_t np = initial.size();
    const std::size_t nr = problem.n_residuals;
    auto jacobian_at = [&](const std::vector<double>& p, std::vector<double>& jac) {
        if (problem.jacobian) {
            problem.jacobian(p, jac);
        } else {
            numeric_jacobian(problem.residuals, p, nr, jac);
        }
    };

    LeastSquaresSolution sol;
    sol.params = std::move(initial);
    sol.residuals.assign(nr, 0.0);
    sol.jacobian.assign(nr * np, 0.0);
    problem.residuals(sol.params, sol.residuals);
    sol.cost = sol.initial_cost = half_norm2(sol.residuals);

    double lambda = options.initial_lambda;
    std::vector<double> trial(np), trial_r(nr);
    jacobian_at(sol.params, sol.jacobian);

    for (int it = 0; it < options.max_iterations; ++it) {
        sol.iterations = it + 1;
        const Eigen::Map<const Matrix> J(sol.jacobian.data(), static_cast<Eigen::Index>(nr),
                                         static_cast<Eigen::Index>(np));
        const Eigen::Map<const Vector> r(sol.residuals.data(), static_cast<Eigen::Index>(nr));
        const Matrix A = J.transpose() * J;
        const Vector g = J.transpose() * r;
        Vector diag = A.diagonal().cwiseMax(1e-300);

        const double gscaled = (g.array().abs() / diag.array().sqrt()).maxCoeff() / std::max(std::sqrt(2.0 * sol.cost), 1e-300);
        if (sol.cost == 0.0 || gscaled < options.gtol) {
            sol.status = FitStatus::converged;
            break;
        }

        bool accepted = false;
        while (!accepted) {
            Matrix damped = A;
            damped.diagonal() += lambda * diag;
            const Vector step = damped.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                if (lambda > 1e20) {
                    break;
                }
                continue;
            }
            for (std::size_t j = 0; j < np; ++j) {
                trial[j] = sol.params[j] + step[static_cast<Eigen::Index>(j)];
            }
            problem.residuals(trial, trial_r);
            const double trial_cost = half_norm2(trial_r);
            if (std::isfinite(trial_cost) && trial_cost <= sol.cost) {
                const double decrease = sol.cost - trial_cost;
                double pnorm = 0.0;
                for (std::size_t j = 0; j < np; ++j) {
                    pnorm += sol.params[j] * sol.params[j];
                }
                const bool small_step = step.norm() <= options.xtol * (std::sqrt(pnorm) + options.xtol);
                const bool small_decrease = decrease <= options.ftol * sol.cost;
                sol.params = trial;
                sol.residuals = trial_r;
                sol.cost = trial_cost;
                jacobian_at(sol.params, sol.jacobian);
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (small_step || small_decrease) {
                    sol.status = FitStatus::converged;
                }
            } else {
                lambda *= 4.0;
                if (lambda > 1e20) {
                    break;
                }
            }
        }
        if (!accepted) {
            // No downhill step at any damping: we sit at a minimum to machine precision.
            sol.status = FitStatus::converged;
            break;
        }
        if (sol.status == FitStatus::converged) {
            break;
        }
    }

    const Eigen::Map<const Matrix> J(sol.jacobian.data(), static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(np));
    Eigen::ColPivHouseholderQR<Matrix> qr(J);
    qr.setThreshold(1e-12);
    if (qr.rank() < static_cast<Eigen::Index>(np)) {
        sol.status = FitStatus::singular;
    }
    return sol;
}

MinimizeResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                           std::vector<double> initial, const NelderMeadOptions& options)
{
    const std::size_t n = initial.size();
    require(n >= 1, "nelder_mead: need at least one parameter");
    // Adaptive coefficients (Gao & Han) for better behavior in higher dimension.
    const double dn = static_cast<double>(n);
    const double reflect = 1.0;
    const double expand = 1.0 + 2.0 / dn;
    const double contract = 0.75 - 1.0 / (2.0 * dn);
    const double shrink = 1.0 - 1.0 / dn;

    MinimizeResult res;
    std::vector<std::vector<double>> simplex(n + 1, initial);
    std::vector<double> values(n + 1);
    for (std::size_t j = 0; j < n; ++j) {
        double h = 0.1;
        if (j < options.initial_step.size()) {
            h = options.initial_step[j];
        } else if (initial[j] != 0.0) {
            h = 0.1 * std::abs(initial[j]);
        }
        simplex[j + 1][j] += h;
    }
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = objective(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };
    for (std::size_t i = 0; i <= n; ++i) {
        values[i] = eval(simplex[i]);
    }
    res.initial_value = values[0];

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]));
            }
        }
        if (values[worst] - values[best] <= options.ftol && diameter <= options.xtol) {
            res.status = FitStatus::converged;
            break;
        }
        if (res.evaluations >= options.max_evaluations) {
            res.status = FitStatus::max_iterations;
            break;
        }
        ++res.iterations;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                centroid[j] += simplex[i][j] / dn;
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            xr[j] = centroid[j] + reflect * (centroid[j] - simplex[worst][j]);
        }
        const double fr = eval(xr);
        if (fr < values[best]) {
            for (std::size_t j = 0; j < n; ++j) {
                xe[j] = centroid[j] + expand * (xr[j] - centroid[j]);
            }
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second]) {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        const bool outside = fr < values[worst];
        for (std::size_t j = 0; j < n; ++j) {
            xc[j] = outside ? centroid[j] + contract * (xr[j] - centroid[j])
                            : centroid[j] + contract * (simplex[worst][j] - centroid[j]);
        }
        const double fc = eval(xc);
        if (fc < (outside ? fr : values[worst])) {
            simplex[worst] = xc;
            values[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                simplex[i][j] = simplex[best][j] + shrink * (simplex[i][j] - simplex[best][j]);
            }
            values[i] = eval(simplex[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    res.x = simplex[best];
    res.value = values[best];
    return res;
}

} // namespace omkit
