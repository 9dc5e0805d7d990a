#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace omkit {

enum class FitStatus { converged, max_iterations, singular };

[[nodiscard]] std::string_view to_string(FitStatus status);

// r(p) -> residual vector, written into `residuals` (pre-sized).
using ResidualFunction = std::function<void(std::span<const double> params, std::span<double> residuals)>;
// Row-major n_residuals x n_params Jacobian dr/dp.
using JacobianFunction = std::function<void(std::span<const double> params, std::span<double> jacobian)>;

struct LeastSquaresProblem {
    std::size_t n_residuals = 0;
    ResidualFunction residuals;
    JacobianFunction jacobian;   // optional; central differences when empty
};

struct LevenbergMarquardtOptions {
    int max_iterations = 200;
    double ftol = 1e-15;   // relative cost decrease
    double xtol = 1e-12;   // relative step size
    double gtol = 1e-15;   // scaled gradient, inf-norm
    double initial_lambda = 1e-3;
};

struct LeastSquaresSolution {
    std::vector<double> params;
    std::vector<double> residuals;
    std::vector<double> jacobian;   // row-major, at params
    double initial_cost = 0.0;      // 0.5 |r|^2 at the start
    double cost = 0.0;              // 0.5 |r|^2 at params
    int iterations = 0;
    FitStatus status = FitStatus::max_iterations;
};

[[nodiscard]] LeastSquaresSolution levenberg_marquardt(const LeastSquaresProblem& problem,
                                                       std::vector<double> initial,
                                                       const LevenbergMarquardtOptions& options = {});

// Central-difference Jacobian with relative step.
void numeric_jacobian(const ResidualFunction& f, std::span<const double> params, std::size_t n_residuals,
                      std::span<double> jacobian);

struct NelderMeadOptions {
    int max_evaluations = 4000;
    double ftol = 1e-12;              // spread of simplex values (absolute)
    double xtol = 1e-10;              // simplex diameter in parameter units
    std::vector<double> initial_step; // per-parameter; defaults to 0.1 (or 0.1 |x|)
};

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    double initial_value = 0.0;
    int evaluations = 0;
    int iterations = 0;
    FitStatus status = FitStatus::max_iterations;
};

// Derivative-free simplex minimization (adaptive coefficients). The best
// vertex value is non-increasing across iterations.
[[nodiscard]] MinimizeResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                                         std::vector<double> initial, const NelderMeadOptions& options = {});

} // namespace omkit
