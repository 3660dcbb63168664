#pragma once

// Damped Gauss-Newton minimizer for weighted residual vectors, with forward
// finite-difference Jacobians and box bounds handled by projection. The
// accepted objective is non-increasing by construction and the iteration is
// fully deterministic for a given residual function and starting point.

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace latline::specfit {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LeastSquaresOptions {
    int max_iterations = 500;
    double rel_step_tol = 1e-8;   // convergence: largest relative parameter step
    double fd_rel_step = 1e-6;    // forward-difference step, relative to scale
    double initial_damping = 1e-3;
    double max_damping = 1e14;
};

struct LeastSquaresResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;   // (J^T J)^{-1} at the optimum
    Eigen::VectorXd residuals;
    std::vector<double> chi2_history;  // objective after each accepted step
    double chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
    bool degenerate = false;      // J^T J numerically singular at the optimum
};

// scale: per-parameter magnitude used for finite-difference steps and the
// relative-step convergence test; must be positive.
LeastSquaresResult minimize_least_squares(const ResidualFn& residual_fn,
                                          const Eigen::VectorXd& initial,
                                          const Eigen::VectorXd& lower,
                                          const Eigen::VectorXd& upper,
                                          const Eigen::VectorXd& scale,
                                          const LeastSquaresOptions& opts = {});

}  // namespace latline::specfit
