#include "latline/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latline/errors.hpp"

namespace latline::specfit {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& p, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
    return p.cwiseMax(lo).cwiseMin(hi);
}

Eigen::MatrixXd forward_jacobian(const ResidualFn& fn, const Eigen::VectorXd& p,
                                 const Eigen::VectorXd& r0, const Eigen::VectorXd& lo,
                                 const Eigen::VectorXd& hi, const Eigen::VectorXd& scale,
                                 double rel_step) {
    const auto n = p.size();
    Eigen::MatrixXd jac(r0.size(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double h = rel_step * std::max(std::abs(p[j]), scale[j]);
        Eigen::VectorXd q = p;
        // Step backward at the upper bound so the probe stays feasible.
        if (p[j] + h > hi[j]) h = -h;
        q[j] = std::clamp(p[j] + h, lo[j], hi[j]);
        const double actual = q[j] - p[j];
        if (actual == 0.0) {
            jac.col(j).setZero();
            continue;
        }
        jac.col(j) = (fn(q) - r0) / actual;
    }
    return jac;
}

}  // namespace

LeastSquaresResult minimize_least_squares(const ResidualFn& residual_fn,
                                          const Eigen::VectorXd& initial,
                                          const Eigen::VectorXd& lower,
                                          const Eigen::VectorXd& upper,
                                          const Eigen::VectorXd& scale,
                                          const LeastSquaresOptions& opts) {
    const auto n = initial.size();
    if (lower.size() != n || upper.size() != n || scale.size() != n) {
        throw std::invalid_argument("minimize_least_squares: size mismatch");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!(scale[j] > 0.0)) {
            throw std::invalid_argument("minimize_least_squares: scales must be positive");
        }
        if (lower[j] > upper[j]) {
            throw std::invalid_argument("minimize_least_squares: empty bound interval");
        }
    }

    LeastSquaresResult out;
    Eigen::VectorXd p = project(initial, lower, upper);
    Eigen::VectorXd r = residual_fn(p);
    if (r.size() < n) {
        throw DataError("minimize_least_squares: fewer residuals than free parameters");
    }
    double chi2 = r.squaredNorm();
    out.chi2_history.push_back(chi2);
    double damping = opts.initial_damping;

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        const Eigen::MatrixXd jac =
            forward_jacobian(residual_fn, p, r, lower, upper, scale, opts.fd_rel_step);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;

        bool accepted = false;
        Eigen::VectorXd p_new;
        Eigen::VectorXd r_new;
        double chi2_new = chi2;
        while (damping <= opts.max_damping) {
            Eigen::MatrixXd lhs = jtj;
            for (Eigen::Index j = 0; j < n; ++j) {
                lhs(j, j) += damping * std::max(jtj(j, j), 1e-30);
            }
            const Eigen::VectorXd delta = lhs.ldlt().solve(-jtr);
            p_new = project(p + delta, lower, upper);
            if ((p_new - p).isZero(0.0)) {
                damping *= 10.0;
                continue;
            }
            r_new = residual_fn(p_new);
            chi2_new = r_new.squaredNorm();
            if (chi2_new < chi2) {
                accepted = true;
                break;
            }
            damping *= 10.0;
        }

        if (!accepted) {
            // No descent direction left: treat the current point as stationary.
            out.converged = true;
            break;
        }

        double max_rel_step = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            max_rel_step = std::max(
                max_rel_step, std::abs(p_new[j] - p[j]) / std::max(std::abs(p[j]), scale[j]));
        }
        const double chi2_drop = chi2 - chi2_new;
        p = p_new;
        r = r_new;
        chi2 = chi2_new;
        out.chi2_history.push_back(chi2);
        damping = std::max(damping / 3.0, 1e-12);

        if (max_rel_step < opts.rel_step_tol || chi2_drop <= 1e-14 * std::max(chi2, 1e-300)) {
            out.converged = true;
            ++it;
            break;
        }
    }

    out.params = p;
    out.residuals = r;
    out.chi2 = chi2;
    out.iterations = it;

    // Covariance of the linearized problem at the optimum; rank-deficient
    // directions are floored, which surfaces as very large uncertainties.
    const Eigen::MatrixXd jac =
        forward_jacobian(residual_fn, p, r, lower, upper, scale, opts.fd_rel_step);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jtj);
    const double max_eig = std::max(es.eigenvalues().maxCoeff(), 0.0);
    const double floor = std::max(max_eig, 1e-300) * 1e-14;
    Eigen::VectorXd inv_eigs(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double ev = es.eigenvalues()[j];
        if (ev < floor) out.degenerate = true;
        inv_eigs[j] = 1.0 / std::max(ev, floor);
    }
    out.covariance =
        es.eigenvectors() * inv_eigs.asDiagonal() * es.eigenvectors().transpose();
    return out;
}

}  // namespace latline::specfit
