#pragma once

#include <functional>

#include <Eigen/Dense>

namespace zds {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Smooth objective with optional gradient output. Returns f(z); when grad
/// is non-null it must be filled with the gradient at z.
using ObjectiveFn = std::function<double(const VectorXd& z, VectorXd* grad)>;

struct LbfgsOptions {
    int max_iterations = 3000;
    double grad_tol = 1e-6;  // infinity norm of the gradient
    int memory = 12;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    int max_line_search = 50;
};

struct LbfgsResult {
    VectorXd z;
    double f = 0.0;
    double grad_norm = 0.0;  // infinity norm
    int iterations = 0;
    bool converged = false;
    bool line_search_failed = false;
};

LbfgsResult lbfgs_minimize(const ObjectiveFn& objective, const VectorXd& z0,
                           const LbfgsOptions& opts = {});

/// Nonlinear program  min f(z)  s.t.  c_eq(z) = 0,  c_in(z) <= 0.
/// Constraint Jacobians enter only through transpose-vector products.
struct NlpProblem {
    int n = 0;
    int n_eq = 0;
    int n_in = 0;
    std::function<double(const VectorXd&)> objective;
    std::function<void(const VectorXd&, VectorXd&)> objective_grad;
    std::function<void(const VectorXd&, VectorXd&)> eq;                     // out: n_eq
    std::function<void(const VectorXd&, const VectorXd&, VectorXd&)> eq_jtvp;  // grad += J^T v
    std::function<void(const VectorXd&, VectorXd&)> ineq;                   // out: n_in
    std::function<void(const VectorXd&, const VectorXd&, VectorXd&)> ineq_jtvp;
};

struct AugLagOptions {
    double rho0 = 1e3;
    double rho_mult = 10.0;
    double rho_max = 1e12;
    int max_outer = 30;
    double eq_tol = 1e-6;    // infinity norm of equality residuals
    double ineq_tol = 1e-8;  // max inequality violation
    double grad_tol = 1e-6;  // infinity norm of the AL gradient
    double inner_tol0 = 1e-3;
    double inner_tol_mult = 0.2;
    LbfgsOptions lbfgs;
};

enum class SolveStatus { Converged, MaxIterations, Failed };

struct AugLagResult {
    VectorXd z;
    VectorXd lambda_eq;
    VectorXd lambda_in;
    double objective = 0.0;
    double max_eq_violation = 0.0;
    double max_ineq_violation = 0.0;
    double grad_norm = 0.0;
    int outer_iterations = 0;
    int inner_iterations = 0;
    SolveStatus status = SolveStatus::Failed;
};

/// Powell-Hestenes-Rockafellar augmented Lagrangian with an L-BFGS inner
/// minimizer. Never throws on non-convergence; the best iterate is returned
/// with the corresponding status.
AugLagResult auglag_solve(const NlpProblem& nlp, const VectorXd& z0,
                          const AugLagOptions& opts = {});

}  // namespace zds
