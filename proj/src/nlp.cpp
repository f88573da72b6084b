#include "zds/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace zds {

namespace {

// Strong-Wolfe line search (bracket + zoom with cubic interpolation).
struct LineSearchResult {
    double alpha = 0.0;
    double f = 0.0;
    bool ok = false;
    int evals = 0;
};

LineSearchResult wolfe_line_search(const ObjectiveFn& obj, const VectorXd& z, const VectorXd& d,
                                   double f0, const VectorXd& g0, double alpha0,
                                   const LbfgsOptions& opts, VectorXd& z_out, VectorXd& g_out) {
    const double dg0 = g0.dot(d);
    LineSearchResult res;
    if (dg0 >= 0.0) return res;  // not a descent direction

    auto eval = [&](double a, double& f, double& dg, VectorXd& z_trial, VectorXd& g_trial) {
        z_trial = z + a * d;
        f = obj(z_trial, &g_trial);
        dg = g_trial.dot(d);
        ++res.evals;
    };

    double a_prev = 0.0, f_prev = f0, dg_prev = dg0;
    double a = alpha0;
    VectorXd z_trial, g_trial;

    auto zoom = [&](double lo, double hi, double f_lo, double dg_lo) {
        for (int i = 0; i < opts.max_line_search; ++i) {
            // cubic-ish: bisection fallback keeps it robust
            double a_j = 0.5 * (lo + hi);
            double f_j, dg_j;
            eval(a_j, f_j, dg_j, z_trial, g_trial);
            if (f_j > f0 + opts.wolfe_c1 * a_j * dg0 || f_j >= f_lo) {
                hi = a_j;
            } else {
                if (std::abs(dg_j) <= -opts.wolfe_c2 * dg0) {
                    res.alpha = a_j;
                    res.f = f_j;
                    res.ok = true;
                    z_out = z_trial;
                    g_out = g_trial;
                    return;
                }
                if (dg_j * (hi - lo) >= 0.0) hi = lo;
                lo = a_j;
                f_lo = f_j;
                dg_lo = dg_j;
            }
            if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
        }
    };

    for (int i = 0; i < opts.max_line_search; ++i) {
        double f_a, dg_a;
        eval(a, f_a, dg_a, z_trial, g_trial);
        if (f_a > f0 + opts.wolfe_c1 * a * dg0 || (i > 0 && f_a >= f_prev)) {
            zoom(a_prev, a, f_prev, dg_prev);
            return res;
        }
        if (std::abs(dg_a) <= -opts.wolfe_c2 * dg0) {
            res.alpha = a;
            res.f = f_a;
            res.ok = true;
            z_out = z_trial;
            g_out = g_trial;
            return res;
        }
        if (dg_a >= 0.0) {
            zoom(a, a_prev, f_a, dg_a);
            return res;
        }
        a_prev = a;
        f_prev = f_a;
        dg_prev = dg_a;
        a = std::min(2.5 * a, 1e10);
    }
    return res;
}

}  // namespace

LbfgsResult lbfgs_minimize(const ObjectiveFn& objective, const VectorXd& z0,
                           const LbfgsOptions& opts) {
    const int n = static_cast<int>(z0.size());
    LbfgsResult res;
    res.z = z0;
    VectorXd g(n);
    res.f = objective(res.z, &g);

    std::deque<VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;
    double gamma = 1.0;

    VectorXd z_new(n), g_new(n);
    for (int it = 0; it < opts.max_iterations; ++it) {
        res.grad_norm = g.lpNorm<Eigen::Infinity>();
        res.iterations = it;
        if (res.grad_norm <= opts.grad_tol) {
            res.converged = true;
            return res;
        }

        // two-loop recursion
        VectorXd q = g;
        std::vector<double> alphas(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alphas[i] = rho_hist[i] * s_hist[i].dot(q);
            q -= alphas[i] * y_hist[i];
        }
        VectorXd d = gamma * q;
        for (size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(d);
            d += (alphas[i] - beta) * s_hist[i];
        }
        d = -d;

        const double alpha0 = (it == 0) ? std::min(1.0, 1.0 / std::max(1e-12, g.norm())) : 1.0;
        LineSearchResult ls =
            wolfe_line_search(objective, res.z, d, res.f, g, alpha0, opts, z_new, g_new);
        if (!ls.ok) {
            // retry along steepest descent once before giving up
            d = -g;
            ls = wolfe_line_search(objective, res.z, d, res.f, g,
                                   1.0 / std::max(1e-12, g.norm()), opts, z_new, g_new);
            if (!ls.ok) {
                res.line_search_failed = true;
                return res;
            }
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        const VectorXd s = z_new - res.z;
        const VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
            gamma = sy / y.dot(y);
            if (static_cast<int>(s_hist.size()) > opts.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        res.z = z_new;
        res.f = ls.f;
        g = g_new;
    }
    res.grad_norm = g.lpNorm<Eigen::Infinity>();
    return res;
}

AugLagResult auglag_solve(const NlpProblem& nlp, const VectorXd& z0, const AugLagOptions& opts) {
    AugLagResult out;
    out.z = z0;
    out.lambda_eq = VectorXd::Zero(nlp.n_eq);
    out.lambda_in = VectorXd::Zero(nlp.n_in);

    double rho = opts.rho0;
    double inner_tol = opts.inner_tol0;
    double prev_violation = std::numeric_limits<double>::infinity();

    VectorXd ceq(nlp.n_eq), cin(nlp.n_in);

    auto violations = [&](const VectorXd& z, double& veq, double& vin) {
        veq = 0.0;
        vin = 0.0;
        if (nlp.n_eq > 0) {
            nlp.eq(z, ceq);
            veq = ceq.lpNorm<Eigen::Infinity>();
        }
        if (nlp.n_in > 0) {
            nlp.ineq(z, cin);
            vin = std::max(0.0, cin.maxCoeff());
        }
    };

    for (int outer = 0; outer < opts.max_outer; ++outer) {
        out.outer_iterations = outer + 1;
        const VectorXd lam_eq = out.lambda_eq;
        const VectorXd lam_in = out.lambda_in;

        ObjectiveFn al = [&](const VectorXd& z, VectorXd* grad) {
            double f = nlp.objective(z);
            if (grad) {
                grad->resize(nlp.n);
                nlp.objective_grad(z, *grad);
            }
            if (nlp.n_eq > 0) {
                VectorXd c(nlp.n_eq);
                nlp.eq(z, c);
                f += lam_eq.dot(c) + 0.5 * rho * c.squaredNorm();
                if (grad) nlp.eq_jtvp(z, lam_eq + rho * c, *grad);
            }
            if (nlp.n_in > 0) {
                VectorXd c(nlp.n_in);
                nlp.ineq(z, c);
                VectorXd t = (lam_in + rho * c).cwiseMax(0.0);
                f += (t.squaredNorm() - lam_in.squaredNorm()) / (2.0 * rho);
                if (grad) nlp.ineq_jtvp(z, t, *grad);
            }
            return f;
        };

        LbfgsOptions lopt = opts.lbfgs;
        lopt.grad_tol = std::max(inner_tol, opts.grad_tol);
        const LbfgsResult inner = lbfgs_minimize(al, out.z, lopt);
        out.z = inner.z;
        out.inner_iterations += inner.iterations;
        out.grad_norm = inner.grad_norm;

        // first-order multiplier update
        if (nlp.n_eq > 0) {
            nlp.eq(out.z, ceq);
            out.lambda_eq += rho * ceq;
        }
        if (nlp.n_in > 0) {
            nlp.ineq(out.z, cin);
            out.lambda_in = (out.lambda_in + rho * cin).cwiseMax(0.0);
        }

        double veq, vin;
        violations(out.z, veq, vin);
        out.max_eq_violation = veq;
        out.max_ineq_violation = vin;
        out.objective = nlp.objective(out.z);

        const double viol = std::max(veq, vin);
        if (viol <= std::min(opts.eq_tol, 1.0) && veq <= opts.eq_tol && vin <= opts.ineq_tol &&
            out.grad_norm <= opts.grad_tol) {
            out.status = SolveStatus::Converged;
            return out;
        }

        if (viol > 0.25 * prev_violation) rho = std::min(opts.rho_max, rho * opts.rho_mult);
        prev_violation = viol;
        inner_tol = std::max(opts.grad_tol, inner_tol * opts.inner_tol_mult);

        if (inner.line_search_failed && out.grad_norm > 1e2 * opts.grad_tol && outer > 3) {
            out.status = SolveStatus::Failed;
            return out;
        }
    }
    out.status = SolveStatus::MaxIterations;
    return out;
}

}  // namespace zds
