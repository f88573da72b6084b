#include "zds/trajopt.hpp"

#include <algorithm>
#include <cmath>

#include "zds/errors.hpp"

namespace zds {

// ---------------------------------------------------------------------------
// CostSpec
// ---------------------------------------------------------------------------

void CostSpec::validate(int n, int m) const {
    auto check_psd = [](const MatrixXd& W, const char* name, int dim) {
        if (W.rows() != dim || W.cols() != dim)
            throw TranscriptionError(std::string(name) + ": wrong dimension");
        if (!W.isApprox(W.transpose(), 1e-12))
            throw TranscriptionError(std::string(name) + ": not symmetric");
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(W);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw TranscriptionError(std::string(name) + ": not positive semidefinite");
    };
    check_psd(Q, "CostSpec.Q", n);
    check_psd(R, "CostSpec.R", m);
    if (barrier_weight < 0) throw TranscriptionError("CostSpec: barrier weight must be >= 0");
    if (barrier_weight > 0 && (barrier_index < 0 || barrier_index >= n))
        throw TranscriptionError("CostSpec: barrier index out of range");
}

double CostSpec::barrier(double b) const {
    return b * b * (std::exp(b - barrier_halfwidth) + std::exp(-b - barrier_halfwidth));
}

double CostSpec::barrier_derivative(double b) const {
    const double ep = std::exp(b - barrier_halfwidth);
    const double em = std::exp(-b - barrier_halfwidth);
    return 2.0 * b * (ep + em) + b * b * (ep - em);
}

// ---------------------------------------------------------------------------
// Layout
// ---------------------------------------------------------------------------

int CollocationProblem::num_vars() const {
    int total = 0;
    for (const auto& p : phases) total += (p.N + 1) * (p.sys.n + p.sys.m);
    return total;
}

int CollocationProblem::x_offset(int phase, int node) const {
    int off = 0;
    for (int p = 0; p < phase; ++p) off += (phases[p].N + 1) * (phases[p].sys.n + phases[p].sys.m);
    return off + node * (phases[phase].sys.n + phases[phase].sys.m);
}

int CollocationProblem::u_offset(int phase, int node) const {
    return x_offset(phase, node) + phases[phase].sys.n;
}

int CollocationProblem::num_eq() const {
    int total = 0;
    for (const auto& p : phases) total += p.N * p.sys.n;  // defects
    for (const auto& l : links) total += phases[l.from_phase + 1].sys.n;
    for (const auto& e : node_eqs) total += e.dim;
    for (const auto& e : pair_eqs) total += e.dim;
    return total;
}

int CollocationProblem::num_ineq() const {
    int total = 0;
    for (size_t p = 0; p < phases.size(); ++p) {
        if (p < input_bounds.size() && input_bounds[p].lb.size() > 0)
            total += 2 * (phases[p].N + 1) * phases[p].sys.m;
    }
    for (const auto& c : node_ineqs) total += static_cast<int>(c.nodes.size());
    return total;
}

void CollocationProblem::validate() const {
    if (phases.empty()) throw TranscriptionError("CollocationProblem: no phases");
    for (const auto& p : phases) {
        if (p.N < 2) throw TranscriptionError("CollocationProblem: N must be >= 2");
        if (!(p.t1 > p.t0)) throw TranscriptionError("CollocationProblem: empty phase horizon");
    }
    cost.validate(phases[0].sys.n, phases[0].sys.m);
    for (size_t p = 0; p < phases.size(); ++p) {
        if (p < cost.x_ref.size() && cost.x_ref[p].size() > 0 &&
            (cost.x_ref[p].rows() != phases[p].sys.n || cost.x_ref[p].cols() != phases[p].N + 1))
            throw TranscriptionError("CostSpec: x_ref must be node-aligned");
        if (p < cost.u_ref.size() && cost.u_ref[p].size() > 0 &&
            (cost.u_ref[p].rows() != phases[p].sys.m || cost.u_ref[p].cols() != phases[p].N + 1))
            throw TranscriptionError("CostSpec: u_ref must be node-aligned");
    }
}

VectorXd CollocationProblem::pack(const std::vector<Trajectory>& trajs) const {
    if (trajs.size() != phases.size())
        throw TranscriptionError("pack: one trajectory per phase required");
    VectorXd z(num_vars());
    for (size_t p = 0; p < phases.size(); ++p) {
        const auto& ph = phases[p];
        if (trajs[p].samples() != ph.N + 1)
            throw TranscriptionError("pack: trajectory not node-aligned");
        for (int k = 0; k <= ph.N; ++k) {
            z.segment(x_offset(p, k), ph.sys.n) = trajs[p].states.col(k);
            z.segment(u_offset(p, k), ph.sys.m) = trajs[p].inputs.col(k);
        }
    }
    return z;
}

std::vector<Trajectory> CollocationProblem::extract(const VectorXd& z) const {
    std::vector<Trajectory> out(phases.size());
    for (size_t p = 0; p < phases.size(); ++p) {
        const auto& ph = phases[p];
        Trajectory& tr = out[p];
        tr.times = VectorXd::LinSpaced(ph.N + 1, ph.t0, ph.t1);
        tr.states.resize(ph.sys.n, ph.N + 1);
        tr.inputs.resize(ph.sys.m, ph.N + 1);
        for (int k = 0; k <= ph.N; ++k) {
            tr.states.col(k) = z.segment(x_offset(p, k), ph.sys.n);
            tr.inputs.col(k) = z.segment(u_offset(p, k), ph.sys.m);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Jacobians
// ---------------------------------------------------------------------------

void field_jacobians(const ControlSystem& sys, double t, const VectorXd& x, const VectorXd& u,
                     MatrixXd& A, MatrixXd& B) {
    if (sys.dfdx && sys.dfdu) {
        A = sys.dfdx(t, x, u);
        B = sys.dfdu(t, x, u);
        return;
    }
    A.resize(sys.n, sys.n);
    B.resize(sys.n, sys.m);
    VectorXd xp = x, xm = x, up = u, um = u;
    for (int j = 0; j < sys.n; ++j) {
        const double h = 1e-6 * (1.0 + std::abs(x(j)));
        xp(j) += h;
        xm(j) -= h;
        A.col(j) = (sys.f(t, xp, u) - sys.f(t, xm, u)) / (2.0 * h);
        xp(j) = x(j);
        xm(j) = x(j);
    }
    for (int j = 0; j < sys.m; ++j) {
        const double h = 1e-6 * (1.0 + std::abs(u(j)));
        up(j) += h;
        um(j) -= h;
        B.col(j) = (sys.f(t, x, up) - sys.f(t, x, um)) / (2.0 * h);
        up(j) = u(j);
        um(j) = u(j);
    }
}

namespace {

MatrixXd fd_jacobian(const std::function<VectorXd(const VectorXd&)>& fn, const VectorXd& x,
                     int out_dim) {
    MatrixXd J(out_dim, x.size());
    VectorXd xp = x, xm = x;
    for (int j = 0; j < x.size(); ++j) {
        const double h = 1e-6 * (1.0 + std::abs(x(j)));
        xp(j) += h;
        xm(j) -= h;
        J.col(j) = (fn(xp) - fn(xm)) / (2.0 * h);
        xp(j) = x(j);
        xm(j) = x(j);
    }
    return J;
}

Eigen::RowVectorXd fd_gradient(const std::function<double(const VectorXd&)>& fn,
                               const VectorXd& x) {
    Eigen::RowVectorXd g(x.size());
    VectorXd xp = x, xm = x;
    for (int j = 0; j < x.size(); ++j) {
        const double h = 1e-6 * (1.0 + std::abs(x(j)));
        xp(j) += h;
        xm(j) -= h;
        g(j) = (fn(xp) - fn(xm)) / (2.0 * h);
        xp(j) = x(j);
        xm(j) = x(j);
    }
    return g;
}

// Field values and Jacobians at every node, recomputed when z changes.
struct EvalCache {
    VectorXd z_f, z_jac;
    std::vector<MatrixXd> f;                 // per phase, n x (N+1)
    std::vector<std::vector<MatrixXd>> A, B;  // per phase per node

    static bool same(const VectorXd& a, const VectorXd& b) {
        return a.size() == b.size() && (a.array() == b.array()).all();
    }
};

struct Assembler : std::enable_shared_from_this<Assembler> {
    CollocationProblem prob;  // value copy keeps the NLP self-contained
    mutable EvalCache cache;

    explicit Assembler(const CollocationProblem& p) : prob(p) {}

    double node_time(int p, int k) const { return prob.phases[p].t0 + k * prob.phases[p].dt(); }

    void ensure_f(const VectorXd& z) const {
        if (EvalCache::same(cache.z_f, z)) return;
        cache.f.resize(prob.phases.size());
        for (size_t p = 0; p < prob.phases.size(); ++p) {
            const auto& ph = prob.phases[p];
            cache.f[p].resize(ph.sys.n, ph.N + 1);
            for (int k = 0; k <= ph.N; ++k) {
                cache.f[p].col(k) =
                    ph.sys.f(node_time(p, k), z.segment(prob.x_offset(p, k), ph.sys.n),
                             z.segment(prob.u_offset(p, k), ph.sys.m));
            }
        }
        cache.z_f = z;
    }

    void ensure_jac(const VectorXd& z) const {
        if (EvalCache::same(cache.z_jac, z)) return;
        cache.A.resize(prob.phases.size());
        cache.B.resize(prob.phases.size());
        for (size_t p = 0; p < prob.phases.size(); ++p) {
            const auto& ph = prob.phases[p];
            cache.A[p].resize(ph.N + 1);
            cache.B[p].resize(ph.N + 1);
            for (int k = 0; k <= ph.N; ++k) {
                field_jacobians(ph.sys, node_time(p, k),
                                z.segment(prob.x_offset(p, k), ph.sys.n),
                                z.segment(prob.u_offset(p, k), ph.sys.m), cache.A[p][k],
                                cache.B[p][k]);
            }
        }
        cache.z_jac = z;
    }

    const MatrixXd& x_ref(int p) const {
        static const MatrixXd empty;
        if (static_cast<size_t>(p) < prob.cost.x_ref.size() && prob.cost.x_ref[p].size() > 0)
            return prob.cost.x_ref[p];
        return empty;
    }
    const MatrixXd& u_ref(int p) const {
        static const MatrixXd empty;
        if (static_cast<size_t>(p) < prob.cost.u_ref.size() && prob.cost.u_ref[p].size() > 0)
            return prob.cost.u_ref[p];
        return empty;
    }

    double objective(const VectorXd& z, VectorXd* grad) const {
        if (grad) grad->setZero();
        double J = 0.0;
        for (size_t p = 0; p < prob.phases.size(); ++p) {
            const auto& ph = prob.phases[p];
            const double h = ph.dt();
            const MatrixXd& xr = x_ref(static_cast<int>(p));
            const MatrixXd& ur = u_ref(static_cast<int>(p));
            for (int k = 0; k <= ph.N; ++k) {
                const double w = h * ((k == 0 || k == ph.N) ? 0.5 : 1.0);
                VectorXd dx = z.segment(prob.x_offset(p, k), ph.sys.n);
                if (xr.size() > 0) dx -= xr.col(k);
                VectorXd du = z.segment(prob.u_offset(p, k), ph.sys.m);
                if (ur.size() > 0) du -= ur.col(k);
                const VectorXd Qdx = prob.cost.Q * dx;
                const VectorXd Rdu = prob.cost.R * du;
                double L = dx.dot(Qdx) + du.dot(Rdu);
                if (prob.cost.barrier_weight > 0) {
                    const double b = z(prob.x_offset(p, k) + prob.cost.barrier_index);
                    L += prob.cost.barrier_weight * prob.cost.barrier(b);
                }
                J += w * L;
                if (grad) {
                    grad->segment(prob.x_offset(p, k), ph.sys.n) += w * 2.0 * Qdx;
                    grad->segment(prob.u_offset(p, k), ph.sys.m) += w * 2.0 * Rdu;
                    if (prob.cost.barrier_weight > 0) {
                        const double b = z(prob.x_offset(p, k) + prob.cost.barrier_index);
                        (*grad)(prob.x_offset(p, k) + prob.cost.barrier_index) +=
                            w * prob.cost.barrier_weight * prob.cost.barrier_derivative(b);
                    }
                }
            }
        }
        return J;
    }

    // Equality residuals: defects (scaled by 1/h), then links, node_eqs,
    // pair_eqs, in declaration order.
    void eq(const VectorXd& z, VectorXd& out) const {
        ensure_f(z);
        out.resize(prob.num_eq());
        int row = 0;
        for (size_t p = 0; p < prob.phases.size(); ++p) {
            const auto& ph = prob.phases[p];
            const double h = ph.dt();
            for (int k = 0; k < ph.N; ++k) {
                out.segment(row, ph.sys.n) =
                    (z.segment(prob.x_offset(p, k + 1), ph.sys.n) -
                     z.segment(prob.x_offset(p, k), ph.sys.n)) /
                        h -
                    0.5 * (cache.f[p].col(k) + cache.f[p].col(k + 1));
                row += ph.sys.n;
            }
        }
        for (const auto& l : prob.links) {
            const auto& from = prob.phases[l.from_phase];
            const auto& to = prob.phases[l.from_phase + 1];
            const VectorXd x_end = z.segment(prob.x_offset(l.from_phase, from.N), from.sys.n);
            const VectorXd x_start = z.segment(prob.x_offset(l.from_phase + 1, 0), to.sys.n);
            out.segment(row, to.sys.n) = x_start - (l.is_reset ? l.reset(x_end) : x_end);
            row += to.sys.n;
        }
        for (const auto& e : prob.node_eqs) {
            const VectorXd x = z.segment(prob.x_offset(e.phase, e.node), prob.phases[e.phase].sys.n);
            out.segment(row, e.dim) = e.fn(x);
            row += e.dim;
        }
        for (const auto& e : prob.pair_eqs) {
            const VectorXd xa =
                z.segment(prob.x_offset(e.phase_a, e.node_a), prob.phases[e.phase_a].sys.n);
            const VectorXd xb =
                z.segment(prob.x_offset(e.phase_b, e.node_b), prob.phases[e.phase_b].sys.n);
            out.segment(row, e.dim) = e.fn(xa, xb);
            row += e.dim;
        }
    }

    void eq_jtvp(const VectorXd& z, const VectorXd& v, VectorXd& grad) const {
        ensure_jac(z);
        int row = 0;
        for (size_t p = 0; p < prob.phases.size(); ++p) {
            const auto& ph = prob.phases[p];
            const double h = ph.dt();
            // accumulate per-node: w_k = v_k + v_{k-1}
            for (int k = 0; k <= ph.N; ++k) {
                VectorXd w = VectorXd::Zero(ph.sys.n);
                VectorXd dv = VectorXd::Zero(ph.sys.n);  // (v_{k-1} - v_k) / h
                if (k < ph.N) {
                    const auto vk = v.segment(row + k * ph.sys.n, ph.sys.n);
                    w += vk;
                    dv -= vk / h;
                }
                if (k > 0) {
                    const auto vkm = v.segment(row + (k - 1) * ph.sys.n, ph.sys.n);
                    w += vkm;
                    dv += vkm / h;
                }
                grad.segment(prob.x_offset(p, k), ph.sys.n) +=
                    dv - 0.5 * cache.A[p][k].transpose() * w;
                grad.segment(prob.u_offset(p, k), ph.sys.m) -=
                    0.5 * cache.B[p][k].transpose() * w;
            }
            row += ph.N * ph.sys.n;
        }
        for (const auto& l : prob.links) {
            const auto& from = prob.phases[l.from_phase];
            const auto& to = prob.phases[l.from_phase + 1];
            const auto vl = v.segment(row, to.sys.n);
            grad.segment(prob.x_offset(l.from_phase + 1, 0), to.sys.n) += vl;
            const VectorXd x_end = z.segment(prob.x_offset(l.from_phase, from.N), from.sys.n);
            if (l.is_reset) {
                const MatrixXd Jr = fd_jacobian(l.reset, x_end, to.sys.n);
                grad.segment(prob.x_offset(l.from_phase, from.N), from.sys.n) -=
                    Jr.transpose() * vl;
            } else {
                grad.segment(prob.x_offset(l.from_phase, from.N), from.sys.n) -= vl;
            }
            row += to.sys.n;
        }
        for (const auto& e : prob.node_eqs) {
            const int n = prob.phases[e.phase].sys.n;
            const VectorXd x = z.segment(prob.x_offset(e.phase, e.node), n);
            const MatrixXd J = fd_jacobian(e.fn, x, e.dim);
            grad.segment(prob.x_offset(e.phase, e.node), n) +=
                J.transpose() * v.segment(row, e.dim);
            row += e.dim;
        }
        for (const auto& e : prob.pair_eqs) {
            const int na = prob.phases[e.phase_a].sys.n;
            const int nb = prob.phases[e.phase_b].sys.n;
            const VectorXd xa = z.segment(prob.x_offset(e.phase_a, e.node_a), na);
            const VectorXd xb = z.segment(prob.x_offset(e.phase_b, e.node_b), nb);
            const auto va = v.segment(row, e.dim);
            const MatrixXd Ja =
                fd_jacobian([&](const VectorXd& x) { return e.fn(x, xb); }, xa, e.dim);
            const MatrixXd Jb =
                fd_jacobian([&](const VectorXd& x) { return e.fn(xa, x); }, xb, e.dim);
            grad.segment(prob.x_offset(e.phase_a, e.node_a), na) += Ja.transpose() * va;
            grad.segment(prob.x_offset(e.phase_b, e.node_b), nb) += Jb.transpose() * va;
            row += e.dim;
        }
    }

    // Inequalities: per-phase input boxes (u - ub, lb - u), then node_ineqs.
    void ineq(const VectorXd& z, VectorXd& out) const {
        out.resize(prob.num_ineq());
        int row = 0;
        for (size_t p = 0; p < prob.phases.size(); ++p) {
            if (p >= prob.input_bounds.size() || prob.input_bounds[p].lb.size() == 0) continue;
            const auto& ph = prob.phases[p];
            const auto& ib = prob.input_bounds[p];
            for (int k = 0; k <= ph.N; ++k) {
                const auto u = z.segment(prob.u_offset(p, k), ph.sys.m);
                out.segment(row, ph.sys.m) = u - ib.ub;
                row += ph.sys.m;
                out.segment(row, ph.sys.m) = ib.lb - u;
                row += ph.sys.m;
            }
        }
        for (const auto& c : prob.node_ineqs) {
            const int n = prob.phases[c.phase].sys.n;
            for (int k : c.nodes) {
                out(row++) = c.fn(z.segment(prob.x_offset(c.phase, k), n));
            }
        }
    }

    void ineq_jtvp(const VectorXd& z, const VectorXd& v, VectorXd& grad) const {
        int row = 0;
        for (size_t p = 0; p < prob.phases.size(); ++p) {
            if (p >= prob.input_bounds.size() || prob.input_bounds[p].lb.size() == 0) continue;
            const auto& ph = prob.phases[p];
            for (int k = 0; k <= ph.N; ++k) {
                grad.segment(prob.u_offset(p, k), ph.sys.m) += v.segment(row, ph.sys.m);
                row += ph.sys.m;
                grad.segment(prob.u_offset(p, k), ph.sys.m) -= v.segment(row, ph.sys.m);
                row += ph.sys.m;
            }
        }
        for (const auto& c : prob.node_ineqs) {
            const int n = prob.phases[c.phase].sys.n;
            for (int k : c.nodes) {
                const VectorXd x = z.segment(prob.x_offset(c.phase, k), n);
                grad.segment(prob.x_offset(c.phase, k), n) +=
                    v(row) * fd_gradient(c.fn, x).transpose();
                ++row;
            }
        }
    }
};

}  // namespace

NlpProblem CollocationProblem::to_nlp() const {
    validate();
    auto asmb = std::make_shared<Assembler>(*this);
    NlpProblem nlp;
    nlp.n = num_vars();
    nlp.n_eq = num_eq();
    nlp.n_in = num_ineq();
    nlp.objective = [asmb](const VectorXd& z) { return asmb->objective(z, nullptr); };
    nlp.objective_grad = [asmb](const VectorXd& z, VectorXd& g) {
        g.resize(z.size());
        asmb->objective(z, &g);
    };
    nlp.eq = [asmb](const VectorXd& z, VectorXd& c) { asmb->eq(z, c); };
    nlp.eq_jtvp = [asmb](const VectorXd& z, const VectorXd& v, VectorXd& g) {
        asmb->eq_jtvp(z, v, g);
    };
    nlp.ineq = [asmb](const VectorXd& z, VectorXd& c) { asmb->ineq(z, c); };
    nlp.ineq_jtvp = [asmb](const VectorXd& z, const VectorXd& v, VectorXd& g) {
        asmb->ineq_jtvp(z, v, g);
    };
    return nlp;
}

CollocationProblem::Residuals CollocationProblem::verify(const VectorXd& z) const {
    Assembler asmb(*this);
    Residuals res;
    asmb.ensure_f(z);
    for (size_t p = 0; p < phases.size(); ++p) {
        const auto& ph = phases[p];
        const double h = ph.dt();
        for (int k = 0; k < ph.N; ++k) {
            const VectorXd d = z.segment(x_offset(p, k + 1), ph.sys.n) -
                               z.segment(x_offset(p, k), ph.sys.n) -
                               0.5 * h * (asmb.cache.f[p].col(k) + asmb.cache.f[p].col(k + 1));
            res.max_defect = std::max(res.max_defect, d.lpNorm<Eigen::Infinity>());
        }
    }
    VectorXd c;
    asmb.eq(z, c);
    int row = 0;
    for (const auto& p : phases) row += p.N * p.sys.n;
    if (c.size() > row)
        res.max_link = c.tail(c.size() - row).lpNorm<Eigen::Infinity>();
    if (num_ineq() > 0) {
        VectorXd ci;
        asmb.ineq(z, ci);
        res.max_path = std::max(0.0, ci.maxCoeff());
    }
    return res;
}

OptimizerResult solve(const CollocationProblem& problem, const VectorXd& z0,
                      const AugLagOptions& opts) {
    const NlpProblem nlp = problem.to_nlp();
    const AugLagResult r = auglag_solve(nlp, z0, opts);
    OptimizerResult out;
    out.phases = problem.extract(r.z);
    out.cost = r.objective;
    out.status = r.status;
    out.outer_iterations = r.outer_iterations;
    out.inner_iterations = r.inner_iterations;
    const auto res = problem.verify(r.z);
    out.max_defect = res.max_defect;
    out.max_constraint_violation = res.max_link;
    out.max_path_violation = res.max_path;
    return out;
}

OptimizerResult solve(const CollocationProblem& problem,
                      const std::vector<Trajectory>& initial_guess, const AugLagOptions& opts) {
    return solve(problem, problem.pack(initial_guess), opts);
}

CollocationProblem transcribe(const ControlSystem& sys, const CostSpec& cost, const VectorXd& xi,
                              double T_h, int N, const VectorXd* x_terminal) {
    if (N < 2) throw TranscriptionError("transcribe: N must be >= 2");
    if (!(T_h > 0)) throw TranscriptionError("transcribe: horizon must be positive");
    if (xi.size() != sys.n) throw TranscriptionError("transcribe: initial state dimension");
    CollocationProblem prob;
    PhaseSpec ph;
    ph.sys = sys;
    ph.N = N;
    ph.t0 = 0.0;
    ph.t1 = T_h;
    prob.phases.push_back(ph);
    prob.cost = cost;

    CollocationProblem::NodeFn init;
    init.phase = 0;
    init.node = 0;
    init.dim = sys.n;
    VectorXd xi_copy = xi;
    init.fn = [xi_copy](const VectorXd& x) { return VectorXd(x - xi_copy); };
    prob.node_eqs.push_back(init);

    if (x_terminal) {
        if (x_terminal->size() != sys.n)
            throw TranscriptionError("transcribe: terminal state dimension");
        CollocationProblem::NodeFn term;
        term.phase = 0;
        term.node = N;
        term.dim = sys.n;
        VectorXd xt = *x_terminal;
        term.fn = [xt](const VectorXd& x) { return VectorXd(x - xt); };
        prob.node_eqs.push_back(term);
    }
    prob.validate();
    return prob;
}

void add_insertion_boundary(CollocationProblem& problem, const StateDecomposition& decomp,
                            const MatrixXd& a1, const VectorXd& a0, int phase, int node) {
    CollocationProblem::NodeFn bc;
    bc.phase = phase;
    bc.node = node;
    bc.dim = decomp.n2();
    StateDecomposition d = decomp;
    MatrixXd a1c = a1;
    VectorXd a0c = a0;
    bc.fn = [d, a1c, a0c](const VectorXd& x) {
        return VectorXd(a0c + a1c * d.x1(x) - d.x2(x));
    };
    problem.node_eqs.push_back(bc);
}

std::vector<Trajectory> ramp_guess(const CollocationProblem& problem, const VectorXd& xi,
                                   const VectorXd& xf) {
    const double t_begin = problem.phases.front().t0;
    const double t_end = problem.phases.back().t1;
    std::vector<Trajectory> out;
    for (const auto& ph : problem.phases) {
        Trajectory tr;
        tr.times = VectorXd::LinSpaced(ph.N + 1, ph.t0, ph.t1);
        tr.states.resize(ph.sys.n, ph.N + 1);
        tr.inputs = MatrixXd::Zero(ph.sys.m, ph.N + 1);
        for (int k = 0; k <= ph.N; ++k) {
            const double a = (tr.times(k) - t_begin) / (t_end - t_begin);
            tr.states.col(k) = (1.0 - a) * xi + a * xf;
        }
        out.push_back(tr);
    }
    return out;
}

}  // namespace zds
