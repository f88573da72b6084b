#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "zds/dynamics.hpp"
#include "zds/nlp.hpp"
#include "zds/sim.hpp"

namespace zds {

/// Running-cost specification: quadratic state/input terms about optional
/// node-aligned references, plus a soft barrier on one state coordinate,
///   L(x, u) = |x - xr|_Q^2 + |u - ur|_R^2 + w b^2 (e^{b - pb} + e^{-b - pb}),
/// with b the barrier coordinate.
struct CostSpec {
    enum class Kind { Regulation, OrbitTransition, GaitEnergy, GaitTransition };
    Kind kind = Kind::Regulation;
    MatrixXd Q;
    MatrixXd R;
    double barrier_weight = 0.0;
    double barrier_halfwidth = 0.0;
    int barrier_index = 0;
    // Per-phase references at the collocation nodes (n x (N+1), m x (N+1));
    // empty means zero reference.
    std::vector<MatrixXd> x_ref;
    std::vector<MatrixXd> u_ref;

    void validate(int n, int m) const;
    double barrier(double b) const;
    double barrier_derivative(double b) const;
};

/// One continuous phase of the transcription: trapezoidal collocation on a
/// uniform mesh of N intervals over [t0, t1].
struct PhaseSpec {
    ControlSystem sys;
    int N = 0;
    double t0 = 0.0;
    double t1 = 0.0;
    double dt() const { return (t1 - t0) / N; }
};

/// Direct-collocation NLP. Decision vector layout (stable, documented):
/// phases in order; within a phase, nodes in order; at each node the state
/// block then the input block: z = [x_{p0,k0}, u_{p0,k0}, x_{p0,k1}, ...].
struct CollocationProblem {
    std::vector<PhaseSpec> phases;
    CostSpec cost;

    // Phase links: x_{p+1}(0) = reset(x_p(N)) or plain continuity.
    struct Link {
        int from_phase = 0;
        bool is_reset = false;
        std::function<VectorXd(const VectorXd&)> reset;
    };
    std::vector<Link> links;

    // Pointwise equality fn(x_node) = 0 (terminal states, insertion-map
    // boundary conditions, guard equalities, speed constraints).
    struct NodeFn {
        int phase = 0;
        int node = 0;
        int dim = 0;
        std::function<VectorXd(const VectorXd& x)> fn;
    };
    std::vector<NodeFn> node_eqs;

    // Two-node equality fn(x_a, x_b) = 0 (periodicity across phases).
    struct PairFn {
        int phase_a = 0, node_a = 0, phase_b = 0, node_b = 0;
        int dim = 0;
        std::function<VectorXd(const VectorXd&, const VectorXd&)> fn;
    };
    std::vector<PairFn> pair_eqs;

    // Per-phase input box bounds; empty vectors disable the bound.
    struct InputBounds {
        VectorXd lb, ub;
    };
    std::vector<InputBounds> input_bounds;

    // Pointwise scalar inequality fn(x_node) <= 0 on selected nodes.
    struct NodeIneqFn {
        int phase = 0;
        std::vector<int> nodes;
        std::function<double(const VectorXd& x)> fn;
    };
    std::vector<NodeIneqFn> node_ineqs;

    int num_vars() const;
    int num_eq() const;
    int num_ineq() const;
    int x_offset(int phase, int node) const;
    int u_offset(int phase, int node) const;

    void validate() const;

    /// Packs node-aligned trajectories (one per phase) into a decision vector.
    VectorXd pack(const std::vector<Trajectory>& trajs) const;
    std::vector<Trajectory> extract(const VectorXd& z) const;

    NlpProblem to_nlp() const;

    /// Raw residuals recomputed from z, independent of solver-internal values.
    struct Residuals {
        double max_defect = 0.0;       // unscaled trapezoidal defects
        double max_link = 0.0;         // reset/continuity/boundary equalities
        double max_path = 0.0;         // inequality violation
    };
    Residuals verify(const VectorXd& z) const;
};

struct OptimizerResult {
    std::vector<Trajectory> phases;
    double cost = 0.0;
    SolveStatus status = SolveStatus::Failed;
    double max_defect = 0.0;
    double max_constraint_violation = 0.0;
    double max_path_violation = 0.0;
    int outer_iterations = 0;
    int inner_iterations = 0;

    bool feasible(double defect_tol = 1e-6, double path_tol = 1e-8) const {
        return status == SolveStatus::Converged && max_defect <= defect_tol &&
               max_constraint_violation <= defect_tol && max_path_violation <= path_tol;
    }
    const Trajectory& trajectory() const { return phases.front(); }
};

/// Solves the transcribed problem with the augmented-Lagrangian / L-BFGS
/// stack; never throws on non-convergence.
OptimizerResult solve(const CollocationProblem& problem, const VectorXd& z0,
                      const AugLagOptions& opts = {});
OptimizerResult solve(const CollocationProblem& problem,
                      const std::vector<Trajectory>& initial_guess,
                      const AugLagOptions& opts = {});

/// Single-phase transcription with an initial-state constraint and an
/// optional terminal state.
CollocationProblem transcribe(const ControlSystem& sys, const CostSpec& cost, const VectorXd& xi,
                              double T_h, int N, const VectorXd* x_terminal = nullptr);

/// Adds the insertion boundary condition gamma(x1(t_node)) = x2(t_node) for
/// an affine insertion map x2 = a0 + a1 x1.
void add_insertion_boundary(CollocationProblem& problem, const StateDecomposition& decomp,
                            const MatrixXd& a1, const VectorXd& a0, int phase, int node);

/// Straight-line state guess from xi to xf with zero inputs.
std::vector<Trajectory> ramp_guess(const CollocationProblem& problem, const VectorXd& xi,
                                   const VectorXd& xf);

/// Jacobians of the vector field: analytic when provided, otherwise central
/// differences with step 1e-6 * (1 + |value|) per coordinate.
void field_jacobians(const ControlSystem& sys, double t, const VectorXd& x, const VectorXd& u,
                     MatrixXd& A, MatrixXd& B);

}  // namespace zds
