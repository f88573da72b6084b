#pragma once

#include <functional>
#include <string>
#include <vector>

#include "zds/dynamics.hpp"

namespace zds {

/// Sampled solution of an ODE: strictly increasing time grid with the state
/// and the applied input recorded at every grid point.
struct Trajectory {
    VectorXd times;
    MatrixXd states;  // n x K
    MatrixXd inputs;  // m x K

    int samples() const { return static_cast<int>(times.size()); }
    double t0() const { return times(0); }
    double t1() const { return times(times.size() - 1); }

    /// Piecewise-linear interpolation; clamps outside [t0, t1].
    VectorXd state_at(double t) const;
    VectorXd input_at(double t) const;

    /// Exact sample lookup: index of the grid time equal to t within tol.
    int index_of_time(double t, double tol = 1e-9) const;

    void validate() const;
};

/// Writes header "t,x0,...,u0,..." followed by one row per sample.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path);

enum class Phase { I, II };

/// Execution of a hybrid model: phase-tagged trajectory segments separated
/// by impacts (phase i -> ii) and clock resets at tau = T_p (phase ii -> i).
struct HybridExecution {
    struct Segment {
        Phase phase;
        double tau0 = 0.0;  // tau at the start of the segment
        Trajectory traj;
    };
    std::vector<Segment> segments;
    std::vector<double> impact_times;
    std::vector<double> tau_reset_times;
    VectorXd final_state;
    double final_time = 0.0;

    bool empty() const { return segments.empty(); }
};

/// Constant force applied on a named model channel during [start, end).
struct DisturbanceSignal {
    struct Window {
        double start = 0.0;
        double end = 0.0;
        double magnitude = 0.0;
        std::string channel;
    };
    std::vector<Window> windows;

    void validate() const;
    bool active() const { return !windows.empty(); }
};

using InputFn = std::function<VectorXd(double t, const VectorXd& x)>;
using HybridInputFn = std::function<VectorXd(double tau, Phase phase, const VectorXd& x)>;

struct SimOptions {
    double dt = 1e-3;
    double event_tol = 1e-10;        // |p| at located impacts
    double max_phase_duration = 0.0;  // 0 = 3 * T_p
    DisturbanceSignal disturbance;
};

/// Fixed-step RK4 from t0 to t1; the controller is evaluated at every
/// stage, the recorded input is the controller value at the grid times.
Trajectory integrate(const ControlSystem& sys, const InputFn& controller, const VectorXd& xi,
                     double t0, double t1, const SimOptions& opts = {});

/// Open-loop convenience wrapper: u(t) only.
Trajectory integrate_open_loop(const ControlSystem& sys,
                               const std::function<VectorXd(double)>& u, const VectorXd& xi,
                               double t0, double t1, const SimOptions& opts = {});

/// Runs the two-phase hybrid system for exactly n_steps impacts, starting in
/// phase i with tau = 0; ends at the tau = T_p reset following the last
/// impact. Guard crossings are located by bisection within the bracketing
/// step.
HybridExecution simulate_hybrid(const HybridModel& model, double T_p,
                                const HybridInputFn& controller, const VectorXd& xi, int n_steps,
                                const SimOptions& opts = {});

}  // namespace zds
