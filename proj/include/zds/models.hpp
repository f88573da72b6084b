#pragma once

#include <memory>
#include <string>
#include <vector>

#include "zds/dynamics.hpp"

namespace zds {

/// Cart with an inverted pendulum, unit masses and unit pendulum length.
/// State x = (p, pd, theta, thetad); x1 = (p, pd), x2 = (theta, thetad).
/// theta = 0 is upright; the input is the horizontal force on the cart.
struct CartPendulumParams {
    double pendulum_length = 1.0;  // m
    double pendulum_mass = 1.0;    // kg
    double cart_mass = 1.0;        // kg
    double gravity = 9.81;         // m/s^2
    double barrier_halfwidth = 2.0;  // p_b, m

    void validate() const;
};

struct CartPendulum {
    CartPendulumParams params;
    ControlSystem sys;          // physical input: cart force
    ControlSystem sys_virtual;  // after pendulum-channel pre-feedback: input is thetadd
    StateDecomposition decomp;  // x1 = (p, pd), x2 = (theta, thetad)
    MechanicalModel mech;       // Lagrangian form, q = (p, theta)
    InputTransform prefeedback;

    double energy(const VectorXd& x) const;
};

CartPendulum cart_pendulum(const CartPendulumParams& params = {});

/// Planar three-link biped: two rigid legs with point feet and a torso,
/// both hips actuated, stance ankle passive. Coordinates q = (theta,
/// alpha, beta): absolute stance-leg angle, torso angle relative to the
/// stance leg, swing-leg angle relative to the torso. State
/// x = (theta, thetad, alpha, beta, alphad, betad); x1 = (theta, thetad).
struct Biped3Params {
    double torso_mass = 10.0;  // kg
    double torso_com = 0.25;   // m, distance hip -> torso point mass
    double leg_mass = 5.0;     // kg, per leg
    double leg_length = 1.0;   // m
    double leg_com = 0.5;      // m, distance along the leg to its point mass
    double hip_mass = 0.0;     // kg
    double gravity = 9.81;     // m/s^2

    void validate() const;
};

struct Biped3 {
    Biped3Params params;
    MechanicalModel mech;       // q = (theta, alpha, beta)
    ControlSystem sys;          // physical hip torques (m = 2)
    ControlSystem sys_virtual;  // Spong form: input is commanded (alphadd, betadd)
    HybridModel hybrid;          // continuous = sys
    HybridModel hybrid_virtual;  // continuous = sys_virtual
    StateDecomposition decomp;
    InputTransform prefeedback;

    double energy(const VectorXd& x) const;
    /// Swing-foot height above ground; the guard function.
    double swing_foot_height(const VectorXd& x) const;
    /// Horizontal swing-to-stance foot separation; one step advances the
    /// robot by this amount, evaluated just before impact.
    double step_displacement(const VectorXd& x) const;
    /// Angular momentum of all masses about a ground point at horizontal
    /// offset px from the stance foot.
    double angular_momentum_about(const VectorXd& x, double px) const;
    /// d/dt of the guard along the flow; depends on the state only.
    double guard_rate(const VectorXd& x) const;
};

Biped3 biped3(const Biped3Params& params = {});

/// Registry keyed by model name ("cart_pendulum", "biped3").
bool is_registered_model(const std::string& name);
std::vector<std::string> registered_models();

}  // namespace zds
