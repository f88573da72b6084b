#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <string>

#include "zds/errors.hpp"

namespace zds {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Splits the full state x into the weakly actuated block x1 and the
/// strongly actuated block x2 by index selection. split followed by
/// merge is the identity on every state vector.
struct StateDecomposition {
    Eigen::VectorXi x1_idx;
    Eigen::VectorXi x2_idx;

    int n1() const { return static_cast<int>(x1_idx.size()); }
    int n2() const { return static_cast<int>(x2_idx.size()); }
    int n() const { return n1() + n2(); }

    VectorXd x1(const VectorXd& x) const { return select(x, x1_idx); }
    VectorXd x2(const VectorXd& x) const { return select(x, x2_idx); }

    VectorXd merge(const VectorXd& x1, const VectorXd& x2) const {
        if (x1.size() != n1() || x2.size() != n2())
            throw ContractViolation("StateDecomposition::merge: block size mismatch");
        VectorXd x(n());
        for (int i = 0; i < n1(); ++i) x(x1_idx(i)) = x1(i);
        for (int i = 0; i < n2(); ++i) x(x2_idx(i)) = x2(i);
        return x;
    }

    /// Contiguous split: x1 = x(0..n1), x2 = x(n1..n).
    static StateDecomposition contiguous(int n1, int n2) {
        StateDecomposition d;
        d.x1_idx = Eigen::VectorXi::LinSpaced(n1, 0, n1 - 1);
        d.x2_idx = Eigen::VectorXi::LinSpaced(n2, n1, n1 + n2 - 1);
        return d;
    }

  private:
    static VectorXd select(const VectorXd& x, const Eigen::VectorXi& idx) {
        VectorXd out(idx.size());
        for (int i = 0; i < idx.size(); ++i) {
            if (idx(i) < 0 || idx(i) >= x.size())
                throw ContractViolation("StateDecomposition: index out of range");
            out(i) = x(idx(i));
        }
        return out;
    }
};

/// Input transformation between a physical input u and a virtual input v
/// (typically v = commanded acceleration of the x2 block). Both directions
/// are exposed so controllers can be designed in the virtual channel and
/// realized physically.
struct InputTransform {
    // v -> u at state x
    std::function<VectorXd(double t, const VectorXd& x, const VectorXd& v)> to_physical;
    // u -> v at state x
    std::function<VectorXd(double t, const VectorXd& x, const VectorXd& u)> to_virtual;
};

/// Controlled ODE  x' = f(t, x, u)  with period T_p. For time-invariant
/// systems f ignores t; T_p is still carried because the controllers are
/// clocked by it.
struct ControlSystem {
    int n = 0;
    int m = 0;
    double T_p = 0.0;
    bool time_varying = false;
    std::function<VectorXd(double t, const VectorXd& x, const VectorXd& u)> f;

    // Optional analytic Jacobians of f; when absent the transcription falls
    // back to central differences.
    std::function<MatrixXd(double t, const VectorXd& x, const VectorXd& u)> dfdx;
    std::function<MatrixXd(double t, const VectorXd& x, const VectorXd& u)> dfdu;

    // Named disturbance entry channels: x' += g_ch(x) * d during a
    // disturbance window. For mechanical models g_ch is the column of the
    // input map for an external force applied at a physical location.
    std::map<std::string, std::function<VectorXd(const VectorXd&)>> disturbance_channels;
};

/// Evaluates the vector field with dimension checks. Pure; no mutation.
VectorXd eval_field(const ControlSystem& sys, double t, const VectorXd& x, const VectorXd& u);

/// Hybrid model with one continuous phase, a scalar guard p (impact when
/// p crosses zero from above) and a reset map applied on the guard.
struct HybridModel {
    ControlSystem continuous;
    std::function<double(const VectorXd&)> guard;
    std::function<VectorXd(const VectorXd&)> reset;
    StateDecomposition decomposition;
};

/// Mechanical model  D(q) qdd + Omega(q, qd) = B u  with the coordinates
/// partitioned as q = (q1, q2), q1 unactuated (n1 rows of B zero) and
/// B2 square invertible. Omega collects Coriolis, centrifugal and gravity
/// terms.
struct MechanicalModel {
    int n_q = 0;
    int n_q1 = 0;  // unactuated block size; q2 takes the remaining rows
    std::function<MatrixXd(const VectorXd& q)> mass_matrix;
    std::function<VectorXd(const VectorXd& q, const VectorXd& qd)> bias;
    MatrixXd input_matrix;  // n_q x m, constant for the bundled models

    // Energies for conservation oracles.
    std::function<double(const VectorXd& q, const VectorXd& qd)> kinetic_energy;
    std::function<double(const VectorXd& q)> potential_energy;

    int n_q2() const { return n_q - n_q1; }

    /// Solves D qdd = B u - Omega. Positive definiteness of D is checked
    /// through the Cholesky factorization.
    VectorXd accel(const VectorXd& q, const VectorXd& qd, const VectorXd& u) const;
};

/// Appendix-style pre-feedback u = B2^{-1} (Dbar v + Omegabar_2) turning the
/// actuated block into an exact double integrator qdd2 = v.
VectorXd spong_prefeedback(const MechanicalModel& mech, const VectorXd& q, const VectorXd& qd,
                           const VectorXd& v);

/// Conjugate momentum of the unactuated block, sigma1 = D11 qd1 + D12 qd2.
VectorXd conjugate_momentum(const MechanicalModel& mech, const VectorXd& q, const VectorXd& qd);

/// Recovers qd1 from (q, sigma1, qd2); inverse of conjugate_momentum.
VectorXd velocity_from_momentum(const MechanicalModel& mech, const VectorXd& q,
                                const VectorXd& sigma1, const VectorXd& qd2);

}  // namespace zds
