#include "zds/models.hpp"

#include <cmath>
#include <sstream>

namespace zds {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

// ---------------------------------------------------------------------------
// Cart-pendulum
// ---------------------------------------------------------------------------

void CartPendulumParams::validate() const {
    if (pendulum_length <= 0 || pendulum_mass <= 0 || cart_mass <= 0 || gravity <= 0 ||
        barrier_halfwidth <= 0)
        throw ModelError("cart_pendulum: all parameters must be positive");
    // The bundled field is the unit-parameter closed form; only gravity and
    // the barrier half-width are meant to vary.
    if (pendulum_length != 1.0 || pendulum_mass != 1.0 || cart_mass != 1.0)
        throw ModelError("cart_pendulum: bundled model is defined for unit masses and unit length");
}

CartPendulum cart_pendulum(const CartPendulumParams& params) {
    params.validate();
    const double g = params.gravity;

    CartPendulum model;
    model.params = params;
    model.decomp = StateDecomposition::contiguous(2, 2);

    ControlSystem sys;
    sys.n = 4;
    sys.m = 1;
    sys.T_p = 2.0;
    sys.time_varying = false;
    sys.f = [g](double, const VectorXd& x, const VectorXd& u) {
        const double th = x(2), thd = x(3);
        const double s = std::sin(th), c = std::cos(th);
        const double den = 3.0 * c * c - 8.0;
        VectorXd dx(4);
        dx(0) = x(1);
        dx(1) = (2.0 * s * thd * thd - 3.0 * g * c * s - 4.0 * u(0)) / den;
        dx(2) = thd;
        dx(3) = (3.0 * c * s * thd * thd - 12.0 * g * s - 6.0 * c * u(0)) / den;
        return dx;
    };
    sys.dfdx = [g](double, const VectorXd& x, const VectorXd& u) {
        const double th = x(2), thd = x(3);
        const double s = std::sin(th), c = std::cos(th);
        const double c2 = std::cos(2.0 * th);
        const double den = 3.0 * c * c - 8.0;
        const double dden = -3.0 * std::sin(2.0 * th);
        const double num1 = 2.0 * s * thd * thd - 3.0 * g * c * s - 4.0 * u(0);
        const double dnum1 = 2.0 * c * thd * thd - 3.0 * g * c2;
        const double num3 = 3.0 * c * s * thd * thd - 12.0 * g * s - 6.0 * c * u(0);
        const double dnum3 = 3.0 * c2 * thd * thd - 12.0 * g * c + 6.0 * s * u(0);
        MatrixXd A = MatrixXd::Zero(4, 4);
        A(0, 1) = 1.0;
        A(1, 2) = (dnum1 * den - num1 * dden) / (den * den);
        A(1, 3) = 4.0 * s * thd / den;
        A(2, 3) = 1.0;
        A(3, 2) = (dnum3 * den - num3 * dden) / (den * den);
        A(3, 3) = 6.0 * c * s * thd / den;
        return A;
    };
    sys.dfdu = [](double, const VectorXd& x, const VectorXd&) {
        const double c = std::cos(x(2));
        const double den = 3.0 * c * c - 8.0;
        MatrixXd B = MatrixXd::Zero(4, 1);
        B(1, 0) = -4.0 / den;
        B(3, 0) = -6.0 * c / den;
        return B;
    };
    // d = 1 N on the cart enters exactly like the control force.
    sys.disturbance_channels["cart_force"] = [g](const VectorXd& x) {
        const double c = std::cos(x(2));
        const double den = 3.0 * c * c - 8.0;
        VectorXd gd = VectorXd::Zero(4);
        gd(1) = -4.0 / den;
        gd(3) = -6.0 * c / den;
        return gd;
    };
    model.sys = sys;

    // Pendulum-channel pre-feedback: ubar is the realized thetadd; invertible
    // only on |theta| < pi/2 where the input coefficient 6 cos(theta) is
    // bounded away from zero.
    auto check_range = [](double th) {
        if (std::abs(th) >= kPi / 2.0 - 1e-6) {
            std::ostringstream os;
            os << "cart_pendulum pre-feedback outside operating range: theta = " << th;
            throw SingularityError(os.str());
        }
    };
    InputTransform tf;
    tf.to_virtual = [g](double, const VectorXd& x, const VectorXd& u) {
        const double th = x(2), thd = x(3);
        const double s = std::sin(th), c = std::cos(th);
        const double den = 3.0 * c * c - 8.0;
        VectorXd v(1);
        v(0) = (3.0 * c * s * thd * thd - 12.0 * g * s - 6.0 * c * u(0)) / den;
        return v;
    };
    tf.to_physical = [g, check_range](double, const VectorXd& x, const VectorXd& v) {
        const double th = x(2), thd = x(3);
        check_range(th);
        const double s = std::sin(th), c = std::cos(th);
        const double den = 3.0 * c * c - 8.0;
        VectorXd u(1);
        u(0) = (3.0 * c * s * thd * thd - 12.0 * g * s - den * v(0)) / (6.0 * c);
        return u;
    };
    model.prefeedback = tf;

    ControlSystem sv;
    sv.n = 4;
    sv.m = 1;
    sv.T_p = 2.0;
    sv.time_varying = false;
    sv.f = [sys, tf](double t, const VectorXd& x, const VectorXd& v) {
        const VectorXd u = tf.to_physical(t, x, v);
        VectorXd dx = sys.f(t, x, u);
        dx(3) = v(0);  // exact by construction
        return dx;
    };
    sv.dfdx = [sys, tf, g, check_range](double t, const VectorXd& x, const VectorXd& v) {
        const double th = x(2), thd = x(3);
        check_range(th);
        const double s = std::sin(th), c = std::cos(th);
        const double den = 3.0 * c * c - 8.0;
        const VectorXd u = tf.to_physical(t, x, v);
        // du/dx for u = (3 c s thd^2 - 12 g s - den*v) / (6 c)
        const double num = 3.0 * c * s * thd * thd - 12.0 * g * s - den * v(0);
        const double dnum = 3.0 * std::cos(2.0 * th) * thd * thd - 12.0 * g * c +
                            6.0 * c * s * v(0);
        Eigen::RowVector4d dudx = Eigen::RowVector4d::Zero();
        dudx(2) = (dnum * c + num * s) / (6.0 * c * c);
        dudx(3) = s * thd;
        MatrixXd A = sys.dfdx(t, x, u) + sys.dfdu(t, x, u) * dudx;
        A.row(3).setZero();  // thetadd == v exactly
        return A;
    };
    sv.dfdu = [sys, tf](double t, const VectorXd& x, const VectorXd& v) {
        const double c = std::cos(x(2));
        const double den = 3.0 * c * c - 8.0;
        const VectorXd u = tf.to_physical(t, x, v);
        MatrixXd B = sys.dfdu(t, x, u) * (-den / (6.0 * c));
        B(3, 0) = 1.0;
        return B;
    };
    model.sys_virtual = sv;

    // Lagrangian form with q = (theta, p): theta unactuated, B2 = [1].
    MechanicalModel mech;
    mech.n_q = 2;
    mech.n_q1 = 1;
    mech.mass_matrix = [](const VectorXd& q) {
        const double c = std::cos(q(0));
        MatrixXd D(2, 2);
        D << 1.0 / 3.0, -0.5 * c, -0.5 * c, 2.0;
        return D;
    };
    mech.bias = [g](const VectorXd& q, const VectorXd& qd) {
        const double s = std::sin(q(0));
        VectorXd b(2);
        b(0) = -0.5 * g * s;
        b(1) = 0.5 * s * qd(0) * qd(0);
        return b;
    };
    mech.input_matrix = (MatrixXd(2, 1) << 0.0, 1.0).finished();
    mech.kinetic_energy = [mech](const VectorXd& q, const VectorXd& qd) {
        return 0.5 * qd.dot(mech.mass_matrix(q) * qd);
    };
    mech.potential_energy = [g](const VectorXd& q) { return 0.5 * g * std::cos(q(0)); };
    model.mech = mech;

    return model;
}

double CartPendulum::energy(const VectorXd& x) const {
    const VectorXd q = (VectorXd(2) << x(2), x(0)).finished();
    const VectorXd qd = (VectorXd(2) << x(3), x(1)).finished();
    return mech.kinetic_energy(q, qd) + mech.potential_energy(q);
}

// ---------------------------------------------------------------------------
// Three-link biped
// ---------------------------------------------------------------------------

void Biped3Params::validate() const {
    if (torso_mass <= 0 || torso_com <= 0 || leg_mass <= 0 || leg_length <= 0 || leg_com <= 0 ||
        hip_mass < 0 || gravity <= 0)
        throw ModelError("biped3: parameters must be positive (hip mass may be zero)");
    if (leg_com >= leg_length) throw ModelError("biped3: leg_com must lie inside the leg");
}

namespace {

// Absolute angles (stance leg, swing leg, torso), each measured from the
// upright vertical; positive tilts toward +x. Relative coordinates are
// q = (theta, alpha, beta) with swing = theta + alpha + beta and
// torso = theta + alpha.
struct BipedKinematics {
    double mt, lt, ml, r, a, b, mh, g;

    Eigen::Vector3d abs_angles(const Eigen::Vector3d& q_rel) const {
        return {q_rel(0), q_rel(0) + q_rel(1) + q_rel(2), q_rel(0) + q_rel(1)};
    }
    // Constant map q_abs = M q_rel.
    Eigen::Matrix3d M() const {
        Eigen::Matrix3d m;
        m << 1, 0, 0, 1, 1, 1, 1, 1, 0;
        return m;
    }

    MatrixXd mass_matrix_abs(const Eigen::Vector3d& q) const {
        const double c12 = std::cos(q(0) - q(1));
        const double c13 = std::cos(q(0) - q(2));
        Eigen::Matrix3d D;
        const double d11 = ml * a * a + (mh + mt + ml) * r * r;
        D << d11, -ml * r * b * c12, mt * r * lt * c13,  //
            -ml * r * b * c12, ml * b * b, 0.0,          //
            mt * r * lt * c13, 0.0, mt * lt * lt;
        return D;
    }

    VectorXd coriolis_abs(const Eigen::Vector3d& q, const Eigen::Vector3d& qd) const {
        const double s12 = std::sin(q(0) - q(1));
        const double s13 = std::sin(q(0) - q(2));
        const double k2 = ml * r * b;
        const double k3 = mt * r * lt;
        Eigen::Vector3d h;
        h << -k2 * s12 * qd(1) * qd(1) + k3 * s13 * qd(2) * qd(2),  //
            k2 * s12 * qd(0) * qd(0),                               //
            -k3 * s13 * qd(0) * qd(0);
        return h;
    }

    VectorXd gravity_abs(const Eigen::Vector3d& q) const {
        Eigen::Vector3d G;
        G << -g * (ml * a + (ml + mh + mt) * r) * std::sin(q(0)),  //
            g * ml * b * std::sin(q(1)),                           //
            -g * mt * lt * std::sin(q(2));
        return G;
    }

    double potential_abs(const Eigen::Vector3d& q) const {
        return g * ((ml * a + (ml + mh + mt) * r) * std::cos(q(0)) - ml * b * std::cos(q(1)) +
                    mt * lt * std::cos(q(2)));
    }

    struct PointMass {
        double mass;
        Eigen::Vector2d pos;
        Eigen::Matrix<double, 2, 3> jac;  // d pos / d q_abs
    };

    std::vector<PointMass> point_masses(const Eigen::Vector3d& q) const {
        const double s1 = std::sin(q(0)), c1 = std::cos(q(0));
        const double s2 = std::sin(q(1)), c2 = std::cos(q(1));
        const double s3 = std::sin(q(2)), c3 = std::cos(q(2));
        std::vector<PointMass> pm;
        PointMass st;
        st.mass = ml;
        st.pos = {a * s1, a * c1};
        st.jac << a * c1, 0, 0, -a * s1, 0, 0;
        pm.push_back(st);
        if (mh > 0) {
            PointMass hip;
            hip.mass = mh;
            hip.pos = {r * s1, r * c1};
            hip.jac << r * c1, 0, 0, -r * s1, 0, 0;
            pm.push_back(hip);
        }
        PointMass torso;
        torso.mass = mt;
        torso.pos = {r * s1 + lt * s3, r * c1 + lt * c3};
        torso.jac << r * c1, 0, lt * c3, -r * s1, 0, -lt * s3;
        pm.push_back(torso);
        PointMass sw;
        sw.mass = ml;
        sw.pos = {r * s1 - b * s2, r * c1 - b * c2};
        sw.jac << r * c1, -b * c2, 0, -r * s1, b * s2, 0;
        pm.push_back(sw);
        return pm;
    }

    Eigen::Vector2d swing_foot(const Eigen::Vector3d& q) const {
        return {r * (std::sin(q(0)) - std::sin(q(1))), r * (std::cos(q(0)) - std::cos(q(1)))};
    }
    Eigen::Matrix<double, 2, 3> swing_foot_jac(const Eigen::Vector3d& q) const {
        Eigen::Matrix<double, 2, 3> J;
        J << r * std::cos(q(0)), -r * std::cos(q(1)), 0,  //
            -r * std::sin(q(0)), r * std::sin(q(1)), 0;
        return J;
    }
};

void split_state(const VectorXd& x, Eigen::Vector3d& q, Eigen::Vector3d& qd) {
    q << x(0), x(2), x(3);
    qd << x(1), x(4), x(5);
}

VectorXd join_state(const Eigen::Vector3d& q, const Eigen::Vector3d& qd) {
    VectorXd x(6);
    x << q(0), qd(0), q(1), q(2), qd(1), qd(2);
    return x;
}

}  // namespace

Biped3 biped3(const Biped3Params& params) {
    params.validate();
    BipedKinematics kin{params.torso_mass, params.torso_com, params.leg_mass,
                        params.leg_length, params.leg_com,   params.leg_com,
                        params.hip_mass,   params.gravity};

    Biped3 model;
    model.params = params;
    model.decomp = StateDecomposition::contiguous(2, 4);

    MechanicalModel mech;
    mech.n_q = 3;
    mech.n_q1 = 1;
    mech.mass_matrix = [kin](const VectorXd& q_rel) {
        const Eigen::Vector3d qa = kin.abs_angles(q_rel);
        const Eigen::Matrix3d M = kin.M();
        return MatrixXd(M.transpose() * kin.mass_matrix_abs(qa) * M);
    };
    mech.bias = [kin](const VectorXd& q_rel, const VectorXd& qd_rel) {
        const Eigen::Vector3d qa = kin.abs_angles(q_rel);
        const Eigen::Matrix3d M = kin.M();
        const Eigen::Vector3d qda = M * qd_rel;
        return VectorXd(M.transpose() * (kin.coriolis_abs(qa, qda) + kin.gravity_abs(qa)));
    };
    mech.input_matrix = (MatrixXd(3, 2) << 0, 0, 1, 0, 0, 1).finished();
    mech.kinetic_energy = [mech](const VectorXd& q, const VectorXd& qd) {
        return 0.5 * qd.dot(mech.mass_matrix(q) * qd);
    };
    mech.potential_energy = [kin](const VectorXd& q_rel) {
        return kin.potential_abs(kin.abs_angles(q_rel));
    };
    model.mech = mech;

    ControlSystem sys;
    sys.n = 6;
    sys.m = 2;
    sys.T_p = 0.0;  // set by the gait designer
    sys.time_varying = false;
    sys.f = [mech](double, const VectorXd& x, const VectorXd& u) {
        Eigen::Vector3d q, qd;
        split_state(x, q, qd);
        const VectorXd qdd = mech.accel(q, qd, u);
        VectorXd dx(6);
        dx << qd(0), qdd(0), qd(1), qd(2), qdd(1), qdd(2);
        return dx;
    };
    sys.disturbance_channels["hip_fx"] = [mech, kin](const VectorXd& x) {
        Eigen::Vector3d q, qd;
        split_state(x, q, qd);
        VectorXd Q(3);
        Q << kin.r * std::cos(q(0)), 0.0, 0.0;  // horizontal force at the hip
        Eigen::LLT<MatrixXd> llt(mech.mass_matrix(q));
        const VectorXd qdd = llt.solve(Q);
        VectorXd gd = VectorXd::Zero(6);
        gd(1) = qdd(0);
        gd(4) = qdd(1);
        gd(5) = qdd(2);
        return gd;
    };
    model.sys = sys;

    InputTransform tf;
    tf.to_physical = [mech](double, const VectorXd& x, const VectorXd& v) {
        Eigen::Vector3d q, qd;
        split_state(x, q, qd);
        return spong_prefeedback(mech, q, qd, v);
    };
    tf.to_virtual = [mech](double, const VectorXd& x, const VectorXd& u) {
        Eigen::Vector3d q, qd;
        split_state(x, q, qd);
        const VectorXd qdd = mech.accel(q, qd, u);
        return VectorXd(qdd.tail(2));
    };
    model.prefeedback = tf;

    // After the pre-feedback the actuated block is an exact double
    // integrator; the unactuated row gives thetadd directly.
    ControlSystem sv;
    sv.n = 6;
    sv.m = 2;
    sv.T_p = 0.0;
    sv.time_varying = false;
    sv.f = [mech](double, const VectorXd& x, const VectorXd& v) {
        Eigen::Vector3d q, qd;
        split_state(x, q, qd);
        const MatrixXd D = mech.mass_matrix(q);
        const VectorXd Omega = mech.bias(q, qd);
        const double d11 = D(0, 0);
        if (d11 <= 0) throw SingularityError("biped3: singular D11");
        const double thetadd = -(Omega(0) + D(0, 1) * v(0) + D(0, 2) * v(1)) / d11;
        VectorXd dx(6);
        dx << qd(0), thetadd, qd(1), qd(2), v(0), v(1);
        return dx;
    };
    model.sys_virtual = sv;

    auto guard = [kin](const VectorXd& x) {
        Eigen::Vector3d q, qd;
        split_state(x, q, qd);
        return kin.swing_foot(kin.abs_angles(q))(1);
    };

    auto reset = [kin](const VectorXd& x) -> VectorXd {
        Eigen::Vector3d q_rel, qd_rel;
        split_state(x, q_rel, qd_rel);
        const Eigen::Vector3d qa = kin.abs_angles(q_rel);
        const Eigen::Vector3d qda = kin.M() * qd_rel;

        const auto pm = kin.point_masses(qa);
        Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
        Eigen::Matrix<double, 3, 2> F = Eigen::Matrix<double, 3, 2>::Zero();
        double m_tot = 0.0;
        for (const auto& p : pm) {
            A += p.mass * p.jac.transpose() * p.jac;
            F += p.mass * p.jac.transpose();
            m_tot += p.mass;
        }
        Eigen::Matrix<double, 5, 5> De = Eigen::Matrix<double, 5, 5>::Zero();
        De.topLeftCorner<3, 3>() = A;
        De.topRightCorner<3, 2>() = F;
        De.bottomLeftCorner<2, 3>() = F.transpose();
        De.bottomRightCorner<2, 2>() = m_tot * Eigen::Matrix2d::Identity();

        Eigen::Matrix<double, 2, 5> Js;
        Js.leftCols<3>() = kin.swing_foot_jac(qa);
        Js.rightCols<2>() = Eigen::Matrix2d::Identity();

        Eigen::Matrix<double, 7, 7> K = Eigen::Matrix<double, 7, 7>::Zero();
        K.topLeftCorner<5, 5>() = De;
        K.topRightCorner<5, 2>() = -Js.transpose();
        K.bottomLeftCorner<2, 5>() = Js;
        Eigen::Matrix<double, 5, 1> qe_minus;
        qe_minus << qda, 0.0, 0.0;
        Eigen::Matrix<double, 7, 1> rhs;
        rhs << De * qe_minus, 0.0, 0.0;

        Eigen::FullPivLU<Eigen::Matrix<double, 7, 7>> lu(K);
        if (!lu.isInvertible())
            throw ModelError("biped3 impact map singular at the impact configuration");
        const Eigen::Matrix<double, 7, 1> sol = lu.solve(rhs);
        const Eigen::Vector3d qd_plus_abs(sol(0), sol(1), sol(2));

        // Leg relabeling: old swing becomes the new stance leg.
        const Eigen::Vector3d qa_new(qa(1), qa(0), qa(2));
        const Eigen::Vector3d qda_new(qd_plus_abs(1), qd_plus_abs(0), qd_plus_abs(2));
        const Eigen::Vector3d q_new(qa_new(0), qa_new(2) - qa_new(0), qa_new(1) - qa_new(2));
        const Eigen::Vector3d qd_new(qda_new(0), qda_new(2) - qda_new(0),
                                     qda_new(1) - qda_new(2));
        return join_state(q_new, qd_new);
    };

    model.hybrid.continuous = sys;
    model.hybrid.guard = guard;
    model.hybrid.reset = reset;
    model.hybrid.decomposition = model.decomp;

    model.hybrid_virtual.continuous = sv;
    model.hybrid_virtual.guard = guard;
    model.hybrid_virtual.reset = reset;
    model.hybrid_virtual.decomposition = model.decomp;

    return model;
}

double Biped3::energy(const VectorXd& x) const {
    Eigen::Vector3d q, qd;
    split_state(x, q, qd);
    return mech.kinetic_energy(q, qd) + mech.potential_energy(q);
}

double Biped3::swing_foot_height(const VectorXd& x) const { return hybrid.guard(x); }

double Biped3::step_displacement(const VectorXd& x) const {
    const double r = params.leg_length;
    const double q1 = x(0);
    const double q2 = x(0) + x(2) + x(3);
    return r * (std::sin(q1) - std::sin(q2));
}

double Biped3::angular_momentum_about(const VectorXd& x, double px) const {
    BipedKinematics kin{params.torso_mass, params.torso_com, params.leg_mass,
                        params.leg_length, params.leg_com,   params.leg_com,
                        params.hip_mass,   params.gravity};
    Eigen::Vector3d q, qd;
    split_state(x, q, qd);
    const Eigen::Vector3d qa = kin.abs_angles(q);
    const Eigen::Vector3d qda = kin.M() * qd;
    double L = 0.0;
    for (const auto& p : kin.point_masses(qa)) {
        const Eigen::Vector2d v = p.jac * qda;
        L += p.mass * ((p.pos(0) - px) * v(1) - p.pos(1) * v(0));
    }
    return L;
}

double Biped3::guard_rate(const VectorXd& x) const {
    const double r = params.leg_length;
    const double q1 = x(0);
    const double q2 = x(0) + x(2) + x(3);
    const double q1d = x(1);
    const double q2d = x(1) + x(4) + x(5);
    return r * (-std::sin(q1) * q1d + std::sin(q2) * q2d);
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

bool is_registered_model(const std::string& name) {
    return name == "cart_pendulum" || name == "biped3";
}

std::vector<std::string> registered_models() { return {"cart_pendulum", "biped3"}; }

}  // namespace zds
