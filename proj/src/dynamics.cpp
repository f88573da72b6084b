#include "zds/dynamics.hpp"

#include <sstream>

namespace zds {

VectorXd eval_field(const ControlSystem& sys, double t, const VectorXd& x, const VectorXd& u) {
    if (x.size() != sys.n || u.size() != sys.m) {
        std::ostringstream os;
        os << "eval_field: expected dims (" << sys.n << ", " << sys.m << "), got (" << x.size()
           << ", " << u.size() << ")";
        throw ContractViolation(os.str());
    }
    return sys.f(t, x, u);
}

VectorXd MechanicalModel::accel(const VectorXd& q, const VectorXd& qd, const VectorXd& u) const {
    if (q.size() != n_q || qd.size() != n_q || u.size() != input_matrix.cols())
        throw ContractViolation("MechanicalModel::accel: dimension mismatch");
    const MatrixXd D = mass_matrix(q);
    Eigen::LLT<MatrixXd> llt(D);
    if (llt.info() != Eigen::Success)
        throw ModelError("mass matrix not positive definite at the evaluated configuration");
    return llt.solve(input_matrix * u - bias(q, qd));
}

namespace {

struct Partition {
    MatrixXd D11, D12, D21, D22;
    VectorXd Omega1, Omega2;
};

Partition partition_terms(const MechanicalModel& mech, const VectorXd& q, const VectorXd& qd) {
    const int n1 = mech.n_q1;
    const int n2 = mech.n_q2();
    const MatrixXd D = mech.mass_matrix(q);
    const VectorXd Omega = mech.bias(q, qd);
    Partition p;
    p.D11 = D.topLeftCorner(n1, n1);
    p.D12 = D.topRightCorner(n1, n2);
    p.D21 = D.bottomLeftCorner(n2, n1);
    p.D22 = D.bottomRightCorner(n2, n2);
    p.Omega1 = Omega.head(n1);
    p.Omega2 = Omega.tail(n2);
    return p;
}

}  // namespace

VectorXd spong_prefeedback(const MechanicalModel& mech, const VectorXd& q, const VectorXd& qd,
                           const VectorXd& v) {
    const int n1 = mech.n_q1;
    const int n2 = mech.n_q2();
    if (v.size() != n2) throw ContractViolation("spong_prefeedback: v must have size n_q2");
    const Partition p = partition_terms(mech, q, qd);

    Eigen::LLT<MatrixXd> llt11(p.D11);
    if (llt11.info() != Eigen::Success) {
        std::ostringstream os;
        os << "spong_prefeedback: singular D11 at q = [" << q.transpose() << "]";
        throw SingularityError(os.str());
    }
    const MatrixXd Dbar = p.D22 - p.D21 * llt11.solve(p.D12);
    const VectorXd Omegabar2 = p.Omega2 - p.D21 * llt11.solve(p.Omega1);

    const MatrixXd B2 = mech.input_matrix.bottomRows(n2);
    Eigen::FullPivLU<MatrixXd> lu(B2);
    if (!lu.isInvertible()) {
        std::ostringstream os;
        os << "spong_prefeedback: singular B2 at q = [" << q.transpose() << "]";
        throw SingularityError(os.str());
    }
    (void)n1;
    return lu.solve(Dbar * v + Omegabar2);
}

VectorXd conjugate_momentum(const MechanicalModel& mech, const VectorXd& q, const VectorXd& qd) {
    const int n1 = mech.n_q1;
    const Partition p = partition_terms(mech, q, qd);
    return p.D11 * qd.head(n1) + p.D12 * qd.tail(mech.n_q2());
}

VectorXd velocity_from_momentum(const MechanicalModel& mech, const VectorXd& q,
                                const VectorXd& sigma1, const VectorXd& qd2) {
    const int n1 = mech.n_q1;
    VectorXd qd = VectorXd::Zero(mech.n_q);
    qd.tail(mech.n_q2()) = qd2;
    const Partition p = partition_terms(mech, q, qd);
    Eigen::LLT<MatrixXd> llt11(p.D11);
    if (llt11.info() != Eigen::Success)
        throw SingularityError("velocity_from_momentum: singular D11");
    (void)n1;
    return llt11.solve(sigma1 - p.D12 * qd2);
}

}  // namespace zds
