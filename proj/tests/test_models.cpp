#include <doctest.h>

#include <cmath>
#include <random>

#include "zds/models.hpp"
#include "zds/sim.hpp"

using namespace zds;

namespace {
VectorXd biped_state(double th, double thd, double al, double be, double ald, double bed) {
    return (VectorXd(6) << th, thd, al, be, ald, bed).finished();
}
}  // namespace

TEST_CASE("cart-pendulum zero-input energy drift below 1e-6 over 10 s") {
    const auto model = cart_pendulum();
    const VectorXd x0 = (VectorXd(4) << 0.0, 0.3, 0.4, 0.0).finished();
    const double E0 = model.energy(x0);
    SimOptions opts;
    opts.dt = 1e-3;
    const Trajectory tr = integrate(
        model.sys, [](double, const VectorXd&) { return VectorXd::Zero(1); }, x0, 0.0, 10.0,
        opts);
    double max_drift = 0.0;
    for (int k = 0; k < tr.samples(); k += 50)
        max_drift = std::max(max_drift, std::abs(model.energy(tr.states.col(k)) - E0));
    CHECK(max_drift < 1e-6);
}

TEST_CASE("biped continuous phase conserves energy with zero torque") {
    const auto model = biped3();
    const VectorXd x0 = biped_state(0.1, 0.4, -0.05, 0.3, 0.1, -0.6);
    const double E0 = model.energy(x0);
    // the free walker tumbles; 2e-4 resolves the fast whirling phase
    SimOptions opts;
    opts.dt = 2e-4;
    const Trajectory tr = integrate(
        model.sys, [](double, const VectorXd&) { return VectorXd::Zero(2); }, x0, 0.0, 10.0, opts);
    double max_drift = 0.0;
    for (int k = 0; k < tr.samples(); k += 10)
        max_drift = std::max(max_drift, std::abs(model.energy(tr.states.col(k)) - E0));
    CHECK(max_drift < 1e-6);
}

TEST_CASE("impact map: zero velocity in, zero velocity out, angles relabeled") {
    const auto model = biped3();
    // legs apart, swing foot on the ground: theta = 0.2, swing abs = -0.2
    const double th = 0.2;
    const double al = -0.32;
    const double be = -0.2 - (th + al);
    const VectorXd x = biped_state(th, 0, al, be, 0, 0);
    CHECK(std::abs(model.swing_foot_height(x)) < 1e-12);

    const VectorXd xp = model.hybrid.reset(x);
    CHECK(std::abs(xp(1)) < 1e-12);
    CHECK(std::abs(xp(4)) < 1e-12);
    CHECK(std::abs(xp(5)) < 1e-12);
    // new stance leg is the old swing leg; absolute angles preserved
    CHECK(xp(0) == doctest::Approx(-0.2).epsilon(1e-12));
    const double new_swing_abs = xp(0) + xp(2) + xp(3);
    CHECK(new_swing_abs == doctest::Approx(th).epsilon(1e-12));
    const double new_torso_abs = xp(0) + xp(2);
    CHECK(new_torso_abs == doctest::Approx(th + al).epsilon(1e-12));
}

TEST_CASE("impact map conserves angular momentum about the impact point") {
    const auto model = biped3();
    std::mt19937 rng(40);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double th = 0.05 + 0.25 * std::abs(dist(rng));
        const double sw = -th;  // symmetric impact configuration
        const double torso = 0.2 * dist(rng);
        const double al = torso - th;
        const double be = sw - torso;
        const VectorXd x =
            biped_state(th, dist(rng), al, be, dist(rng), dist(rng));
        REQUIRE(std::abs(model.swing_foot_height(x)) < 1e-12);

        const double px = model.step_displacement(x);
        const double L_pre = model.angular_momentum_about(x, px);
        const VectorXd xp = model.hybrid.reset(x);
        const double L_post = model.angular_momentum_about(xp, 0.0);
        CHECK(std::abs(L_pre - L_post) < 1e-10 * std::max(1.0, std::abs(L_pre)));
    }
}

TEST_CASE("impact map never increases kinetic energy") {
    const auto model = biped3();
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double th = 0.05 + 0.3 * std::abs(dist(rng));
        const double torso = 0.2 * dist(rng);
        const VectorXd x = biped_state(th, 2 * dist(rng), torso - th, -th - torso,
                                       2 * dist(rng), 2 * dist(rng));
        const VectorXd xp = model.hybrid.reset(x);
        auto ke = [&](const VectorXd& s) {
            Eigen::Vector3d q(s(0), s(2), s(3)), qd(s(1), s(4), s(5));
            return model.mech.kinetic_energy(q, qd);
        };
        CHECK(ke(xp) <= ke(x) + 1e-10);
        // configuration continuous: absolute angle multiset preserved
        CHECK(xp(0) == doctest::Approx(-th).epsilon(1e-12));
    }
}

TEST_CASE("mass matrix positive definite on the operating range") {
    const auto model = biped3();
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-0.6, 0.6);
    for (int i = 0; i < 50; ++i) {
        const VectorXd q = (VectorXd(3) << dist(rng), dist(rng), dist(rng)).finished();
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(model.mech.mass_matrix(q));
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("guard rate matches a finite difference of the swing-foot height") {
    const auto model = biped3();
    const VectorXd x = biped_state(0.15, 0.5, -0.1, -0.25, 0.3, -0.8);
    const VectorXd u = (VectorXd(2) << 0.3, -0.2).finished();
    SimOptions opts;
    opts.dt = 1e-6;
    const Trajectory tr = integrate(
        model.sys, [&](double, const VectorXd&) { return u; }, x, 0.0, 2e-6, opts);
    const double fd = (model.swing_foot_height(tr.states.col(2)) -
                       model.swing_foot_height(tr.states.col(0))) /
                      (2e-6);
    CHECK(model.guard_rate(tr.states.col(1)) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("model registry") {
    CHECK(is_registered_model("cart_pendulum"));
    CHECK(is_registered_model("biped3"));
    CHECK_FALSE(is_registered_model("acrobot"));
    CHECK(registered_models().size() == 2);
}

TEST_CASE("parameter validation") {
    CartPendulumParams bad;
    bad.gravity = -1;
    CHECK_THROWS_AS(cart_pendulum(bad), ModelError);
    Biped3Params bb;
    bb.leg_com = 2.0;
    CHECK_THROWS_AS(biped3(bb), ModelError);
}
