#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "zds/models.hpp"
#include "zds/sim.hpp"

using namespace zds;

TEST_CASE("zero field gives a constant trajectory") {
    ControlSystem sys;
    sys.n = 2;
    sys.m = 1;
    sys.T_p = 1.0;
    sys.f = [](double, const VectorXd& x, const VectorXd&) { return VectorXd::Zero(2); };
    const VectorXd x0 = (VectorXd(2) << 1.5, -2.0).finished();
    const Trajectory tr = integrate(
        sys, [](double, const VectorXd&) { return VectorXd::Zero(1); }, x0, 0.0, 1.0);
    CHECK((tr.states.col(tr.samples() - 1) - x0).norm() == 0.0);
}

TEST_CASE("cart-pendulum open loop from the equilibrium stays at zero") {
    const auto model = cart_pendulum();
    const Trajectory tr = integrate(
        model.sys, [](double, const VectorXd&) { return VectorXd::Zero(1); }, VectorXd::Zero(4),
        0.0, 2.0);
    CHECK(tr.states.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("RK4 self-convergence: halving dt shrinks the endpoint error ~16x") {
    const auto model = cart_pendulum();
    const VectorXd x0 = (VectorXd(4) << 0.1, -0.2, 0.25, 0.4).finished();
    auto u = [](double t, const VectorXd&) {
        return (VectorXd(1) << std::sin(2.0 * t)).finished();
    };
    auto endpoint = [&](double dt) {
        SimOptions o;
        o.dt = dt;
        return integrate(model.sys, u, x0, 0.0, 1.0, o).states.col(
            static_cast<int>(std::round(1.0 / dt)));
    };
    const VectorXd fine = endpoint(1e-4);  // reference
    const double e1 = (endpoint(4e-3) - fine).norm();
    const double e2 = (endpoint(2e-3) - fine).norm();
    const double ratio = e1 / e2;
    CHECK(ratio > 16.0 * 0.7);
    CHECK(ratio < 16.0 * 1.3);
}

TEST_CASE("determinism: identical runs give bit-identical trajectories") {
    const auto model = cart_pendulum();
    const VectorXd x0 = (VectorXd(4) << -0.3, 0.1, 0.2, -0.5).finished();
    auto u = [](double t, const VectorXd& x) {
        return (VectorXd(1) << -x(0) + 0.3 * std::cos(t)).finished();
    };
    const Trajectory a = integrate(model.sys, u, x0, 0.0, 3.0);
    const Trajectory b = integrate(model.sys, u, x0, 0.0, 3.0);
    CHECK((a.states.array() == b.states.array()).all());
    CHECK((a.inputs.array() == b.inputs.array()).all());
}

TEST_CASE("disturbance acts only inside its window") {
    const auto model = cart_pendulum();
    const VectorXd x0 = (VectorXd(4) << 0.0, 0.0, 0.05, 0.0).finished();
    auto u = [](double, const VectorXd&) { return VectorXd::Zero(1); };
    SimOptions clean, dist;
    dist.disturbance.windows.push_back({0.5, 0.7, 1.0, "cart_force"});
    const Trajectory a = integrate(model.sys, u, x0, 0.0, 1.0, clean);
    const Trajectory b = integrate(model.sys, u, x0, 0.0, 1.0, dist);
    for (int k = 0; k < a.samples(); ++k) {
        const double t = a.times(k);
        const double diff = (a.states.col(k) - b.states.col(k)).norm();
        if (t < 0.5 - 1e-12)
            CHECK(diff == 0.0);
        else if (t > 0.55)
            CHECK(diff > 0.0);
    }
    CHECK((a.inputs.array() == b.inputs.array()).all());
    DisturbanceSignal badsig;
    badsig.windows.push_back({1.0, 0.5, 1.0, "cart_force"});
    CHECK_THROWS_AS(badsig.validate(), ContractViolation);
}

TEST_CASE("divergence raises with a time stamp") {
    ControlSystem sys;
    sys.n = 1;
    sys.m = 1;
    sys.T_p = 1.0;
    sys.f = [](double, const VectorXd& x, const VectorXd&) {
        return (VectorXd(1) << x(0) * x(0)).finished();
    };
    CHECK_THROWS_AS(integrate(
                        sys, [](double, const VectorXd&) { return VectorXd::Zero(1); },
                        (VectorXd(1) << 5.0).finished(), 0.0, 2.0),
                    DivergenceError);
}

TEST_CASE("trajectory CSV round trip") {
    const auto model = cart_pendulum();
    const VectorXd x0 = (VectorXd(4) << 0.2, 0.0, -0.1, 0.3).finished();
    auto u = [](double t, const VectorXd&) { return (VectorXd(1) << 0.1 * t).finished(); };
    SimOptions o;
    o.dt = 0.01;
    const Trajectory a = integrate(model.sys, u, x0, 0.0, 0.5, o);
    const std::string path = "/tmp/zds_test_traj.csv";
    write_trajectory_csv(path, a);
    const Trajectory b = read_trajectory_csv(path);
    CHECK(b.samples() == a.samples());
    CHECK((a.states - b.states).lpNorm<Eigen::Infinity>() < 1e-15);
    CHECK((a.inputs - b.inputs).lpNorm<Eigen::Infinity>() < 1e-15);
    std::remove(path.c_str());
}

namespace {
// Constant descent with a jump back up: guard crossings at exactly
// tau = 0.5 every cycle, phase ii never re-crosses.
HybridModel descent_test_model() {
    HybridModel hm;
    hm.continuous.n = 2;
    hm.continuous.m = 1;
    hm.continuous.T_p = 1.0;
    hm.continuous.f = [](double, const VectorXd&, const VectorXd&) {
        return (VectorXd(2) << -2.0, 0.0).finished();
    };
    hm.guard = [](const VectorXd& x) { return x(0); };
    hm.reset = [](const VectorXd& x) { return (VectorXd(2) << 2.0, x(1)).finished(); };
    hm.decomposition = StateDecomposition::contiguous(1, 1);
    return hm;
}
}  // namespace

TEST_CASE("hybrid simulation: event located to 1e-10 and zero-step identity") {
    const HybridModel hm = descent_test_model();
    auto ctrl = [](double, Phase, const VectorXd&) { return VectorXd::Zero(1); };
    const VectorXd x0 = (VectorXd(2) << 1.0, 0.0).finished();

    const HybridExecution none = simulate_hybrid(hm, 1.0, ctrl, x0, 0);
    CHECK(none.empty());
    CHECK((none.final_state - x0).norm() == 0.0);

    const HybridExecution ex = simulate_hybrid(hm, 1.0, ctrl, x0, 2);
    CHECK(ex.impact_times.size() == 2);
    CHECK(ex.segments.size() == 4);
    // analytic events at 0.5 and 1.5
    CHECK(ex.impact_times[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(ex.impact_times[1] == doctest::Approx(1.5).epsilon(1e-10));
    for (const auto& seg : ex.segments) {
        if (seg.phase == Phase::I) {
            const VectorXd x_end = seg.traj.states.col(seg.traj.samples() - 1);
            CHECK(std::abs(hm.guard(x_end)) <= 1e-10);
        }
    }
    // tau resets exactly at multiples of T_p
    CHECK(ex.tau_reset_times[0] == doctest::Approx(1.0));
    CHECK(ex.tau_reset_times[1] == doctest::Approx(2.0));

    // independent secant-method event locator on the dense grid
    const Trajectory& seg0 = ex.segments[0].traj;
    double ta = 0, tb = 0;
    for (int k = 1; k < seg0.samples(); ++k) {
        if (hm.guard(seg0.states.col(k)) <= 0 || k == seg0.samples() - 1) {
            ta = seg0.times(k - 1);
            tb = seg0.times(k);
            break;
        }
    }
    for (int it = 0; it < 100; ++it) {
        const double pa = hm.guard(seg0.state_at(ta));
        const double pb = hm.guard(seg0.state_at(tb));
        if (std::abs(pb - pa) < 1e-16) break;
        const double tc = tb - pb * (tb - ta) / (pb - pa);
        ta = tb;
        tb = tc;
    }
    CHECK(std::abs(tb - ex.impact_times[0]) < 1e-8);
}

TEST_CASE("hybrid simulation stalls when the guard never crosses") {
    HybridModel hm = descent_test_model();
    hm.continuous.f = [](double, const VectorXd& x, const VectorXd&) {
        return (VectorXd(2) << 0.0, 0.0).finished();  // hovers forever
    };
    auto ctrl = [](double, Phase, const VectorXd&) { return VectorXd::Zero(1); };
    CHECK_THROWS_AS(simulate_hybrid(hm, 1.0, ctrl, (VectorXd(2) << 1.0, 0.0).finished(), 1),
                    StallError);
}
