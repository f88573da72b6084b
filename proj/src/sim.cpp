#include "zds/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "zds/errors.hpp"

namespace zds {

void Trajectory::validate() const {
    if (times.size() < 1) throw ContractViolation("Trajectory: empty time grid");
    if (states.cols() != times.size() || inputs.cols() != times.size())
        throw ContractViolation("Trajectory: states/inputs must match the time grid");
    for (int k = 1; k < times.size(); ++k)
        if (!(times(k) > times(k - 1)))
            throw ContractViolation("Trajectory: times must be strictly increasing");
}

namespace {
int bracket(const VectorXd& times, double t) {
    // largest k with times(k) <= t, clamped to [0, K-2]
    int lo = 0, hi = static_cast<int>(times.size()) - 1;
    if (t <= times(0)) return 0;
    if (t >= times(hi)) return hi - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (times(mid) <= t ? lo : hi) = mid;
    }
    return lo;
}

VectorXd interp(const VectorXd& times, const MatrixXd& values, double t) {
    if (times.size() == 1) return values.col(0);
    const int k = bracket(times, t);
    const double h = times(k + 1) - times(k);
    const double a = std::min(1.0, std::max(0.0, (t - times(k)) / h));
    return values.col(k) * (1.0 - a) + values.col(k + 1) * a;
}
}  // namespace

VectorXd Trajectory::state_at(double t) const { return interp(times, states, t); }
VectorXd Trajectory::input_at(double t) const { return interp(times, inputs, t); }

int Trajectory::index_of_time(double t, double tol) const {
    const int k = bracket(times, t);
    if (std::abs(times(k) - t) <= tol) return k;
    if (k + 1 < times.size() && std::abs(times(k + 1) - t) <= tol) return k + 1;
    std::ostringstream os;
    os << "Trajectory: no grid time equal to " << t;
    throw ContractViolation(os.str());
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    out << "t";
    for (int i = 0; i < traj.states.rows(); ++i) out << ",x" << i;
    for (int i = 0; i < traj.inputs.rows(); ++i) out << ",u" << i;
    out << "\n";
    for (int k = 0; k < traj.samples(); ++k) {
        out << traj.times(k);
        for (int i = 0; i < traj.states.rows(); ++i) out << "," << traj.states(i, k);
        for (int i = 0; i < traj.inputs.rows(); ++i) out << "," << traj.inputs(i, k);
        out << "\n";
    }
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string header;
    std::getline(in, header);
    int n = 0, m = 0;
    {
        std::stringstream ss(header);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.size() > 1 && tok[0] == 'x') ++n;
            if (tok.size() > 1 && tok[0] == 'u') ++m;
        }
    }
    std::vector<double> ts;
    std::vector<VectorXd> xs, us;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> row;
        while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
        if (static_cast<int>(row.size()) != 1 + n + m)
            throw std::runtime_error("malformed trajectory row in " + path);
        ts.push_back(row[0]);
        xs.push_back(Eigen::Map<VectorXd>(row.data() + 1, n));
        us.push_back(Eigen::Map<VectorXd>(row.data() + 1 + n, m));
    }
    Trajectory traj;
    traj.times = Eigen::Map<VectorXd>(ts.data(), ts.size());
    traj.states.resize(n, ts.size());
    traj.inputs.resize(m, ts.size());
    for (size_t k = 0; k < ts.size(); ++k) {
        traj.states.col(k) = xs[k];
        traj.inputs.col(k) = us[k];
    }
    traj.validate();
    return traj;
}

void DisturbanceSignal::validate() const {
    for (const auto& w : windows)
        if (!(w.start < w.end)) throw ContractViolation("DisturbanceSignal: start must precede end");
}

namespace {

struct Field {
    const ControlSystem* sys;
    const DisturbanceSignal* dist;

    VectorXd operator()(double t, const VectorXd& x, const VectorXd& u) const {
        VectorXd dx = sys->f(t, x, u);
        if (dist) {
            for (const auto& w : dist->windows) {
                if (t >= w.start && t < w.end) {
                    const auto it = sys->disturbance_channels.find(w.channel);
                    if (it == sys->disturbance_channels.end())
                        throw ContractViolation("unknown disturbance channel: " + w.channel);
                    dx += it->second(x) * w.magnitude;
                }
            }
        }
        return dx;
    }
};

VectorXd rk4_step(const Field& f, const InputFn& controller, double t, const VectorXd& x,
                  double h) {
    const VectorXd k1 = f(t, x, controller(t, x));
    const VectorXd x2 = x + 0.5 * h * k1;
    const VectorXd k2 = f(t + 0.5 * h, x2, controller(t + 0.5 * h, x2));
    const VectorXd x3 = x + 0.5 * h * k2;
    const VectorXd k3 = f(t + 0.5 * h, x3, controller(t + 0.5 * h, x3));
    const VectorXd x4 = x + h * k3;
    const VectorXd k4 = f(t + h, x4, controller(t + h, x4));
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_finite(const VectorXd& x, double t) {
    if (!x.allFinite()) {
        std::ostringstream os;
        os << "integration diverged (non-finite state) at t = " << t;
        throw DivergenceError(os.str(), t);
    }
}

}  // namespace

Trajectory integrate(const ControlSystem& sys, const InputFn& controller, const VectorXd& xi,
                     double t0, double t1, const SimOptions& opts) {
    if (!(t1 > t0)) throw ContractViolation("integrate: t1 must exceed t0");
    if (xi.size() != sys.n) throw ContractViolation("integrate: state dimension mismatch");
    opts.disturbance.validate();

    const double span = t1 - t0;
    const int K = std::max(1, static_cast<int>(std::ceil(span / opts.dt - 1e-12)));

    Trajectory traj;
    traj.times.resize(K + 1);
    traj.states.resize(sys.n, K + 1);
    traj.inputs.resize(sys.m, K + 1);

    Field field{&sys, opts.disturbance.active() ? &opts.disturbance : nullptr};
    VectorXd x = xi;
    double t = t0;
    for (int k = 0; k < K; ++k) {
        traj.times(k) = t;
        traj.states.col(k) = x;
        traj.inputs.col(k) = controller(t, x);
        const double h = std::min(opts.dt, t1 - t);
        x = rk4_step(field, controller, t, x, h);
        t = (k == K - 1) ? t1 : t0 + (k + 1) * opts.dt;
        check_finite(x, t);
    }
    traj.times(K) = t1;
    traj.states.col(K) = x;
    traj.inputs.col(K) = controller(t1, x);
    return traj;
}

Trajectory integrate_open_loop(const ControlSystem& sys,
                               const std::function<VectorXd(double)>& u, const VectorXd& xi,
                               double t0, double t1, const SimOptions& opts) {
    return integrate(
        sys, [&u](double t, const VectorXd&) { return u(t); }, xi, t0, t1, opts);
}

namespace {

// One phase-i integration: runs until the guard crosses zero from above,
// locating the event by bisection over the fraction of the bracketing step.
struct EventResult {
    Trajectory traj;
    double t_event;
    VectorXd x_event;
};

EventResult integrate_to_guard(const ControlSystem& sys,
                               const std::function<double(const VectorXd&)>& guard,
                               const InputFn& controller, const VectorXd& xi, double t0,
                               double max_duration, const SimOptions& opts) {
    Field field{&sys, opts.disturbance.active() ? &opts.disturbance : nullptr};

    std::vector<double> ts;
    std::vector<VectorXd> xs, us;
    VectorXd x = xi;
    double t = t0;
    double p_prev = guard(x);
    ts.push_back(t);
    xs.push_back(x);
    us.push_back(controller(t, x));

    bool found = false;
    double t_event = 0.0;
    VectorXd x_event;
    while (t - t0 < max_duration) {
        const double h = opts.dt;
        const VectorXd x_next = rk4_step(field, controller, t, x, h);
        check_finite(x_next, t + h);
        const double p_next = guard(x_next);
        if (p_prev > 0.0 && p_next <= 0.0) {
            // Reject steps containing several crossings: the step is too
            // large to resolve the event unambiguously.
            int sign_changes = 0;
            double p_a = p_prev;
            for (int i = 1; i <= 16; ++i) {
                const double a = static_cast<double>(i) / 16.0;
                const VectorXd xa = rk4_step(field, controller, t, x, a * h);
                const double p_b = guard(xa);
                if ((p_a > 0.0) != (p_b > 0.0)) ++sign_changes;
                p_a = p_b;
            }
            if (sign_changes > 1)
                throw DetectionError("guard crosses several times within one step; reduce dt");
            double lo = 0.0, hi = 1.0;
            VectorXd x_mid = x_next;
            double t_mid = t + h;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                x_mid = rk4_step(field, controller, t, x, mid * h);
                t_mid = t + mid * h;
                const double p_mid = guard(x_mid);
                if (std::abs(p_mid) <= opts.event_tol) break;
                if (p_mid > 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            if (std::abs(guard(x_mid)) > opts.event_tol * 10.0)
                throw DetectionError("guard bisection failed to reach the event tolerance");
            found = true;
            t_event = t_mid;
            x_event = x_mid;
            ts.push_back(t_event);
            xs.push_back(x_event);
            us.push_back(controller(t_event, x_event));
            break;
        }
        x = x_next;
        t += h;
        p_prev = p_next;
        ts.push_back(t);
        xs.push_back(x);
        us.push_back(controller(t, x));
    }
    if (!found)
        throw StallError("no guard crossing within the maximum phase duration");

    EventResult res;
    res.traj.times = Eigen::Map<VectorXd>(ts.data(), ts.size());
    res.traj.states.resize(sys.n, ts.size());
    res.traj.inputs.resize(sys.m, ts.size());
    for (size_t k = 0; k < ts.size(); ++k) {
        res.traj.states.col(k) = xs[k];
        res.traj.inputs.col(k) = us[k];
    }
    res.t_event = t_event;
    res.x_event = x_event;
    return res;
}

}  // namespace

HybridExecution simulate_hybrid(const HybridModel& model, double T_p,
                                const HybridInputFn& controller, const VectorXd& xi, int n_steps,
                                const SimOptions& opts) {
    if (T_p <= 0) throw ContractViolation("simulate_hybrid: T_p must be positive");
    if (xi.size() != model.continuous.n)
        throw ContractViolation("simulate_hybrid: state dimension mismatch");
    opts.disturbance.validate();

    HybridExecution exec;
    exec.final_state = xi;
    exec.final_time = 0.0;
    if (n_steps == 0) return exec;

    const double max_phase = opts.max_phase_duration > 0 ? opts.max_phase_duration : 3.0 * T_p;

    VectorXd x = xi;
    double t = 0.0;       // global time
    double t_clock = 0.0; // global time of the last tau reset
    for (int step = 0; step < n_steps; ++step) {
        // Phase i: state-based guard.
        InputFn ui = [&](double tt, const VectorXd& xx) {
            return controller(tt - t_clock, Phase::I, xx);
        };
        SimOptions phase_opts = opts;
        EventResult ev =
            integrate_to_guard(model.continuous, model.guard, ui, x, t, max_phase, phase_opts);
        exec.segments.push_back({Phase::I, t - t_clock, ev.traj});
        exec.impact_times.push_back(ev.t_event);
        t = ev.t_event;
        x = model.reset(ev.x_event);

        // Phase ii: time-based guard at tau = T_p.
        const double t_end = t_clock + T_p;
        if (t_end <= t)
            throw StallError("impact occurred at or after tau = T_p; phase ii has no duration");
        InputFn uii = [&](double tt, const VectorXd& xx) {
            return controller(tt - t_clock, Phase::II, xx);
        };
        Trajectory seg = integrate(model.continuous, uii, x, t, t_end, phase_opts);
        exec.segments.push_back({Phase::II, t - t_clock, seg});
        x = seg.states.col(seg.samples() - 1);
        t = t_end;
        exec.tau_reset_times.push_back(t);
        t_clock = t;
    }
    exec.final_state = x;
    exec.final_time = t;
    return exec;
}

}  // namespace zds
