#include "gridshape/sim.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "gridshape/errors.hpp"

namespace gridshape {

void DisturbanceSpec::validate() const {
    if (!std::isfinite(magnitude_pu)) throw InvariantError("disturbance magnitude must be finite");
    if (area_index != 1 && area_index != 2)
        throw InvariantError("disturbance area index must be 1 or 2");
    if (start_time_s < 0.0) throw InvariantError("disturbance start time must be >= 0");
}

void SolverSettings::validate() const {
    if (!(dt_s > 0.0)) throw InvariantError("solver dt must be positive");
    if (horizon_s < dt_s) throw InvariantError("solver horizon must be at least one step");
}

namespace {

// Generic fixed-step RK4 driver over std::vector state with per-sample
// recording. The rhs sees the time only through the disturbance switch,
// which changes exactly on step boundaries whenever start_time_s is a
// multiple of dt.
template <typename Rhs, typename Record>
void rk4_drive(std::vector<double>& x, double dt, double horizon, Rhs&& rhs,
               Record&& record) {
    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
    const std::size_t n = x.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    double t = 0.0;
    for (std::size_t k = 0; k <= steps; ++k) {
        record(t, x);
        if (k == steps) break;
        rhs(t, x, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
        rhs(t + 0.5 * dt, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
        rhs(t + 0.5 * dt, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
        rhs(t + dt, tmp, k4);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::isfinite(x[i]))
                throw DivergenceError("simulation state became non-finite");
        }
        t = static_cast<double>(k + 1) * dt;
    }
}

void add_energy(Trajectory& traj, const std::vector<double>& p_b, double dt,
                const char* name = "e_b") {
    traj.add(name, integrate_trapezoid(p_b, dt));
}

} // namespace

Trajectory simulate_closed_loop(const StateSpace& plant, const StateSpace& controller,
                                const DisturbanceSpec& dist, double dt_s,
                                double horizon_s) {
    dist.validate();
    SolverSettings{dt_s, horizon_s}.validate();
    const int np = static_cast<int>(plant.order());
    const int nc = static_cast<int>(controller.order());
    const double loop_gain = 1.0 - plant.D * controller.D;
    if (std::abs(loop_gain) < 1e-12)
        throw DegenerateLoopError("plant/controller feedthrough forms a singular loop");

    std::vector<double> omega_series, pb_series;

    auto io = [&](const std::vector<double>& x, double p_l, double& omega, double& p_b) {
        double cp = 0.0;
        for (int i = 0; i < np; ++i) cp += plant.C(i) * x[static_cast<std::size_t>(i)];
        double cc = 0.0;
        for (int i = 0; i < nc; ++i) cc += controller.C(i) * x[static_cast<std::size_t>(np + i)];
        omega = (cp + plant.D * (cc - p_l)) / loop_gain;
        p_b = cc + controller.D * omega;
    };

    auto rhs = [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
        const double p_l = (t >= dist.start_time_s) ? dist.magnitude_pu : 0.0;
        double omega = 0.0, p_b = 0.0;
        io(x, p_l, omega, p_b);
        const double u_plant = p_b - p_l;
        for (int i = 0; i < np; ++i) {
            double acc = plant.B(i) * u_plant;
            for (int j = 0; j < np; ++j) acc += plant.A(i, j) * x[static_cast<std::size_t>(j)];
            dx[static_cast<std::size_t>(i)] = acc;
        }
        for (int i = 0; i < nc; ++i) {
            double acc = controller.B(i) * omega;
            for (int j = 0; j < nc; ++j)
                acc += controller.A(i, j) * x[static_cast<std::size_t>(np + j)];
            dx[static_cast<std::size_t>(np + i)] = acc;
        }
    };

    std::vector<double> x(static_cast<std::size_t>(np + nc), 0.0);
    rk4_drive(x, dt_s, horizon_s, rhs, [&](double t, const std::vector<double>& s) {
        const double p_l = (t >= dist.start_time_s) ? dist.magnitude_pu : 0.0;
        double omega = 0.0, p_b = 0.0;
        io(s, p_l, omega, p_b);
        omega_series.push_back(omega);
        pb_series.push_back(p_b);
    });

    Trajectory traj(dt_s);
    traj.add("omega", omega_series);
    traj.add("omega_dot", differentiate(omega_series, dt_s));
    add_energy(traj, pb_series, dt_s);
    traj.add("p_b", std::move(pb_series));
    return traj;
}

Trajectory simulate_area(const AreaParameters& area, const ControllerSpec& controller,
                         const DisturbanceSpec& dist, double dt_s, double horizon_s) {
    area.validate();
    dist.validate();
    SolverSettings{dt_s, horizon_s}.validate();
    const StateSpace ctrl = realize(controller.tf_filtered);
    const int nc = static_cast<int>(ctrl.order());

    // State: [q (= integral of omega), omega, p_m, controller states].
    std::vector<double> omega_series, pm_series, pb_series;

    auto p_b_of = [&](const std::vector<double>& x) {
        double p = ctrl.D * x[1];
        for (int i = 0; i < nc; ++i) p += ctrl.C(i) * x[static_cast<std::size_t>(3 + i)];
        return p;
    };

    auto rhs = [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
        const double p_l = (t >= dist.start_time_s) ? dist.magnitude_pu : 0.0;
        const double omega = x[1], p_m = x[2];
        const double p_b = p_b_of(x);
        dx[0] = omega;
        dx[1] = (p_m - p_l - area.alpha_l_pu * omega + p_b) / (2.0 * area.h_s);
        dx[2] = (-p_m - area.alpha_g_pu * omega - area.k_i_pu_s * x[0]) / area.tau_t_s;
        for (int i = 0; i < nc; ++i) {
            double acc = ctrl.B(i) * omega;
            for (int j = 0; j < nc; ++j) acc += ctrl.A(i, j) * x[static_cast<std::size_t>(3 + j)];
            dx[static_cast<std::size_t>(3 + i)] = acc;
        }
    };

    std::vector<double> x(static_cast<std::size_t>(3 + nc), 0.0);
    rk4_drive(x, dt_s, horizon_s, rhs, [&](double, const std::vector<double>& s) {
        omega_series.push_back(s[1]);
        pm_series.push_back(s[2]);
        pb_series.push_back(p_b_of(s));
    });

    Trajectory traj(dt_s);
    traj.add("omega", omega_series);
    traj.add("omega_dot", differentiate(omega_series, dt_s));
    traj.add("p_m", std::move(pm_series));
    add_energy(traj, pb_series, dt_s);
    traj.add("p_b", std::move(pb_series));
    return traj;
}

Trajectory simulate_multi_machine(std::span<const MachineParameters> machines,
                                  std::span<const ControllerSpec> controllers,
                                  const DisturbanceSpec& dist, double dt_s,
                                  double horizon_s) {
    if (machines.empty()) throw InvariantError("simulate_multi_machine requires machines");
    if (!controllers.empty() && controllers.size() != machines.size())
        throw InvariantError("per-machine controller count must match the fleet");
    dist.validate();
    SolverSettings{dt_s, horizon_s}.validate();

    double sum_2h = 0.0;
    std::vector<StateSpace> gov, ctrl;
    gov.reserve(machines.size());
    for (const auto& m : machines) {
        m.validate();
        sum_2h += 2.0 * m.h_s;
        // p_m_i = -alpha_g_i T_i(s) omega
        gov.push_back(realize(tf_scale(governor_tf(m.governor), -m.alpha_g_pu)));
    }
    for (const auto& c : controllers) ctrl.push_back(realize(c.tf_filtered));

    // State: [omega, governor states..., controller states...].
    std::vector<int> gov_off(machines.size()), ctrl_off(ctrl.size());
    int off = 1;
    for (std::size_t i = 0; i < gov.size(); ++i) {
        gov_off[i] = off;
        off += static_cast<int>(gov[i].order());
    }
    for (std::size_t i = 0; i < ctrl.size(); ++i) {
        ctrl_off[i] = off;
        off += static_cast<int>(ctrl[i].order());
    }

    auto block_output = [](const StateSpace& ss, const std::vector<double>& x, int o,
                           double input) {
        double y = ss.D * input;
        for (int i = 0; i < ss.order(); ++i) y += ss.C(i) * x[static_cast<std::size_t>(o + i)];
        return y;
    };

    std::vector<double> omega_series, pm_series, pb_series;

    auto totals = [&](const std::vector<double>& x, double& p_m, double& p_b) {
        const double omega = x[0];
        p_m = 0.0;
        p_b = 0.0;
        for (std::size_t i = 0; i < gov.size(); ++i)
            p_m += block_output(gov[i], x, gov_off[i], omega);
        for (std::size_t i = 0; i < ctrl.size(); ++i)
            p_b += block_output(ctrl[i], x, ctrl_off[i], omega);
    };

    auto rhs = [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
        const double p_l = (t >= dist.start_time_s) ? dist.magnitude_pu : 0.0;
        const double omega = x[0];
        double p_m = 0.0, p_b = 0.0;
        totals(x, p_m, p_b);
        dx[0] = (p_m - p_l + p_b) / sum_2h;
        auto block_rhs = [&](const StateSpace& ss, int o) {
            for (int i = 0; i < ss.order(); ++i) {
                double acc = ss.B(i) * omega;
                for (int j = 0; j < ss.order(); ++j)
                    acc += ss.A(i, j) * x[static_cast<std::size_t>(o + j)];
                dx[static_cast<std::size_t>(o + i)] = acc;
            }
        };
        for (std::size_t i = 0; i < gov.size(); ++i) block_rhs(gov[i], gov_off[i]);
        for (std::size_t i = 0; i < ctrl.size(); ++i) block_rhs(ctrl[i], ctrl_off[i]);
    };

    std::vector<double> x(static_cast<std::size_t>(off), 0.0);
    rk4_drive(x, dt_s, horizon_s, rhs, [&](double, const std::vector<double>& s) {
        double p_m = 0.0, p_b = 0.0;
        totals(s, p_m, p_b);
        omega_series.push_back(s[0]);
        pm_series.push_back(p_m);
        pb_series.push_back(p_b);
    });

    Trajectory traj(dt_s);
    traj.add("omega", omega_series);
    traj.add("omega_dot", differentiate(omega_series, dt_s));
    traj.add("p_m", std::move(pm_series));
    add_energy(traj, pb_series, dt_s);
    traj.add("p_b", std::move(pb_series));
    return traj;
}

Trajectory simulate_two_area(const TwoAreaModel& model, const ControllerSpec& controller1,
                             const ControllerSpec& controller2, const DisturbanceSpec& dist,
                             double dt_s, double horizon_s, bool linear_tie) {
    dist.validate();
    SolverSettings{dt_s, horizon_s}.validate();
    TwoAreaDynamics dyn = build_two_area(model);
    dyn.set_linear_tie(linear_tie);
    if (!controller1.tf_filtered.is_zero())
        dyn.attach_storage(1, realize(controller1.tf_filtered));
    if (!controller2.tf_filtered.is_zero())
        dyn.attach_storage(2, realize(controller2.tf_filtered));

    std::vector<double> w1, w2, wcoi, pm1, pm2, pb1, pb2, p12;

    auto rhs = [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
        const bool on = t >= dist.start_time_s;
        const double l1 = (on && dist.area_index == 1) ? dist.magnitude_pu : 0.0;
        const double l2 = (on && dist.area_index == 2) ? dist.magnitude_pu : 0.0;
        dyn.derivatives(x, l1, l2, dx);
    };

    std::vector<double> x = dyn.equilibrium_state();
    rk4_drive(x, dt_s, horizon_s, rhs, [&](double t, const std::vector<double>& s) {
        const TwoAreaDynamics::Outputs out = dyn.outputs(s);
        if (std::abs(out.theta_diff_rad) > 0.5 * std::numbers::pi)
            throw AngleSeparationError("two-area angle difference exceeded pi/2 at t = " +
                                       std::to_string(t) + " s");
        w1.push_back(out.omega1);
        w2.push_back(out.omega2);
        wcoi.push_back(dyn.coi_omega(out.omega1, out.omega2));
        pm1.push_back(out.p_m1);
        pm2.push_back(out.p_m2);
        pb1.push_back(out.p_b1);
        pb2.push_back(out.p_b2);
        p12.push_back(out.tie_dev_pu);
    });

    Trajectory traj(dt_s);
    traj.add("omega1", w1);
    traj.add("omega2", w2);
    traj.add("omega_coi", wcoi);
    traj.add("omega_dot1", differentiate(w1, dt_s));
    traj.add("omega_dot2", differentiate(w2, dt_s));
    traj.add("omega_dot_coi", differentiate(wcoi, dt_s));
    traj.add("p_m1", std::move(pm1));
    traj.add("p_m2", std::move(pm2));
    add_energy(traj, pb1, dt_s, "e_b1");
    add_energy(traj, pb2, dt_s, "e_b2");
    traj.add("p_b1", std::move(pb1));
    traj.add("p_b2", std::move(pb2));
    traj.add("p12", std::move(p12));
    return traj;
}

} // namespace gridshape
