#include "gridshape/step_response.hpp"

#include <cmath>

#include "gridshape/errors.hpp"

namespace gridshape {

Trajectory step_response(const StateSpace& ss, double input_magnitude, double dt,
                         double horizon) {
    if (!(dt > 0.0) || horizon < dt)
        throw InvariantError("step_response requires dt > 0 and horizon >= dt");
    const Eigen::Index n = ss.order();
    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<double> y;
    y.reserve(steps + 1);

    const double u = input_magnitude;
    const Eigen::VectorXd bu = (n > 0) ? Eigen::VectorXd(ss.B * u) : Eigen::VectorXd();
    auto rhs = [&](const Eigen::VectorXd& s) -> Eigen::VectorXd { return ss.A * s + bu; };

    for (std::size_t k = 0; k <= steps; ++k) {
        const double out = (n > 0 ? (ss.C * x).value() : 0.0) + ss.D * u;
        if (!std::isfinite(out))
            throw DivergenceError("step_response state became non-finite");
        y.push_back(out);
        if (k == steps || n == 0) continue;
        const Eigen::VectorXd k1 = rhs(x);
        const Eigen::VectorXd k2 = rhs(x + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = rhs(x + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = rhs(x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Trajectory traj(dt);
    std::vector<double> y_dot = differentiate(y, dt);
    traj.add("y", std::move(y));
    traj.add("y_dot", std::move(y_dot));
    return traj;
}

} // namespace gridshape
