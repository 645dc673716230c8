#include "gridshape/trajectory.hpp"

#include "gridshape/errors.hpp"

namespace gridshape {

Trajectory::Trajectory(double dt) : dt_(dt) {
    if (!(dt > 0.0)) throw InvariantError("trajectory dt must be positive");
}

void Trajectory::add(std::string name, std::vector<double> values) {
    if (!signals_.empty() && values.size() != signals_.front().second.size())
        throw InvariantError("trajectory signal '" + name + "' has mismatched length");
    signals_.emplace_back(std::move(name), std::move(values));
}

bool Trajectory::has(std::string_view name) const {
    for (const auto& [n, _] : signals_)
        if (n == name) return true;
    return false;
}

const std::vector<double>& Trajectory::operator[](std::string_view name) const {
    for (const auto& [n, v] : signals_)
        if (n == name) return v;
    throw MissingSignalError("trajectory has no signal named '" + std::string(name) + "'");
}

std::size_t Trajectory::samples() const {
    return signals_.empty() ? 0 : signals_.front().second.size();
}

std::vector<double> differentiate(const std::vector<double>& y, double dt) {
    const std::size_t n = y.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    d[0] = (y[1] - y[0]) / dt;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (2.0 * dt);
    d[n - 1] = (y[n - 1] - y[n - 2]) / dt;
    return d;
}

std::vector<double> integrate_trapezoid(const std::vector<double>& y, double dt) {
    std::vector<double> e(y.size(), 0.0);
    for (std::size_t i = 1; i < y.size(); ++i)
        e[i] = e[i - 1] + 0.5 * dt * (y[i] + y[i - 1]);
    return e;
}

} // namespace gridshape
