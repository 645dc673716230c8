#ifndef GRIDSHAPE_TRAJECTORY_HPP
#define GRIDSHAPE_TRAJECTORY_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gridshape {

/// Named, uniformly sampled signals sharing one dt. Signal order is the
/// insertion order, which is also the CSV column order.
class Trajectory {
public:
    explicit Trajectory(double dt);

    void add(std::string name, std::vector<double> values);
    bool has(std::string_view name) const;
    const std::vector<double>& operator[](std::string_view name) const;

    double dt() const { return dt_; }
    std::size_t samples() const;
    double time_at(std::size_t i) const { return static_cast<double>(i) * dt_; }

    const std::vector<std::pair<std::string, std::vector<double>>>& signals() const {
        return signals_;
    }

private:
    double dt_;
    std::vector<std::pair<std::string, std::vector<double>>> signals_;
};

/// Central differences, one-sided at the ends.
std::vector<double> differentiate(const std::vector<double>& y, double dt);

/// Running trapezoid integral starting at zero.
std::vector<double> integrate_trapezoid(const std::vector<double>& y, double dt);

} // namespace gridshape

#endif
