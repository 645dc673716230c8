#ifndef GRIDSHAPE_STEP_RESPONSE_HPP
#define GRIDSHAPE_STEP_RESPONSE_HPP

#include "gridshape/state_space.hpp"
#include "gridshape/trajectory.hpp"

namespace gridshape {

/// Fixed-step RK4 integration of xdot = A x + B u, y = C x + D u with
/// u = magnitude for t >= 0. Returns signals "y" and the numerically
/// differentiated "y_dot". Throws DivergenceError on non-finite state.
Trajectory step_response(const StateSpace& ss, double input_magnitude, double dt,
                         double horizon);

} // namespace gridshape

#endif
