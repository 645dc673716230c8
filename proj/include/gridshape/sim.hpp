#ifndef GRIDSHAPE_SIM_HPP
#define GRIDSHAPE_SIM_HPP

#include <span>
#include <vector>

#include "gridshape/controllers.hpp"
#include "gridshape/plant.hpp"
#include "gridshape/state_space.hpp"
#include "gridshape/trajectory.hpp"

namespace gridshape {

/// Step load imbalance applied to one area.
struct DisturbanceSpec {
    double magnitude_pu = 0.0;
    int area_index = 1;
    double start_time_s = 1.0;

    void validate() const;
};

struct SolverSettings {
    double dt_s = 1e-3;
    double horizon_s = 60.0;

    void validate() const;
};

/// Interconnects a plant realization (input p_b - p_L, output omega) with a
/// proper storage controller (input omega, output p_b) and integrates with
/// RK4. Returns omega, omega_dot, p_b and the co-integrated energy e_b.
Trajectory simulate_closed_loop(const StateSpace& plant, const StateSpace& controller,
                                const DisturbanceSpec& dist, double dt_s, double horizon_s);

/// Structural single-area simulation with the swing, turbine and secondary
/// states explicit, so the mechanical power p_m is recorded alongside omega,
/// omega_dot, p_b and e_b. The area's alpha_L and K_I act as given.
Trajectory simulate_area(const AreaParameters& area, const ControllerSpec& controller,
                         const DisturbanceSpec& dist, double dt_s, double horizon_s);

/// Single-area fleet on a common bus: every machine sees the same frequency.
/// Per-machine governors and storage controllers run as their own blocks;
/// omega here is the center-of-inertia frequency. Records omega, omega_dot,
/// total p_m, total p_b and e_b.
Trajectory simulate_multi_machine(std::span<const MachineParameters> machines,
                                  std::span<const ControllerSpec> controllers,
                                  const DisturbanceSpec& dist, double dt_s,
                                  double horizon_s);

/// Nonlinear sine-coupled two-area simulation with per-area storage.
/// Records omega1/2, omega_coi, their derivatives, p_m1/2, p_b1/2, e_b1/2
/// and the tie-flow deviation p12. Throws AngleSeparationError if the angle
/// difference leaves (-pi/2, pi/2).
Trajectory simulate_two_area(const TwoAreaModel& model, const ControllerSpec& controller1,
                             const ControllerSpec& controller2, const DisturbanceSpec& dist,
                             double dt_s, double horizon_s, bool linear_tie = false);

} // namespace gridshape

#endif
