#ifndef GRIDSHAPE_PLANT_HPP
#define GRIDSHAPE_PLANT_HPP

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "gridshape/rational.hpp"
#include "gridshape/state_space.hpp"

namespace gridshape {

/// Aggregate single-area plant data. Per-unit on the system power base;
/// frequency conversions happen only at reporting time via f0_hz.
struct AreaParameters {
    double h_s = 0.0;        // inertia constant, seconds
    double tau_t_s = 0.0;    // turbine time constant, seconds
    double alpha_g_pu = 0.0; // aggregate inverse droop
    double alpha_l_pu = 0.0; // load-frequency sensitivity
    double k_i_pu_s = 0.0;   // secondary control gain
    double f0_hz = 50.0;     // nominal frequency

    void validate() const;
};

struct FirstOrderGovernor {
    double tau_t_s = 1.0;
};

struct Ieeeg1Governor {
    double k1 = 0.5;
    double k3 = 0.5;
    double t1_s = 0.25;
    double t3_s = 0.1;
    double t4_s = 0.3;
    double t5_s = 5.0;
};

/// Linearized hydro turbine (1 - Tw s) / (1 + Tw s / 2). The hydro law is a
/// standard model choice, not taken from any specific reference data set.
struct HydroGovernor {
    double tw_s = 1.0;
};

struct GovernorModel {
    std::variant<FirstOrderGovernor, Ieeeg1Governor, HydroGovernor> variant;

    void validate() const;
};

struct MachineParameters {
    double h_s = 0.0;
    double alpha_g_pu = 0.0;
    GovernorModel governor;
    double rating_pu = 1.0;

    void validate() const;
};

/// Combined governor/turbine transfer function. Unit DC gain for every
/// variant. Throws InvariantError when the model violates its invariants
/// (e.g. IEEEG1 with K1 + K3 != 1).
RationalTransfer governor_tf(const GovernorModel& model);

/// Open-loop transfer from net power injection to frequency deviation:
/// g(s) = 1 / (2 H s + alpha_L [damping] + (alpha_g + K_I/s [secondary]) / (tau_T s + 1)).
RationalTransfer open_loop_plant(const AreaParameters& area, bool include_load_damping,
                                 bool include_secondary);

/// Multi-machine closed-loop frequency response
/// g(s) = 1 / sum_i (2 H_i s + alpha_g_i T_i(s)).
RationalTransfer aggregate_multi_machine(std::span<const MachineParameters> machines);

/// Two-area system joined by one tie line with flow P12 sin(theta1 - theta2).
struct TwoAreaModel {
    AreaParameters area1;
    AreaParameters area2;
    double tie_max_pu = 0.0;  // P12
    double p0_m1_pu = 0.0;
    double p0_m2_pu = 0.0;
    double p0_l1_pu = 0.0;
    double p0_l2_pu = 0.0;
    bool agc_enabled = false;
    // Bias factors; when AGC is enabled these must equal alpha_g + alpha_L.
    double bias1_pu = 0.0;
    double bias2_pu = 0.0;

    void validate() const;
    /// Fills bias factors from alpha_g + alpha_L.
    void set_default_bias();
};

/// Nonlinear two-area ODE right-hand side with optional per-area storage
/// blocks. State layout:
///   [theta1, omega1, p_m1, theta2, omega2, p_m2, z1, z2, x_c1..., x_c2...]
/// with theta in radians, omega in per-unit, z the AGC integrators.
class TwoAreaDynamics {
public:
    explicit TwoAreaDynamics(TwoAreaModel model);

    /// Attaches a storage controller realization to area 1 or 2 (input
    /// omega, output p_b).
    void attach_storage(int area_index, StateSpace controller);

    /// Replaces sin(theta1 - theta2) with its small-angle linearization,
    /// coupling the areas through gamma = P12.
    void set_linear_tie(bool linear) { linear_tie_ = linear; }

    int state_size() const;

    /// Steady state for the nominal injections (load deviations zero).
    std::vector<double> equilibrium_state() const;

    /// Evaluates derivatives; p_l1/p_l2 are per-area load deviations.
    void derivatives(std::span<const double> x, double p_l1, double p_l2,
                     std::span<double> dx) const;

    struct Outputs {
        double omega1 = 0.0;
        double omega2 = 0.0;
        double p_m1 = 0.0;
        double p_m2 = 0.0;
        double p_b1 = 0.0;
        double p_b2 = 0.0;
        double tie_pu = 0.0;       // absolute tie flow, area 1 -> area 2
        double tie_dev_pu = 0.0;   // deviation from the scheduled flow
        double theta_diff_rad = 0.0;
    };
    Outputs outputs(std::span<const double> x) const;

    const TwoAreaModel& model() const { return model_; }
    double scheduled_tie_pu() const { return tie_schedule_; }
    double coi_omega(double omega1, double omega2) const;

private:
    TwoAreaModel model_;
    std::optional<StateSpace> ctrl1_;
    std::optional<StateSpace> ctrl2_;
    bool linear_tie_ = false;
    double tie_schedule_ = 0.0;   // equilibrium tie flow
    double theta_diff0_ = 0.0;    // equilibrium angle difference
    double omega_eq_ = 0.0;       // equilibrium frequency deviation
};

/// Constructs the two-area right-hand side, solving the nominal power flow
/// for the equilibrium angle difference.
TwoAreaDynamics build_two_area(const TwoAreaModel& model);

} // namespace gridshape

#endif
