#ifndef GRIDSHAPE_METRICS_HPP
#define GRIDSHAPE_METRICS_HPP

#include <string>

#include "gridshape/plant.hpp"
#include "gridshape/rational.hpp"
#include "gridshape/trajectory.hpp"

namespace gridshape {

/// Frequency-security and storage metrics for one transient.
struct MetricsReport {
    double nadir_mhz = 0.0;          // max |omega| over the transient
    double t_nadir_s = 0.0;
    double rocof_hz_s = 0.0;         // max |omega_dot|
    double steady_state_mhz = 0.0;   // signed tail mean
    double p_b_max_pu = 0.0;
    double p_b_max_per_dp = 0.0;     // disturbance-normalized
    double e_b_max_pu_s = 0.0;
    double e_b_max_pu_h = 0.0;
    bool nadir_free = true;
    double nadir_tol = 0.0;          // relative tolerance used for the flag
};

/// Signal names analyze_trajectory reads; override for per-area channels.
struct SignalNames {
    std::string omega = "omega";
    std::string omega_dot = "omega_dot";
    std::string p_b = "p_b";
    std::string e_b = "e_b";
};

struct AnalyzeOptions {
    double nadir_tol = 0.005;   // overshoot allowed before the flag flips
    double dp_pu = 0.0;         // for disturbance-normalized storage figures
    bool require_settled = true;
    SignalNames signals;
};

/// Derives the security metrics from a simulated trajectory. The steady
/// state is the mean over the last 5% of the horizon; nadir_free compares the
/// peak deviation against that tail. Throws MissingSignalError when omega is
/// absent and HorizonError when the tail slope exceeds 1e-6 pu/s.
MetricsReport analyze_trajectory(const Trajectory& traj, double f0_hz,
                                 const AnalyzeOptions& options = {});

struct PredictedMetrics {
    double steady_state_mhz = 0.0;
    double rocof_hz_s = 0.0;
};

/// Algebraic predictions from the closed-loop transfer function: the
/// final-value and initial-slope limits scaled by the disturbance.
PredictedMetrics predict_metrics(const RationalTransfer& closed_loop_tf, double dp_pu,
                                 double f0_hz);

/// Storage power transient for the minimum overshoot-free virtual inertia
/// with zero droop:
///   dp (1 - H/(2 tau alpha_g)) (1 + t/(2 tau)) exp(-t/(2 tau)).
double vi_power_closed_form(const AreaParameters& area, double dp_pu, double t_s);

/// Order-of-magnitude energy requirement dp * alpha_b / K_I for a storage
/// droop alpha_b working against secondary gain K_I.
double energy_estimate(double alpha_b_pu, double k_i_pu_s, double dp_pu);

} // namespace gridshape

#endif
