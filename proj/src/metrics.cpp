#include "gridshape/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "gridshape/errors.hpp"

namespace gridshape {

MetricsReport analyze_trajectory(const Trajectory& traj, double f0_hz,
                                 const AnalyzeOptions& options) {
    if (!traj.has(options.signals.omega))
        throw MissingSignalError("analyze_trajectory: trajectory lacks '" +
                                 options.signals.omega + "'");
    const std::vector<double>& omega = traj[options.signals.omega];
    const std::size_t n = omega.size();
    if (n < 4) throw HorizonError("analyze_trajectory: trajectory too short");

    MetricsReport report;
    report.nadir_tol = options.nadir_tol;

    std::size_t peak_idx = 0;
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::abs(omega[i]);
        if (mag > peak) {
            peak = mag;
            peak_idx = i;
        }
    }
    report.nadir_mhz = peak * f0_hz * 1000.0;
    report.t_nadir_s = traj.time_at(peak_idx);

    const std::vector<double> omega_dot = traj.has(options.signals.omega_dot)
                                              ? traj[options.signals.omega_dot]
                                              : differentiate(omega, traj.dt());
    double rocof = 0.0;
    for (double v : omega_dot) rocof = std::max(rocof, std::abs(v));
    report.rocof_hz_s = rocof * f0_hz;

    // Tail mean over the last 5% of the horizon; the slope of that window
    // (estimated from its two halves) guards against unsettled tails.
    const std::size_t tail = std::max<std::size_t>(n / 20, 2);
    const std::size_t half = tail / 2;
    double tail_sum = 0.0;
    for (std::size_t i = n - tail; i < n; ++i) tail_sum += omega[i];
    const double tail_mean = tail_sum / static_cast<double>(tail);
    double first_half = 0.0, second_half = 0.0;
    for (std::size_t i = n - tail; i < n - tail + half; ++i) first_half += omega[i];
    for (std::size_t i = n - half; i < n; ++i) second_half += omega[i];
    const double slope = (second_half - first_half) / static_cast<double>(half) /
                         (static_cast<double>(tail - half) * traj.dt());
    if (options.require_settled && std::abs(slope) > 1e-6)
        throw HorizonError("analyze_trajectory: tail has not settled; extend the horizon");

    report.steady_state_mhz = tail_mean * f0_hz * 1000.0;
    report.nadir_free = (peak - std::abs(tail_mean)) <= options.nadir_tol * std::abs(tail_mean);

    if (traj.has(options.signals.p_b)) {
        const auto& p_b = traj[options.signals.p_b];
        report.p_b_max_pu = *std::max_element(p_b.begin(), p_b.end());
        if (options.dp_pu > 0.0) report.p_b_max_per_dp = report.p_b_max_pu / options.dp_pu;
    }
    if (traj.has(options.signals.e_b)) {
        const auto& e_b = traj[options.signals.e_b];
        report.e_b_max_pu_s = *std::max_element(e_b.begin(), e_b.end());
        report.e_b_max_pu_h = report.e_b_max_pu_s / 3600.0;
    }
    return report;
}

PredictedMetrics predict_metrics(const RationalTransfer& closed_loop_tf, double dp_pu,
                                 double f0_hz) {
    PredictedMetrics out;
    out.steady_state_mhz = -dp_pu * final_step_value(closed_loop_tf) * f0_hz * 1000.0;
    out.rocof_hz_s = dp_pu * std::abs(initial_step_rate(closed_loop_tf)) * f0_hz;
    return out;
}

double vi_power_closed_form(const AreaParameters& area, double dp_pu, double t_s) {
    area.validate();
    const double tt = area.tau_t_s;
    const double gain = 1.0 - area.h_s / (2.0 * tt * area.alpha_g_pu);
    return dp_pu * gain * (1.0 + t_s / (2.0 * tt)) * std::exp(-t_s / (2.0 * tt));
}

double energy_estimate(double alpha_b_pu, double k_i_pu_s, double dp_pu) {
    if (!(k_i_pu_s > 0.0))
        throw InvariantError("energy_estimate is undefined for zero secondary gain");
    return dp_pu * alpha_b_pu / k_i_pu_s;
}

} // namespace gridshape
