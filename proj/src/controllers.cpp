#include "gridshape/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gridshape/errors.hpp"
#include "gridshape/reduction.hpp"

namespace gridshape {

void TuningTargets::validate() const {
    if (!(dp_pu > 0.0)) throw InvariantError("targets: disturbance magnitude must be positive");
    if (!(domega_d_pu < 0.0))
        throw InvariantError("targets: steady-state deviation target must be negative");
    if (!(rocof_d_pu_s > 0.0)) throw InvariantError("targets: RoCoF target must be positive");
}

double ViTuning::beta(const AreaParameters& area) const {
    return std::sqrt(area.alpha_g_pu) + std::sqrt(alpha_tot(area));
}

RationalTransfer augment_lowpass(const RationalTransfer& tf, double f_c_hz) {
    if (!(f_c_hz > 0.0)) throw InvariantError("low-pass cut-off must be positive");
    const int deficit = -tf.relative_degree();
    if (deficit <= 0 || tf.is_zero()) return tf;
    const double wc = 2.0 * std::numbers::pi * f_c_hz;
    RationalTransfer out = tf;
    const RationalTransfer pole({1.0}, {1.0, 1.0 / wc});
    for (int k = 0; k < deficit; ++k) out = tf_mul(out, pole);
    return out;
}

namespace {

ControllerSpec make_spec(ControllerKind kind, RationalTransfer raw, double f_c_hz) {
    ControllerSpec spec;
    spec.kind = kind;
    spec.tf_filtered = augment_lowpass(raw, f_c_hz);
    spec.tf = std::move(raw);
    return spec;
}

} // namespace

ControllerSpec vi_controller(double m_v_pu_s, double alpha_b_pu, double f_c_hz) {
    if (m_v_pu_s < 0.0 || alpha_b_pu < 0.0)
        throw InvariantError("virtual inertia constants must be non-negative");
    ControllerSpec spec = make_spec(ControllerKind::VirtualInertia,
                                    RationalTransfer({-alpha_b_pu, -m_v_pu_s}, {1.0}), f_c_hz);
    spec.m_v_pu_s = m_v_pu_s;
    spec.alpha_b_pu = alpha_b_pu;
    return spec;
}

double vi_min_inertia(const AreaParameters& area, double alpha_b_pu, bool approximate) {
    area.validate();
    if (alpha_b_pu < 0.0) throw InvariantError("alpha_b must be non-negative");
    double m;
    if (approximate) {
        m = 2.0 * area.tau_t_s * (2.0 * area.alpha_g_pu + alpha_b_pu) - 2.0 * area.h_s;
    } else {
        const double beta =
            std::sqrt(area.alpha_g_pu) + std::sqrt(area.alpha_g_pu + alpha_b_pu);
        m = area.tau_t_s * beta * beta - 2.0 * area.h_s;
    }
    return std::max(m, 0.0);
}

ViTuning vi_tune(const TuningTargets& targets, const AreaParameters& area) {
    targets.validate();
    area.validate();
    ViTuning t;
    t.alpha_b_pu =
        std::max(std::abs(targets.dp_pu / targets.domega_d_pu) - area.alpha_g_pu, 0.0);
    t.m_v_pu_s = vi_min_inertia(area, t.alpha_b_pu, false);
    t.predicted_rocof_pu_s = targets.dp_pu / t.m_tilde(area);
    return t;
}

ControllerSpec fs_controller(const FsTuning& tuning, const AreaParameters& area,
                             double f_c_hz) {
    area.validate();
    if (tuning.a_pu_s < 2.0 * area.h_s - 1e-12 || tuning.b_pu < area.alpha_g_pu - 1e-12)
        throw InvariantError("shaping constants must not relax below the natural plant");
    const double a1 = area.tau_t_s * (tuning.a_pu_s - 2.0 * area.h_s);
    const double a2 = tuning.b_pu * area.tau_t_s + tuning.a_pu_s - 2.0 * area.h_s;
    const double a3 = tuning.b_pu - area.alpha_g_pu;
    ControllerSpec spec =
        make_spec(ControllerKind::FrequencyShaping,
                  RationalTransfer({-a3, -a2, -a1}, {1.0, area.tau_t_s}), f_c_hz);
    spec.a_pu_s = tuning.a_pu_s;
    spec.b_pu = tuning.b_pu;
    spec.case_id = tuning.case_id;
    spec.alpha_b_pu = std::max(a3, 0.0);  // effective droop contribution
    return spec;
}

FsTuning fs_tune(const TuningTargets& targets, const AreaParameters& area) {
    targets.validate();
    area.validate();
    FsTuning t;
    const double a_needed = targets.dp_pu / targets.rocof_d_pu_s;
    const double b_needed = targets.dp_pu / std::abs(targets.domega_d_pu);
    t.a_pu_s = std::max(2.0 * area.h_s, a_needed);
    t.b_pu = std::max(area.alpha_g_pu, b_needed);
    const bool need_inertia = a_needed > 2.0 * area.h_s;
    const bool need_droop = b_needed > area.alpha_g_pu;
    t.case_id = 1 + (need_droop ? 1 : 0) + (need_inertia ? 2 : 0);
    t.predicted_domega_pu = -targets.dp_pu / t.b_pu;
    t.predicted_rocof_pu_s = targets.dp_pu / t.a_pu_s;
    return t;
}

ControllerSpec idroop_controller(const AreaParameters& area, double alpha_b_pu,
                                 double f_c_hz) {
    area.validate();
    if (alpha_b_pu < 0.0) throw InvariantError("alpha_b must be non-negative");
    RationalTransfer law =
        tf_add(RationalTransfer({area.alpha_g_pu}, {1.0, area.tau_t_s}),
               RationalTransfer::constant(-(area.alpha_g_pu + alpha_b_pu)));
    ControllerSpec spec = make_spec(ControllerKind::IDroop, std::move(law), f_c_hz);
    spec.alpha_b_pu = alpha_b_pu;
    return spec;
}

std::vector<MachineShare> mm_allocate(const TuningTargets& targets,
                                      std::span<const MachineParameters> machines,
                                      AllocationPolicy policy,
                                      const DeficitThresholds& thresholds) {
    targets.validate();
    if (machines.empty()) throw InvariantError("mm_allocate requires at least one machine");

    double sum_2h = 0.0, sum_ag = 0.0, sum_rating = 0.0;
    for (const auto& m : machines) {
        m.validate();
        sum_2h += 2.0 * m.h_s;
        sum_ag += m.alpha_g_pu;
        sum_rating += m.rating_pu;
    }
    const double total_m = std::max(targets.dp_pu / targets.rocof_d_pu_s - sum_2h, 0.0);
    const double total_ab =
        std::max(targets.dp_pu / std::abs(targets.domega_d_pu) - sum_ag, 0.0);

    const std::size_t n = machines.size();
    std::vector<MachineShare> shares(n);

    auto split = [&](double total, auto weight_of, const char* what) {
        std::vector<double> w(n);
        double wsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = weight_of(machines[i]);
            wsum += w[i];
        }
        if (total <= 0.0) return std::vector<double>(n, 0.0);
        if (wsum <= 0.0)
            throw InfeasiblePolicyError(std::string("allocation cannot absorb the required ") +
                                        what);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = total * w[i] / wsum;
        return out;
    };

    std::vector<double> m_shares, ab_shares;
    switch (policy) {
    case AllocationPolicy::ProportionalToRating: {
        auto by_rating = [](const MachineParameters& m) { return m.rating_pu; };
        m_shares = split(total_m, by_rating, "inertia");
        ab_shares = split(total_ab, by_rating, "droop");
        break;
    }
    case AllocationPolicy::Uniform: {
        auto ones = [](const MachineParameters&) { return 1.0; };
        m_shares = split(total_m, ones, "inertia");
        ab_shares = split(total_ab, ones, "droop");
        break;
    }
    case AllocationPolicy::DeficitOnly: {
        auto h_deficit = [&](const MachineParameters& m) {
            return std::max(thresholds.min_2h_pu_s - 2.0 * m.h_s, 0.0);
        };
        auto a_deficit = [&](const MachineParameters& m) {
            return std::max(thresholds.min_alpha_g_pu - m.alpha_g_pu, 0.0);
        };
        double h_capacity = 0.0, a_capacity = 0.0;
        for (const auto& m : machines) {
            h_capacity += h_deficit(m);
            a_capacity += a_deficit(m);
        }
        // Shares are capped at each machine's own deficit, so the fleet-wide
        // deficit must cover the totals.
        if (total_m > h_capacity + 1e-12 || total_ab > a_capacity + 1e-12)
            throw InfeasiblePolicyError(
                "deficit-only thresholds cannot absorb the required totals");
        m_shares = split(total_m, h_deficit, "inertia");
        ab_shares = split(total_ab, a_deficit, "droop");
        break;
    }
    }
    for (std::size_t i = 0; i < n; ++i) shares[i] = {m_shares[i], ab_shares[i]};
    return shares;
}

ControllerSpec mm_controller(const MachineParameters& machine, double m_pu_s,
                             double alpha_b_pu, int reduction_order, double f_c_hz) {
    machine.validate();
    if (m_pu_s < 0.0 || alpha_b_pu < 0.0)
        throw InvariantError("per-machine storage constants must be non-negative");
    if (reduction_order < 0) throw InvariantError("reduction order must be >= 0");

    RationalTransfer gov = governor_tf(machine.governor);
    if (reduction_order > 0) {
        const StateSpace full = realize(gov);
        if (reduction_order < full.order()) {
            // Residualized reduction keeps the governor's unit DC gain, which
            // the steady-state cancellation below relies on; the rescale is a
            // numerical no-op guard.
            ReductionResult red = balanced_residualization(full, reduction_order);
            gov = tf_from_ss(with_dc_gain(red.reduced, 1.0));
        }
    }
    // c_i = -(m s - alpha_g T + alpha_g + alpha_b); zero terms are skipped so
    // idle machines produce the bare law without inert factors.
    RationalTransfer law = RationalTransfer::constant(-(machine.alpha_g_pu + alpha_b_pu));
    if (machine.alpha_g_pu > 0.0) law = tf_add(law, tf_scale(gov, machine.alpha_g_pu));
    if (m_pu_s > 0.0) law = tf_add(law, RationalTransfer({0.0, -m_pu_s}, {1.0}));
    ControllerSpec spec = make_spec(ControllerKind::PerMachineShaping, std::move(law), f_c_hz);
    spec.m_v_pu_s = m_pu_s;
    spec.alpha_b_pu = alpha_b_pu;
    return spec;
}

} // namespace gridshape
