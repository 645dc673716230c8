#include "gridshape/plant.hpp"

#include <cmath>
#include <numbers>

#include "gridshape/errors.hpp"

namespace gridshape {

void AreaParameters::validate() const {
    if (!(h_s > 0.0)) throw InvariantError("area: inertia constant H must be positive");
    if (!(tau_t_s > 0.0)) throw InvariantError("area: turbine time constant must be positive");
    if (!(alpha_g_pu > 0.0)) throw InvariantError("area: inverse droop alpha_g must be positive");
    if (alpha_l_pu < 0.0) throw InvariantError("area: load sensitivity alpha_L must be >= 0");
    if (k_i_pu_s < 0.0) throw InvariantError("area: secondary gain K_I must be >= 0");
    if (f0_hz != 50.0 && f0_hz != 60.0)
        throw InvariantError("area: nominal frequency must be 50 or 60 Hz");
}

void GovernorModel::validate() const {
    if (const auto* fo = std::get_if<FirstOrderGovernor>(&variant)) {
        if (!(fo->tau_t_s > 0.0))
            throw InvariantError("governor: turbine time constant must be positive");
    } else if (const auto* g1 = std::get_if<Ieeeg1Governor>(&variant)) {
        if (!(g1->t1_s > 0.0 && g1->t3_s > 0.0 && g1->t4_s > 0.0 && g1->t5_s > 0.0))
            throw InvariantError("governor: IEEEG1 time constants must be positive");
        if (std::abs(g1->k1 + g1->k3 - 1.0) > 1e-9)
            throw InvariantError("governor: IEEEG1 requires K1 + K3 = 1 for unit DC gain");
    } else if (const auto* hy = std::get_if<HydroGovernor>(&variant)) {
        if (!(hy->tw_s > 0.0))
            throw InvariantError("governor: hydro water time constant must be positive");
    }
}

void MachineParameters::validate() const {
    if (!(h_s > 0.0)) throw InvariantError("machine: inertia constant must be positive");
    if (alpha_g_pu < 0.0) throw InvariantError("machine: inverse droop must be >= 0");
    if (!(rating_pu > 0.0)) throw InvariantError("machine: rating must be positive");
    governor.validate();
}

RationalTransfer governor_tf(const GovernorModel& model) {
    model.validate();
    if (const auto* fo = std::get_if<FirstOrderGovernor>(&model.variant)) {
        return RationalTransfer({1.0}, {1.0, fo->tau_t_s});
    }
    if (const auto* g1 = std::get_if<Ieeeg1Governor>(&model.variant)) {
        // [K1 (1 + T5 s) + K3] / [(1 + T1 s)(1 + T3 s)(1 + T4 s)(1 + T5 s)]
        Poly num{g1->k1 + g1->k3, g1->k1 * g1->t5_s};
        Poly den = poly_mul(poly_mul({1.0, g1->t1_s}, {1.0, g1->t3_s}),
                            poly_mul({1.0, g1->t4_s}, {1.0, g1->t5_s}));
        return RationalTransfer(std::move(num), std::move(den));
    }
    const auto& hy = std::get<HydroGovernor>(model.variant);
    return RationalTransfer({1.0, -hy.tw_s}, {1.0, 0.5 * hy.tw_s});
}

RationalTransfer open_loop_plant(const AreaParameters& area, bool include_load_damping,
                                 bool include_secondary) {
    area.validate();
    // 1/g = 2Hs + alpha_L + (alpha_g + K_I/s) / (tau s + 1)
    RationalTransfer inv({0.0, 2.0 * area.h_s}, {1.0});
    if (include_load_damping)
        inv = tf_add(inv, RationalTransfer::constant(area.alpha_l_pu));
    RationalTransfer primary({area.alpha_g_pu}, {1.0, area.tau_t_s});
    if (include_secondary && area.k_i_pu_s > 0.0)
        primary = tf_add(primary, RationalTransfer({area.k_i_pu_s}, {0.0, 1.0, area.tau_t_s}));
    inv = tf_add(inv, primary);
    return RationalTransfer(inv.den(), inv.num());
}

RationalTransfer aggregate_multi_machine(std::span<const MachineParameters> machines) {
    if (machines.empty())
        throw InvariantError("aggregate_multi_machine requires at least one machine");
    RationalTransfer inv;
    for (const auto& m : machines) {
        m.validate();
        RationalTransfer term = tf_add(RationalTransfer({0.0, 2.0 * m.h_s}, {1.0}),
                                       tf_scale(governor_tf(m.governor), m.alpha_g_pu));
        inv = tf_add(inv, term);
    }
    return RationalTransfer(inv.den(), inv.num());
}

void TwoAreaModel::validate() const {
    area1.validate();
    area2.validate();
    if (!(tie_max_pu > 0.0)) throw InvariantError("two-area: tie capacity P12 must be positive");
    if (agc_enabled) {
        if (std::abs(bias1_pu - (area1.alpha_g_pu + area1.alpha_l_pu)) > 1e-12 ||
            std::abs(bias2_pu - (area2.alpha_g_pu + area2.alpha_l_pu)) > 1e-12)
            throw InvariantError("two-area: AGC bias must equal alpha_g + alpha_L");
    }
}

void TwoAreaModel::set_default_bias() {
    bias1_pu = area1.alpha_g_pu + area1.alpha_l_pu;
    bias2_pu = area2.alpha_g_pu + area2.alpha_l_pu;
}

TwoAreaDynamics::TwoAreaDynamics(TwoAreaModel model) : model_(std::move(model)) {
    model_.validate();
    // Nominal equilibrium: a common frequency offset absorbs any total
    // imbalance through droop and damping, and the tie carries the remaining
    // per-area surplus.
    const double total = (model_.p0_m1_pu + model_.p0_m2_pu) -
                         (model_.p0_l1_pu + model_.p0_l2_pu);
    const double drop = model_.area1.alpha_g_pu + model_.area1.alpha_l_pu +
                        model_.area2.alpha_g_pu + model_.area2.alpha_l_pu;
    omega_eq_ = total / drop;
    tie_schedule_ = model_.p0_m1_pu - model_.p0_l1_pu -
                    (model_.area1.alpha_g_pu + model_.area1.alpha_l_pu) * omega_eq_;
    const double sine = tie_schedule_ / model_.tie_max_pu;
    if (std::abs(sine) > 1.0)
        throw InvariantError("two-area: nominal injections exceed the tie capacity");
    theta_diff0_ = std::asin(sine);
}

void TwoAreaDynamics::attach_storage(int area_index, StateSpace controller) {
    if (area_index == 1)
        ctrl1_ = std::move(controller);
    else if (area_index == 2)
        ctrl2_ = std::move(controller);
    else
        throw InvariantError("two-area: area index must be 1 or 2");
}

int TwoAreaDynamics::state_size() const {
    const int n1 = ctrl1_ ? static_cast<int>(ctrl1_->order()) : 0;
    const int n2 = ctrl2_ ? static_cast<int>(ctrl2_->order()) : 0;
    return 8 + n1 + n2;
}

std::vector<double> TwoAreaDynamics::equilibrium_state() const {
    std::vector<double> x(static_cast<std::size_t>(state_size()), 0.0);
    x[0] = theta_diff0_;  // theta1; theta2 = 0
    x[1] = omega_eq_;
    x[2] = -model_.area1.alpha_g_pu * omega_eq_;
    x[4] = omega_eq_;
    x[5] = -model_.area2.alpha_g_pu * omega_eq_;
    return x;
}

void TwoAreaDynamics::derivatives(std::span<const double> x, double p_l1, double p_l2,
                                  std::span<double> dx) const {
    const auto& a1 = model_.area1;
    const auto& a2 = model_.area2;
    const int n1 = ctrl1_ ? static_cast<int>(ctrl1_->order()) : 0;
    const int n2 = ctrl2_ ? static_cast<int>(ctrl2_->order()) : 0;

    const double theta1 = x[0], omega1 = x[1], p_m1 = x[2];
    const double theta2 = x[3], omega2 = x[4], p_m2 = x[5];
    const double z1 = x[6], z2 = x[7];

    const double diff = theta1 - theta2;
    const double tie = model_.tie_max_pu * (linear_tie_ ? diff : std::sin(diff));
    const double tie_dev = tie - tie_schedule_;

    double p_b1 = 0.0, p_b2 = 0.0;
    if (ctrl1_) {
        for (int i = 0; i < n1; ++i) p_b1 += ctrl1_->C(i) * x[static_cast<std::size_t>(8 + i)];
        p_b1 += ctrl1_->D * omega1;
    }
    if (ctrl2_) {
        for (int i = 0; i < n2; ++i) p_b2 += ctrl2_->C(i) * x[static_cast<std::size_t>(8 + n1 + i)];
        p_b2 += ctrl2_->D * omega2;
    }

    const double w0 = 2.0 * std::numbers::pi * a1.f0_hz;
    dx[0] = w0 * omega1;
    dx[3] = w0 * omega2;
    dx[1] = (model_.p0_m1_pu + p_m1 - model_.p0_l1_pu - p_l1 - a1.alpha_l_pu * omega1 +
             p_b1 - tie) /
            (2.0 * a1.h_s);
    dx[4] = (model_.p0_m2_pu + p_m2 - model_.p0_l2_pu - p_l2 - a2.alpha_l_pu * omega2 +
             p_b2 + tie) /
            (2.0 * a2.h_s);
    dx[2] = (-p_m1 - a1.alpha_g_pu * omega1 -
             (model_.agc_enabled ? a1.k_i_pu_s * z1 : 0.0)) /
            a1.tau_t_s;
    dx[5] = (-p_m2 - a2.alpha_g_pu * omega2 -
             (model_.agc_enabled ? a2.k_i_pu_s * z2 : 0.0)) /
            a2.tau_t_s;
    dx[6] = model_.agc_enabled ? model_.bias1_pu * omega1 + tie_dev : 0.0;
    dx[7] = model_.agc_enabled ? model_.bias2_pu * omega2 - tie_dev : 0.0;

    if (ctrl1_) {
        for (int i = 0; i < n1; ++i) {
            double acc = ctrl1_->B(i) * omega1;
            for (int j = 0; j < n1; ++j)
                acc += ctrl1_->A(i, j) * x[static_cast<std::size_t>(8 + j)];
            dx[static_cast<std::size_t>(8 + i)] = acc;
        }
    }
    if (ctrl2_) {
        for (int i = 0; i < n2; ++i) {
            double acc = ctrl2_->B(i) * omega2;
            for (int j = 0; j < n2; ++j)
                acc += ctrl2_->A(i, j) * x[static_cast<std::size_t>(8 + n1 + j)];
            dx[static_cast<std::size_t>(8 + n1 + i)] = acc;
        }
    }
}

TwoAreaDynamics::Outputs TwoAreaDynamics::outputs(std::span<const double> x) const {
    Outputs out;
    const int n1 = ctrl1_ ? static_cast<int>(ctrl1_->order()) : 0;
    const int n2 = ctrl2_ ? static_cast<int>(ctrl2_->order()) : 0;
    out.omega1 = x[1];
    out.omega2 = x[4];
    out.p_m1 = x[2];
    out.p_m2 = x[5];
    out.theta_diff_rad = x[0] - x[3];
    out.tie_pu = model_.tie_max_pu *
                 (linear_tie_ ? out.theta_diff_rad : std::sin(out.theta_diff_rad));
    out.tie_dev_pu = out.tie_pu - tie_schedule_;
    if (ctrl1_) {
        for (int i = 0; i < n1; ++i) out.p_b1 += ctrl1_->C(i) * x[static_cast<std::size_t>(8 + i)];
        out.p_b1 += ctrl1_->D * out.omega1;
    }
    if (ctrl2_) {
        for (int i = 0; i < n2; ++i)
            out.p_b2 += ctrl2_->C(i) * x[static_cast<std::size_t>(8 + n1 + i)];
        out.p_b2 += ctrl2_->D * out.omega2;
    }
    return out;
}

double TwoAreaDynamics::coi_omega(double omega1, double omega2) const {
    const double h1 = model_.area1.h_s;
    const double h2 = model_.area2.h_s;
    return (h1 * omega1 + h2 * omega2) / (h1 + h2);
}

TwoAreaDynamics build_two_area(const TwoAreaModel& model) { return TwoAreaDynamics(model); }

} // namespace gridshape
