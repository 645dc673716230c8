#ifndef GRIDSHAPE_CONTROLLERS_HPP
#define GRIDSHAPE_CONTROLLERS_HPP

#include <span>
#include <vector>

#include "gridshape/plant.hpp"
#include "gridshape/rational.hpp"

namespace gridshape {

/// Default cut-off of the properness filter appended to storage laws.
inline constexpr double kDefaultFilterHz = 5.0;

/// Security targets for a step imbalance of magnitude dp_pu.
struct TuningTargets {
    double dp_pu = 0.0;          // > 0
    double domega_d_pu = 0.0;    // allowed steady-state deviation, < 0
    double rocof_d_pu_s = 0.0;   // allowed RoCoF magnitude, > 0

    void validate() const;
};

/// Virtual-inertia tuning: inertial constant m_v plus droop alpha_b.
/// Derived quantities are always recomputed from the area at hand.
struct ViTuning {
    double m_v_pu_s = 0.0;
    double alpha_b_pu = 0.0;
    double predicted_rocof_pu_s = 0.0;  // dp / (2H + m_v), filled by vi_tune

    double alpha_tot(const AreaParameters& area) const { return area.alpha_g_pu + alpha_b_pu; }
    double m_tilde(const AreaParameters& area) const { return 2.0 * area.h_s + m_v_pu_s; }
    double beta(const AreaParameters& area) const;
};

/// First-order target 1/(a s + b) for the shaping law, with the case label
/// recording which of the two storage actions are active.
struct FsTuning {
    double a_pu_s = 0.0;
    double b_pu = 0.0;
    int case_id = 1;  // 1: none, 2: droop only, 3: inertia only, 4: both
    double predicted_domega_pu = 0.0;  // -dp/b, filled by fs_tune
    double predicted_rocof_pu_s = 0.0; // dp/a, filled by fs_tune
};

enum class ControllerKind { VirtualInertia, FrequencyShaping, IDroop, PerMachineShaping };

/// A synthesized storage law: the raw transfer function plus the proper
/// variant used for simulation. tf_filtered always shares the raw DC gain.
struct ControllerSpec {
    ControllerKind kind = ControllerKind::VirtualInertia;
    RationalTransfer tf;
    RationalTransfer tf_filtered;
    double m_v_pu_s = 0.0;
    double alpha_b_pu = 0.0;
    double a_pu_s = 0.0;
    double b_pu = 0.0;
    int case_id = 0;
};

/// Appends [1/(s/(2 pi f_c) + 1)]^k with k the relative-degree deficit, so
/// the result is proper with unchanged DC gain. Proper inputs pass through.
RationalTransfer augment_lowpass(const RationalTransfer& tf, double f_c_hz);

/// c(s) = -(m_v s + alpha_b).
ControllerSpec vi_controller(double m_v_pu_s, double alpha_b_pu,
                             double f_c_hz = kDefaultFilterHz);

/// Smallest inertial constant that removes the frequency overshoot:
/// exact form tau_T beta^2 - 2H with beta = sqrt(alpha_g) + sqrt(alpha_g + alpha_b),
/// approximate form 2 tau_T (2 alpha_g + alpha_b) - 2H. Clamped at zero.
double vi_min_inertia(const AreaParameters& area, double alpha_b_pu, bool approximate);

/// Picks alpha_b from the steady-state target and m_v at the overshoot-free
/// minimum.
ViTuning vi_tune(const TuningTargets& targets, const AreaParameters& area);

/// Shaping law c(s) = -(A1 s^2 + A2 s + A3)/(tau_T s + 1) rendering the
/// closed loop exactly 1/(a s + b).
ControllerSpec fs_controller(const FsTuning& tuning, const AreaParameters& area,
                             double f_c_hz = kDefaultFilterHz);

/// Chooses a and b against the plant's natural capability; boundary targets
/// resolve to the cheaper case.
FsTuning fs_tune(const TuningTargets& targets, const AreaParameters& area);

/// Dynamic droop c(s) = alpha_g/(tau_T s + 1) - (alpha_g + alpha_b).
ControllerSpec idroop_controller(const AreaParameters& area, double alpha_b_pu,
                                 double f_c_hz = kDefaultFilterHz);

struct MachineShare {
    double m_pu_s = 0.0;
    double alpha_b_pu = 0.0;
};

enum class AllocationPolicy { ProportionalToRating, Uniform, DeficitOnly };

/// Thresholds for deficit-only allocation: only machines below the minimum
/// inertia (2H) or droop receive shares, in proportion to their deficits.
struct DeficitThresholds {
    double min_2h_pu_s = 0.0;
    double min_alpha_g_pu = 0.0;
};

/// Splits the fleet-level requirements
///   sum m_i     = max(dp/rocof_d - 2 sum H_i, 0)
///   sum alpha_b = max(dp/|domega_d| - sum alpha_g_i, 0)
/// across machines by the chosen policy. Throws InfeasiblePolicyError when
/// deficit-only thresholds cannot absorb the totals.
std::vector<MachineShare> mm_allocate(const TuningTargets& targets,
                                      std::span<const MachineParameters> machines,
                                      AllocationPolicy policy,
                                      const DeficitThresholds& thresholds = {});

/// Per-machine law c_i(s) = -(m_i s - alpha_g_i T_i(s) + alpha_g_i + alpha_b_i)
/// with T_i reduced to order r by balanced truncation (r = 0 keeps the full
/// model). The reduced governor is rescaled to unit DC gain so c_i(0) stays
/// exactly -alpha_b_i.
ControllerSpec mm_controller(const MachineParameters& machine, double m_pu_s,
                             double alpha_b_pu, int reduction_order,
                             double f_c_hz = kDefaultFilterHz);

} // namespace gridshape

#endif
