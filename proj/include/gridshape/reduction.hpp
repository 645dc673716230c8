#ifndef GRIDSHAPE_REDUCTION_HPP
#define GRIDSHAPE_REDUCTION_HPP

#include <vector>

#include "gridshape/state_space.hpp"

namespace gridshape {

struct ReductionResult {
    StateSpace reduced;
    std::vector<double> hankel_values;  // all n values, non-increasing
};

/// Square-root balanced truncation to order r (0 <= r <= n).
///
/// Gramians come from two Lyapunov solves; the Hankel values are the singular
/// values of the product of their Cholesky-like factors. The reduced model
/// satisfies the usual frequency-response error bound of twice the sum of the
/// discarded Hankel values.
///
/// Throws InstabilityError for an unstable system and NonMinimalError when
/// sigma_min < 1e-12 * sigma_max.
ReductionResult balanced_truncation(const StateSpace& ss, int r);

/// Rescales C and D so the DC gain becomes `target`. Used after truncation
/// when a unit steady-state gain must be preserved exactly.
StateSpace with_dc_gain(const StateSpace& ss, double target);

/// Balanced reduction that residualizes the discarded states instead of
/// dropping them: the DC gain of the original survives exactly, the
/// high-frequency response absorbs the error, and the twice-the-discarded-
/// Hankel-values bound still holds. This is the reduction used inside the
/// per-machine storage laws, whose steady-state cancellation depends on the
/// governor's unit DC gain.
ReductionResult balanced_residualization(const StateSpace& ss, int r);

} // namespace gridshape

#endif
