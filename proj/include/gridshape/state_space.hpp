#ifndef GRIDSHAPE_STATE_SPACE_HPP
#define GRIDSHAPE_STATE_SPACE_HPP

#include <Eigen/Dense>

#include "gridshape/rational.hpp"

namespace gridshape {

/// Minimal SISO realization (A, B, C, D). n = 0 is a pure gain D.
struct StateSpace {
    Eigen::MatrixXd A;  // n x n
    Eigen::VectorXd B;  // n x 1
    Eigen::RowVectorXd C;  // 1 x n
    double D = 0.0;

    Eigen::Index order() const { return A.rows(); }

    /// C (sI - A)^-1 B + D.
    std::complex<double> frequency_response(std::complex<double> s) const;
};

/// Controllable canonical realization of a proper transfer function.
/// Throws ImproperTransferError when the numerator degree exceeds the
/// denominator degree.
StateSpace realize(const RationalTransfer& tf);

/// Transfer function of a realization via the Faddeev-LeVerrier recursion.
/// Intended for the small systems this library works with (n <= ~10).
RationalTransfer tf_from_ss(const StateSpace& ss);

/// True when every eigenvalue of A has a strictly negative real part.
bool is_hurwitz(const Eigen::MatrixXd& A, double margin = 0.0);

} // namespace gridshape

#endif
