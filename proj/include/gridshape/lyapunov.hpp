#ifndef GRIDSHAPE_LYAPUNOV_HPP
#define GRIDSHAPE_LYAPUNOV_HPP

#include <Eigen/Dense>

namespace gridshape {

/// Solves A P + P A' + Q = 0 for symmetric P via Bartels-Stewart on the
/// complex Schur form of A.
///
/// Requires A Hurwitz and Q symmetric. Throws InstabilityError when A is not
/// Hurwitz and IllConditionedError when the residual Frobenius norm exceeds
/// 1e-8 * ||Q||_F.
Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

} // namespace gridshape

#endif
