#include "gridshape/lyapunov.hpp"

#include <Eigen/Eigenvalues>

#include "gridshape/errors.hpp"
#include "gridshape/state_space.hpp"

namespace gridshape {

Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || Q.rows() != n || Q.cols() != n)
        throw InvariantError("lyapunov_solve dimensions are inconsistent");
    if ((Q - Q.transpose()).norm() > 1e-10 * std::max(1.0, Q.norm()))
        throw InvariantError("lyapunov_solve requires a symmetric Q");
    if (n == 0) return Eigen::MatrixXd(0, 0);
    if (!is_hurwitz(A))
        throw InstabilityError("lyapunov_solve requires a Hurwitz A");

    // A = U T U^H with T upper triangular. Substituting P = U Y U^H turns
    // A P + P A' + Q = 0 into T Y + Y T^H = -U^H Q U, solvable by columns.
    const Eigen::ComplexSchur<Eigen::MatrixXd> schur(A);
    const Eigen::MatrixXcd T = schur.matrixT();
    const Eigen::MatrixXcd U = schur.matrixU();
    const Eigen::MatrixXcd Qt = U.adjoint() * Q * U;

    // (Y T^H)_{:,j} couples column j to columns k > j, so solve backwards.
    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index j = n - 1; j >= 0; --j) {
        Eigen::VectorXcd rhs = -Qt.col(j);
        for (Eigen::Index k = j + 1; k < n; ++k) rhs -= std::conj(T(j, k)) * Y.col(k);
        Eigen::MatrixXcd M = T;
        M.diagonal().array() += std::conj(T(j, j));
        Y.col(j) = M.triangularView<Eigen::Upper>().solve(rhs);
    }
    Eigen::MatrixXd P = (U * Y * U.adjoint()).real();
    P = 0.5 * (P + P.transpose()).eval();

    const double residual = (A * P + P * A.transpose() + Q).norm();
    if (residual > 1e-8 * std::max(Q.norm(), 1e-30))
        throw IllConditionedError("lyapunov_solve residual exceeds tolerance");
    return P;
}

} // namespace gridshape
