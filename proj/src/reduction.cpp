#include "gridshape/reduction.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

#include "gridshape/errors.hpp"
#include "gridshape/lyapunov.hpp"

namespace gridshape {

namespace {

// Factor F with W = F F'. LLT when W is numerically positive definite,
// eigenvalue square root otherwise (gramians can be semi-definite to
// working precision).
Eigen::MatrixXd gramian_factor(const Eigen::MatrixXd& W) {
    Eigen::LLT<Eigen::MatrixXd> llt(W);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
    Eigen::VectorXd lam = es.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = std::sqrt(std::max(lam(i), 0.0));
    return es.eigenvectors() * lam.asDiagonal();
}

} // namespace

ReductionResult balanced_truncation(const StateSpace& ss, int r) {
    const Eigen::Index n = ss.order();
    if (r < 0 || r > n)
        throw InvariantError("balanced_truncation order out of range");
    if (!is_hurwitz(ss.A))
        throw InstabilityError("balanced_truncation requires an asymptotically stable system");
    if (n == 0) return {ss, {}};

    const Eigen::MatrixXd Wc = lyapunov_solve(ss.A, ss.B * ss.B.transpose());
    const Eigen::MatrixXd Wo =
        lyapunov_solve(ss.A.transpose(), ss.C.transpose() * ss.C);

    const Eigen::MatrixXd S = gramian_factor(Wc);
    const Eigen::MatrixXd R = gramian_factor(Wo);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R.transpose() * S,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd sigma = svd.singularValues();
    std::vector<double> hankel(sigma.data(), sigma.data() + sigma.size());
    if (sigma(n - 1) < 1e-12 * sigma(0))
        throw NonMinimalError("balanced_truncation: gramian numerically singular");

    StateSpace red;
    if (r == 0) {
        red.A.resize(0, 0);
        red.B.resize(0);
        red.C.resize(0);
        red.D = ss.D;
        return {red, hankel};
    }

    const Eigen::VectorXd si = sigma.head(r).array().sqrt().inverse();
    const Eigen::MatrixXd T_in = S * svd.matrixV().leftCols(r) * si.asDiagonal();
    const Eigen::MatrixXd T_out =
        si.asDiagonal() * svd.matrixU().leftCols(r).transpose() * R.transpose();

    red.A = T_out * ss.A * T_in;
    red.B = T_out * ss.B;
    red.C = ss.C * T_in;
    red.D = ss.D;
    return {red, hankel};
}

ReductionResult balanced_residualization(const StateSpace& ss, int r) {
    const Eigen::Index n = ss.order();
    if (r < 0 || r > n)
        throw InvariantError("balanced_residualization order out of range");
    ReductionResult balanced = balanced_truncation(ss, static_cast<int>(n));
    if (r == n) return balanced;

    const StateSpace& b = balanced.reduced;
    const Eigen::Index m = n - r;
    const Eigen::MatrixXd A11 = b.A.topLeftCorner(r, r);
    const Eigen::MatrixXd A12 = b.A.topRightCorner(r, m);
    const Eigen::MatrixXd A21 = b.A.bottomLeftCorner(m, r);
    const Eigen::MatrixXd A22 = b.A.bottomRightCorner(m, m);
    const Eigen::VectorXd B1 = b.B.head(r);
    const Eigen::VectorXd B2 = b.B.tail(m);
    const Eigen::RowVectorXd C1 = b.C.head(r);
    const Eigen::RowVectorXd C2 = b.C.tail(m);

    const auto lu = A22.partialPivLu();
    StateSpace red;
    red.A = A11 - A12 * lu.solve(A21);
    red.B = B1 - A12 * lu.solve(B2);
    red.C = C1 - (C2 * lu.solve(A21)).eval();
    red.D = b.D - (C2 * lu.solve(B2)).value();
    return {red, balanced.hankel_values};
}

StateSpace with_dc_gain(const StateSpace& ss, double target) {
    double dc = ss.D;
    if (ss.order() > 0)
        dc = ss.D - (ss.C * ss.A.partialPivLu().solve(ss.B)).value();
    if (std::abs(dc) < 1e-12)
        throw IllConditionedError("cannot rescale a realization with zero DC gain");
    StateSpace out = ss;
    const double k = target / dc;
    out.C *= k;
    out.D *= k;
    return out;
}

} // namespace gridshape
