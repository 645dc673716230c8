#include "gridshape/state_space.hpp"

#include <Eigen/Eigenvalues>

#include "gridshape/errors.hpp"

namespace gridshape {

std::complex<double> StateSpace::frequency_response(std::complex<double> s) const {
    const Eigen::Index n = order();
    if (n == 0) return D;
    Eigen::MatrixXcd M = -A.cast<std::complex<double>>();
    M.diagonal().array() += s;
    const Eigen::VectorXcd x = M.partialPivLu().solve(B.cast<std::complex<double>>());
    return (C.cast<std::complex<double>>() * x).value() + D;
}

StateSpace realize(const RationalTransfer& tf) {
    if (!tf.is_proper())
        throw ImproperTransferError("realization requires a proper transfer function");
    const int n = tf.den_degree();
    StateSpace ss;
    if (n == 0) {
        ss.A.resize(0, 0);
        ss.B.resize(0);
        ss.C.resize(0);
        ss.D = tf.num().front() / tf.den().front();
        return ss;
    }
    // den is monic: s^n + a_{n-1} s^{n-1} + ... + a_0
    Poly num = tf.num();
    num.resize(static_cast<std::size_t>(n) + 1, 0.0);
    const double d = num[static_cast<std::size_t>(n)];
    ss.A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) ss.A(i, i + 1) = 1.0;
    for (int j = 0; j < n; ++j) ss.A(n - 1, j) = -tf.den()[static_cast<std::size_t>(j)];
    ss.B = Eigen::VectorXd::Zero(n);
    ss.B(n - 1) = 1.0;
    ss.C.resize(n);
    for (int j = 0; j < n; ++j)
        ss.C(j) = num[static_cast<std::size_t>(j)] - d * tf.den()[static_cast<std::size_t>(j)];
    ss.D = d;
    return ss;
}

RationalTransfer tf_from_ss(const StateSpace& ss) {
    const Eigen::Index n = ss.order();
    if (n == 0) return RationalTransfer::constant(ss.D);
    // Faddeev-LeVerrier: den(s) = s^n + c1 s^{n-1} + ... + cn and
    // C adj(sI - A) B = sum_k (C M_k B) s^{n-k}.
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
    Poly den(static_cast<std::size_t>(n) + 1, 0.0);
    Poly cadjb(static_cast<std::size_t>(n), 0.0);
    den[static_cast<std::size_t>(n)] = 1.0;
    double c = 1.0;
    for (Eigen::Index k = 1; k <= n; ++k) {
        cadjb[static_cast<std::size_t>(n - k)] = (ss.C * M * ss.B).value();
        const Eigen::MatrixXd AM = ss.A * M;
        c = -AM.trace() / static_cast<double>(k);
        den[static_cast<std::size_t>(n - k)] = c;
        M = AM + c * Eigen::MatrixXd::Identity(n, n);
    }
    Poly num = poly_add(cadjb, poly_scale(den, ss.D));
    return RationalTransfer(std::move(num), std::move(den));
}

bool is_hurwitz(const Eigen::MatrixXd& A, double margin) {
    if (A.rows() == 0) return true;
    const Eigen::VectorXcd ev = A.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i).real() >= -margin) return false;
    return true;
}

} // namespace gridshape
