#ifndef GRIDSHAPE_TESTING_ORACLES_HPP
#define GRIDSHAPE_TESTING_ORACLES_HPP

// Independent reference computations for the test suites. Nothing here may
// call the implementation paths it is used to check.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "gridshape/plant.hpp"
#include "gridshape/rational.hpp"

namespace gridshape::testing {

/// Great Britain aggregate parameters used across the suites.
inline AreaParameters gb_area(double alpha_l = 0.0, double k_i = 0.0) {
    AreaParameters a;
    a.h_s = 2.19;
    a.tau_t_s = 1.0;
    a.alpha_g_pu = 15.0;
    a.alpha_l_pu = alpha_l;
    a.k_i_pu_s = k_i;
    a.f0_hz = 50.0;
    return a;
}

inline constexpr double kGbDp = 0.05625;  // 1.8 GW on the 32 GVA base

/// Random stable proper transfer function. Pole magnitudes sit in
/// [0.2, 10] rad/s with damping >= 0.4 and zeros stay in the same band of
/// the left half plane, which keeps transient amplitudes within a couple of
/// decades of the DC gain. rel_degree_min = 1 forces a strictly proper
/// sample.
inline RationalTransfer random_stable_tf(std::mt19937& rng, int rel_degree_min = 0) {
    std::uniform_int_distribution<int> order_dist(1, 5);
    std::uniform_real_distribution<double> log_pole(std::log(0.2), std::log(10.0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> gain_dist(0.2, 2.0);

    const int n = order_dist(rng);
    Poly den{1.0};
    double fastest_pole = 0.0;
    int added = 0;
    while (added < n) {
        if (n - added >= 2 && unit(rng) < 0.35) {
            const double wn = std::exp(log_pole(rng));
            const double zeta = 0.4 + 0.55 * unit(rng);
            den = poly_mul(den, Poly{wn * wn, 2.0 * zeta * wn, 1.0});
            fastest_pole = std::max(fastest_pole, wn);
            added += 2;
        } else {
            const double p = std::exp(log_pole(rng));
            den = poly_mul(den, Poly{p, 1.0});
            fastest_pole = std::max(fastest_pole, p);
            added += 1;
        }
    }
    const int max_zero = n - std::max(rel_degree_min, 0);
    std::uniform_int_distribution<int> zero_dist(0, std::max(max_zero, 0));
    const int m = zero_dist(rng);
    Poly num{gain_dist(rng) * (unit(rng) < 0.5 ? -1.0 : 1.0)};
    for (int i = 0; i < m; ++i) {
        // zeros beyond the pole band keep the sample low-pass, so the step
        // transient stays within a small factor of the DC value
        const double z = fastest_pole * std::exp(unit(rng) * std::log(2.5));
        num = poly_mul(num, Poly{z, 1.0});
    }
    return RationalTransfer(num, den);
}

/// Slowest pole magnitude (for horizon selection).
inline double slowest_pole(const RationalTransfer& tf) {
    double slowest = 1e300;
    for (const auto& p : tf_poles(tf)) slowest = std::min(slowest, -p.real());
    return slowest;
}

/// Direct Kronecker-product solve of A P + P A' + Q = 0; the n^2 x n^2
/// linear system (I (x) A + A (x) I) vec(P) = -vec(Q).
inline Eigen::MatrixXd lyapunov_kronecker_oracle(const Eigen::MatrixXd& A,
                                                 const Eigen::MatrixXd& Q) {
    const Eigen::Index n = A.rows();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k) {
                K(i * n + j, i * n + k) += A(j, k);  // I (x) A
                K(i * n + j, k * n + j) += A(i, k);  // A (x) I
            }
    Eigen::VectorXd q(n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) q(i * n + j) = Q(i, j);
    const Eigen::VectorXd p = K.partialPivLu().solve(-q);
    Eigen::MatrixXd P(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) P(i, j) = p(i * n + j);
    return P;
}

/// 200-point logarithmic frequency grid over [1e-3, 1e3] rad/s.
inline std::vector<double> log_grid(int points = 200, double lo = 1e-3, double hi = 1e3) {
    std::vector<double> w(points);
    for (int i = 0; i < points; ++i)
        w[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    return w;
}

/// First-order step response -dp/b (1 - exp(-(b/a) t)).
inline double first_order_omega(double dp, double a, double b, double t) {
    return -(dp / b) * (1.0 - std::exp(-(b / a) * t));
}

} // namespace gridshape::testing

#endif
