#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "gridshape/errors.hpp"
#include "gridshape/reduction.hpp"
#include "gridshape/state_space.hpp"
#include "testing_oracles.hpp"

using namespace gridshape;

namespace {

StateSpace ieeeg1_ss() {
    Poly den = poly_mul(poly_mul({1.0, 0.25}, {1.0, 0.1}), poly_mul({1.0, 0.3}, {1.0, 5.0}));
    return realize(RationalTransfer({1.0, 2.5}, den));
}

double grid_error(const StateSpace& full, const StateSpace& red) {
    double worst = 0.0;
    for (double w : testing::log_grid()) {
        const std::complex<double> s(0.0, w);
        worst = std::max(worst,
                         std::abs(full.frequency_response(s) - red.frequency_response(s)));
    }
    return worst;
}

} // namespace

TEST_CASE("full-order balancing preserves the response") {
    const StateSpace ss = ieeeg1_ss();
    const ReductionResult r = balanced_truncation(ss, static_cast<int>(ss.order()));
    CHECK(grid_error(ss, r.reduced) <= 1e-8);
    REQUIRE(r.hankel_values.size() == 4);
    for (std::size_t i = 1; i < r.hankel_values.size(); ++i)
        CHECK(r.hankel_values[i] <= r.hankel_values[i - 1] + 1e-15);
}

TEST_CASE("order-2 truncation of the steam governor meets the error bound") {
    const StateSpace ss = ieeeg1_ss();
    const ReductionResult r = balanced_truncation(ss, 2);
    const double bound = 2.0 * (r.hankel_values[2] + r.hankel_values[3]);
    CHECK(grid_error(ss, r.reduced) <= bound);
    CHECK(r.reduced.order() == 2);
}

TEST_CASE("order-0 truncation satisfies the full bound") {
    const StateSpace ss = ieeeg1_ss();
    const ReductionResult r = balanced_truncation(ss, 0);
    double bound = 0.0;
    for (double s : r.hankel_values) bound += 2.0 * s;
    CHECK(r.reduced.order() == 0);
    CHECK(grid_error(ss, r.reduced) <= bound);
}

TEST_CASE("bound holds for random stable systems at every order") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 12; ++trial) {
        const RationalTransfer tf = testing::random_stable_tf(rng, 1);
        const StateSpace ss = realize(tf);
        ReductionResult full;
        try {
            full = balanced_truncation(ss, static_cast<int>(ss.order()));
        } catch (const NonMinimalError&) {
            continue;  // randomly drawn near-cancelling pairs are skipped
        }
        for (int r = 0; r <= ss.order(); ++r) {
            const ReductionResult red = balanced_truncation(ss, r);
            double bound = 1e-8;
            for (std::size_t i = static_cast<std::size_t>(r); i < red.hankel_values.size(); ++i)
                bound += 2.0 * red.hankel_values[i];
            CHECK(grid_error(ss, red.reduced) <= bound);
        }
    }
}

TEST_CASE("non-minimal realizations are rejected") {
    StateSpace ss;
    ss.A = Eigen::MatrixXd::Zero(2, 2);
    ss.A(0, 0) = -1.0;
    ss.A(1, 1) = -1.0;
    ss.B = Eigen::VectorXd::Zero(2);
    ss.B(0) = 1.0;  // second state uncontrollable
    ss.C = Eigen::RowVectorXd::Ones(2);
    ss.D = 0.0;
    CHECK_THROWS_AS(balanced_truncation(ss, 1), NonMinimalError);
}

TEST_CASE("unstable systems are rejected") {
    StateSpace ss;
    ss.A = Eigen::MatrixXd::Constant(1, 1, 0.2);
    ss.B = Eigen::VectorXd::Ones(1);
    ss.C = Eigen::RowVectorXd::Ones(1);
    CHECK_THROWS_AS(balanced_truncation(ss, 1), InstabilityError);
}

TEST_CASE("DC rescaling pins the steady-state gain") {
    const StateSpace ss = ieeeg1_ss();
    const ReductionResult r = balanced_truncation(ss, 2);
    const StateSpace fixed = with_dc_gain(r.reduced, 1.0);
    CHECK(fixed.frequency_response(0.0).real() == doctest::Approx(1.0).epsilon(1e-12));
}
