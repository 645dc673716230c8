#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gridshape/controllers.hpp"
#include "gridshape/errors.hpp"
#include "gridshape/metrics.hpp"
#include "gridshape/sim.hpp"
#include "gridshape/step_response.hpp"
#include "testing_oracles.hpp"

using namespace gridshape;

namespace {

TwoAreaModel draft_two_area(double tau2 = 2.0) {
    TwoAreaModel m;
    m.area1 = {6.0, 1.0, 10.0, 1.0, 0.05, 50.0};
    m.area2 = {5.5, tau2, 12.0, 1.1, 0.05, 50.0};
    m.tie_max_pu = 1.5;
    m.p0_m1_pu = 0.2;
    m.p0_m2_pu = 0.4;
    m.p0_l1_pu = 0.3;
    m.p0_l2_pu = 0.3;
    m.set_default_bias();
    return m;
}

TwoAreaModel symmetric_two_area(double tie = 1.5) {
    TwoAreaModel m;
    m.area1 = {6.0, 1.0, 10.0, 0.0, 0.0, 50.0};
    m.area2 = m.area1;
    m.tie_max_pu = tie;
    m.p0_m1_pu = 0.3;
    m.p0_m2_pu = 0.3;
    m.p0_l1_pu = 0.3;
    m.p0_l2_pu = 0.3;
    m.set_default_bias();
    return m;
}

ControllerSpec fs_for(const AreaParameters& area, double dp, double domega_d,
                      double rocof_d) {
    AreaParameters design = area;
    design.alpha_l_pu = 0.0;
    design.k_i_pu_s = 0.0;
    const FsTuning t = fs_tune({dp, domega_d, rocof_d}, design);
    return fs_controller(t, design);
}

} // namespace

TEST_CASE("closed-loop interconnection") {
    const AreaParameters gb = testing::gb_area();
    const RationalTransfer g = open_loop_plant(gb, false, false);
    const double dp = testing::kGbDp;

    SUBCASE("storage-free tail equals the final-value prediction") {
        const Trajectory traj =
            simulate_closed_loop(realize(g), realize(RationalTransfer()), {dp, 1, 1.0},
                                 1e-3, 61.0);
        CHECK(traj["omega"].back() == doctest::Approx(-0.00375).epsilon(1e-5));
        CHECK(traj["p_b"].back() == doctest::Approx(0.0));
    }
    SUBCASE("structural and generic simulations agree") {
        const ControllerSpec vi = vi_controller(20.0, 0.0);
        const Trajectory a = simulate_area(gb, vi, {dp, 1, 1.0}, 1e-3, 30.0);
        const Trajectory b = simulate_closed_loop(realize(g), realize(vi.tf_filtered),
                                                  {dp, 1, 1.0}, 1e-3, 30.0);
        const auto& wa = a["omega"];
        const auto& wb = b["omega"];
        double sup = 0.0;
        for (std::size_t i = 0; i < wa.size(); ++i)
            sup = std::max(sup, std::abs(wa[i] - wb[i]));
        CHECK(sup <= 1e-9);
    }
    SUBCASE("shaped loop follows the first-order curve") {
        const ControllerSpec fs = fs_for(gb, dp, -0.004, 0.015);  // case 1
        const Trajectory traj = simulate_area(gb, fs, {dp, 1, 1.0}, 1e-3, 40.0);
        const auto& omega = traj["omega"];
        double sup = 0.0;
        for (std::size_t i = 0; i < omega.size(); ++i) {
            const double t = traj.time_at(i) - 1.0;
            const double ref = t < 0.0 ? 0.0 : testing::first_order_omega(dp, 4.38, 15.0, t);
            sup = std::max(sup, std::abs(omega[i] - ref));
        }
        CHECK(sup <= 0.01 * (dp / 15.0));
    }
    SUBCASE("zero disturbance leaves everything at rest") {
        const ControllerSpec fs = fs_for(gb, dp, -0.004, 0.015);
        const Trajectory traj = simulate_area(gb, fs, {0.0, 1, 1.0}, 1e-3, 5.0);
        for (double v : traj["omega"]) CHECK(v == 0.0);
        CHECK(traj["e_b"].back() == 0.0);
    }
    SUBCASE("energy signal equals the trapezoid integral of storage power") {
        const ControllerSpec vi = vi_controller(30.0, 2.0);
        const Trajectory traj = simulate_area(gb, vi, {dp, 1, 1.0}, 1e-3, 20.0);
        const std::vector<double> want = integrate_trapezoid(traj["p_b"], traj.dt());
        const auto& got = traj["e_b"];
        for (std::size_t i = 0; i < want.size(); ++i)
            CHECK(std::abs(got[i] - want[i]) <= 1e-9 * static_cast<double>(i + 1));
    }
    SUBCASE("destabilizing storage feedback diverges loudly") {
        const StateSpace bad = realize(RationalTransfer::constant(100.0));
        CHECK_THROWS_AS(
            simulate_closed_loop(realize(g), bad, {dp, 1, 0.0}, 1e-2, 80.0),
            DivergenceError);
    }
    SUBCASE("feedthrough on both sides closes the algebraic loop correctly") {
        const RationalTransfer biproper({2.0, 1.0}, {1.0, 1.0});
        const RationalTransfer gain = RationalTransfer::constant(-0.5);
        const Trajectory loop = simulate_closed_loop(
            realize(biproper), realize(gain), {dp, 1, 0.0}, 1e-3, 10.0);
        const RationalTransfer h = closed_loop(biproper, gain);
        const Trajectory ref = step_response(realize(h), -dp, 1e-3, 10.0);
        const auto& got = loop["omega"];
        const auto& want = ref["y"];
        for (std::size_t i = 0; i < got.size(); i += 100)
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9).scale(dp));
    }
}

TEST_CASE("step-halving convergence") {
    const AreaParameters gb = testing::gb_area(1.0, 0.05);
    const double dp = testing::kGbDp;
    const ControllerSpec fs = fs_for(gb, dp, -0.004, 0.01);

    auto peak = [&](double dt) {
        const Trajectory traj = simulate_area(gb, fs, {dp, 1, 1.0}, dt, 30.0);
        const auto& omega = traj["omega"];
        double peak = 0.0;
        for (double v : omega) peak = std::max(peak, std::abs(v));
        return peak;
    };
    const double coarse = peak(1e-3);
    const double fine = peak(5e-4);
    CHECK(std::abs(coarse - fine) <= 1e-4 * std::abs(fine));

    auto two_area_peak = [&](double dt) {
        const TwoAreaModel m = draft_two_area();
        const ControllerSpec c1 = fs_for(m.area1, 0.1, -0.006, 0.01);
        const ControllerSpec c2 = fs_for(m.area2, 0.1, -0.006, 0.01);
        const Trajectory traj = simulate_two_area(m, c1, c2, {0.1, 2, 1.0}, dt, 20.0);
        const auto& omega = traj["omega2"];
        double peak = 0.0;
        for (double v : omega) peak = std::max(peak, std::abs(v));
        return peak;
    };
    const double c2 = two_area_peak(1e-3);
    const double f2 = two_area_peak(5e-4);
    CHECK(std::abs(c2 - f2) <= 1e-4 * std::abs(f2));
}

TEST_CASE("two-area simulation") {
    SUBCASE("undisturbed equilibrium holds for the full horizon") {
        const TwoAreaModel m = draft_two_area();
        const Trajectory traj = simulate_two_area(m, ControllerSpec{}, ControllerSpec{},
                                                  {0.0, 2, 1.0}, 1e-3, 20.0);
        for (double v : traj["omega1"]) CHECK(std::abs(v) <= 1e-9);
        for (double v : traj["omega2"]) CHECK(std::abs(v) <= 1e-9);
        for (double v : traj["p12"]) CHECK(std::abs(v) <= 1e-9);
    }
    SUBCASE("area frequencies stay above their design floors") {
        const TwoAreaModel m = draft_two_area();
        const double dp = 0.1, domega_d = -0.006, rocof_d = 0.01;
        const ControllerSpec c1 = fs_for(m.area1, dp, domega_d, rocof_d);
        const ControllerSpec c2 = fs_for(m.area2, dp, domega_d, rocof_d);
        const Trajectory traj = simulate_two_area(m, c1, c2, {dp, 2, 1.0}, 1e-3, 40.0);
        const double floor = domega_d;  // both areas tuned to the same bound
        CHECK(*std::min_element(traj["omega1"].begin(), traj["omega1"].end()) >= floor);
        CHECK(*std::min_element(traj["omega2"].begin(), traj["omega2"].end()) >= floor);
    }
    SUBCASE("nonlinear and linearized ties agree in the small-angle regime") {
        const TwoAreaModel m = symmetric_two_area();
        const ControllerSpec c = fs_for(m.area1, 0.01, -0.002, 0.002);
        const Trajectory nl = simulate_two_area(m, c, c, {0.01, 1, 1.0}, 1e-3, 20.0);
        const Trajectory lin =
            simulate_two_area(m, c, c, {0.01, 1, 1.0}, 1e-3, 20.0, true);
        double sup = 0.0;
        for (std::size_t i = 0; i < nl["omega1"].size(); ++i) {
            sup = std::max(sup, std::abs(nl["omega1"][i] - lin["omega1"][i]));
            sup = std::max(sup, std::abs(nl["omega2"][i] - lin["omega2"][i]));
        }
        CHECK(sup <= 0.001 * 0.01);
    }
    SUBCASE("a stiffer tie pulls the areas together") {
        const ControllerSpec c = fs_for(symmetric_two_area().area1, 0.1, -0.006, 0.01);
        auto spread = [&](double tie) {
            const TwoAreaModel m = symmetric_two_area(tie);
            const Trajectory traj = simulate_two_area(m, c, c, {0.1, 1, 1.0}, 1e-3, 20.0);
            double worst = 0.0;
            for (std::size_t i = 0; i < traj["omega1"].size(); ++i)
                worst = std::max(worst, std::abs(traj["omega1"][i] - traj["omega2"][i]));
            return worst;
        };
        // The sync mode is lightly damped, so the peak spread scales like
        // 1/sqrt(tie stiffness).
        const double base = spread(1.5);
        CHECK(base >= 2.0 * spread(15.0));
        CHECK(base >= 5.0 * spread(150.0));
    }
    SUBCASE("connecting a second area never hurts the disturbed one") {
        const TwoAreaModel m = symmetric_two_area();
        const double dp = 0.1;
        const ControllerSpec c = fs_for(m.area1, dp, -0.006, 0.01);
        const Trajectory joined = simulate_two_area(m, c, c, {dp, 1, 1.0}, 1e-3, 40.0);
        const Trajectory alone = simulate_area(m.area1, c, {dp, 1, 1.0}, 1e-3, 40.0);
        const auto& w_joined = joined["omega1"];
        const auto& w_alone = alone["omega"];
        for (std::size_t i = 0; i < w_joined.size(); ++i)
            CHECK(w_joined[i] >= w_alone[i] - 1e-9);
    }
    SUBCASE("loss of synchronism is reported, not clipped") {
        TwoAreaModel m = symmetric_two_area(0.2);
        const ControllerSpec none{};
        CHECK_THROWS_AS(
            simulate_two_area(m, none, none, {1.5, 1, 0.5}, 1e-3, 20.0),
            AngleSeparationError);
    }
    SUBCASE("secondary control with bias factors recovers both areas") {
        TwoAreaModel m = draft_two_area();
        m.agc_enabled = true;
        m.set_default_bias();
        const Trajectory traj = simulate_two_area(m, ControllerSpec{}, ControllerSpec{},
                                                  {0.1, 2, 1.0}, 1e-3, 200.0);
        auto peak_and_tail = [&](const char* name) {
            const auto& v = traj[name];
            double peak = 0.0;
            for (double x : v) peak = std::max(peak, std::abs(x));
            return std::pair{peak, std::abs(v.back())};
        };
        for (const char* name : {"omega1", "omega2", "p12"}) {
            const auto [peak, tail] = peak_and_tail(name);
            CHECK(tail < peak / 3.0);
        }
    }
    SUBCASE("storage energy channels integrate their power channels") {
        const TwoAreaModel m = draft_two_area();
        const ControllerSpec c1 = fs_for(m.area1, 0.1, -0.006, 0.01);
        const ControllerSpec c2 = fs_for(m.area2, 0.1, -0.006, 0.01);
        const Trajectory traj = simulate_two_area(m, c1, c2, {0.1, 2, 1.0}, 1e-3, 10.0);
        for (const auto& [pb, eb] : {std::pair{"p_b1", "e_b1"}, std::pair{"p_b2", "e_b2"}}) {
            const std::vector<double> want = integrate_trapezoid(traj[pb], traj.dt());
            const auto& got = traj[eb];
            for (std::size_t i = 0; i < want.size(); i += 500)
                CHECK(std::abs(got[i] - want[i]) <= 1e-9 * static_cast<double>(i + 1));
        }
    }
}

TEST_CASE("fleet simulation tracks the shaping target") {
    std::vector<MachineParameters> fleet(3);
    fleet[0] = {2.5, 8.0, {Ieeeg1Governor{0.5, 0.5, 0.25, 0.1, 0.3, 5.0}}, 1.0};
    fleet[1] = {2.0, 6.0, {Ieeeg1Governor{0.5, 0.5, 0.2, 0.1, 0.5, 8.0}}, 1.0};
    fleet[2] = {1.2, 4.0, {HydroGovernor{1.0}}, 0.5};
    const double dp = testing::kGbDp;
    const double sum_2h = 2.0 * (2.5 + 2.0 + 1.2);  // 11.4
    const double a_target = 60.0, b_target = 20.0;
    const TuningTargets targets{dp, -dp / b_target, dp / a_target};

    for (int r : {0, 2}) {
        const auto shares =
            mm_allocate(targets, fleet, AllocationPolicy::ProportionalToRating);
        double sum_m = 0.0;
        std::vector<ControllerSpec> specs;
        for (std::size_t i = 0; i < fleet.size(); ++i) {
            specs.push_back(mm_controller(fleet[i], shares[i].m_pu_s, shares[i].alpha_b_pu, r));
            sum_m += shares[i].m_pu_s;
        }
        CHECK(sum_m == doctest::Approx(a_target - sum_2h).epsilon(1e-12));
        const Trajectory traj =
            simulate_multi_machine(fleet, specs, {dp, 1, 1.0}, 1e-3, 60.0);
        const auto& omega = traj["omega"];
        double sup = 0.0;
        for (std::size_t i = 0; i < omega.size(); ++i) {
            const double t = traj.time_at(i) - 1.0;
            const double ref =
                t < 0.0 ? 0.0 : testing::first_order_omega(dp, a_target, b_target, t);
            sup = std::max(sup, std::abs(omega[i] - ref));
        }
        const double tol = (r == 0 ? 0.01 : 0.02) * (dp / b_target);
        CHECK(sup <= tol);
    }
}
