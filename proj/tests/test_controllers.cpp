#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gridshape/controllers.hpp"
#include "gridshape/errors.hpp"
#include "testing_oracles.hpp"

using namespace gridshape;

namespace {

void check_coeffs(const Poly& got, const Poly& want, double tol = 1e-12) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(tol).scale(1.0));
}

} // namespace

TEST_CASE("virtual inertia law") {
    SUBCASE("zero constants give the zero controller") {
        const ControllerSpec spec = vi_controller(0.0, 0.0);
        CHECK(spec.tf.is_zero());
        CHECK(spec.tf_filtered.is_zero());
    }
    SUBCASE("pure inertial response") {
        const ControllerSpec spec = vi_controller(55.62, 0.0);
        check_coeffs(spec.tf.num(), {0.0, -55.62});
        check_coeffs(spec.tf.den(), {1.0});
    }
    SUBCASE("pure droop") {
        const ControllerSpec spec = vi_controller(0.0, 5.0);
        CHECK(tf_evaluate(spec.tf, 0.0).real() == doctest::Approx(-5.0));
        CHECK(tf_evaluate(spec.tf_filtered, 0.0).real() == doctest::Approx(-5.0));
    }
}

TEST_CASE("low-pass augmentation") {
    SUBCASE("proper laws pass through unchanged") {
        const RationalTransfer proper({1.0}, {1.0, 1.0});
        const RationalTransfer out = augment_lowpass(proper, 5.0);
        check_coeffs(out.num(), proper.num());
        check_coeffs(out.den(), proper.den());
    }
    SUBCASE("one pole is appended for the inertial term") {
        const RationalTransfer vi({0.0, -55.62}, {1.0});
        const RationalTransfer out = augment_lowpass(vi, 5.0);
        CHECK(out.relative_degree() == 0);
        const auto poles = tf_poles(out);
        REQUIRE(poles.size() == 1);
        CHECK(poles[0].real() == doctest::Approx(-2.0 * std::numbers::pi * 5.0));
        CHECK(tf_evaluate(out, 0.0).real() == doctest::Approx(0.0));
    }
    SUBCASE("shaping law needs exactly one pole") {
        const RationalTransfer law({-1.0, -2.0, -3.0}, {1.0, 1.0});
        const RationalTransfer out = augment_lowpass(law, 5.0);
        CHECK(out.num_degree() == 2);
        CHECK(out.den_degree() == 2);
    }
}

TEST_CASE("minimum overshoot-free inertia") {
    const AreaParameters gb = testing::gb_area();
    CHECK(vi_min_inertia(gb, 0.0, false) == doctest::Approx(55.62));
    CHECK(vi_min_inertia(gb, 0.0, true) == doctest::Approx(55.62));
    CHECK(vi_min_inertia(gb, 5.0, false) ==
          doctest::Approx(35.0 + 2.0 * std::sqrt(300.0) - 4.38).epsilon(1e-9));
    CHECK(vi_min_inertia(gb, 5.0, true) == doctest::Approx(65.62));
    AreaParameters heavy = gb;
    heavy.h_s = 100.0;  // plant already overdamped
    CHECK(vi_min_inertia(heavy, 0.0, false) == doctest::Approx(0.0));
}

TEST_CASE("virtual inertia tuning") {
    const AreaParameters gb = testing::gb_area();
    SUBCASE("GB security targets need no extra droop") {
        const ViTuning t = vi_tune({0.05625, -0.004, 0.01}, gb);
        CHECK(t.alpha_b_pu == doctest::Approx(0.0));
        CHECK(t.m_v_pu_s == doctest::Approx(55.62));
        CHECK(t.predicted_rocof_pu_s == doctest::Approx(0.05625 / 60.0));
    }
    SUBCASE("tighter steady-state target buys droop") {
        const ViTuning t = vi_tune({0.05625, -0.003, 0.01}, gb);
        CHECK(t.alpha_b_pu == doctest::Approx(3.75));
    }
    SUBCASE("loose target clamps droop at zero") {
        const ViTuning t = vi_tune({0.05625, -0.02, 0.01}, gb);
        CHECK(t.alpha_b_pu == doctest::Approx(0.0));
    }
}

TEST_CASE("overshoot-free boundary satisfies both quadratic conditions") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> hu(0.5, 6.0), tu(0.3, 3.0), au(3.0, 30.0),
        bu(0.0, 10.0);
    for (int i = 0; i < 20; ++i) {
        AreaParameters a = testing::gb_area();
        a.h_s = hu(rng);
        a.tau_t_s = tu(rng);
        a.alpha_g_pu = au(rng);
        const double alpha_b = bu(rng);
        const double mv = vi_min_inertia(a, alpha_b, false);
        auto conditions = [&](double m_v) {
            const double mt = 2.0 * a.h_s + m_v;
            const double c1 = mt * mt -
                              2.0 * a.tau_t_s * (alpha_b + 2.0 * a.alpha_g_pu) * mt +
                              a.tau_t_s * a.tau_t_s * alpha_b * alpha_b;
            const double c2 = mt - a.tau_t_s * alpha_b;
            return std::pair{c1, c2};
        };
        const auto [c1, c2] = conditions(mv);
        CHECK(c1 >= -1e-6 * (2.0 * a.h_s + mv) * (2.0 * a.h_s + mv));
        CHECK(c2 >= 0.0);
        if (mv > 0.0) {
            const auto [v1, v2] = conditions(0.99 * mv);
            CHECK(v1 < 0.0);
            (void)v2;
        }
    }
}

TEST_CASE("frequency shaping controller") {
    const AreaParameters gb = testing::gb_area();

    SUBCASE("case 1 coefficients match the dynamic droop law") {
        const ControllerSpec fs = fs_controller({2.0 * 2.19, 15.0, 1, 0, 0}, gb);
        const ControllerSpec droop = idroop_controller(gb, 0.0);
        check_coeffs(fs.tf.num(), droop.tf.num(), 1e-12);
        check_coeffs(fs.tf.den(), droop.tf.den(), 1e-12);
    }
    SUBCASE("closed loop equals the first-order target") {
        const ControllerSpec fs = fs_controller({2.0 * 2.19, 15.0, 1, 0, 0}, gb);
        const RationalTransfer g = open_loop_plant(gb, false, false);
        const RationalTransfer h = closed_loop(g, fs.tf, Poly{1.0, gb.tau_t_s});
        check_coeffs(h.num(), {1.0 / 4.38}, 1e-9);
        check_coeffs(h.den(), {15.0 / 4.38, 1.0}, 1e-9);
    }
    SUBCASE("relaxing below the plant is rejected") {
        CHECK_THROWS_AS(fs_controller({1.0, 15.0, 1, 0, 0}, gb), InvariantError);
        CHECK_THROWS_AS(fs_controller({4.38, 10.0, 1, 0, 0}, gb), InvariantError);
    }
}

TEST_CASE("shaping identity for random targets") {
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> au(0.0, 60.0), bu(0.0, 30.0);
    const AreaParameters gb = testing::gb_area();
    const RationalTransfer g = open_loop_plant(gb, false, false);
    for (int i = 0; i < 20; ++i) {
        const double a = 2.0 * gb.h_s + au(rng);
        const double b = gb.alpha_g_pu + bu(rng);
        const ControllerSpec fs = fs_controller({a, b, 4, 0, 0}, gb);
        const RationalTransfer h = closed_loop(g, fs.tf, Poly{1.0, gb.tau_t_s});
        REQUIRE(h.den_degree() == 1);
        CHECK(h.num()[0] == doctest::Approx(1.0 / a).epsilon(1e-9));
        CHECK(h.den()[0] == doctest::Approx(b / a).epsilon(1e-9));
        CHECK(h.den()[1] == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("shaping case selection") {
    const AreaParameters gb = testing::gb_area();
    SUBCASE("RoCoF bound active, droop sufficient") {
        const FsTuning t = fs_tune({0.05625, -0.004, 0.01}, gb);
        CHECK(t.a_pu_s == doctest::Approx(5.625));
        CHECK(t.b_pu == doctest::Approx(15.0));
        CHECK(t.case_id == 3);
        CHECK(t.predicted_rocof_pu_s == doctest::Approx(0.01));
        CHECK(t.predicted_domega_pu == doctest::Approx(-0.00375));
    }
    SUBCASE("plant sufficient on both axes") {
        const FsTuning t = fs_tune({0.05625, -0.004, 0.015}, gb);
        CHECK(t.a_pu_s == doctest::Approx(4.38));
        CHECK(t.b_pu == doctest::Approx(15.0));
        CHECK(t.case_id == 1);
    }
    SUBCASE("both bounds active") {
        const FsTuning t = fs_tune({0.05625, -0.003, 0.005}, gb);
        CHECK(t.a_pu_s == doctest::Approx(11.25));
        CHECK(t.b_pu == doctest::Approx(18.75));
        CHECK(t.case_id == 4);
    }
    SUBCASE("boundary targets resolve to the cheaper case") {
        const FsTuning t = fs_tune({0.05625, -0.05625 / 15.0, 0.05625 / 4.38}, gb);
        CHECK(t.case_id == 1);
    }
    SUBCASE("monotonicity in the targets") {
        std::mt19937 rng(71);
        std::uniform_real_distribution<double> ru(0.002, 0.05), du(0.001, 0.02);
        for (int i = 0; i < 40; ++i) {
            const double r1 = ru(rng), r2 = r1 * 0.7;
            const double d1 = du(rng), d2 = d1 * 0.7;
            const FsTuning loose = fs_tune({0.05625, -d1, r1}, gb);
            const FsTuning tight_r = fs_tune({0.05625, -d1, r2}, gb);
            const FsTuning tight_d = fs_tune({0.05625, -d2, r1}, gb);
            CHECK(tight_r.a_pu_s >= loose.a_pu_s);
            CHECK(tight_d.b_pu >= loose.b_pu);
        }
    }
}

TEST_CASE("metric limits of the synthesized loop") {
    const AreaParameters gb = testing::gb_area();
    const RationalTransfer g = open_loop_plant(gb, false, false);
    std::mt19937 rng(83);
    std::uniform_real_distribution<double> au(0.0, 40.0), bu(0.0, 20.0);
    for (int i = 0; i < 20; ++i) {
        const double a = 2.0 * gb.h_s + au(rng);
        const double b = gb.alpha_g_pu + bu(rng);
        const ControllerSpec fs = fs_controller({a, b, 4, 0, 0}, gb);
        const RationalTransfer h = closed_loop(g, fs.tf, Poly{1.0, gb.tau_t_s});
        CHECK(final_step_value(h) == doctest::Approx(1.0 / b).epsilon(1e-9));
        CHECK(initial_step_rate(h) == doctest::Approx(1.0 / a).epsilon(1e-9));
        // DC gain survives the properness filter exactly
        const RationalTransfer h_f = closed_loop(g, fs.tf_filtered);
        CHECK(final_step_value(h_f) == doctest::Approx(1.0 / b).epsilon(1e-9));
    }
    // with the filter in place the very first instants run on plant inertia
    const ControllerSpec fast = fs_controller({30.0, 15.0, 3, 0, 0}, gb);
    const RationalTransfer h_f = closed_loop(g, fast.tf_filtered);
    CHECK(initial_step_rate(h_f) == doctest::Approx(1.0 / (2.0 * gb.h_s)).epsilon(1e-9));
}

TEST_CASE("dynamic droop law") {
    const AreaParameters gb = testing::gb_area();
    SUBCASE("steady-state contribution is the extra droop") {
        CHECK(tf_evaluate(idroop_controller(gb, 0.0).tf, 0.0).real() == doctest::Approx(0.0));
        CHECK(tf_evaluate(idroop_controller(gb, 3.75).tf, 0.0).real() ==
              doctest::Approx(-3.75));
    }
    SUBCASE("equals the shaping law with only the droop bound active") {
        const ControllerSpec fs = fs_controller({2.0 * 2.19, 15.0 + 3.75, 2, 0, 0}, gb);
        const ControllerSpec droop = idroop_controller(gb, 3.75);
        check_coeffs(fs.tf.num(), droop.tf.num(), 1e-12);
        check_coeffs(fs.tf.den(), droop.tf.den(), 1e-12);
    }
}

TEST_CASE("fleet allocation") {
    std::vector<MachineParameters> fleet(3);
    for (auto& m : fleet) {
        m.alpha_g_pu = 5.0;
        m.governor = {FirstOrderGovernor{1.0}};
        m.rating_pu = 1.0;
    }
    fleet[0].h_s = 2.0;
    fleet[1].h_s = 2.0;
    fleet[2].h_s = 0.5;

    SUBCASE("system surplus allocates nothing") {
        // 2 sum H = 9 >= dp/rocof, sum alpha_g = 15 >= dp/|domega|
        const auto shares = mm_allocate({0.09, -0.009, 0.01},
                                        fleet, AllocationPolicy::Uniform);
        for (const auto& s : shares) {
            CHECK(s.m_pu_s == doctest::Approx(0.0));
            CHECK(s.alpha_b_pu == doctest::Approx(0.0));
        }
    }
    SUBCASE("equal ratings split the inertia deficit evenly") {
        // dp/rocof = 10 -> sum m = 1
        const auto shares = mm_allocate({0.1, -0.1 / 15.0, 0.01}, fleet,
                                        AllocationPolicy::ProportionalToRating);
        for (const auto& s : shares) CHECK(s.m_pu_s == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("totals reconstruct the fleet requirement for every policy") {
        const TuningTargets targets{0.12, -0.005, 0.008};
        const double want_m = 0.12 / 0.008 - 9.0;
        const double want_ab = 0.12 / 0.005 - 15.0;
        DeficitThresholds th{5.0, 10.0};
        for (auto policy : {AllocationPolicy::ProportionalToRating, AllocationPolicy::Uniform,
                            AllocationPolicy::DeficitOnly}) {
            const auto shares = mm_allocate(targets, fleet, policy, th);
            double sum_m = 0.0, sum_ab = 0.0;
            for (const auto& s : shares) {
                sum_m += s.m_pu_s;
                sum_ab += s.alpha_b_pu;
            }
            CHECK(sum_m == doctest::Approx(want_m).epsilon(1e-12));
            CHECK(sum_ab == doctest::Approx(want_ab).epsilon(1e-12));
        }
    }
    SUBCASE("permutation equivariance") {
        const TuningTargets targets{0.12, -0.005, 0.008};
        std::vector<MachineParameters> swapped{fleet[2], fleet[0], fleet[1]};
        const auto a = mm_allocate(targets, fleet, AllocationPolicy::ProportionalToRating);
        const auto b = mm_allocate(targets, swapped, AllocationPolicy::ProportionalToRating);
        CHECK(a[0].m_pu_s == doctest::Approx(b[1].m_pu_s));
        CHECK(a[2].m_pu_s == doctest::Approx(b[0].m_pu_s));
    }
    SUBCASE("deficit-only respects per-machine caps") {
        // only machine 3 sits below the 2H threshold of 4
        const auto shares = mm_allocate({0.1, -0.1 / 15.0, 0.01}, fleet,
                                        AllocationPolicy::DeficitOnly, {4.0, 0.0});
        CHECK(shares[0].m_pu_s == doctest::Approx(0.0));
        CHECK(shares[1].m_pu_s == doctest::Approx(0.0));
        CHECK(shares[2].m_pu_s == doctest::Approx(1.0));
    }
    SUBCASE("insufficient deficit capacity is infeasible") {
        CHECK_THROWS_AS(mm_allocate({0.5, -0.005, 0.01}, fleet,
                                    AllocationPolicy::DeficitOnly, {5.0, 5.0}),
                        InfeasiblePolicyError);
    }
}

TEST_CASE("per-machine storage law") {
    MachineParameters machine;
    machine.h_s = 2.19;
    machine.alpha_g_pu = 15.0;
    machine.governor = {FirstOrderGovernor{1.0}};

    SUBCASE("idle settings reproduce the dynamic droop generalization") {
        const ControllerSpec mm = mm_controller(machine, 0.0, 0.0, 0);
        const ControllerSpec droop = idroop_controller(testing::gb_area(), 0.0);
        check_coeffs(mm.tf.num(), droop.tf.num(), 1e-12);
        check_coeffs(mm.tf.den(), droop.tf.den(), 1e-12);
    }
    SUBCASE("reduced governor keeps the DC pin") {
        MachineParameters steam = machine;
        steam.governor = {Ieeeg1Governor{}};
        for (int r : {2, 3}) {
            const ControllerSpec mm = mm_controller(steam, 0.5, 1.25, r);
            CHECK(tf_evaluate(mm.tf, 0.0).real() == doctest::Approx(-1.25).epsilon(1e-12));
            CHECK(tf_evaluate(mm.tf_filtered, 0.0).real() ==
                  doctest::Approx(-1.25).epsilon(1e-12));
        }
    }
    SUBCASE("pure virtual inertia member") {
        MachineParameters bare = machine;
        bare.alpha_g_pu = 0.0;
        const ControllerSpec mm = mm_controller(bare, 1.0, 0.0, 0);
        check_coeffs(mm.tf.num(), {0.0, -1.0}, 1e-12);
        CHECK(mm.tf_filtered.relative_degree() == 0);
    }
}
