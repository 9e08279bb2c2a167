#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fsmpc/egdclf.hpp"

using namespace fsmpc;

TEST_CASE("exponent transition hits the prescribed plateaus") {
    CHECK(phi_transition(0.0) == 2.0);
    CHECK(phi_transition(0.5) == 2.0);
    CHECK(phi_transition(1.0) == 2.0);
    CHECK(phi_transition(2.0) == 4.0);
    CHECK(phi_transition(3.0) == 4.0);
    CHECK_THROWS_AS(phi_transition(-0.1), NumericError);
}

TEST_CASE("quintic bridge endpoints evaluate exactly") {
    // 12 - 90 + 260 - 360 + 240 - 60 = 2 and the s=2 counterpart is 4
    CHECK(phi_transition(1.0 + 1e-300) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(phi_transition(2.0 - 1e-12) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("bridge is monotone with flat ends") {
    double prev = 2.0;
    for (int i = 0; i <= 10000; ++i) {
        const double s = 1.0 + i / 10000.0;
        const double value = phi_transition(s);
        CHECK(value >= prev - 1e-12);
        CHECK(value >= 2.0);
        CHECK(value <= 4.0);
        prev = value;
    }
    const double d1 = (phi_transition(1.0 + 1e-7) - 2.0) / 1e-7;
    const double d2 = (4.0 - phi_transition(2.0 - 1e-7)) / 1e-7;
    CHECK(std::abs(d1) <= 1e-6);
    CHECK(std::abs(d2) <= 1e-6);
}

TEST_CASE("custom bridges are validated") {
    CHECK_NOTHROW(PhiTransition::custom([](double s) { return 2.0 + 2.0 * (s - 1.0) * (s - 1.0); }));
    CHECK_THROWS_AS(PhiTransition::custom([](double s) { return 6.0 - 2.0 * s; }), ConfigError);
    CHECK_THROWS_AS(PhiTransition::custom([](double) { return 3.0; }), ConfigError);
    const PhiTransition quad =
        PhiTransition::custom([](double s) { return 2.0 + 2.0 * (s - 1.0) * (s - 1.0); });
    CHECK(quad(1.5) == doctest::Approx(2.5));
    CHECK(quad(0.2) == 2.0);
    CHECK(quad(5.0) == 4.0);
}

TEST_CASE("v1 value") {
    CHECK(v1_value({}) == 0.0);
    CHECK(v1_value({0, 1, 0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v1_value({1, 0, 1, 1, 1}) == doctest::Approx(std::pow(4.0, 0.25)).epsilon(1e-15));
    // |y| = 0.5 uses exponent 2
    CHECK(v1_value({0, 0.5, 0, 0, 0}) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("v2 value") {
    CHECK(v2_value({}) == 0.0);
    CHECK(v2_value({3, 4, 0, 0, 0}) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(v2_value({1, 1, 1, 1, 1}) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
}

TEST_CASE("positive definiteness and scaling of the value functions") {
    const State5 x{0.1, -0.2, 0.3, -0.4, 0.5};
    CHECK(v1_value(x) > 0.0);
    CHECK(v2_value(x) > 0.0);
    CHECK(v2_value(3.0 * x) == doctest::Approx(3.0 * v2_value(x)).epsilon(1e-12));
    CHECK(v2_value(-1.0 * x) == doctest::Approx(v2_value(x)).epsilon(1e-15));
}

TEST_CASE("steering bound constants") {
    // max(32*19, 152)^(1/4) = 608^(1/4)
    CHECK(c_const(Condition::cond1, 12, 1.0) == doctest::Approx(std::pow(608.0, 0.25)).epsilon(1e-15));
    CHECK(c_const(Condition::cond1, 12, 1.0) == doctest::Approx(4.9659).epsilon(1e-4));
    // 2 sqrt(2) sqrt(9/4 + 4) = 5 sqrt(2)
    CHECK(c_const(Condition::cond2, 12, 1.0) == doctest::Approx(5.0 * std::sqrt(2.0)).epsilon(1e-15));
    // N = 20 flips both saturation branches: max(7, 12) and max(1, 12/7)
    CHECK(c_const(Condition::cond1, 20, 1.0) ==
          doctest::Approx(std::pow(32.0 * (3.0 + 38416.0 / 20736.0), 0.25)).epsilon(1e-15));
    CHECK(c_const(Condition::cond1, 20, 1.0) == doctest::Approx(3.53006).epsilon(1e-5));
    CHECK(c_const(Condition::cond2, 20, 1.0) ==
          doctest::Approx(2.0 * std::sqrt(2.0) * std::sqrt(2.25 + 4.0 * 49.0 / 144.0)).epsilon(1e-15));
    CHECK(c_const(Condition::cond2, 20, 1.0) == doctest::Approx(5.37480).epsilon(1e-5));
    // monotone decrease towards 3 sqrt(2)
    const double large = c_const(Condition::cond2, 10000000, 1.0);
    CHECK(c_const(Condition::cond2, 100, 1.0) > c_const(Condition::cond2, 1000, 1.0));
    CHECK(large == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-6));
    CHECK_THROWS_AS(c_const(Condition::cond1, 7, 1.0), ConfigError);
    CHECK_THROWS_AS(c_const(Condition::cond2, 12, 0.0), ConfigError);
}

TEST_CASE("spec validation") {
    CHECK_NOTHROW(EgdclfSpec::default_condition1().validate());
    CHECK_NOTHROW(EgdclfSpec::default_condition2().validate());
    CHECK_THROWS_AS(EgdclfSpec::condition2(7, 0.3, 1.0), ConfigError);
    CHECK_THROWS_AS(EgdclfSpec::condition2(12, 1.2, 1.0), ConfigError);
    CHECK_THROWS_AS(EgdclfSpec::condition2(12, 0.3, -1.0), ConfigError);
    // head weight above (1 - alpha) / ((N-1) c) ~ 0.0128
    CHECK_THROWS_AS(EgdclfSpec::condition1(12, 0.3, 1.0, std::vector<double>(11, 0.02)), ConfigError);
    CHECK_NOTHROW(EgdclfSpec::condition1(12, 0.3, 1.0, std::vector<double>(11, 0.0128)));
}

TEST_CASE("constant weights of the default condition-1 spec") {
    const EgdclfSpec spec = EgdclfSpec::default_condition1();
    const std::vector<double> w = spec.weights({5, -3, 1, 0, 2});
    REQUIRE(w.size() == 12);
    for (int i = 0; i < 11; ++i) CHECK(w[i] == 1e-3);
    CHECK(w[11] == doctest::Approx(0.989).epsilon(1e-15));
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    // the head bound from the closed-form constant admits 1e-3
    CHECK(1e-3 <= (1.0 - 0.3) / (11.0 * spec.c_value()));
    CHECK((1.0 - 0.3) / (11.0 * spec.c_value()) == doctest::Approx(0.01281).epsilon(1e-3));
}

TEST_CASE("state-dependent weights of the condition-2 spec") {
    const EgdclfSpec spec = EgdclfSpec::default_condition2();
    SUBCASE("inside the unit ball the weights shrink with sqrt of the norm") {
        const State5 x{0.25, 0, 0, 0, 0};
        const std::vector<double> w = spec.weights(x);
        const double expected = 0.7 / (11.0 * 5.0 * std::sqrt(2.0)) * 0.5;
        REQUIRE(w.size() == 12);
        for (int i = 0; i < 11; ++i) CHECK(w[i] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(expected == doctest::Approx(0.0045).epsilon(1e-2));
        CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(spec.min_weight(x) == doctest::Approx(expected).epsilon(1e-15));
    }
    SUBCASE("outside the unit ball the saturated branch applies") {
        const double expected = 0.7 / (11.0 * 5.0 * std::sqrt(2.0));
        for (const State5& x : {State5{10, 0, 0, 0, 0}, State5{1, 0, 0, 0, 0}, State5{}}) {
            const std::vector<double> w = spec.weights(x);
            for (int i = 0; i < 11; ++i) CHECK(w[i] == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    SUBCASE("weights are positive and sum to one") {
        for (double r : {1e-6, 1e-3, 0.5, 1.0, 7.0, 500.0}) {
            const std::vector<double> w = spec.weights({r, 0, 0, 0, 0});
            double sum = 0.0;
            for (double wi : w) {
                CHECK(wi > 0.0);
                sum += wi;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("comparison functions and their constants") {
    const ComparisonFns cf1 = EgdclfSpec::default_condition1().comparison_fns();
    CHECK(cf1.chi1.scale == doctest::Approx(0.05));
    CHECK(cf1.chi2.scale == doctest::Approx(2.0));
    CHECK(cf1.varphi.scale == doctest::Approx(1000.0).epsilon(1e-12));  // 1 / min sigma
    CHECK(cf1.lambda_tilde == 1.0);
    CHECK(cf1.mu_tilde == 1.0);

    const ComparisonFns cf2 = EgdclfSpec::default_condition2().comparison_fns();
    CHECK(cf2.chi1.scale == 1.0);
    CHECK(cf2.chi2.scale == 1.0);
    CHECK(cf2.varphi.scale == doctest::Approx(11.0 * 5.0 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(cf2.lambda_tilde == doctest::Approx(std::exp(0.15)).epsilon(1e-15));
    CHECK(cf2.mu_tilde == 0.5);

    CHECK(cf1.chi1(0.0) == 0.0);
    CHECK(cf1.chi2(0.0) == 0.0);
    CHECK(cf1.varphi(0.0) == 0.0);
    CHECK(cf2.varphi(0.25) == doctest::Approx(cf2.varphi.scale * 0.5));  // sqrt branch
    CHECK(cf2.varphi(4.0) == doctest::Approx(cf2.varphi.scale * 4.0));   // linear branch
}

TEST_CASE("sandwich property on a hand point") {
    const EgdclfSpec spec = EgdclfSpec::default_condition1();
    const ComparisonFns cf = spec.comparison_fns();
    const State5 x{0, 0.5, 0, 0, 0};
    const double n = x.norm();
    CHECK(cf.chi1(n) == doctest::Approx(0.025));
    CHECK(spec.v_value(x) == doctest::Approx(std::sqrt(0.5)));
    CHECK(cf.chi2(n) == doctest::Approx(2.0 * std::sqrt(0.5)));
    CHECK(cf.chi1(n) <= spec.v_value(x));
    CHECK(spec.v_value(x) <= cf.chi2(n));
}

TEST_CASE("weight-compatibility equality case of condition 2") {
    const EgdclfSpec spec = EgdclfSpec::default_condition2();
    const ComparisonFns cf = spec.comparison_fns();
    const State5 x{0.25, 0, 0, 0, 0};
    const double v = spec.v_value(x);
    const double lhs = (1.0 - spec.alpha) * v;
    const double rhs = cf.varphi(v) * spec.min_weight(x);
    CHECK(lhs == doctest::Approx(0.175).epsilon(1e-15));
    CHECK(rhs == doctest::Approx(0.175).epsilon(1e-12));
}

TEST_CASE("sampled property checks find no violations") {
    SampleOptions opts;
    opts.count = 5000;
    opts.seed = 42;
    for (const EgdclfSpec& spec : {EgdclfSpec::default_condition1(), EgdclfSpec::default_condition2()}) {
        const PropertyReport p1 = check_p1(spec, opts);
        CHECK(p1.pass());
        CHECK(p1.checked == 5000);
        const PropertyReport p3 = check_p3(spec, opts);
        CHECK(p3.pass());
    }
}

TEST_CASE("sampled checks are reproducible for a fixed seed") {
    SampleOptions opts;
    opts.count = 2000;
    opts.seed = 9;
    const PropertyReport a = check_p1(EgdclfSpec::default_condition2(), opts);
    const PropertyReport b = check_p1(EgdclfSpec::default_condition2(), opts);
    CHECK(a.worst_excess == b.worst_excess);
    CHECK(a.checked == b.checked);
}

TEST_CASE("composition-growth property holds on the grid") {
    P4GridOptions grid;
    grid.nr = 60;
    grid.ntau = 60;
    const P4Report p4a = check_p4(EgdclfSpec::default_condition1(), grid);
    CHECK(p4a.pass());
    CHECK(p4a.max_rel_gap <= 1e-12);  // lambda_tilde = mu_tilde = 1 makes it an identity
    const P4Report p4b = check_p4(EgdclfSpec::default_condition2(), grid);
    CHECK(p4b.pass());
    CHECK(p4b.checked == 3600);
}
