#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fsmpc/model.hpp"

using namespace fsmpc;

namespace {

const UnicycleParams kParams;  // m=10, J=20, k=5, kappa=15, h=1

State5 random_state5(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> uni(-scale, scale);
    return {uni(rng), uni(rng), uni(rng), uni(rng), uni(rng)};
}

}  // namespace

TEST_CASE("discrete_step matches hand-evaluated updates") {
    const State5 a = discrete_step({0, 0, 0, 1, 0}, {0, 0}, kParams);
    CHECK(a.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.y == doctest::Approx(0.0));
    CHECK(a.theta == doctest::Approx(0.0));
    CHECK(a.v == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(a.omega == doctest::Approx(0.0));

    const State5 b = discrete_step({0, 0, std::numbers::pi / 2, 2, 0}, {0, 0}, kParams);
    CHECK(b.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(b.y == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(b.theta == doctest::Approx(std::numbers::pi / 2));
    CHECK(b.v == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.omega == doctest::Approx(0.0));
}

TEST_CASE("origin is an equilibrium for any valid parameters") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.1, 50.0);
    for (int i = 0; i < 100; ++i) {
        const UnicycleParams p{uni(rng), uni(rng), uni(rng), uni(rng), uni(rng)};
        const State5 next = discrete_step({}, {}, p);
        CHECK(max_abs_diff(next, {}) == 0.0);
        const State5 rhs = continuous_rhs({}, {}, p);
        CHECK(max_abs_diff(rhs, {}) == 0.0);
    }
}

TEST_CASE("discrete_step reports overflow as a numeric error") {
    State5 huge;
    huge.x = 1e308;
    huge.v = 1e308;
    CHECK_THROWS_AS(discrete_step(huge, {}, kParams), NumericError);
}

TEST_CASE("rollout propagates numeric-domain errors") {
    State5 x0;
    x0.x = 1.7e308;
    x0.v = 1e308;  // position update overflows on the first step
    const std::vector<Input2> inputs(3);
    CHECK_THROWS_AS(rollout_discrete(x0, inputs, kParams), NumericError);
}

TEST_CASE("rollout_discrete iterates the map") {
    SUBCASE("equilibrium stays put") {
        const std::vector<Input2> inputs(5);
        const Trajectory traj = rollout_discrete({}, inputs, kParams);
        REQUIRE(traj.states.size() == 6);
        for (const State5& s : traj.states) CHECK(max_abs_diff(s, {}) == 0.0);
    }
    SUBCASE("two coasting steps") {
        const std::vector<Input2> inputs(2);
        const Trajectory traj = rollout_discrete({0, 0, 0, 1, 0}, inputs, kParams);
        REQUIRE(traj.states.size() == 3);
        CHECK(traj.states[2].x == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(traj.states[2].y == doctest::Approx(0.0));
        CHECK(traj.states[2].v == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(dynamics_consistent(traj, kParams));
    }
    SUBCASE("empty input sequence") {
        const Trajectory traj = rollout_discrete({1, 2, 3, 4, 5}, {}, kParams);
        REQUIRE(traj.states.size() == 1);
        CHECK(traj.inputs.empty());
        CHECK(max_abs_diff(traj.states[0], {1, 2, 3, 4, 5}) == 0.0);
    }
}

TEST_CASE("continuous_rhs matches the stated vector field") {
    const State5 a = continuous_rhs({0, 0, 0, 1, 1}, {0, 0}, kParams);
    CHECK(a.x == doctest::Approx(1.0));
    CHECK(a.y == doctest::Approx(0.0));
    CHECK(a.theta == doctest::Approx(1.0));
    CHECK(a.v == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(a.omega == doctest::Approx(-0.75).epsilon(1e-15));

    const State5 b = continuous_rhs({}, {10, 20}, kParams);
    CHECK(b.v == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.omega == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("integrate_plant reproduces the constant-velocity closed form") {
    // F = k v cancels the damping: straight line at v = 1
    const State5 end = integrate_plant({0, 0, 0, 1, 0}, {5.0, 0.0}, kParams, 100);
    CHECK(std::abs(end.x - 1.0) <= 1e-6);
    CHECK(std::abs(end.v - 1.0) <= 1e-9);
    CHECK(end.y == doctest::Approx(0.0));
}

TEST_CASE("integrate_plant has fourth-order step refinement") {
    const State5 x0{0.3, -0.2, 0.4, 1.2, 0.8};
    const Input2 u{2.0, -1.5};
    const State5 ref = integrate_plant(x0, u, kParams, 320);
    const double err10 = max_abs_diff(integrate_plant(x0, u, kParams, 10), ref);
    const double err20 = max_abs_diff(integrate_plant(x0, u, kParams, 20), ref);
    REQUIRE(err10 > 1e-13);  // refinement must be resolvable above rounding noise
    CHECK(err10 / err20 >= 12.0);
}

TEST_CASE("integrate_plant rejects a non-positive substep count") {
    CHECK_THROWS_AS(integrate_plant({}, {}, kParams, 0), ConfigError);
}

TEST_CASE("invert_velocity_inputs") {
    SUBCASE("holding the equilibrium needs no effort") {
        const Input2 u = invert_velocity_inputs(0, 0, 0, 0, kParams);
        CHECK(u.force == 0.0);
        CHECK(u.torque == 0.0);
    }
    SUBCASE("hand-computed acceleration force") {
        const Input2 u = invert_velocity_inputs(0, 1, 0, 0, kParams);
        CHECK(u.force == doctest::Approx(10.0).epsilon(1e-15));
        CHECK(u.torque == 0.0);
    }
    SUBCASE("round-trips through discrete_step") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> uni(-20.0, 20.0);
        std::uniform_real_distribution<double> inertia(0.5, 20.0);
        std::uniform_real_distribution<double> damping(0.1, 10.0);
        std::uniform_real_distribution<double> step(0.25, 2.0);
        for (int i = 0; i < 1000; ++i) {
            const UnicycleParams p{inertia(rng), inertia(rng), damping(rng), damping(rng), step(rng)};
            State5 x = random_state5(rng, 10.0);
            const double v_next = uni(rng);
            const double w_next = uni(rng);
            const Input2 u = invert_velocity_inputs(x.v, v_next, x.omega, w_next, p);
            const State5 next = discrete_step(x, u, p);
            CHECK(std::abs(next.v - v_next) <= 1e-12 * std::max(1.0, std::abs(v_next)));
            CHECK(std::abs(next.omega - w_next) <= 1e-12 * std::max(1.0, std::abs(w_next)));
        }
    }
}

TEST_CASE("rollouts are translation invariant in the position components") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uni(-5.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Input2> inputs(8);
        for (Input2& u : inputs) u = {uni(rng), uni(rng)};
        const State5 x0 = random_state5(rng, 3.0);
        State5 shifted = x0;
        const double dx = uni(rng), dy = uni(rng);
        shifted.x += dx;
        shifted.y += dy;
        const Trajectory a = rollout_discrete(x0, inputs, kParams);
        const Trajectory b = rollout_discrete(shifted, inputs, kParams);
        for (std::size_t t = 0; t < a.states.size(); ++t) {
            CHECK(b.states[t].x - a.states[t].x == doctest::Approx(dx).epsilon(1e-12));
            CHECK(b.states[t].y - a.states[t].y == doctest::Approx(dy).epsilon(1e-12));
            CHECK(b.states[t].theta == a.states[t].theta);
            CHECK(b.states[t].v == a.states[t].v);
            CHECK(b.states[t].omega == a.states[t].omega);
        }
    }
}

TEST_CASE("parameter validation") {
    UnicycleParams p;
    p.m = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.h = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    CHECK_NOTHROW(UnicycleParams{}.validate());
}
