#include "fsmpc/steering.hpp"

#include <cmath>
#include <numbers>

namespace fsmpc {
namespace {

double sign(double a) { return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0); }

TurnGeometry arctan_rule(double y1) {
    const double a = std::abs(y1);
    if (a <= 1.0)
        return {sign(y1) * std::atan(std::sqrt(a)), 0.5 * std::sqrt(a) * std::sqrt(1.0 + a)};
    return {sign(y1) * std::numbers::pi / 4.0, a / std::sqrt(2.0)};
}

TurnGeometry quarter_rule(double y1) {
    return {sign(y1) * std::numbers::pi / 4.0, std::abs(y1) / std::sqrt(2.0)};
}

}  // namespace

TurnGeometry turn_geometry(double y1, Condition cond, double norm_x0) {
    if (cond == Condition::cond2 && norm_x0 > 1.0) return quarter_rule(y1);
    return arctan_rule(y1);
}

namespace {

/// Shared eight-phase table with per-phase durations. phase_starts[i] is the
/// first time index of phase i+1; phase_starts[7] begins the terminal rest.
SteerPlan build_plan(const State5& x0, const EgdclfSpec& spec, const UnicycleParams& p,
                     const std::array<int, 7>& durations) {
    SteerPlan plan;
    const int N = spec.N;
    const double h = spec.h;
    plan.phase_times[0] = 1;
    for (int i = 0; i < 7; ++i) plan.phase_times[i + 1] = plan.phase_times[i] + durations[i];

    plan.x1 = x0.x + h * x0.v * std::cos(x0.theta);
    plan.y1 = x0.y + h * x0.v * std::sin(x0.theta);
    plan.theta1 = x0.theta + h * x0.omega;

    const TurnGeometry geo = turn_geometry(plan.y1, spec.condition, x0.norm());
    plan.theta_bar = geo.theta_bar;
    plan.d = geo.d;
    plan.x_bar = plan.d * std::cos(-plan.theta_bar);
    plan.y_bar = 0.5 * plan.y1;

    auto& states = plan.trajectory.states;
    states.resize(static_cast<std::size_t>(N) + 1);
    states[0] = x0;
    for (int t = 1; t <= N; ++t) {
        State5 s;  // zero; phases t >= t8 keep it
        if (t < plan.phase_times[1]) {
            const double T = durations[0];
            const double f = static_cast<double>(t - plan.phase_times[0]) / T;
            s = {plan.x1, plan.y1, plan.theta1 + f * (-plan.theta1), 0.0, -plan.theta1 / (h * T)};
        } else if (t < plan.phase_times[2]) {
            const double T = durations[1];
            const double f = static_cast<double>(t - plan.phase_times[1]) / T;
            s = {plan.x1 + f * (-plan.x1), plan.y1, 0.0, -plan.x1 / (h * T), 0.0};
        } else if (t < plan.phase_times[3]) {
            const double T = durations[2];
            const double f = static_cast<double>(t - plan.phase_times[2]) / T;
            s = {0.0, plan.y1, f * (-plan.theta_bar), 0.0, -plan.theta_bar / (h * T)};
        } else if (t < plan.phase_times[4]) {
            const double T = durations[3];
            const double f = static_cast<double>(t - plan.phase_times[3]) / T;
            s = {f * plan.d * std::cos(-plan.theta_bar), plan.y1 + f * plan.d * std::sin(-plan.theta_bar),
                 -plan.theta_bar, plan.d / (h * T), 0.0};
        } else if (t < plan.phase_times[5]) {
            const double T = durations[4];
            const double f = static_cast<double>(t - plan.phase_times[4]) / T;
            s = {plan.x_bar, plan.y_bar, -plan.theta_bar + f * 2.0 * plan.theta_bar, 0.0,
                 2.0 * plan.theta_bar / (h * T)};
        } else if (t < plan.phase_times[6]) {
            const double T = durations[5];
            const double f = static_cast<double>(t - plan.phase_times[5]) / T;
            s = {plan.x_bar + f * (-plan.d) * std::cos(plan.theta_bar),
                 plan.y_bar + f * (-plan.d) * std::sin(plan.theta_bar), plan.theta_bar,
                 -plan.d / (h * T), 0.0};
        } else if (t < plan.phase_times[7]) {
            const double T = durations[6];
            const double f = static_cast<double>(t - plan.phase_times[6]) / T;
            s = {0.0, 0.0, plan.theta_bar + f * (-plan.theta_bar), 0.0, -plan.theta_bar / (h * T)};
        }
        states[static_cast<std::size_t>(t)] = s;
    }

    auto& inputs = plan.trajectory.inputs;
    inputs.resize(static_cast<std::size_t>(N));
    for (int t = 0; t < N; ++t)
        inputs[static_cast<std::size_t>(t)] =
            invert_velocity_inputs(states[static_cast<std::size_t>(t)].v,
                                   states[static_cast<std::size_t>(t) + 1].v,
                                   states[static_cast<std::size_t>(t)].omega,
                                   states[static_cast<std::size_t>(t) + 1].omega, p);
    return plan;
}

void check_plan_inputs(const State5& x0, const EgdclfSpec& spec, const UnicycleParams& p) {
    spec.validate();
    p.validate();
    if (p.h != spec.h) throw ConfigError("steering: model step size must match spec.h");
    if (!x0.finite()) throw NumericError("steering: non-finite initial state");
}

}  // namespace

SteerPlan plan_feasible(const State5& x0, const EgdclfSpec& spec, const UnicycleParams& p) {
    check_plan_inputs(x0, spec, p);
    const int T = (spec.N - 1) / 7;
    SteerPlan plan = build_plan(x0, spec, p, {T, T, T, T, T, T, T});
    plan.T = T;
    return plan;
}

Trajectory plan_stretched(const State5& x0, const EgdclfSpec& spec, const UnicycleParams& p) {
    check_plan_inputs(x0, spec, p);
    const int base = (spec.N - 1) / 7;
    std::array<int, 7> durations{base, base, base, base, base, base, base};
    int extra = (spec.N - 1) - 7 * base;
    // hand the slack to the drive phases first; they gain the most from
    // lower velocities
    for (int idx : {1, 3, 5, 0, 2, 4, 6}) {
        if (extra == 0) break;
        ++durations[static_cast<std::size_t>(idx)];
        --extra;
    }
    return build_plan(x0, spec, p, durations).trajectory;
}

DescentCertificate descent_certificate(const SteerPlan& plan, const EgdclfSpec& spec) {
    DescentCertificate cert;
    const State5& x0 = plan.trajectory.states.front();
    const std::vector<double> sigma = spec.weights(x0);
    const double v0 = spec.v_value(x0);

    cert.rhs = (1.0 - spec.alpha) * v0;
    for (int i = 1; i <= spec.N; ++i)
        cert.lhs += sigma[static_cast<std::size_t>(i - 1)] *
                    spec.v_value(plan.trajectory.states[static_cast<std::size_t>(i)]);
    cert.descent_ok = cert.lhs <= cert.rhs + 1e-9 * std::max(1.0, cert.rhs);

    const double n0 = x0.norm();
    cert.phase_bound = spec.condition == Condition::cond1
                           ? spec.c_value() * v0
                           : spec.c_value() * std::max(std::sqrt(n0), n0);
    for (int t = plan.phase_times[0]; t < plan.phase_times[7]; ++t)
        cert.max_phase_v =
            std::max(cert.max_phase_v, spec.v_value(plan.trajectory.states[static_cast<std::size_t>(t)]));
    cert.bound_ok = cert.max_phase_v <= cert.phase_bound * (1.0 + 1e-9);
    cert.ok = cert.descent_ok && cert.bound_ok;
    return cert;
}

}  // namespace fsmpc
