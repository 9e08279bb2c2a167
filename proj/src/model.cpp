#include "fsmpc/model.hpp"

#include <algorithm>
#include <cmath>

namespace fsmpc {

void UnicycleParams::validate() const {
    if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("model.m must be > 0");
    if (!(J > 0.0) || !std::isfinite(J)) throw ConfigError("model.J must be > 0");
    if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("model.k must be > 0");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("model.kappa must be > 0");
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("model.h must be > 0");
}

bool State5::finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta) && std::isfinite(v) &&
           std::isfinite(omega);
}

double max_abs_diff(const State5& a, const State5& b) {
    double d = std::abs(a.x - b.x);
    d = std::max(d, std::abs(a.y - b.y));
    d = std::max(d, std::abs(a.theta - b.theta));
    d = std::max(d, std::abs(a.v - b.v));
    d = std::max(d, std::abs(a.omega - b.omega));
    return d;
}

State5 discrete_step(const State5& x, const Input2& u, const UnicycleParams& p) {
    State5 n;
    n.x = x.x + p.h * x.v * std::cos(x.theta);
    n.y = x.y + p.h * x.v * std::sin(x.theta);
    n.theta = x.theta + p.h * x.omega;
    n.v = x.v + (p.h / p.m) * (u.force - p.k * x.v);
    n.omega = x.omega + (p.h / p.J) * (u.torque - p.kappa * x.omega);
    if (!n.finite()) throw NumericError("discrete_step produced a non-finite state");
    return n;
}

Trajectory rollout_discrete(const State5& x0, std::span<const Input2> inputs, const UnicycleParams& p) {
    Trajectory traj;
    traj.states.reserve(inputs.size() + 1);
    traj.inputs.assign(inputs.begin(), inputs.end());
    traj.states.push_back(x0);
    for (const Input2& u : inputs) traj.states.push_back(discrete_step(traj.states.back(), u, p));
    return traj;
}

State5 continuous_rhs(const State5& x, const Input2& u, const UnicycleParams& p) {
    return {x.v * std::cos(x.theta), x.v * std::sin(x.theta), x.omega,
            (u.force - p.k * x.v) / p.m, (u.torque - p.kappa * x.omega) / p.J};
}

State5 integrate_plant(const State5& x, const Input2& u, const UnicycleParams& p, int substeps) {
    if (substeps < 1) throw ConfigError("integrate_plant: substeps must be >= 1");
    const double dt = p.h / static_cast<double>(substeps);
    State5 s = x;
    for (int i = 0; i < substeps; ++i) {
        const State5 k1 = continuous_rhs(s, u, p);
        const State5 k2 = continuous_rhs(s + (0.5 * dt) * k1, u, p);
        const State5 k3 = continuous_rhs(s + (0.5 * dt) * k2, u, p);
        const State5 k4 = continuous_rhs(s + dt * k3, u, p);
        s = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!s.finite()) throw NumericError("integrate_plant produced a non-finite state");
    return s;
}

Input2 invert_velocity_inputs(double v_now, double v_next, double omega_now, double omega_next,
                              const UnicycleParams& p) {
    return {p.k * v_now + (p.m / p.h) * (v_next - v_now),
            p.kappa * omega_now + (p.J / p.h) * (omega_next - omega_now)};
}

bool dynamics_consistent(const Trajectory& traj, const UnicycleParams& p, double tol) {
    if (traj.states.size() != traj.inputs.size() + 1) return false;
    for (std::size_t i = 0; i < traj.inputs.size(); ++i) {
        const State5 pred = discrete_step(traj.states[i], traj.inputs[i], p);
        if (max_abs_diff(pred, traj.states[i + 1]) > tol) return false;
    }
    return true;
}

}  // namespace fsmpc
