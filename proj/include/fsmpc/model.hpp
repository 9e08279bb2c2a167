#ifndef FSMPC_MODEL_HPP
#define FSMPC_MODEL_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fsmpc/errors.hpp"

namespace fsmpc {

/// Physical constants of the force- and torque-actuated unicycle plus the
/// sampling step of its Euler discretization.
struct UnicycleParams {
    double m = 10.0;      // mass [kg]
    double J = 20.0;      // inertia [kg m^2]
    double k = 5.0;       // linear damping [N s/m]
    double kappa = 15.0;  // angular damping [N m s]
    double h = 1.0;       // step size [s]

    /// Throws ConfigError unless all five constants are strictly positive.
    void validate() const;
};

/// Unicycle state (x, y, theta, v, omega). The heading is an unwrapped real;
/// the state space is all of R^5.
struct State5 {
    double x = 0.0;      // position [m]
    double y = 0.0;      // position [m]
    double theta = 0.0;  // heading [rad], not wrapped
    double v = 0.0;      // linear velocity [m/s]
    double omega = 0.0;  // angular velocity [rad/s]

    double norm() const { return std::sqrt(x * x + y * y + theta * theta + v * v + omega * omega); }
    bool finite() const;
};

/// Force/torque input pair.
struct Input2 {
    double force = 0.0;   // F [N]
    double torque = 0.0;  // T [N m]

    bool finite() const { return std::isfinite(force) && std::isfinite(torque); }
};

inline State5 operator+(const State5& a, const State5& b) {
    return {a.x + b.x, a.y + b.y, a.theta + b.theta, a.v + b.v, a.omega + b.omega};
}
inline State5 operator-(const State5& a, const State5& b) {
    return {a.x - b.x, a.y - b.y, a.theta - b.theta, a.v - b.v, a.omega - b.omega};
}
inline State5 operator*(double s, const State5& a) {
    return {s * a.x, s * a.y, s * a.theta, s * a.v, s * a.omega};
}

/// Largest per-component absolute difference.
double max_abs_diff(const State5& a, const State5& b);

/// An input-state trajectory: states.size() == inputs.size() + 1.
struct Trajectory {
    std::vector<State5> states;
    std::vector<Input2> inputs;

    std::size_t length() const { return inputs.size(); }
};

/// One step of the Euler-discretized unicycle. Throws NumericError if the
/// result is not finite.
State5 discrete_step(const State5& x, const Input2& u, const UnicycleParams& p);

/// Iterates discrete_step; states[0] == x0, states.size() == inputs.size() + 1.
Trajectory rollout_discrete(const State5& x0, std::span<const Input2> inputs, const UnicycleParams& p);

/// Right-hand side of the continuous-time unicycle dynamics.
State5 continuous_rhs(const State5& x, const Input2& u, const UnicycleParams& p);

/// Integrates the continuous dynamics over one sampling interval of length
/// p.h with the input held constant, using classical RK4 on `substeps`
/// equal sub-intervals. substeps must be >= 1.
State5 integrate_plant(const State5& x, const Input2& u, const UnicycleParams& p, int substeps);

/// Force/torque that drive the discrete model from (v_now, omega_now) to
/// exactly (v_next, omega_next) in one step.
Input2 invert_velocity_inputs(double v_now, double v_next, double omega_now, double omega_next,
                              const UnicycleParams& p);

/// True when every successor state equals discrete_step of its predecessor
/// within `tol` per component.
bool dynamics_consistent(const Trajectory& traj, const UnicycleParams& p, double tol = 1e-9);

}  // namespace fsmpc

#endif  // FSMPC_MODEL_HPP
