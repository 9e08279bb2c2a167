#ifndef FSMPC_STEERING_HPP
#define FSMPC_STEERING_HPP

#include <array>

#include "fsmpc/egdclf.hpp"
#include "fsmpc/model.hpp"

namespace fsmpc {

/// Turn angle and leg length of the lateral detour: the unicycle leaves the
/// x-axis at heading -theta_bar for a distance d, turns to +theta_bar and
/// drives -d back into the origin.
struct TurnGeometry {
    double theta_bar = 0.0;  // |theta_bar| <= pi/4
    double d = 0.0;          // leg length >= 0
};

/// Geometry rule for the detour. Condition 1 always uses the arctan rule
/// (saturating to pi/4 for |y1| > 1); condition 2 switches to the fixed
/// pi/4 rule whenever ||x0|| > 1.
TurnGeometry turn_geometry(double y1, Condition cond, double norm_x0);

/// Eight-phase trajectory that parks the unicycle at the origin within the
/// horizon: drift, turn to heading 0, drive x to 0, turn to -theta_bar,
/// drive d, turn to +theta_bar, drive -d, turn back to heading 0.
struct SteerPlan {
    Trajectory trajectory;               // N+1 states, N inputs
    std::array<int, 8> phase_times{};    // t1..t8 with t_i = 1 + (i-1) T
    int T = 0;                           // steps per phase, floor((N-1)/7)
    double theta_bar = 0.0;
    double d = 0.0;
    double x1 = 0.0, y1 = 0.0, theta1 = 0.0;  // state after the drift step
    double x_bar = 0.0, y_bar = 0.0;          // detour waypoint, y_bar = y1/2
};

/// Constructs the steering plan from x0. Requires spec.N >= 8 and
/// p.h == spec.h. The trajectory is consistent with the discrete model and
/// its states are exactly zero on [t8 : N].
SteerPlan plan_feasible(const State5& x0, const EgdclfSpec& spec, const UnicycleParams& p);

/// Same eight-phase geometry with the maneuver spread over the whole horizon
/// (longer drive phases, lower velocities). Serves as a smooth optimizer
/// seed; unlike plan_feasible it carries no descent guarantee, so callers
/// must check the constraint on the result.
Trajectory plan_stretched(const State5& x0, const EgdclfSpec& spec, const UnicycleParams& p);

/// Average-descent certificate of a steering plan, plus the per-phase
/// growth bound V(x(t)) <= c V(x0) (condition 1) or
/// V(x(t)) <= c max(||x0||^1/2, ||x0||) (condition 2) on [t1 : t8).
struct DescentCertificate {
    double lhs = 0.0;         // sum_i sigma_i(x0) V(x_i)
    double rhs = 0.0;         // (1 - alpha) V(x0)
    bool descent_ok = false;  // lhs <= rhs + 1e-9 max(1, rhs)
    double max_phase_v = 0.0;
    double phase_bound = 0.0;
    bool bound_ok = false;
    bool ok = false;          // both
};

DescentCertificate descent_certificate(const SteerPlan& plan, const EgdclfSpec& spec);

}  // namespace fsmpc

#endif  // FSMPC_STEERING_HPP
