#ifndef FSMPC_OCP_HPP
#define FSMPC_OCP_HPP

#include <functional>
#include <span>
#include <vector>

#include "fsmpc/egdclf.hpp"
#include "fsmpc/model.hpp"
#include "fsmpc/steering.hpp"

namespace fsmpc {

/// Soft-constraint region {p : (p - center)^T Q (p - center) <= 1} in the
/// (x, y) plane, Q symmetric positive definite.
struct Ellipse {
    double px = 0.0, py = 0.0;              // center [m]
    double q11 = 1.0, q12 = 0.0, q22 = 1.0;  // shape matrix [1/m^2]

    void validate() const;
};

/// Stage-cost configuration: position + input quadratic cost plus penalty
/// terms rho * (l^2 + l) per obstacle, and an optional terminal term.
struct CostConfig {
    std::vector<Ellipse> obstacles;
    double rho = 0.0;              // obstacle penalty weight
    double terminal_weight = 0.0;  // scales ||x_N||^2

    void validate() const;
};

/// Penalty activation l = max(1 - (p - center)^T Q (p - center), 0):
/// zero outside the ellipse, 1 at its center.
double obstacle_activation(double x, double y, const Ellipse& e);

/// f0(x, u) = x^2 + y^2 + F^2 + T^2 + sum_i rho (l_i^2 + l_i).
double stage_cost(const State5& x, const Input2& u, const CostConfig& cfg);

/// terminal_weight * ||x||^2.
double terminal_cost(const State5& x, const CostConfig& cfg);

/// sum_{i=1..N} sigma_i(x0) V(states[i]) - (1 - alpha) V(x0); nonpositive
/// means the average-descent constraint holds. states must have length N+1.
double descent_residual(std::span<const State5> states, const State5& x0, const EgdclfSpec& spec);

/// Budget of the augmented-penalty single-shooting solver.
struct SolverOptions {
    int max_outer = 8;       // penalty/multiplier rounds; 0 disables the optimizer
    double mu0 = 10.0;       // initial penalty weight
    double growth = 10.0;    // penalty growth factor per round
    int max_inner = 200;     // gradient-descent iterations per round
    double fd_step = 1e-6;   // central-difference step, scaled by max(1, |u_j|)

    void validate() const;
};

enum class SolutionSource { optimizer, warm_start_fallback };

struct OcpSolution {
    std::vector<Input2> inputs;  // length N
    std::vector<State5> states;  // length N+1, rolled out from inputs
    double cost = 0.0;
    double descent_residual = 0.0;
    bool feasible = false;
    SolutionSource source = SolutionSource::warm_start_fallback;
};

/// Solves the horizon-N problem: minimize the accumulated stage cost subject
/// to the dynamics and the scalar average-descent constraint. The steering
/// plan provides a feasible warm start; `continuation` (typically the
/// shifted tail of the previous solution in a receding-horizon loop) seeds
/// the optimizer instead when it is feasible and cheaper. The best feasible
/// iterate is accepted only if it does not cost more than the warm start,
/// otherwise the warm start is returned. The returned solution is always
/// feasible.
OcpSolution solve_ocp(const State5& x0, const EgdclfSpec& spec, const CostConfig& cfg,
                      const UnicycleParams& p, const SolverOptions& opts = {},
                      std::span<const Input2> continuation = {});

/// Central finite-difference gradient with per-coordinate step
/// step * max(1, |u_j|). Exposed for the stencil self-consistency checks.
std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> u, double step);

}  // namespace fsmpc

#endif  // FSMPC_OCP_HPP
