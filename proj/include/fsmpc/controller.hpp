#ifndef FSMPC_CONTROLLER_HPP
#define FSMPC_CONTROLLER_HPP

#include <span>
#include <vector>

#include "fsmpc/egdclf.hpp"
#include "fsmpc/model.hpp"
#include "fsmpc/ocp.hpp"

namespace fsmpc {

enum class PlantKind { discrete, continuous };

/// Plant driven by the controller. The prediction model is always the
/// discrete map; a continuous plant integrates the continuous dynamics with
/// RK4 under zero-order hold of the applied input.
struct PlantModel {
    PlantKind kind = PlantKind::discrete;
    int substeps = 20;  // RK4 sub-intervals per step (continuous plant only)
};

struct MpcOptions {
    SolverOptions solver;
    double stop_norm = 1e-3;  // exit once ||x|| falls below this (after >= 1 iteration)
};

/// Record of one closed-loop run. iteration_marks[k] is the time of the
/// k-th solve; flexible_steps[k] the chosen step; applied_steps[k] how many
/// of those inputs were implemented (smaller only when the horizon cap
/// truncates the final block).
struct ClosedLoopLog {
    std::vector<State5> states;
    std::vector<Input2> inputs;
    std::vector<double> v_values;  // V(x(t)) at every implemented time
    std::vector<int> iteration_marks;
    std::vector<int> flexible_steps;
    std::vector<int> applied_steps;
    std::vector<SolutionSource> solver_sources;
};

/// Smallest index l in [1:N] with V(x_l) <= (1-alpha) v0 + 1e-9 max(1, v0).
/// v_values holds V(x_1)..V(x_N) of a feasible solution; throws NumericError
/// if no index qualifies (impossible when the weight sum is >= 1).
int select_flexible_step(std::span<const double> v_values, double v0, double alpha);

/// Flexible-step MPC loop: measure, solve, pick the flexible step, apply
/// that many inputs to the plant, repeat. Runs for at most horizon_steps
/// implemented steps; at least one iteration is executed.
ClosedLoopLog mpc_run(const State5& x0, const EgdclfSpec& spec, const CostConfig& cfg,
                      const UnicycleParams& p, const PlantModel& plant, int horizon_steps,
                      const MpcOptions& opts = {});

}  // namespace fsmpc

#endif  // FSMPC_CONTROLLER_HPP
