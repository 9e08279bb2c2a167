#include "fsmpc/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fsmpc {

int select_flexible_step(std::span<const double> v_values, double v0, double alpha) {
    if (v_values.empty()) throw std::invalid_argument("select_flexible_step: empty value sequence");
    const double threshold = (1.0 - alpha) * v0 + 1e-9 * std::max(1.0, v0);
    for (std::size_t i = 0; i < v_values.size(); ++i)
        if (v_values[i] <= threshold) return static_cast<int>(i) + 1;
    throw NumericError("select_flexible_step: no step reaches the contraction threshold");
}

ClosedLoopLog mpc_run(const State5& x0, const EgdclfSpec& spec, const CostConfig& cfg,
                      const UnicycleParams& p, const PlantModel& plant, int horizon_steps,
                      const MpcOptions& opts) {
    if (horizon_steps < 1) throw ConfigError("mpc_run: horizon_steps must be >= 1");
    if (plant.kind == PlantKind::continuous && plant.substeps < 1)
        throw ConfigError("mpc_run: plant.substeps must be >= 1");
    spec.validate();
    p.validate();
    cfg.validate();

    ClosedLoopLog log;
    log.states.push_back(x0);
    log.v_values.push_back(spec.v_value(x0));

    std::vector<double> predicted_v(static_cast<std::size_t>(spec.N));
    std::vector<Input2> continuation;  // shifted tail of the previous solution
    int t = 0;
    while (t < horizon_steps) {
        const State5 x = log.states.back();
        if (t > 0 && x.norm() <= opts.stop_norm) break;

        const OcpSolution sol = solve_ocp(x, spec, cfg, p, opts.solver, continuation);
        for (int i = 1; i <= spec.N; ++i)
            predicted_v[static_cast<std::size_t>(i - 1)] =
                spec.v_value(sol.states[static_cast<std::size_t>(i)]);
        const int ell = select_flexible_step(predicted_v, spec.v_value(x), spec.alpha);

        log.iteration_marks.push_back(t);
        log.flexible_steps.push_back(ell);
        log.solver_sources.push_back(sol.source);

        int applied = 0;
        for (int j = 0; j < ell && t < horizon_steps; ++j) {
            const Input2 u = sol.inputs[static_cast<std::size_t>(j)];
            const State5 next = plant.kind == PlantKind::discrete
                                    ? discrete_step(log.states.back(), u, p)
                                    : integrate_plant(log.states.back(), u, p, plant.substeps);
            log.inputs.push_back(u);
            log.states.push_back(next);
            log.v_values.push_back(spec.v_value(next));
            ++t;
            ++applied;
        }
        log.applied_steps.push_back(applied);

        continuation.assign(sol.inputs.begin() + applied, sol.inputs.end());
        continuation.resize(static_cast<std::size_t>(spec.N));  // zero-pad the tail
    }
    return log;
}

}  // namespace fsmpc
