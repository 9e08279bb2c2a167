#include "fsmpc/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fsmpc {

void Ellipse::validate() const {
    if (!std::isfinite(px) || !std::isfinite(py)) throw ConfigError("obstacle center must be finite");
    const double det = q11 * q22 - q12 * q12;
    if (!(q11 > 0.0) || !(q22 > 0.0) || !(det > 0.0))
        throw ConfigError("obstacle shape matrix must be positive definite");
}

void CostConfig::validate() const {
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw ConfigError("cost.rho must be >= 0");
    if (!(terminal_weight >= 0.0) || !std::isfinite(terminal_weight))
        throw ConfigError("cost.terminal_weight must be >= 0");
    for (const Ellipse& e : obstacles) e.validate();
}

void SolverOptions::validate() const {
    if (max_outer < 0) throw ConfigError("solver.max_outer must be >= 0");
    if (!(mu0 > 0.0)) throw ConfigError("solver.mu0 must be > 0");
    if (!(growth >= 1.0)) throw ConfigError("solver.growth must be >= 1");
    if (max_inner < 1) throw ConfigError("solver.max_inner must be >= 1");
    if (!(fd_step > 0.0)) throw ConfigError("solver.fd_step must be > 0");
}

double obstacle_activation(double x, double y, const Ellipse& e) {
    const double dx = x - e.px;
    const double dy = y - e.py;
    const double quad = e.q11 * dx * dx + 2.0 * e.q12 * dx * dy + e.q22 * dy * dy;
    return std::max(1.0 - quad, 0.0);
}

double stage_cost(const State5& x, const Input2& u, const CostConfig& cfg) {
    double cost = x.x * x.x + x.y * x.y + u.force * u.force + u.torque * u.torque;
    for (const Ellipse& e : cfg.obstacles) {
        const double act = obstacle_activation(x.x, x.y, e);
        cost += cfg.rho * (act * act + act);
    }
    return cost;
}

double terminal_cost(const State5& x, const CostConfig& cfg) {
    if (cfg.terminal_weight == 0.0) return 0.0;
    const double n = x.norm();
    return cfg.terminal_weight * n * n;
}

double descent_residual(std::span<const State5> states, const State5& x0, const EgdclfSpec& spec) {
    if (states.size() != static_cast<std::size_t>(spec.N) + 1)
        throw std::invalid_argument("descent_residual: states must have length N+1");
    const std::vector<double> sigma = spec.weights(x0);
    double sum = 0.0;
    for (int i = 1; i <= spec.N; ++i)
        sum += sigma[static_cast<std::size_t>(i - 1)] * spec.v_value(states[static_cast<std::size_t>(i)]);
    return sum - (1.0 - spec.alpha) * spec.v_value(x0);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Single-shooting evaluation state: everything fixed during one solve.
struct ShootingProblem {
    const State5& x0;
    const EgdclfSpec& spec;
    const CostConfig& cfg;
    const UnicycleParams& p;
    std::vector<double> sigma;  // weights at x0
    double descent_rhs = 0.0;   // (1 - alpha) V(x0)

    // Rolls out the flat input vector; false on numeric overflow.
    bool eval(std::span<const double> u, double& cost, double& residual) const {
        State5 s = x0;
        cost = 0.0;
        double weighted = 0.0;
        try {
            for (int i = 0; i < spec.N; ++i) {
                const Input2 in{u[static_cast<std::size_t>(2 * i)], u[static_cast<std::size_t>(2 * i + 1)]};
                cost += stage_cost(s, in, cfg);
                s = discrete_step(s, in, p);
                weighted += sigma[static_cast<std::size_t>(i)] * spec.v_value(s);
            }
        } catch (const NumericError&) {
            return false;
        }
        cost += terminal_cost(s, cfg);
        residual = weighted - descent_rhs;
        return std::isfinite(cost) && std::isfinite(residual);
    }
};

void fd_gradient_into(const std::function<double(std::span<const double>)>& f, std::vector<double>& u,
                      double step, std::vector<double>& grad) {
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double delta = step * std::max(1.0, std::abs(u[j]));
        const double saved = u[j];
        u[j] = saved + delta;
        const double fp = f(u);
        u[j] = saved - delta;
        const double fm = f(u);
        u[j] = saved;
        const double g = (fp - fm) / (2.0 * delta);
        grad[j] = std::isfinite(g) ? g : 0.0;
    }
}

/// Gradient descent with backtracking (Armijo) line search. on_accept is
/// invoked with every accepted iterate.
template <typename Fn, typename OnAccept>
double minimize_inner(const Fn& f, std::vector<double>& u, const SolverOptions& opts,
                      const OnAccept& on_accept) {
    double value = f(u);
    if (!std::isfinite(value)) return value;
    std::vector<double> grad(u.size()), trial(u.size());
    std::function<double(std::span<const double>)> scalar = [&](std::span<const double> v) {
        return f(v);
    };
    double step = 0.0;
    for (int it = 0; it < opts.max_inner; ++it) {
        fd_gradient_into(scalar, u, opts.fd_step, grad);
        double gn2 = 0.0;
        for (double g : grad) gn2 += g * g;
        if (gn2 <= 1e-24) break;
        if (it == 0 || step <= 0.0) step = 1.0 / std::max(1.0, std::sqrt(gn2));
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t j = 0; j < u.size(); ++j) trial[j] = u[j] - step * grad[j];
            const double trial_value = f(trial);
            if (trial_value <= value - 1e-4 * step * gn2) {
                u.swap(trial);
                value = trial_value;
                on_accept(u);
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }
    return value;
}

}  // namespace

std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> u, double step) {
    std::vector<double> copy(u.begin(), u.end());
    std::vector<double> grad(u.size());
    fd_gradient_into(f, copy, step, grad);
    return grad;
}

OcpSolution solve_ocp(const State5& x0, const EgdclfSpec& spec, const CostConfig& cfg,
                      const UnicycleParams& p, const SolverOptions& opts,
                      std::span<const Input2> continuation) {
    opts.validate();
    cfg.validate();
    SteerPlan plan = plan_feasible(x0, spec, p);  // validates spec and p

    ShootingProblem prob{x0, spec, cfg, p, spec.weights(x0), (1.0 - spec.alpha) * spec.v_value(x0)};
    const double tol = 1e-9 * std::max(1.0, prob.descent_rhs);

    std::vector<double> warm(2 * static_cast<std::size_t>(spec.N));
    for (int i = 0; i < spec.N; ++i) {
        warm[static_cast<std::size_t>(2 * i)] = plan.trajectory.inputs[static_cast<std::size_t>(i)].force;
        warm[static_cast<std::size_t>(2 * i + 1)] =
            plan.trajectory.inputs[static_cast<std::size_t>(i)].torque;
    }
    double warm_cost = 0.0, warm_residual = 0.0;
    if (!prob.eval(warm, warm_cost, warm_residual))
        throw NumericError("solve_ocp: warm-start rollout overflowed");
    if (warm_residual > tol)
        throw NumericError("solve_ocp: steering warm start violates the descent constraint");

    auto finish = [&](const std::vector<double>& flat, double cost, double residual,
                      SolutionSource source) {
        OcpSolution sol;
        sol.inputs.resize(static_cast<std::size_t>(spec.N));
        for (int i = 0; i < spec.N; ++i)
            sol.inputs[static_cast<std::size_t>(i)] = {flat[static_cast<std::size_t>(2 * i)],
                                                       flat[static_cast<std::size_t>(2 * i + 1)]};
        sol.states = rollout_discrete(x0, sol.inputs, p).states;
        sol.cost = cost;
        sol.descent_residual = residual;
        sol.feasible = residual <= tol;
        sol.source = source;
        return sol;
    };

    if (opts.max_outer == 0) return finish(warm, warm_cost, warm_residual, SolutionSource::warm_start_fallback);

    // Best feasible iterate seen anywhere in the penalty loop; starts at the
    // steering warm start, which is feasible by construction.
    std::vector<double> best = warm;
    double best_cost = warm_cost;
    double best_residual = warm_residual;
    bool improved = false;

    std::vector<double> u = warm;
    auto try_seed = [&](const std::vector<Input2>& inputs) {
        if (inputs.size() != static_cast<std::size_t>(spec.N)) return;
        std::vector<double> flat(2 * static_cast<std::size_t>(spec.N));
        for (int i = 0; i < spec.N; ++i) {
            flat[static_cast<std::size_t>(2 * i)] = inputs[static_cast<std::size_t>(i)].force;
            flat[static_cast<std::size_t>(2 * i + 1)] = inputs[static_cast<std::size_t>(i)].torque;
        }
        double cost = 0.0, residual = 0.0;
        if (prob.eval(flat, cost, residual) && residual <= tol && cost < best_cost) {
            u = flat;
            best = std::move(flat);
            best_cost = cost;
            best_residual = residual;
            improved = true;
        }
    };
    // smooth low-velocity variant of the plan, then the receding-horizon tail
    try_seed(plan_stretched(x0, spec, p).inputs);
    try_seed(std::vector<Input2>(continuation.begin(), continuation.end()));

    auto consider = [&](std::span<const double> v) {
        double cost = 0.0, g = 0.0;
        if (prob.eval(v, cost, g) && g <= tol && cost < best_cost) {
            best.assign(v.begin(), v.end());
            best_cost = cost;
            best_residual = g;
            improved = true;
        }
    };

    double multiplier = 0.0;
    double mu = opts.mu0;
    for (int outer = 0; outer < opts.max_outer; ++outer) {
        const double lam = multiplier;
        const double weight = mu;
        auto penalized = [&prob, lam, weight](std::span<const double> v) {
            double cost = 0.0, g = 0.0;
            if (!prob.eval(v, cost, g)) return kInf;
            const double active = std::max(0.0, lam / weight + g);
            return cost + 0.5 * weight * active * active;
        };
        minimize_inner(penalized, u, opts, consider);
        double cost_k = 0.0, g_k = 0.0;
        if (!prob.eval(u, cost_k, g_k)) {
            u = best;
            break;
        }
        multiplier = std::max(0.0, multiplier + mu * g_k);
        mu *= opts.growth;
    }

    if (improved && best_cost <= warm_cost)
        return finish(best, best_cost, best_residual, SolutionSource::optimizer);
    return finish(warm, warm_cost, warm_residual, SolutionSource::warm_start_fallback);
}

}  // namespace fsmpc
