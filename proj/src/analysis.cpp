#include "fsmpc/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fsmpc {

EnvelopeParams envelope_params(const EgdclfSpec& spec) {
    const ComparisonFns cf = spec.comparison_fns();
    if (cf.chi1.shape != KinfFn::Shape::linear)
        throw std::logic_error("envelope_params: chi1 must be linear to invert in closed form");

    KinfFn inner;  // varphi o chi2
    if (cf.varphi.shape == KinfFn::Shape::linear) {
        inner = {cf.chi2.shape, cf.varphi.scale * cf.chi2.scale};
    } else if (cf.chi2.shape == KinfFn::Shape::linear && cf.chi2.scale == 1.0) {
        inner = cf.varphi;
    } else {
        throw std::logic_error("envelope_params: comparison functions do not compose in closed form");
    }

    EnvelopeParams env;
    env.gamma = {inner.shape, inner.scale / cf.chi1.scale};
    env.lambda = cf.lambda_tilde * std::exp(cf.mu_tilde * spec.alpha);
    env.mu = spec.alpha * cf.mu_tilde / static_cast<double>(spec.N);
    return env;
}

EnvelopeReport check_envelope(const ClosedLoopLog& log, const EnvelopeParams& env) {
    if (log.states.empty()) throw std::invalid_argument("check_envelope: empty log");
    const double scale0 = env.gamma(log.states.front().norm()) * env.lambda;
    EnvelopeReport report;
    for (std::size_t t = 0; t < log.states.size(); ++t) {
        const double bound = scale0 * std::exp(-env.mu * static_cast<double>(t));
        const double n = log.states[t].norm();
        double ratio;
        if (n == 0.0)
            ratio = 0.0;
        else if (bound > 0.0)
            ratio = n / bound;
        else
            ratio = std::numeric_limits<double>::infinity();
        if (ratio > report.max_ratio) {
            report.max_ratio = ratio;
            report.worst_time = static_cast<int>(t);
        }
    }
    report.pass = report.max_ratio <= 1.0 + 1e-6;
    return report;
}

ContractionReport check_contraction(const ClosedLoopLog& log, double alpha) {
    ContractionReport report;
    for (std::size_t k = 0; k < log.iteration_marks.size(); ++k) {
        if (log.applied_steps[k] != log.flexible_steps[k]) continue;  // truncated tail
        const std::size_t t0 = static_cast<std::size_t>(log.iteration_marks[k]);
        const std::size_t t1 = t0 + static_cast<std::size_t>(log.flexible_steps[k]);
        if (t1 >= log.v_values.size()) continue;  // block end missing from the log
        const double v0 = log.v_values[t0];
        const double v1 = log.v_values[t1];
        const double excess = v1 - ((1.0 - alpha) * v0 + 1e-9 * std::max(1.0, v0));
        ++report.iterations;
        if (excess > 0.0) ++report.violations;
        if (excess > report.worst_excess) {
            report.worst_excess = excess;
            report.worst_iteration = static_cast<int>(k);
        }
    }
    return report;
}

IntraIterationReport check_intra_iteration(const ClosedLoopLog& log, const EgdclfSpec& spec) {
    const ComparisonFns cf = spec.comparison_fns();
    IntraIterationReport report;
    for (std::size_t k = 0; k < log.iteration_marks.size(); ++k) {
        const std::size_t t0 = static_cast<std::size_t>(log.iteration_marks[k]);
        const std::size_t t1 =
            std::min(t0 + static_cast<std::size_t>(log.applied_steps[k]), log.v_values.size() - 1);
        const double v0 = log.v_values[t0];
        const double min_sigma = spec.min_weight(log.states[t0]);
        const double decay_rhs = (1.0 - spec.alpha) * v0 + 1e-9 * std::max(1.0, v0);
        const double growth_rhs = cf.varphi(v0) * (1.0 + 1e-9);
        for (std::size_t t = t0 + 1; t <= t1; ++t) {
            const double v = log.v_values[t];
            const double excess = std::max(v * min_sigma - decay_rhs, v - growth_rhs);
            ++report.checked;
            if (excess > 0.0) ++report.violations;
            if (excess > report.worst_excess) {
                report.worst_excess = excess;
                report.worst_time = static_cast<int>(t);
            }
        }
    }
    return report;
}

Prop1Setup prop1_epsilon(double r, double q, double lambda, double mu, double h) {
    if (!(q > 0.5) || !(q <= 1.0)) throw ConfigError("prop1: q must satisfy 1/2 < q <= 1");
    if (!(r > 0.0) || !(lambda > 0.0) || !(mu > 0.0) || !(h > 0.0))
        throw ConfigError("prop1: r, lambda, mu, h must be > 0");
    for (double eps = 0.5 * r; eps >= 1e-300; eps *= 0.5) {
        const double tau_real = std::ceil(-(1.0 / mu) * std::log(std::pow(eps, 1.0 - q) / (2.0 * lambda)));
        if (tau_real > 9e18) throw ConfigError("prop1: mu is too small for an integer horizon");
        Prop1Setup setup{r, q, lambda, mu, h, eps, static_cast<long long>(tau_real)};
        if (prop1_condition_holds(setup)) return setup;
    }
    throw NumericError("prop1_epsilon: no epsilon above 1e-300 satisfies the horizon inequality");
}

bool prop1_condition_holds(const Prop1Setup& s) {
    const double lhs = static_cast<double>(s.tau) * s.h * s.lambda * s.lambda *
                       std::pow(s.epsilon, 2.0 * s.q - 1.0);
    return lhs < 0.5;
}

Prop1Report prop1_demo(const Prop1Setup& setup, const EgdclfSpec& spec, const CostConfig& cfg,
                       const UnicycleParams& p, const MpcOptions& opts, int horizon_steps) {
    const State5 x0{0.0, setup.epsilon, 0.0, 0.0, 0.0};
    const ClosedLoopLog log = mpc_run(x0, spec, cfg, p, PlantModel{PlantKind::discrete}, horizon_steps, opts);
    Prop1Report report;
    for (std::size_t t = 0; t < log.states.size(); ++t) {
        const double n = log.states[t].norm();
        if (n > report.peak_norm) {
            report.peak_norm = n;
            report.peak_time = static_cast<int>(t);
        }
    }
    report.overshoot_q1 = report.peak_norm / setup.epsilon;
    report.overshoot_qhalf = report.peak_norm / std::sqrt(setup.epsilon);
    return report;
}

}  // namespace fsmpc
