#ifndef FSMPC_ANALYSIS_HPP
#define FSMPC_ANALYSIS_HPP

#include "fsmpc/controller.hpp"
#include "fsmpc/egdclf.hpp"

namespace fsmpc {

/// Decay envelope ||x(t)|| <= gamma(||x(0)||) lambda e^{-mu t} certified for
/// the closed loop: gamma = chi1^{-1} o varphi o chi2, lambda =
/// lambda_tilde e^{mu_tilde alpha}, mu = alpha mu_tilde / N.
struct EnvelopeParams {
    KinfFn gamma;
    double lambda = 1.0;
    double mu = 0.0;
};

EnvelopeParams envelope_params(const EgdclfSpec& spec);

struct EnvelopeReport {
    double max_ratio = 0.0;  // max_t ||x(t)|| / (gamma(||x(0)||) lambda e^{-mu t})
    int worst_time = 0;
    bool pass = false;       // max_ratio <= 1 + 1e-6
};

EnvelopeReport check_envelope(const ClosedLoopLog& log, const EnvelopeParams& env);

/// Per-iteration decay at the solve instants:
/// V(x(tau_{k+1})) <= (1-alpha) V(x(tau_k)) + 1e-9 max(1, V(x(tau_k))).
/// Truncated final blocks are skipped.
struct ContractionReport {
    std::size_t iterations = 0;
    std::size_t violations = 0;
    double worst_excess = -1e300;
    int worst_iteration = -1;

    bool pass() const { return violations == 0; }
};

ContractionReport check_contraction(const ClosedLoopLog& log, double alpha);

/// Within-iteration bounds for t in (tau_k : tau_{k+1}]:
/// V(x(t)) min_i sigma_i(x(tau_k)) <= (1-alpha) V(x(tau_k)) + tol and
/// V(x(t)) <= varphi(V(x(tau_k))) (1 + 1e-9).
struct IntraIterationReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_excess = -1e300;
    int worst_time = -1;

    bool pass() const { return violations == 0; }
};

IntraIterationReport check_intra_iteration(const ClosedLoopLog& log, const EgdclfSpec& spec);

/// Offset and horizon used by the no-classical-exponential-stability
/// demonstration: epsilon satisfies
/// ceil(-(1/mu) log(eps^{1-q} / (2 lambda))) h lambda^2 eps^{2q-1} < 1/2.
struct Prop1Setup {
    double r = 1.0;
    double q = 1.0;       // overshoot exponent, 1/2 < q <= 1
    double lambda = 1.0;
    double mu = 0.1;
    double h = 1.0;
    double epsilon = 0.0;
    long long tau = 0;
};

/// Largest epsilon in (0, r) on a halving search that satisfies the horizon
/// inequality above. Throws NumericError if the search reaches 1e-300.
Prop1Setup prop1_epsilon(double r, double q, double lambda, double mu, double h);

/// Direct re-evaluation of the horizon inequality on a setup.
bool prop1_condition_holds(const Prop1Setup& setup);

/// Overshoot ratios of a closed-loop run started at (0, epsilon, 0, 0, 0)
/// on the discrete plant: peak norm divided by epsilon (q = 1) and by
/// epsilon^{1/2} (q = 1/2).
struct Prop1Report {
    double peak_norm = 0.0;
    int peak_time = 0;
    double overshoot_q1 = 0.0;
    double overshoot_qhalf = 0.0;
};

Prop1Report prop1_demo(const Prop1Setup& setup, const EgdclfSpec& spec, const CostConfig& cfg,
                       const UnicycleParams& p, const MpcOptions& opts = {}, int horizon_steps = 36);

}  // namespace fsmpc

#endif  // FSMPC_ANALYSIS_HPP
