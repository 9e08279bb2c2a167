#ifndef FSMPC_EGDCLF_HPP
#define FSMPC_EGDCLF_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fsmpc/model.hpp"

namespace fsmpc {

/// Which of the two built-in Lyapunov parameterizations is in use.
enum class Condition { cond1 = 1, cond2 = 2 };

/// Exponent transition s -> phi(s) in [2,4]: 2 for s <= 1, 4 for s >= 2,
/// and a non-decreasing bridge on [1,2]. The default bridge is the quintic
/// 12s^5 - 90s^4 + 260s^3 - 360s^2 + 240s - 60.
class PhiTransition {
public:
    PhiTransition() = default;

    /// Wraps a user-supplied bridge for [1,2]. Rejects bridges that fail a
    /// numerical monotonicity/endpoint check (grid of 10^4 points).
    static PhiTransition custom(std::function<double(double)> mid);

    /// Throws NumericError for s < 0.
    double operator()(double s) const;

private:
    std::function<double(double)> mid_;  // empty -> default quintic
};

/// Default exponent transition evaluated at s.
double phi_transition(double s);

/// V(x) = (x^4 + |y|^phi(|y|) + theta^4 + v^4 + omega^4)^(1/4).
double v1_value(const State5& x, const PhiTransition& phi = {});

/// V(x) = ||x|| (Euclidean).
double v2_value(const State5& x);

/// Closed-form steering bound constant of the chosen condition.
double c_const(Condition cond, int N, double h);

/// A scaled comparison function: linear(r) = scale * r,
/// sqrt_max(r) = scale * max(sqrt(r), r). Both are K-infinity for scale > 0.
struct KinfFn {
    enum class Shape { linear, sqrt_max };
    Shape shape = Shape::linear;
    double scale = 1.0;

    double operator()(double r) const;
};

/// Comparison-function sandwich chi1 <= V <= chi2, intra-horizon growth
/// bound varphi, and the exponential-growth constants of the composition
/// property.
struct ComparisonFns {
    KinfFn chi1;
    KinfFn chi2;
    KinfFn varphi;
    double lambda_tilde = 1.0;
    double mu_tilde = 1.0;
};

/// Full parameterization of an exponential generalized discrete-time control
/// Lyapunov function: condition choice, horizon N, decay constant alpha,
/// step size h, and (for condition 1) the constant weights.
struct EgdclfSpec {
    Condition condition = Condition::cond2;
    int N = 12;
    double alpha = 0.3;
    double h = 1.0;
    std::vector<double> sigma;  // condition 1 only: N constants, last one derived
    PhiTransition phi;          // exponent transition of the condition-1 V

    /// Condition-1 spec from the N-1 leading weights; the last weight is set
    /// to 1 - sum of the others.
    static EgdclfSpec condition1(int N, double alpha, double h, const std::vector<double>& sigma_head,
                                 PhiTransition phi = {});
    static EgdclfSpec condition2(int N, double alpha, double h);

    /// Built-in instances used by the presets and verification suites
    /// (N = 12, alpha = 0.3, h = 1; condition 1 with sigma_i = 1e-3).
    static EgdclfSpec default_condition1();
    static EgdclfSpec default_condition2();

    /// Throws ConfigError naming the offending field.
    void validate() const;

    double c_value() const { return c_const(condition, N, h); }
    double v_value(const State5& x) const;

    /// State-dependent weights sigma_1..sigma_N evaluated at x0. Their sum
    /// is 1 by construction.
    std::vector<double> weights(const State5& x0) const;

    /// min_i sigma_i(x0) without materializing the full weight vector.
    double min_weight(const State5& x0) const;

    ComparisonFns comparison_fns() const;
};

/// Sampling plan for the statistical property checks.
struct SampleOptions {
    std::size_t count = 100000;
    double r_min = 1e-6;  // radii are log-uniform in [r_min, r_max]
    double r_max = 1e3;
    std::uint64_t seed = 0;
};

/// Witness of a violated inequality at a sampled state.
struct Falsification {
    State5 state;
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Falsification report of a sampled property check.
struct PropertyReport {
    std::string property;
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_excess = -1e300;  // max over samples of lhs - rhs - tol
    std::optional<Falsification> witness;

    bool pass() const { return violations == 0; }
};

/// Sandwich property: chi1(||x||) <= V(x) <= chi2(||x||) at sampled states.
PropertyReport check_p1(const EgdclfSpec& spec, const SampleOptions& opts = {});

/// Weight-compatibility property: (1-alpha) V(x) <= varphi(V(x)) * min_i sigma_i(x).
PropertyReport check_p3(const EgdclfSpec& spec, const SampleOptions& opts = {});

/// Grid plan for the composition-growth property check.
struct P4GridOptions {
    int nr = 200;          // r axis: 0 plus log-spaced values up to r_max
    int ntau = 200;        // tau axis: linear in [-alpha, tau_max]
    double r_min = 1e-9;
    double r_max = 1e3;
    double tau_max = 50.0;
};

struct P4Report {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_excess = -1e300;
    double max_rel_gap = 0.0;  // max |lhs - rhs| / max(1, rhs); ~0 when the bound is tight
    double witness_r = 0.0;
    double witness_tau = 0.0;

    bool pass() const { return violations == 0; }
};

/// Composition-growth property: with g = chi1^{-1} o varphi,
/// g(r e^{-tau}) <= g(r) lambda_tilde e^{-mu_tilde tau} over the grid.
P4Report check_p4(const EgdclfSpec& spec, const P4GridOptions& opts = {});

}  // namespace fsmpc

#endif  // FSMPC_EGDCLF_HPP
