#include "fsmpc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fsmpc/analysis.hpp"
#include "fsmpc/controller.hpp"
#include "fsmpc/sampling.hpp"
#include "fsmpc/steering.hpp"

namespace fsmpc {

bool SuiteReport::pass() const {
    for (const CheckResult& c : checks)
        if (!c.pass) return false;
    return true;
}

std::size_t SuiteReport::failures() const {
    std::size_t n = 0;
    for (const CheckResult& c : checks)
        if (!c.pass) ++n;
    return n;
}

namespace {

std::string num(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

std::string state_token(const State5& s) {
    std::ostringstream os;
    os << "(" << num(s.x) << "," << num(s.y) << "," << num(s.theta) << "," << num(s.v) << ","
       << num(s.omega) << ")";
    return os.str();
}

CheckResult from_property(const std::string& name, const PropertyReport& rep) {
    std::ostringstream os;
    os << "samples=" << rep.checked << " violations=" << rep.violations
       << " worst_excess=" << num(rep.worst_excess);
    if (!rep.pass() && rep.witness)
        os << " witness=" << state_token(rep.witness->state) << " lhs=" << num(rep.witness->lhs)
           << " rhs=" << num(rep.witness->rhs);
    return {name, rep.pass(), os.str()};
}

SolverOptions light_solver() {
    SolverOptions opts;
    opts.max_outer = 1;
    opts.max_inner = 30;
    return opts;
}

}  // namespace

SuiteReport verify_egdclf(const VerifyOptions& opts) {
    SuiteReport report;
    report.suite = "egdclf";
    SampleOptions sample;
    sample.count = opts.samples == 0 ? 100000 : opts.samples;
    sample.seed = opts.seed;

    const EgdclfSpec specs[2] = {EgdclfSpec::default_condition1(), EgdclfSpec::default_condition2()};
    const char* tags[2] = {"cond1", "cond2"};
    for (int i = 0; i < 2; ++i) {
        const EgdclfSpec& spec = specs[i];
        report.checks.push_back(from_property(std::string("p1.") + tags[i], check_p1(spec, sample)));
        report.checks.push_back(from_property(std::string("p3.") + tags[i], check_p3(spec, sample)));

        const P4Report p4 = check_p4(spec);
        std::ostringstream os;
        os << "grid=" << p4.checked << " violations=" << p4.violations
           << " worst_excess=" << num(p4.worst_excess) << " max_rel_gap=" << num(p4.max_rel_gap);
        if (!p4.pass()) os << " witness_r=" << num(p4.witness_r) << " witness_tau=" << num(p4.witness_tau);
        report.checks.push_back({std::string("p4.") + tags[i], p4.pass(), os.str()});

        if (spec.condition == Condition::cond1) {
            // lambda_tilde = mu_tilde = 1 makes the growth bound an identity
            const bool tight = p4.max_rel_gap <= 1e-9;
            report.checks.push_back({"p4.cond1.equality", tight,
                                     "max_rel_gap=" + num(p4.max_rel_gap) + " tolerance=1e-09"});
        }

        // weight normalization on a smaller sample
        auto per_block = [&](std::size_t begin, std::size_t end, std::uint64_t block_seed) {
            PropertyReport r;
            std::mt19937_64 rng(block_seed);
            for (std::size_t s = begin; s < end; ++s) {
                const State5 x = random_state(rng, sample.r_min, sample.r_max);
                const std::vector<double> w = spec.weights(x);
                double sum = 0.0;
                double lo = 1.0;
                for (double wi : w) {
                    sum += wi;
                    lo = std::min(lo, wi);
                }
                const double excess = std::max(std::abs(sum - 1.0) - 1e-12, -lo);
                ++r.checked;
                if (excess > 0.0) ++r.violations;
                if (excess > r.worst_excess) {
                    r.worst_excess = excess;
                    r.witness = Falsification{x, sum, lo};
                }
            }
            return r;
        };
        PropertyReport wsum = run_blocks<PropertyReport>(
            std::min<std::size_t>(sample.count, 10000), 1024, derive_seed(opts.seed, 77),
            per_block, [](PropertyReport& acc, PropertyReport&& part) {
                acc.checked += part.checked;
                acc.violations += part.violations;
                if (part.worst_excess > acc.worst_excess) {
                    acc.worst_excess = part.worst_excess;
                    acc.witness = part.witness;
                }
            });
        report.checks.push_back(from_property(std::string("weights.sum.") + tags[i], wsum));
    }

    // exponent transition: endpoints, monotonicity, flat derivative at 1 and 2
    {
        bool ok = phi_transition(0.5) == 2.0 && phi_transition(3.0) == 4.0;
        ok = ok && std::abs(phi_transition(1.0) - 2.0) <= 1e-12 &&
             std::abs(phi_transition(2.0) - 4.0) <= 1e-12;
        double prev = 2.0;
        for (int i = 0; i <= 10000 && ok; ++i) {
            const double s = 1.0 + static_cast<double>(i) / 10000.0;
            const double value = phi_transition(s);
            ok = value >= prev - 1e-12;
            prev = value;
        }
        const double d1 = (phi_transition(1.0 + 1e-7) - 2.0) / 1e-7;
        const double d2 = (4.0 - phi_transition(2.0 - 1e-7)) / 1e-7;
        ok = ok && std::abs(d1) <= 1e-6 && std::abs(d2) <= 1e-6;
        report.checks.push_back({"phi.transition", ok,
                                 "grid=10001 dphi(1)=" + num(d1) + " dphi(2)=" + num(d2)});
    }
    return report;
}

namespace {

struct SteerStats {
    std::size_t n = 0;
    std::size_t fail_consistency = 0;
    std::size_t fail_terminal = 0;
    std::size_t fail_waypoint = 0;
    std::size_t fail_bound = 0;
    std::size_t fail_descent = 0;
    double worst_residual = -1e300;   // lhs - rhs
    double worst_bound_ratio = 0.0;   // max_phase_v / phase_bound
};

void merge_steer(SteerStats& acc, SteerStats&& part) {
    acc.n += part.n;
    acc.fail_consistency += part.fail_consistency;
    acc.fail_terminal += part.fail_terminal;
    acc.fail_waypoint += part.fail_waypoint;
    acc.fail_bound += part.fail_bound;
    acc.fail_descent += part.fail_descent;
    acc.worst_residual = std::max(acc.worst_residual, part.worst_residual);
    acc.worst_bound_ratio = std::max(acc.worst_bound_ratio, part.worst_bound_ratio);
}

bool terminal_exact(const SteerPlan& plan, int N) {
    for (int t = plan.phase_times[7]; t <= N; ++t) {
        const State5& s = plan.trajectory.states[static_cast<std::size_t>(t)];
        if (s.x != 0.0 || s.y != 0.0 || s.theta != 0.0 || s.v != 0.0 || s.omega != 0.0) return false;
    }
    return true;
}

bool waypoint_ok(const SteerPlan& plan) {
    const double lhs = plan.x_bar * plan.x_bar + plan.y_bar * plan.y_bar;
    const double rhs = plan.d * plan.d;
    if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, rhs)) return false;
    return plan.y_bar == 0.5 * plan.y1;
}

}  // namespace

SuiteReport verify_steering(const VerifyOptions& opts) {
    SuiteReport report;
    report.suite = "steering";
    const std::size_t samples = opts.samples == 0 ? 1000 : opts.samples;
    const UnicycleParams p;

    const EgdclfSpec specs[2] = {EgdclfSpec::default_condition1(), EgdclfSpec::default_condition2()};
    const char* tags[2] = {"cond1", "cond2"};
    for (int i = 0; i < 2; ++i) {
        const EgdclfSpec& spec = specs[i];
        auto per_block = [&](std::size_t begin, std::size_t end, std::uint64_t block_seed) {
            SteerStats st;
            std::mt19937_64 rng(block_seed);
            for (std::size_t s = begin; s < end; ++s) {
                const State5 x0 = random_state(rng, 1e-6, 100.0);
                const SteerPlan plan = plan_feasible(x0, spec, p);
                const DescentCertificate cert = descent_certificate(plan, spec);
                ++st.n;
                if (!dynamics_consistent(plan.trajectory, p, 1e-9)) ++st.fail_consistency;
                if (!terminal_exact(plan, spec.N)) ++st.fail_terminal;
                if (!waypoint_ok(plan)) ++st.fail_waypoint;
                if (!cert.bound_ok) ++st.fail_bound;
                if (!cert.descent_ok) ++st.fail_descent;
                st.worst_residual = std::max(st.worst_residual, cert.lhs - cert.rhs);
                if (cert.phase_bound > 0.0)
                    st.worst_bound_ratio = std::max(st.worst_bound_ratio, cert.max_phase_v / cert.phase_bound);
            }
            return st;
        };
        const SteerStats st = run_blocks<SteerStats>(samples, 64, opts.seed, per_block, merge_steer);

        auto add = [&](const std::string& name, std::size_t failures, const std::string& extra) {
            std::ostringstream os;
            os << "samples=" << st.n << " violations=" << failures;
            if (!extra.empty()) os << " " << extra;
            report.checks.push_back({name + "." + tags[i], failures == 0, os.str()});
        };
        add("steer.consistency", st.fail_consistency, "tolerance=1e-09");
        add("steer.terminal_zero", st.fail_terminal, "");
        add("steer.waypoint", st.fail_waypoint, "");
        add("steer.phase_bound", st.fail_bound, "worst_ratio=" + num(st.worst_bound_ratio));
        add("steer.descent", st.fail_descent, "worst_residual=" + num(st.worst_residual));
    }
    return report;
}

namespace {

struct LoopStats {
    std::size_t runs = 0;
    std::size_t contraction_violations = 0;
    std::size_t intra_violations = 0;
    std::size_t envelope_failures = 0;
    double worst_ratio = 0.0;
    double worst_contraction_excess = -1e300;
};

void merge_loop(LoopStats& acc, LoopStats&& part) {
    acc.runs += part.runs;
    acc.contraction_violations += part.contraction_violations;
    acc.intra_violations += part.intra_violations;
    acc.envelope_failures += part.envelope_failures;
    acc.worst_ratio = std::max(acc.worst_ratio, part.worst_ratio);
    acc.worst_contraction_excess = std::max(acc.worst_contraction_excess, part.worst_contraction_excess);
}

}  // namespace

SuiteReport verify_envelope(const VerifyOptions& opts) {
    SuiteReport report;
    report.suite = "envelope";
    const std::size_t runs = opts.samples == 0 ? 20 : opts.samples;
    const UnicycleParams p;
    const CostConfig cost;  // plain quadratic cost
    MpcOptions mpc;
    mpc.solver = light_solver();

    const EgdclfSpec specs[2] = {EgdclfSpec::default_condition1(), EgdclfSpec::default_condition2()};
    const char* tags[2] = {"cond1", "cond2"};
    for (int i = 0; i < 2; ++i) {
        const EgdclfSpec& spec = specs[i];
        const EnvelopeParams env = envelope_params(spec);
        auto per_block = [&](std::size_t begin, std::size_t end, std::uint64_t block_seed) {
            LoopStats st;
            std::mt19937_64 rng(block_seed);
            for (std::size_t s = begin; s < end; ++s) {
                const State5 x0 = random_state(rng, 1e-2, 100.0);
                const ClosedLoopLog log =
                    mpc_run(x0, spec, cost, p, PlantModel{PlantKind::discrete}, 400, mpc);
                const ContractionReport con = check_contraction(log, spec.alpha);
                const IntraIterationReport intra = check_intra_iteration(log, spec);
                const EnvelopeReport envr = check_envelope(log, env);
                ++st.runs;
                st.contraction_violations += con.violations;
                st.intra_violations += intra.violations;
                if (!envr.pass) ++st.envelope_failures;
                st.worst_ratio = std::max(st.worst_ratio, envr.max_ratio);
                st.worst_contraction_excess = std::max(st.worst_contraction_excess, con.worst_excess);
            }
            return st;
        };
        const LoopStats st = run_blocks<LoopStats>(runs, 1, opts.seed, per_block, merge_loop);

        report.checks.push_back({std::string("loop.contraction.") + tags[i],
                                 st.contraction_violations == 0,
                                 "runs=" + std::to_string(st.runs) + " violations=" +
                                     std::to_string(st.contraction_violations) +
                                     " worst_excess=" + num(st.worst_contraction_excess)});
        report.checks.push_back({std::string("loop.intra_iteration.") + tags[i],
                                 st.intra_violations == 0,
                                 "runs=" + std::to_string(st.runs) +
                                     " violations=" + std::to_string(st.intra_violations)});
        report.checks.push_back({std::string("loop.envelope.") + tags[i], st.envelope_failures == 0,
                                 "runs=" + std::to_string(st.runs) + " failures=" +
                                     std::to_string(st.envelope_failures) +
                                     " worst_ratio=" + num(st.worst_ratio)});
    }
    return report;
}

SuiteReport verify_prop1(const VerifyOptions& opts) {
    SuiteReport report;
    report.suite = "prop1";
    (void)opts;

    // offset search re-evaluation across a parameter grid
    {
        bool ok = true;
        std::size_t n = 0;
        std::ostringstream os;
        for (double q : {0.51, 0.75, 1.0})
            for (double lambda : {0.5, 2.0})
                for (double mu : {0.05, 0.5}) {
                    const Prop1Setup setup = prop1_epsilon(1.0, q, lambda, mu, 1.0);
                    ++n;
                    if (!prop1_condition_holds(setup) || !(setup.epsilon > 0.0 && setup.epsilon < 1.0))
                        ok = false;
                }
        os << "grid=" << n;
        report.checks.push_back({"prop1.epsilon_search", ok, os.str()});
    }

    // overshoot scaling under the norm-based parameterization
    {
        const EgdclfSpec spec = EgdclfSpec::default_condition2();
        const UnicycleParams p;
        const CostConfig cost;
        const EnvelopeParams env = envelope_params(spec);
        MpcOptions mpc;
        mpc.solver = light_solver();
        mpc.stop_norm = 0.0;

        std::ostringstream os;
        std::vector<double> q1;
        bool qhalf_ok = true;
        for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
            Prop1Setup setup;
            setup.epsilon = eps;
            const Prop1Report demo = prop1_demo(setup, spec, cost, p, mpc, 36);
            q1.push_back(demo.overshoot_q1);
            qhalf_ok = qhalf_ok && demo.overshoot_qhalf <= env.gamma.scale * env.lambda;
            os << "eps=" << num(eps) << " q1=" << num(demo.overshoot_q1)
               << " qhalf=" << num(demo.overshoot_qhalf) << " ";
        }
        const double growth1 = q1[2] / q1[1];
        const double growth2 = q1[3] / q1[2];
        os << "growth=" << num(growth1) << "," << num(growth2)
           << " qhalf_bound=" << num(env.gamma.scale * env.lambda);
        report.checks.push_back(
            {"prop1.q1_growth", growth1 >= 3.0 && growth2 >= 3.0, os.str()});
        report.checks.push_back({"prop1.qhalf_bounded", qhalf_ok,
                                 "bound=" + num(env.gamma.scale * env.lambda)});
    }
    return report;
}

std::vector<SuiteReport> verify_suites(const std::string& suite, const VerifyOptions& opts) {
    if (suite == "egdclf") return {verify_egdclf(opts)};
    if (suite == "steering") return {verify_steering(opts)};
    if (suite == "envelope") return {verify_envelope(opts)};
    if (suite == "prop1") return {verify_prop1(opts)};
    if (suite == "all")
        return {verify_egdclf(opts), verify_steering(opts), verify_envelope(opts), verify_prop1(opts)};
    throw ConfigError("unknown suite '" + suite + "' (expected egdclf, steering, envelope, prop1, all)");
}

void print_report(std::ostream& out, const SuiteReport& report) {
    out << "suite=" << report.suite << "\n";
    for (const CheckResult& c : report.checks)
        out << "check=" << c.name << " status=" << (c.pass ? "PASS" : "FAIL") << " " << c.details
            << "\n";
    out << "suite_result=" << (report.pass() ? "PASS" : "FAIL") << " checks=" << report.checks.size()
        << " failures=" << report.failures() << "\n";
}

}  // namespace fsmpc
