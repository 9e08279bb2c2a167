#ifndef FSMPC_VERIFY_HPP
#define FSMPC_VERIFY_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace fsmpc {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string details;  // space-separated key=value tokens
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;

    bool pass() const;
    std::size_t failures() const;
};

struct VerifyOptions {
    std::uint64_t seed = 0;
    std::size_t samples = 0;  // 0 -> suite default
};

/// Sandwich/weight/growth properties of both built-in parameterizations on
/// sampled states and the (r, tau) grid.
SuiteReport verify_egdclf(const VerifyOptions& opts = {});

/// Steering-plan Monte-Carlo: consistency, exact terminal rest, waypoint
/// identity, per-phase growth bound and the average-descent certificate.
SuiteReport verify_steering(const VerifyOptions& opts = {});

/// Seeded discrete-plant closed-loop runs: per-iteration contraction,
/// within-iteration bounds and the decay envelope.
SuiteReport verify_envelope(const VerifyOptions& opts = {});

/// Overshoot-scaling study and the offset-search arithmetic.
SuiteReport verify_prop1(const VerifyOptions& opts = {});

/// suite is one of egdclf, steering, envelope, prop1, all.
std::vector<SuiteReport> verify_suites(const std::string& suite, const VerifyOptions& opts = {});

void print_report(std::ostream& out, const SuiteReport& report);

}  // namespace fsmpc

#endif  // FSMPC_VERIFY_HPP
