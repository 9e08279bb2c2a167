#include "fsmpc/egdclf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fsmpc/sampling.hpp"

namespace fsmpc {
namespace {

double quintic_bridge(double s) {
    return ((((12.0 * s - 90.0) * s + 260.0) * s - 360.0) * s + 240.0) * s - 60.0;
}

double pow4(double a) {
    const double a2 = a * a;
    return a2 * a2;
}

}  // namespace

PhiTransition PhiTransition::custom(std::function<double(double)> mid) {
    if (!mid) throw ConfigError("phi transition: empty bridge function");
    constexpr int kGrid = 10000;
    double prev = 2.0;
    for (int i = 0; i <= kGrid; ++i) {
        const double s = 1.0 + static_cast<double>(i) / kGrid;
        const double value = mid(s);
        if (!std::isfinite(value) || value < 2.0 - 1e-9 || value > 4.0 + 1e-9)
            throw ConfigError("phi transition: bridge leaves [2,4] at s=" + std::to_string(s));
        if (value < prev - 1e-12)
            throw ConfigError("phi transition: bridge is decreasing at s=" + std::to_string(s));
        prev = value;
    }
    if (std::abs(mid(1.0) - 2.0) > 1e-9 || std::abs(mid(2.0) - 4.0) > 1e-9)
        throw ConfigError("phi transition: bridge endpoints must be 2 and 4");
    PhiTransition out;
    out.mid_ = std::move(mid);
    return out;
}

double PhiTransition::operator()(double s) const {
    if (s < 0.0) throw NumericError("phi transition: argument must be >= 0");
    if (s <= 1.0) return 2.0;
    if (s >= 2.0) return 4.0;
    return mid_ ? mid_(s) : quintic_bridge(s);
}

double phi_transition(double s) { return PhiTransition{}(s); }

double v1_value(const State5& x, const PhiTransition& phi) {
    const double ay = std::abs(x.y);
    const double sum = pow4(x.x) + std::pow(ay, phi(ay)) + pow4(x.theta) + pow4(x.v) + pow4(x.omega);
    return std::pow(sum, 0.25);
}

double v2_value(const State5& x) { return x.norm(); }

double c_const(Condition cond, int N, double h) {
    if (N < 8) throw ConfigError("spec.N must be >= 8");
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("spec.h must be > 0");
    if (cond == Condition::cond1) {
        const double g = std::max(7.0, static_cast<double>(N - 8));
        const double g4 = pow4(g);
        const double h4 = pow4(h);
        const double seven4 = 2401.0;
        const double a = 32.0 * (3.0 + 16.0 * seven4 / (h4 * g4));
        const double b = 24.0 * h4 + 128.0 * seven4 / g4;
        return std::pow(std::max(a, b), 0.25);
    }
    const double w = std::max(1.0, static_cast<double>(N - 8) / 7.0);
    return 2.0 * std::sqrt(1.0 + h * h) * std::sqrt(2.25 + 4.0 / (h * h * w * w));
}

double KinfFn::operator()(double r) const {
    return shape == Shape::linear ? scale * r : scale * std::max(std::sqrt(r), r);
}

EgdclfSpec EgdclfSpec::condition1(int N, double alpha, double h, const std::vector<double>& sigma_head,
                                  PhiTransition phi) {
    EgdclfSpec spec;
    spec.condition = Condition::cond1;
    spec.N = N;
    spec.alpha = alpha;
    spec.h = h;
    spec.phi = std::move(phi);
    spec.sigma = sigma_head;
    double head_sum = 0.0;
    for (double s : sigma_head) head_sum += s;
    spec.sigma.push_back(1.0 - head_sum);
    spec.validate();
    return spec;
}

EgdclfSpec EgdclfSpec::condition2(int N, double alpha, double h) {
    EgdclfSpec spec;
    spec.condition = Condition::cond2;
    spec.N = N;
    spec.alpha = alpha;
    spec.h = h;
    spec.validate();
    return spec;
}

EgdclfSpec EgdclfSpec::default_condition1() {
    return condition1(12, 0.3, 1.0, std::vector<double>(11, 1e-3));
}

EgdclfSpec EgdclfSpec::default_condition2() { return condition2(12, 0.3, 1.0); }

void EgdclfSpec::validate() const {
    if (N < 8) throw ConfigError("spec.N must be >= 8");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("spec.alpha must be in (0,1)");
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("spec.h must be > 0");
    if (condition == Condition::cond2) {
        if (!sigma.empty()) throw ConfigError("spec.sigma: condition 2 derives its weights from the state");
        return;
    }
    if (sigma.size() != static_cast<std::size_t>(N))
        throw ConfigError("spec.sigma must hold N values for condition 1");
    const double bound = (1.0 - alpha) / (static_cast<double>(N - 1) * c_value());
    double sum = 0.0;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (!(sigma[i] > 0.0)) throw ConfigError("spec.sigma[" + std::to_string(i) + "] must be > 0");
        if (i + 1 < sigma.size() && sigma[i] > bound * (1.0 + 1e-12))
            throw ConfigError("spec.sigma[" + std::to_string(i) + "] exceeds (1-alpha)/((N-1)c) = " +
                              std::to_string(bound));
        sum += sigma[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("spec.sigma must sum to 1");
}

double EgdclfSpec::v_value(const State5& x) const {
    return condition == Condition::cond1 ? v1_value(x, phi) : v2_value(x);
}

std::vector<double> EgdclfSpec::weights(const State5& x0) const {
    if (condition == Condition::cond1) return sigma;
    const double n = x0.norm();
    const double s = (n > 0.0 && n < 1.0) ? std::sqrt(n) : 1.0;
    const double w = (1.0 - alpha) / (static_cast<double>(N - 1) * c_value()) * s;
    std::vector<double> out(static_cast<std::size_t>(N), w);
    out.back() = 1.0 - static_cast<double>(N - 1) * w;
    return out;
}

double EgdclfSpec::min_weight(const State5& x0) const {
    if (condition == Condition::cond1) return *std::min_element(sigma.begin(), sigma.end());
    // The last weight is 1 - (1-alpha) s / c >= 2/3, so the head weight is the minimum.
    const double n = x0.norm();
    const double s = (n > 0.0 && n < 1.0) ? std::sqrt(n) : 1.0;
    return (1.0 - alpha) / (static_cast<double>(N - 1) * c_value()) * s;
}

ComparisonFns EgdclfSpec::comparison_fns() const {
    ComparisonFns cf;
    if (condition == Condition::cond1) {
        const double zeta = 1.0 / *std::min_element(sigma.begin(), sigma.end());
        cf.chi1 = {KinfFn::Shape::linear, 1.0 / 20.0};
        cf.chi2 = {KinfFn::Shape::sqrt_max, 2.0};
        cf.varphi = {KinfFn::Shape::linear, zeta};
        cf.lambda_tilde = 1.0;
        cf.mu_tilde = 1.0;
        return cf;
    }
    cf.chi1 = {KinfFn::Shape::linear, 1.0};
    cf.chi2 = {KinfFn::Shape::linear, 1.0};
    cf.varphi = {KinfFn::Shape::sqrt_max, static_cast<double>(N - 1) * c_value()};
    cf.lambda_tilde = std::exp(alpha / 2.0);
    cf.mu_tilde = 0.5;
    return cf;
}

namespace {

void merge_reports(PropertyReport& acc, PropertyReport&& part) {
    acc.checked += part.checked;
    acc.violations += part.violations;
    if (part.worst_excess > acc.worst_excess) {
        acc.worst_excess = part.worst_excess;
        acc.witness = part.witness;
    }
}

template <typename CheckFn>
PropertyReport sampled_check(const std::string& name, const SampleOptions& opts, CheckFn check) {
    auto per_block = [&](std::size_t begin, std::size_t end, std::uint64_t block_seed) {
        PropertyReport r;
        std::mt19937_64 rng(block_seed);
        for (std::size_t i = begin; i < end; ++i) {
            const State5 x = random_state(rng, opts.r_min, opts.r_max);
            const auto [lhs, rhs, excess] = check(x);
            ++r.checked;
            if (excess > 0.0) ++r.violations;
            if (excess > r.worst_excess) {
                r.worst_excess = excess;
                r.witness = Falsification{x, lhs, rhs};
            }
        }
        return r;
    };
    PropertyReport report =
        run_blocks<PropertyReport>(opts.count, 4096, opts.seed, per_block, merge_reports);
    report.property = name;
    return report;
}

struct Sides {
    double lhs, rhs, excess;
};

}  // namespace

PropertyReport check_p1(const EgdclfSpec& spec, const SampleOptions& opts) {
    const ComparisonFns cf = spec.comparison_fns();
    return sampled_check("P1", opts, [&](const State5& x) {
        const double n = x.norm();
        const double value = spec.v_value(x);
        const double lo = cf.chi1(n);
        const double hi = cf.chi2(n);
        const double excess_lo = lo - value - 1e-12 * std::max(1.0, value);
        const double excess_hi = value - hi - 1e-12 * std::max(1.0, hi);
        if (excess_lo >= excess_hi) return Sides{lo, value, excess_lo};
        return Sides{value, hi, excess_hi};
    });
}

PropertyReport check_p3(const EgdclfSpec& spec, const SampleOptions& opts) {
    const ComparisonFns cf = spec.comparison_fns();
    return sampled_check("P3", opts, [&](const State5& x) {
        const double value = spec.v_value(x);
        const double lhs = (1.0 - spec.alpha) * value;
        const double rhs = cf.varphi(value) * spec.min_weight(x);
        return Sides{lhs, rhs, lhs - rhs - 1e-12 * std::max(1.0, rhs)};
    });
}

P4Report check_p4(const EgdclfSpec& spec, const P4GridOptions& opts) {
    const ComparisonFns cf = spec.comparison_fns();
    if (cf.chi1.shape != KinfFn::Shape::linear)
        throw std::logic_error("check_p4: chi1 must be linear to invert in closed form");
    const KinfFn g{cf.varphi.shape, cf.varphi.scale / cf.chi1.scale};

    P4Report report;
    for (int i = 0; i < opts.nr; ++i) {
        double r = 0.0;
        if (i > 0) {
            const double f = static_cast<double>(i - 1) / std::max(1, opts.nr - 2);
            r = opts.r_min * std::pow(opts.r_max / opts.r_min, f);
        }
        for (int j = 0; j < opts.ntau; ++j) {
            const double f = static_cast<double>(j) / std::max(1, opts.ntau - 1);
            const double tau = -spec.alpha + f * (opts.tau_max + spec.alpha);
            const double lhs = g(r * std::exp(-tau));
            const double rhs = g(r) * cf.lambda_tilde * std::exp(-cf.mu_tilde * tau);
            const double excess = lhs - rhs - 1e-12 * std::max(1.0, rhs);
            ++report.checked;
            if (excess > 0.0) ++report.violations;
            if (excess > report.worst_excess) {
                report.worst_excess = excess;
                report.witness_r = r;
                report.witness_tau = tau;
            }
            report.max_rel_gap = std::max(report.max_rel_gap, std::abs(lhs - rhs) / std::max(1.0, rhs));
        }
    }
    return report;
}

}  // namespace fsmpc
