#include "fsmpc/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace fsmpc {

namespace fs = std::filesystem;
using nlohmann::json;

EgdclfSpec ExperimentConfig::build_spec() const {
    if (spec.condition == Condition::cond1) {
        std::vector<double> head = spec.sigma_head;
        if (head.empty()) head.assign(static_cast<std::size_t>(spec.N - 1), 1e-3);
        if (head.size() == 1) head.assign(static_cast<std::size_t>(spec.N - 1), head.front());
        return EgdclfSpec::condition1(spec.N, spec.alpha, params.h, head);
    }
    if (!spec.sigma_head.empty())
        throw ConfigError("spec.sigma only applies to condition 1; condition 2 derives its weights");
    return EgdclfSpec::condition2(spec.N, spec.alpha, params.h);
}

void ExperimentConfig::validate() const {
    params.validate();
    build_spec();  // validates N, alpha, sigma
    cost.validate();
    solver.validate();
    if (plant.kind == PlantKind::continuous && plant.substeps < 1)
        throw ConfigError("plant.substeps must be >= 1");
    if (horizon_steps < 1) throw ConfigError("horizon_steps must be >= 1");
    if (!(stop_norm >= 0.0)) throw ConfigError("stop_norm must be >= 0");
    if (!initial_state.finite()) throw ConfigError("initial_state must be finite");
    if (name.empty()) throw ConfigError("name must not be empty");
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.cost.rho = 1e5;
    cfg.cost.obstacles = {
        {6.0, 7.0, 0.1, 0.0, 0.4},
        {4.0, 0.0, 3.5 / 7.0, 0.0, 0.6 / 7.0},
    };
    if (name == "sec6-cond1") {
        cfg.spec.condition = Condition::cond1;
        cfg.initial_state = {15.0, 15.0, -std::numbers::pi / 4.0, 0.0, 0.0};
        return cfg;
    }
    if (name == "sec6-cond2") {
        cfg.spec.condition = Condition::cond2;
        cfg.initial_state = {10.0, 0.0, std::numbers::pi / 2.0, -3.0, 0.0};
        return cfg;
    }
    throw ConfigError("unknown preset '" + name + "' (expected sec6-cond1 or sec6-cond2)");
}

std::vector<std::string> preset_names() { return {"sec6-cond1", "sec6-cond2"}; }

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> known) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok) fail(path + "." + item.key(), "unknown key");
    }
}

void parse_model(const json& j, UnicycleParams& p) {
    check_keys(j, "model", {"m", "J", "k", "kappa", "h"});
    if (j.contains("m")) p.m = get_number(j["m"], "model.m");
    if (j.contains("J")) p.J = get_number(j["J"], "model.J");
    if (j.contains("k")) p.k = get_number(j["k"], "model.k");
    if (j.contains("kappa")) p.kappa = get_number(j["kappa"], "model.kappa");
    if (j.contains("h")) p.h = get_number(j["h"], "model.h");
}

void parse_spec(const json& j, SpecConfig& s) {
    check_keys(j, "spec", {"condition", "N", "alpha", "sigma"});
    if (j.contains("condition")) {
        const int c = get_int(j["condition"], "spec.condition");
        if (c != 1 && c != 2) fail("spec.condition", "expected 1 or 2");
        s.condition = c == 1 ? Condition::cond1 : Condition::cond2;
    }
    if (j.contains("N")) s.N = get_int(j["N"], "spec.N");
    if (j.contains("alpha")) s.alpha = get_number(j["alpha"], "spec.alpha");
    if (j.contains("sigma")) {
        const json& sig = j["sigma"];
        s.sigma_head.clear();
        if (sig.is_number()) {
            s.sigma_head.push_back(sig.get<double>());
        } else if (sig.is_array()) {
            for (std::size_t i = 0; i < sig.size(); ++i)
                s.sigma_head.push_back(get_number(sig[i], "spec.sigma[" + std::to_string(i) + "]"));
        } else {
            fail("spec.sigma", "expected a number or an array");
        }
    }
}

Ellipse parse_ellipse(const json& j, const std::string& path) {
    check_keys(j, path, {"center", "shape"});
    if (!j.contains("center") || !j.contains("shape")) fail(path, "needs center and shape");
    const json& c = j["center"];
    if (!c.is_array() || c.size() != 2) fail(path + ".center", "expected [px, py]");
    Ellipse e;
    e.px = get_number(c[0], path + ".center[0]");
    e.py = get_number(c[1], path + ".center[1]");
    const json& q = j["shape"];
    if (q.is_array() && q.size() == 3) {
        e.q11 = get_number(q[0], path + ".shape[0]");
        e.q12 = get_number(q[1], path + ".shape[1]");
        e.q22 = get_number(q[2], path + ".shape[2]");
    } else if (q.is_array() && q.size() == 2 && q[0].is_array() && q[0].size() == 2 &&
               q[1].is_array() && q[1].size() == 2) {
        e.q11 = get_number(q[0][0], path + ".shape[0][0]");
        e.q12 = get_number(q[0][1], path + ".shape[0][1]");
        const double q21 = get_number(q[1][0], path + ".shape[1][0]");
        e.q22 = get_number(q[1][1], path + ".shape[1][1]");
        if (std::abs(e.q12 - q21) > 1e-12 * std::max(1.0, std::abs(e.q12)))
            fail(path + ".shape", "matrix must be symmetric");
    } else {
        fail(path + ".shape", "expected [q11, q12, q22] or a symmetric 2x2 matrix");
    }
    return e;
}

void parse_cost(const json& j, CostConfig& c) {
    check_keys(j, "cost", {"rho", "terminal_weight", "obstacles"});
    if (j.contains("rho")) c.rho = get_number(j["rho"], "cost.rho");
    if (j.contains("terminal_weight"))
        c.terminal_weight = get_number(j["terminal_weight"], "cost.terminal_weight");
    if (j.contains("obstacles")) {
        const json& obs = j["obstacles"];
        if (!obs.is_array()) fail("cost.obstacles", "expected an array");
        c.obstacles.clear();
        for (std::size_t i = 0; i < obs.size(); ++i)
            c.obstacles.push_back(parse_ellipse(obs[i], "cost.obstacles[" + std::to_string(i) + "]"));
    }
}

void parse_plant(const json& j, PlantModel& plant) {
    check_keys(j, "plant", {"kind", "substeps"});
    if (j.contains("kind")) {
        if (!j["kind"].is_string()) fail("plant.kind", "expected 'discrete' or 'continuous'");
        const std::string kind = j["kind"].get<std::string>();
        if (kind == "discrete")
            plant.kind = PlantKind::discrete;
        else if (kind == "continuous")
            plant.kind = PlantKind::continuous;
        else
            fail("plant.kind", "expected 'discrete' or 'continuous'");
    }
    if (j.contains("substeps")) plant.substeps = get_int(j["substeps"], "plant.substeps");
}

void parse_solver(const json& j, SolverOptions& s) {
    check_keys(j, "solver", {"max_outer", "mu0", "growth", "max_inner", "fd_step"});
    if (j.contains("max_outer")) s.max_outer = get_int(j["max_outer"], "solver.max_outer");
    if (j.contains("mu0")) s.mu0 = get_number(j["mu0"], "solver.mu0");
    if (j.contains("growth")) s.growth = get_number(j["growth"], "solver.growth");
    if (j.contains("max_inner")) s.max_inner = get_int(j["max_inner"], "solver.max_inner");
    if (j.contains("fd_step")) s.fd_step = get_number(j["fd_step"], "solver.fd_step");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, ExperimentConfig base) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    check_keys(j, "config",
               {"name", "model", "spec", "cost", "plant", "initial_state", "horizon_steps",
                "stop_norm", "solver", "seed", "output_dir"});

    if (j.contains("name")) {
        if (!j["name"].is_string()) fail("name", "expected a string");
        base.name = j["name"].get<std::string>();
    }
    if (j.contains("model")) parse_model(j["model"], base.params);
    if (j.contains("spec")) parse_spec(j["spec"], base.spec);
    if (j.contains("cost")) parse_cost(j["cost"], base.cost);
    if (j.contains("plant")) parse_plant(j["plant"], base.plant);
    if (j.contains("initial_state")) {
        const json& s = j["initial_state"];
        if (!s.is_array() || s.size() != 5) fail("initial_state", "expected [x, y, theta, v, omega]");
        base.initial_state = {get_number(s[0], "initial_state[0]"), get_number(s[1], "initial_state[1]"),
                              get_number(s[2], "initial_state[2]"), get_number(s[3], "initial_state[3]"),
                              get_number(s[4], "initial_state[4]")};
    }
    if (j.contains("horizon_steps")) base.horizon_steps = get_int(j["horizon_steps"], "horizon_steps");
    if (j.contains("stop_norm")) base.stop_norm = get_number(j["stop_norm"], "stop_norm");
    if (j.contains("solver")) parse_solver(j["solver"], base.solver);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) fail("seed", "expected an integer");
        base.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) fail("output_dir", "expected a string");
        base.output_dir = j["output_dir"].get<std::string>();
    }
    base.validate();
    return base;
}

ExperimentConfig load_config(const fs::path& file, ExperimentConfig base) {
    std::ifstream in(file);
    if (!in) throw ConfigError("config: cannot open " + file.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), std::move(base));
}

namespace {

std::string fmt(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

/// Per-state iteration index: which solve produced the input at each time.
std::vector<int> iteration_of_time(const ClosedLoopLog& log) {
    std::vector<int> idx(log.states.size(), 0);
    for (std::size_t k = 0; k < log.iteration_marks.size(); ++k) {
        const std::size_t t0 = static_cast<std::size_t>(log.iteration_marks[k]);
        const std::size_t t1 = t0 + static_cast<std::size_t>(log.applied_steps[k]);
        for (std::size_t t = t0; t < t1 && t < idx.size(); ++t) idx[t] = static_cast<int>(k);
    }
    if (!log.iteration_marks.empty() && !idx.empty())
        idx.back() = static_cast<int>(log.iteration_marks.size()) - 1;
    return idx;
}

}  // namespace

void write_trajectory_csv(const fs::path& path, const ClosedLoopLog& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << "t,x,y,theta,v,omega,F,T,V,iteration,ell\n";
    const std::vector<int> iter = iteration_of_time(log);
    for (std::size_t t = 0; t < log.states.size(); ++t) {
        const State5& s = log.states[t];
        out << t << ',' << fmt(s.x) << ',' << fmt(s.y) << ',' << fmt(s.theta) << ',' << fmt(s.v) << ','
            << fmt(s.omega) << ',';
        if (t < log.inputs.size())
            out << fmt(log.inputs[t].force) << ',' << fmt(log.inputs[t].torque);
        else
            out << ',';
        const int ell =
            log.flexible_steps.empty() ? 0 : log.flexible_steps[static_cast<std::size_t>(iter[t])];
        out << ',' << fmt(log.v_values[t]) << ',' << iter[t] << ',' << ell << '\n';
    }
}

namespace {

struct Box {
    double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
    void grow(double x, double y) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
    }
};

}  // namespace

void write_path_svg(const fs::path& path, const ClosedLoopLog& log,
                    const std::vector<Ellipse>& obstacles) {
    constexpr double kSize = 720.0;
    constexpr double kMargin = 48.0;

    Box box;  // always contains the origin
    for (const State5& s : log.states) box.grow(s.x, s.y);
    for (const Ellipse& e : obstacles) {
        const double det = e.q11 * e.q22 - e.q12 * e.q12;
        const double bx = std::sqrt(e.q22 / det);
        const double by = std::sqrt(e.q11 / det);
        box.grow(e.px - bx, e.py - by);
        box.grow(e.px + bx, e.py + by);
    }
    const double width = std::max({box.max_x - box.min_x, box.max_y - box.min_y, 1e-6});
    const double scale = (kSize - 2.0 * kMargin) / width;
    const double cx = 0.5 * (box.min_x + box.max_x);
    const double cy = 0.5 * (box.min_y + box.max_y);
    auto map_x = [&](double x) { return kSize / 2.0 + (x - cx) * scale; };
    auto map_y = [&](double y) { return kSize / 2.0 - (y - cy) * scale; };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
        << "\" viewBox=\"0 0 " << kSize << " " << kSize << "\">\n";
    out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (const Ellipse& e : obstacles) {
        const double s = std::hypot(e.q11 - e.q22, 2.0 * e.q12);
        const double l1 = 0.5 * (e.q11 + e.q22 + s);
        const double l2 = 0.5 * (e.q11 + e.q22 - s);
        double angle = 0.0;
        if (std::abs(e.q12) > 1e-15)
            angle = std::atan2(l1 - e.q11, e.q12);
        else if (e.q22 > e.q11)
            angle = std::numbers::pi / 2.0;
        const double deg = -angle * 180.0 / std::numbers::pi;
        out << "  <ellipse cx=\"0\" cy=\"0\" rx=\"" << fmt(scale / std::sqrt(l1)) << "\" ry=\""
            << fmt(scale / std::sqrt(l2)) << "\" transform=\"translate(" << fmt(map_x(e.px)) << ","
            << fmt(map_y(e.py)) << ") rotate(" << fmt(deg)
            << ")\" fill=\"#fbeaea\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";
    }

    out << "  <polyline fill=\"none\" stroke=\"#2c3e50\" stroke-width=\"1.5\" points=\"";
    for (const State5& s : log.states) out << fmt(map_x(s.x)) << ',' << fmt(map_y(s.y)) << ' ';
    out << "\"/>\n";

    const std::size_t stride = std::max<std::size_t>(1, log.states.size() / 40);
    for (std::size_t t = 0; t < log.states.size(); t += stride) {
        const State5& s = log.states[t];
        const double x0 = map_x(s.x);
        const double y0 = map_y(s.y);
        const double dx = std::cos(s.theta);
        const double dy = -std::sin(s.theta);
        const double len = 12.0;
        const double x1 = x0 + len * dx;
        const double y1 = y0 + len * dy;
        const double hx = -0.35 * len * dx;
        const double hy = -0.35 * len * dy;
        out << "  <g stroke=\"#2980b9\" stroke-width=\"1.2\">"
            << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x1) << "\" y2=\""
            << fmt(y1) << "\"/>"
            << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\""
            << fmt(x1 + hx - 0.35 * hy) << "\" y2=\"" << fmt(y1 + hy + 0.35 * hx) << "\"/>"
            << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\""
            << fmt(x1 + hx + 0.35 * hy) << "\" y2=\"" << fmt(y1 + hy - 0.35 * hx) << "\"/></g>\n";
    }

    out << "  <circle cx=\"" << fmt(map_x(log.states.front().x)) << "\" cy=\""
        << fmt(map_y(log.states.front().y)) << "\" r=\"4\" fill=\"#27ae60\"/>\n";
    out << "  <g stroke=\"#7f8c8d\" stroke-width=\"1\"><line x1=\"" << fmt(map_x(0.0) - 6.0)
        << "\" y1=\"" << fmt(map_y(0.0)) << "\" x2=\"" << fmt(map_x(0.0) + 6.0) << "\" y2=\""
        << fmt(map_y(0.0)) << "\"/><line x1=\"" << fmt(map_x(0.0)) << "\" y1=\""
        << fmt(map_y(0.0) - 6.0) << "\" x2=\"" << fmt(map_x(0.0)) << "\" y2=\""
        << fmt(map_y(0.0) + 6.0) << "\"/></g>\n";
    out << "</svg>\n";
}

void write_summary(const fs::path& path, const ExperimentConfig& cfg, const ExperimentResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    const ClosedLoopLog& log = result.log;
    out << "experiment=" << cfg.name << "\n";
    out << "condition=" << (cfg.spec.condition == Condition::cond1 ? 1 : 2) << "\n";
    out << "plant=" << (cfg.plant.kind == PlantKind::discrete ? "discrete" : "continuous") << "\n";
    out << "implemented_steps=" << log.inputs.size() << "\n";
    out << "iterations=" << log.iteration_marks.size() << "\n";
    out << "final_norm=" << fmt(result.final_norm) << "\n";
    out << "final_v=" << fmt(log.v_values.back()) << "\n";
    std::size_t fallbacks = 0;
    for (SolutionSource s : log.solver_sources)
        if (s == SolutionSource::warm_start_fallback) ++fallbacks;
    out << "warm_start_fallbacks=" << fallbacks << "\n";
    out << "max_obstacle_activation=" << fmt(result.max_activation) << "\n";
    out << "max_obstacle_activation_after_first_iteration=" << fmt(result.max_activation_after_first)
        << "\n";
    out << "envelope_max_ratio=" << fmt(result.envelope.max_ratio) << "\n";
    out << "envelope_worst_time=" << result.envelope.worst_time << "\n";
    out << "envelope_pass=" << (result.envelope.pass ? 1 : 0) << "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const EgdclfSpec spec = cfg.build_spec();
    MpcOptions opts;
    opts.solver = cfg.solver;
    opts.stop_norm = cfg.stop_norm;

    ExperimentResult result;
    result.log = mpc_run(cfg.initial_state, spec, cfg.cost, cfg.params, cfg.plant, cfg.horizon_steps, opts);
    result.envelope = check_envelope(result.log, envelope_params(spec));
    result.final_norm = result.log.states.back().norm();

    // end of the first implemented block (tau_1)
    const std::size_t first_mark_end =
        result.log.iteration_marks.empty()
            ? 0
            : static_cast<std::size_t>(result.log.iteration_marks[0] + result.log.applied_steps[0]);
    for (std::size_t t = 0; t < result.log.states.size(); ++t) {
        double act = 0.0;
        for (const Ellipse& e : cfg.cost.obstacles)
            act = std::max(act, obstacle_activation(result.log.states[t].x, result.log.states[t].y, e));
        result.max_activation = std::max(result.max_activation, act);
        if (t > first_mark_end)
            result.max_activation_after_first = std::max(result.max_activation_after_first, act);
    }

    fs::path dir = cfg.output_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("FSMPC_OUT_DIR")) dir = env;
        if (dir.empty()) dir = ".";
    }
    fs::create_directories(dir);
    result.csv_path = dir / (cfg.name + "_trajectory.csv");
    result.svg_path = dir / (cfg.name + "_path.svg");
    result.summary_path = dir / (cfg.name + "_summary.txt");
    write_trajectory_csv(result.csv_path, result.log);
    write_path_svg(result.svg_path, result.log, cfg.cost.obstacles);
    write_summary(result.summary_path, cfg, result);
    return result;
}

}  // namespace fsmpc
