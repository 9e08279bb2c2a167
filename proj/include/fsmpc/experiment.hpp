#ifndef FSMPC_EXPERIMENT_HPP
#define FSMPC_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fsmpc/analysis.hpp"
#include "fsmpc/controller.hpp"

namespace fsmpc {

/// Lyapunov-parameterization part of an experiment configuration. The step
/// size is always taken from the model parameters.
struct SpecConfig {
    Condition condition = Condition::cond2;
    int N = 12;
    double alpha = 0.3;
    std::vector<double> sigma_head;  // condition 1 only; empty -> 1e-3 each
};

/// Complete description of one closed-loop experiment.
struct ExperimentConfig {
    std::string name = "experiment";
    UnicycleParams params;
    SpecConfig spec;
    CostConfig cost;
    PlantModel plant{PlantKind::continuous, 20};
    State5 initial_state;
    int horizon_steps = 300;
    double stop_norm = 1e-3;
    SolverOptions solver;
    std::uint64_t seed = 0;
    std::string output_dir;  // empty: $FSMPC_OUT_DIR, then "."

    /// Materializes the EgdclfSpec (throws ConfigError on invalid fields).
    EgdclfSpec build_spec() const;

    /// Validates every field against the module preconditions.
    void validate() const;
};

/// Bundled experiment setups. Names: "sec6-cond1", "sec6-cond2".
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Parses a JSON config; keys present in the file override `base` fields.
/// Throws ConfigError with a field-level message on schema violations.
ExperimentConfig load_config(const std::filesystem::path& file, ExperimentConfig base = {});
ExperimentConfig parse_config(const std::string& json_text, ExperimentConfig base = {});

struct ExperimentResult {
    ClosedLoopLog log;
    EnvelopeReport envelope;
    double final_norm = 0.0;
    double max_activation = 0.0;             // max obstacle activation, all implemented states
    double max_activation_after_first = 0.0; // same, restricted to t > tau_1
    std::filesystem::path csv_path;
    std::filesystem::path svg_path;
    std::filesystem::path summary_path;
};

/// Runs the closed loop and writes the trajectory CSV, the (x, y) SVG plot
/// and a text summary into the resolved output directory.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Artifact writers (exposed for tests).
void write_trajectory_csv(const std::filesystem::path& path, const ClosedLoopLog& log);
void write_path_svg(const std::filesystem::path& path, const ClosedLoopLog& log,
                    const std::vector<Ellipse>& obstacles);
void write_summary(const std::filesystem::path& path, const ExperimentConfig& cfg,
                   const ExperimentResult& result);

}  // namespace fsmpc

#endif  // FSMPC_EXPERIMENT_HPP
