#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fsmpc/experiment.hpp"
#include "fsmpc/verify.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Flexible-step MPC simulator for the force- and torque-actuated unicycle"};
    app.require_subcommand(1);

    std::string config_path, preset_name, out_dir;
    CLI::App* run = app.add_subcommand("run", "Run a closed-loop experiment and write CSV/SVG artifacts");
    run->add_option("--config", config_path, "JSON config file; overrides the preset/default base");
    run->add_option("--preset", preset_name, "Bundled setup")
        ->check(CLI::IsMember(fsmpc::preset_names()));
    run->add_option("--out", out_dir, "Output directory (default: $FSMPC_OUT_DIR, then .)");

    std::string suite;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    CLI::App* verify =
        app.add_subcommand("verify", "Run a property suite and print a machine-readable report");
    verify->add_option("--suite", suite, "Property suite")
        ->required()
        ->check(CLI::IsMember({"egdclf", "steering", "envelope", "prop1", "all"}));
    verify->add_option("--seed", seed, "Base seed for the sampled checks");
    verify->add_option("--samples", samples, "Sample/run count override (0 keeps the suite default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            if (config_path.empty() && preset_name.empty())
                throw fsmpc::ConfigError("run: provide --config and/or --preset");
            fsmpc::ExperimentConfig cfg =
                preset_name.empty() ? fsmpc::ExperimentConfig{} : fsmpc::preset(preset_name);
            if (!config_path.empty()) cfg = fsmpc::load_config(config_path, std::move(cfg));
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            const fsmpc::ExperimentResult result = fsmpc::run_experiment(cfg);
            std::cout << "experiment=" << cfg.name << " steps=" << result.log.inputs.size()
                      << " iterations=" << result.log.iteration_marks.size()
                      << " final_norm=" << result.final_norm << "\n"
                      << "csv=" << result.csv_path.string() << "\n"
                      << "svg=" << result.svg_path.string() << "\n"
                      << "summary=" << result.summary_path.string() << "\n";
            return 0;
        }
        const fsmpc::VerifyOptions opts{seed, samples};
        bool ok = true;
        for (const fsmpc::SuiteReport& report : fsmpc::verify_suites(suite, opts)) {
            fsmpc::print_report(std::cout, report);
            ok = ok && report.pass();
        }
        return ok ? 0 : 1;
    } catch (const fsmpc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
