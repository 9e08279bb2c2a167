// Black-box checks of the command-line interface: exit codes and artifact
// emission, driven through the real binary.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

#ifndef FSMPC_CLI_PATH
#error "FSMPC_CLI_PATH must point at the CLI binary"
#endif

int run_cli(const std::string& args) {
    const std::string command = std::string(FSMPC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("fsmpc_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("exit code 0 on a successful run and verify") {
    const fs::path dir = fresh_dir("ok");
    // discrete plant with a tiny budget keeps this fast
    const fs::path cfg = dir / "cfg.json";
    std::ofstream(cfg) << R"({"plant": {"kind": "discrete"}, "horizon_steps": 20,
                             "solver": {"max_outer": 0}})";
    CHECK(run_cli("run --preset sec6-cond2 --config " + cfg.string() + " --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "sec6-cond2_trajectory.csv"));
    CHECK(fs::exists(dir / "sec6-cond2_path.svg"));
    CHECK(fs::exists(dir / "sec6-cond2_summary.txt"));
    CHECK(run_cli("verify --suite steering --seed 4 --samples 50") == 0);
    fs::remove_all(dir);
}

TEST_CASE("exit code 2 on configuration errors") {
    CHECK(run_cli("run") == 2);                          // neither config nor preset
    CHECK(run_cli("run --preset unknown") == 2);         // rejected by the option check
    CHECK(run_cli("verify --suite bogus") == 2);         // rejected by the option check
    CHECK(run_cli("verify") == 2);                       // --suite is required
    const fs::path dir = fresh_dir("badcfg");
    const fs::path cfg = dir / "bad.json";
    std::ofstream(cfg) << R"({"spec": {"N": 7}})";
    CHECK(run_cli("run --config " + cfg.string()) == 2);  // N >= 8 violated
    CHECK(run_cli("run --config " + (dir / "missing.json").string()) == 2);
    fs::remove_all(dir);
}

TEST_CASE("help exits cleanly") { CHECK(run_cli("--help") == 0); }
