#pragma once

#include "gatecraft/config.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gatecraft {

enum ExitCode : int {
    exit_ok = 0,
    exit_io = 1,
    exit_validation = 2,
    exit_numeric = 3,
    exit_nonconvergence = 4,
};

struct RunContext {
    ExperimentConfig config;
    std::filesystem::path out_dir;
    int jobs = 1;
    std::ostream* log = nullptr;  // progress messages, may be null
};

// --out, then the config's output field, then GATECRAFT_OUT, then the working directory.
std::filesystem::path resolve_output_dir(const std::optional<std::string>& cli_out,
                                         const ExperimentConfig& cfg);

// Provenance lines written into every output file.
std::vector<std::string> assumption_ledger(const ExperimentConfig& cfg);

const std::vector<std::string>& command_names();

int cmd_spectrum(const RunContext& ctx);
int cmd_optimize(const RunContext& ctx);
int cmd_sweep(const RunContext& ctx);
int cmd_sensitivity(const RunContext& ctx);
int cmd_lindblad(const RunContext& ctx);
int cmd_zz_estimate(const RunContext& ctx);

// Dispatches by name and maps exceptions onto exit codes, reporting them on err.
int run_command(const std::string& name, const RunContext& ctx, std::ostream& err);

// %.12g
std::string format_number(double v);

}  // namespace gatecraft
