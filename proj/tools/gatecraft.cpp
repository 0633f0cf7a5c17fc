// Batch front end: gatecraft <command> --config path.json [--jobs N] [--out dir]

#include "gatecraft/commands.hpp"
#include "gatecraft/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace gatecraft;
    CLI::App app{"Parametric two-qubit gate simulator"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::string> out;
    int jobs = 1;
    bool quiet = false;
    for (const auto& name : command_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--jobs", jobs, "concurrent sweep points")->check(CLI::PositiveNumber);
        sub->add_option("--out", out, "output directory");
        sub->add_flag("--quiet", quiet, "suppress progress messages");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }

    RunContext ctx;
    try {
        ctx.config = load_config(config_path);
        ctx.out_dir = resolve_output_dir(out, ctx.config);
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return exit_io;
    } catch (const InvalidParameter& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return exit_validation;
    }
    ctx.jobs = jobs;
    if (!quiet) ctx.log = &std::clog;
    return run_command(app.get_subcommands().front()->get_name(), ctx, std::cerr);
}
