#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bolab/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Born-Oppenheimer model-molecule laboratory"};
    app.set_help_flag("-h,--help", "Show usage");

    std::string command;
    std::string config_path;
    std::string out;
    std::size_t threads = 0;
    std::uint64_t seed = 0;

    app.add_option("command", command, "One of pes, bo, exact, project, compare, scaling")->required();
    app.add_option("--config", config_path, "JSON run configuration")->envname("BO_LAB_CONFIG")->required();
    auto* out_opt = app.add_option("--out", out, "Output directory")->envname("BO_LAB_OUT");
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads")->envname("BO_LAB_THREADS");
    auto* seed_opt = app.add_option("--seed", seed, "Seed for iterative start vectors")->envname("BO_LAB_SEED");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help() << '\n' << bolab::usage();
        return bolab::kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n' << bolab::usage();
        return bolab::kExitUsage;
    }

    bolab::RunOverrides overrides;
    if (*out_opt) overrides.out = out;
    if (*threads_opt) overrides.threads = threads;
    if (*seed_opt) overrides.seed = seed;
    return bolab::run_command(command, config_path, overrides, std::cerr);
}
