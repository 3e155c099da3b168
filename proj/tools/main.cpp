#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace uteich::cli;
    CLI::App app{"uteich: welding, Grassmannian geometry and KdV runs"};
    app.require_subcommand(1);
    std::string configPath, outDir = ".";
    std::int64_t seed = -1;
    bool quiet = false;
    app.add_option("--config", configPath, "key=value run configuration");
    app.add_option("--seed", seed, "overrides run.seed")->check(CLI::NonNegativeNumber);
    app.add_option("--out", outDir, "output directory");
    app.add_flag("--quiet", quiet, "no JSON summary on stdout");
    for (const auto& name : command_names()) app.add_subcommand(name);
    CLI11_PARSE(app, argc, argv);

    try {
        RunContext ctx;
        ctx.config = configPath.empty() ? RunConfig{} : RunConfig::load(configPath);
        if (seed >= 0) ctx.config.seed = static_cast<std::uint64_t>(seed);
        ctx.outDir = outDir;
        ctx.quiet = quiet;
        return run_command(app.get_subcommands().front()->get_name(), ctx, std::cout);
    } catch (const uteich::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
