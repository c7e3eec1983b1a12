#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nehari/commands.hpp"
#include "nehari/config.hpp"
#include "nehari/errors.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool quiet = false;
};

void attach_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "run configuration file")
        ->required();
    sub->add_option("--seed", args.seed, "override the configured seed");
    sub->add_option("--out", args.out_dir, "override the output directory");
    sub->add_flag("--quiet", args.quiet, "suppress the human-readable report");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nehari-manifold laboratory for Orlicz energy functionals"};
    app.require_subcommand(1);

    CommonArgs args;
    const char* names[] = {"check", "constants", "fiber", "solve", "verify"};
    const char* descs[] = {
        "validate the structural hypotheses of the generator",
        "estimate the embedding constant and source thresholds",
        "scan the fibering map along one direction",
        "minimize the energy on both manifold branches",
        "run the internal property-check suites"};
    for (int i = 0; i < 5; ++i) {
        attach_common(app.add_subcommand(names[i], descs[i]), args);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Exit contract: usage/parse failures report 2; --help stays 0.
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const CLI::App* sub = app.get_subcommands().front();
    nehari::RunConfig cfg;
    try {
        cfg = nehari::load_config(args.config_path);
    } catch (const nehari::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (args.seed) cfg.seed = *args.seed;
    if (args.out_dir) cfg.output_dir = *args.out_dir;

    try {
        return nehari::run_command(sub->get_name(), cfg, std::cout, args.quiet);
    } catch (const nehari::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nehari::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
