#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "config.hpp"
#include "experiments.hpp"
#include "gafzeros/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Flags {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zeros of Gaussian analytic functions: overcrowding and deviation experiments", "gafz"};
    app.require_subcommand(1);
    Flags flags;
    for (const std::string& name : gafz::cli::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, "Run the " + name + " experiment");
        sub->add_option("--config", flags.config, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "Output directory")->capture_default_str();
        sub->add_option("--seed", flags.seed, "Seed (overrides the config)");
        sub->add_option("--threads", flags.threads, "Worker threads (overrides the config)")
            ->check(CLI::Range(1u, 1024u));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    const std::string experiment = app.get_subcommands().front()->get_name();

    gafz::cli::RunConfig cfg;
    try {
        cfg = gafz::cli::load_config(flags.config, experiment, flags.seed);
        if (flags.threads) cfg.threads = *flags.threads;
    } catch (const gafz::ConfigError& e) {
        std::fprintf(stderr, "config error at %s\n", e.what());
        return kExitConfig;
    }

    try {
        for (const std::string& path : gafz::cli::run_experiment(cfg, flags.out)) std::printf("%s\n", path.c_str());
    } catch (const gafz::DomainError& e) {
        std::fprintf(stderr, "numeric failure (domain): %s\n", e.what());
        return kExitNumeric;
    } catch (const gafz::InconclusiveError& e) {
        std::fprintf(stderr, "numeric failure (inconclusive): %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
