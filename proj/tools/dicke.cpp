#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "dicke/app/commands.hpp"

using namespace dicke;

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("dicke"));
    spdlog::set_pattern("[%l] %v");

    CLI::App app{"Driven Dicke model: Floquet master equation, non-Markovianity, Husimi maps"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(app::code_version()));

    std::string config_path;
    std::optional<std::string> out_dir, cache_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool verbose = false;

    const std::map<std::string, std::string> about = {
        {"spectrum", "eigenvalues of the undriven Hamiltonian"},
        {"floquet", "quasienergies, mean energies and stationary populations"},
        {"husimi", "Husimi Q map of the stationary cavity state"},
        {"nonmark", "non-Markovianity of the emitter dynamics per sweep point"},
        {"deltan", "difference of the maximized non-Markovianity with and without drive"},
        {"semiclassical", "mean-field trajectory"},
    };
    for (const auto& name : app::command_names()) {
        auto* sub = app.add_subcommand(name, about.at(name));
        sub->add_option("--config", config_path, "configuration file (key: value)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--cache", cache_dir, "cache directory; empty string disables caching");
        sub->add_option("--seed", seed, "base seed of the random pairs");
        sub->add_option("--threads", threads, "worker threads for sweeps")->check(CLI::Range(1, 1024));
        sub->add_flag("-v,--verbose", verbose, "debug logging");
    }
    auto* ref = app.add_subcommand("reference", "print every configuration key with its default");
    auto* emit = app.add_subcommand("canonical", "print the fully expanded configuration and its hash");
    emit->add_option("--config", config_path, "configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : app::kConfigError;
    }
    if (verbose) spdlog::set_level(spdlog::level::debug);

    try {
        if (ref->parsed()) {
            std::cout << app::reference_text();
            return app::kSuccess;
        }
        app::RunConfig cfg = app::parse_config(config_path);
        if (emit->parsed()) {
            std::cout << app::emit_canonical(cfg) << "# hash " << app::config_hash(cfg) << "\n";
            return app::kSuccess;
        }
        if (out_dir) cfg.output_dir = *out_dir;
        if (cache_dir) cfg.cache_dir = *cache_dir;
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        const std::string name = app.get_subcommands().front()->get_name();
        return app::run_command(name, cfg).exit_code;
    } catch (const app::ConfigError& e) {
        spdlog::error("configuration: {}", e.what());
        return app::kConfigError;
    } catch (const app::CacheCorruption& e) {
        spdlog::error("{}; delete the file to recompute", e.what());
        return app::kCacheCorruption;
    } catch (const NumericalError& e) {
        spdlog::error("numerical failure: {}", e.what());
        return app::kConvergenceFailure;
    } catch (const InvalidArgument& e) {
        spdlog::error("invalid input: {}", e.what());
        return app::kConfigError;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return app::kFailure;
    }
}
