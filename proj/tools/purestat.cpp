// purestat: run one command from a JSON config and write its CSV.
//
//   purestat <command> --config <path> --out <path> [--dim N] [--seed S] [--tol T]
//                      [--dump-config <path>]
//
// Exit codes: 0 success, 1 config or validation error, 2 numerical failure.
// PURESTAT_LOG selects the stderr log level (trace, debug, info, warn, error, off).

#include <chrono>
#include <cstdlib>
#include <fstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "purestat/cli.hpp"

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("purestat");
    logger->set_pattern("[%l] %v");
    logger->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("PURESTAT_LOG")) {
        const auto lvl = spdlog::level::from_str(env);
        // from_str maps unknown names to off; only honour names it knows.
        if (lvl != spdlog::level::off || std::string(env) == "off") logger->set_level(lvl);
        else logger->warn("ignoring unknown PURESTAT_LOG value '{}'", env);
    }
    spdlog::set_default_logger(logger);
}

int run(const std::string& command, const std::string& config_path, const std::string& out_path,
        const std::string& dump_path, const purestat::config::Overrides& ov) {
    using namespace purestat;
    try {
        config::RunConfig cfg = config::apply_overrides(config::load_config(config_path), ov, command);
        spdlog::info("{}: config {} hash {}", command, config_path, config::config_hash(cfg));
        spdlog::debug("canonical config:\n{}", config::canonical_text(cfg));
        if (!dump_path.empty()) {
            std::ofstream f(dump_path, std::ios::binary | std::ios::trunc);
            if (!(f << config::canonical_text(cfg))) throw Error(ErrorKind::InvalidConfig, "cannot write '" + dump_path + "'");
        }

        const auto t0 = std::chrono::steady_clock::now();
        cli::CommandResult res = cli::run_command(command, cfg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        res.csv.path = out_path;
        res.csv.write();
        spdlog::info("{}: {} rows written to {} in {:.3f} s", command, res.csv.rows.size(), out_path, secs);
        if (res.exit_code != cli::kExitOk) spdlog::error("{}: numerical check failed (exit {})", command, res.exit_code);
        return res.exit_code;
    } catch (const Error& e) {
        spdlog::error("{}: {} ({})", command, e.what(), to_string(e.kind()));
        return cli::exit_code_for(e);
    } catch (const std::exception& e) {
        spdlog::error("{}: {}", command, e.what());
        return cli::kExitConfig;
    }
}

} // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Stationary states and dynamics of open quantum system generators"};
    app.require_subcommand(1);

    std::string config_path, out_path, dump_path;
    std::optional<std::int64_t> dim;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;

    for (const auto& name : purestat::cli::command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "CSV output path")->required();
        sub->add_option("--dim", dim, "override hilbert.dim (algebra.dim for verify-algebra)");
        sub->add_option("--seed", seed, "override algebra.seed");
        sub->add_option("--tol", tol, "override steady.tol");
        sub->add_option("--dump-config", dump_path, "also write the canonical config (defaults filled) here");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return purestat::cli::kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    return run(command, config_path, out_path, dump_path, purestat::config::Overrides{dim, seed, tol});
}
