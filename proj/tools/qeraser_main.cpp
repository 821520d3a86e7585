// qeraser command-line front end.
//
// Subcommands:
//   simulate  - run one configuration exactly (and sampled when shots > 0)
//   sweep     - run the sweep declared in the configuration
//   chsh      - evaluate the CHSH quadruple of a chsh configuration
//   validate  - lint a configuration, reporting every violation
//   selftest  - run the built-in invariant suites
//
// Exit codes: 0 success, 2 configuration error, 3 statistical self-check
// failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qeraser/qeraser.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitSelfCheckFailure = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct CommonOptions {
    std::string config_path;
    std::string out_path;
    bool no_timestamp = false;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::uint64_t> shots_override;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_config) {
    auto* config = cmd->add_option("--config", opts.config_path, "Path to a JSON experiment config");
    if (needs_config) config->required();
    cmd->add_option("--out", opts.out_path, "Write CSV here instead of standard output");
    cmd->add_option("--seed", opts.seed_override, "Override the config seed");
    cmd->add_option("--shots", opts.shots_override, "Override the config shot count");
    cmd->add_flag("--no-timestamp", opts.no_timestamp, "Suppress the timestamp comment line");
}

qeraser::ExperimentConfig load_config(const CommonOptions& opts) {
    qeraser::ExperimentConfig cfg = qeraser::parse_config(read_file(opts.config_path));
    if (opts.seed_override) cfg.seed = *opts.seed_override;
    if (opts.shots_override) cfg.shots = *opts.shots_override;
    return cfg;
}

int emit(const qeraser::RunResult& result, const CommonOptions& opts) {
    if (opts.out_path.empty()) {
        qeraser::write_csv(std::cout, result, !opts.no_timestamp);
    } else {
        std::ofstream out(opts.out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot open output file: " << opts.out_path << "\n";
            return kExitConfigError;
        }
        qeraser::write_csv(out, result, !opts.no_timestamp);
    }
    if (result.stat_check_failed)
        std::cerr << "error: sampled frequencies fell outside the 5-sigma self-check band\n";
    return result.exit_code();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and Monte-Carlo simulation of delayed-choice quantum erasers"};
    app.require_subcommand(1);

    CommonOptions simulate_opts, sweep_opts, chsh_opts, validate_opts;
    auto* simulate = app.add_subcommand("simulate", "Run one configuration");
    add_common(simulate, simulate_opts, true);
    auto* sweep = app.add_subcommand("sweep", "Run the sweep declared in the configuration");
    add_common(sweep, sweep_opts, true);
    auto* chsh = app.add_subcommand("chsh", "Evaluate a CHSH quadruple");
    add_common(chsh, chsh_opts, true);
    auto* validate = app.add_subcommand("validate", "Lint a configuration");
    validate->add_option("--config", validate_opts.config_path, "Path to a JSON experiment config")
        ->required();
    auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant suites");

    CLI11_PARSE(app, argc, argv);

    try {
        if (selftest->parsed()) {
            const bool ok = qeraser::selftest(std::cout);
            std::cout << (ok ? "selftest: all checks passed\n" : "selftest: FAILURES above\n");
            return ok ? 0 : kExitSelfCheckFailure;
        }
        if (validate->parsed()) {
            try {
                qeraser::parse_config(read_file(validate_opts.config_path));
            } catch (const qeraser::ConfigError& e) {
                std::cerr << e.what() << "\n";
                return kExitConfigError;
            }
            std::cout << "config ok\n";
            return 0;
        }

        const CommonOptions& opts =
            simulate->parsed() ? simulate_opts : (sweep->parsed() ? sweep_opts : chsh_opts);
        qeraser::ExperimentConfig cfg = load_config(opts);

        if (simulate->parsed() && cfg.sweep) {
            std::cerr << "error: config declares a sweep; use the sweep subcommand\n";
            return kExitConfigError;
        }
        if (sweep->parsed() && !cfg.sweep && cfg.experiment != qeraser::Experiment::mwi_check) {
            std::cerr << "error: sweep subcommand requires a sweep block in the config\n";
            return kExitConfigError;
        }
        if (chsh->parsed() && cfg.experiment != qeraser::Experiment::chsh) {
            std::cerr << "error: chsh subcommand requires a chsh experiment config\n";
            return kExitConfigError;
        }

        return emit(qeraser::run(cfg), opts);
    } catch (const qeraser::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const qeraser::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}
