// spinbath: command-line front end for the central-spin dephasing toolkit.
//
// Exit codes: 0 success, 1 oracle failure or prediction/simulation tension, 2 configuration error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spinbath/errors.hpp"
#include "spinbath/harness.hpp"

namespace {

using namespace spinbath;
using namespace spinbath::harness;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct CommonOptions {
    std::string config_path;
    std::string model_path;
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> seed;
    std::optional<double> equal_coupling;
    std::optional<double> g_max;
    std::optional<std::string> phase;
    std::optional<double> t_start;
    std::optional<double> t_end;
    std::optional<std::size_t> steps;
    std::optional<std::size_t> cap;
    std::string output;
    std::optional<std::string> format;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "Experiment document (JSON)");
    cmd->add_option("--model", o.model_path, "Model document (JSON)");
    cmd->add_option("--n", o.n, "Number of environment spins for a generated model");
    cmd->add_option("--seed", o.seed, "Seed for a generated model");
    cmd->add_option("--equal-coupling", o.equal_coupling, "Give every environment spin coupling g");
    cmd->add_option("--g-max", o.g_max, "Upper bound of uniformly drawn couplings");
    cmd->add_option("--phase", o.phase, "Amplitude phases of a generated model: zero or uniform");
    cmd->add_option("--t-start", o.t_start, "First time of the grid");
    cmd->add_option("--t-end", o.t_end, "Last time of the grid");
    cmd->add_option("--steps", o.steps, "Number of grid points");
    cmd->add_option("--cap", o.cap, "Enumeration cap on N");
    cmd->add_option("--output", o.output, "Output file (default: standard output)");
    cmd->add_option("--format", o.format, "Output format: csv or json");
}

// Loads the document (if any) and applies command-line overrides on top of it.
ExperimentConfig build_config(const CommonOptions& o) {
    ExperimentConfig config;
    const bool has_generator = o.n || o.seed || o.equal_coupling || o.g_max || o.phase;
    if (!o.config_path.empty()) {
        config = load_config(o.config_path);
    } else if (!o.model_path.empty()) {
        config.model_source = load_model(o.model_path);
    } else if (!o.n) {
        throw ConfigError("--n", "one of --config, --model or --n is required");
    }
    if (!o.model_path.empty() && !o.config_path.empty()) {
        throw ConfigError("--model", "cannot be combined with --config");
    }

    if (has_generator) {
        if (std::holds_alternative<SpinBathModel>(config.model_source) && !o.model_path.empty()) {
            throw ConfigError("--n", "generator options cannot be combined with --model");
        }
        RandomSource src;
        if (const auto* existing = std::get_if<RandomSource>(&config.model_source)) src = *existing;
        if (o.n) src.n = *o.n;
        if (o.seed) src.seed = *o.seed;
        if (o.equal_coupling && o.g_max) throw ConfigError("--equal-coupling", "cannot be combined with --g-max");
        if (o.equal_coupling) {
            if (*o.equal_coupling == 0.0) throw ConfigError("--equal-coupling", "must be nonzero");
            src.coupling = EqualCoupling{*o.equal_coupling};
        }
        if (o.g_max) {
            if (!(*o.g_max > 0.0)) throw ConfigError("--g-max", "must be positive");
            src.coupling = UniformPositive{*o.g_max};
        }
        if (o.phase) {
            if (*o.phase == "zero") {
                src.phase = PhaseLaw::Zero;
            } else if (*o.phase == "uniform") {
                src.phase = PhaseLaw::Uniform;
            } else {
                throw ConfigError("--phase", "expected zero or uniform");
            }
        }
        if (src.n == 0) throw ConfigError("--n", "must be at least 1");
        config.model_source = src;
    }

    if (o.t_start || o.t_end || o.steps) {
        TimeGrid grid = config.time_grid.value_or(TimeGrid{});
        if (!config.time_grid && !o.t_end) throw ConfigError("--t-end", "required when --t-start or --steps is given");
        if (o.t_start) grid.t_start = *o.t_start;
        if (o.t_end) grid.t_end = *o.t_end;
        if (o.steps) grid.steps = *o.steps;
        if (!(grid.t_start < grid.t_end)) throw ConfigError("--t-end", "must exceed the start time");
        if (grid.steps < 2) throw ConfigError("--steps", "must be at least 2");
        config.time_grid = grid;
    }
    if (o.cap) config.verdict.enumeration_cap = *o.cap;
    if (!o.output.empty()) config.output.path = o.output;
    if (o.format) {
        if (*o.format == "csv") {
            config.output.format = OutputFormat::Csv;
        } else if (*o.format == "json") {
            config.output.format = OutputFormat::Json;
        } else {
            throw ConfigError("--format", "expected csv or json");
        }
    }
    return config;
}

bool to_stdout(const ExperimentConfig& config) { return config.output.path.empty(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Central-spin dephasing: simulation, spectral prediction and oracle checks"};
    app.require_subcommand(1);

    CommonOptions simulate_opts, predict_opts, compare_opts, spectrum_opts;
    auto* simulate = app.add_subcommand("simulate", "Sample r(t), |r(t)|^2 and <sigma_x>(t) on a time grid");
    auto* predict = app.add_subcommand("predict", "Evaluate the decoherence criterion on the spectrum");
    auto* compare_cmd = app.add_subcommand("compare", "Check the verdict against the sampled decay");
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Dump the spectral decomposition of r(t)");
    add_common(simulate, simulate_opts);
    add_common(predict, predict_opts);
    add_common(compare_cmd, compare_opts);
    add_common(spectrum_cmd, spectrum_opts);

    std::size_t n_max = 8;
    std::size_t cases = 100;
    std::uint64_t oracle_seed = 1;
    auto* oracle = app.add_subcommand("oracle-check", "Compare closed forms with brute-force state vectors");
    oracle->add_option("--n-max", n_max, "Largest environment size drawn");
    oracle->add_option("--cases", cases, "Number of random cases");
    oracle->add_option("--seed", oracle_seed, "Master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (simulate->parsed()) {
            const auto config = build_config(simulate_opts);
            const auto series = run_simulate(config);
            if (to_stdout(config)) {
                const bool csv = config.output.format.value_or(OutputFormat::Csv) == OutputFormat::Csv;
                std::cout << (csv ? series_to_csv(series) : series_to_json(series));
            }
            return kExitOk;
        }
        if (predict->parsed()) {
            const auto config = build_config(predict_opts);
            const auto report = run_predict(config);
            if (to_stdout(config)) std::cout << report_to_json(report, config.verdict);
            return kExitOk;
        }
        if (compare_cmd->parsed()) {
            const auto config = build_config(compare_opts);
            const auto report = run_compare(config);
            if (to_stdout(config)) std::cout << comparison_to_json(report, config.verdict);
            if (report.agreement == Agreement::Tension) {
                std::cerr << "tension: " << report.description << "\n";
                return kExitFailure;
            }
            return kExitOk;
        }
        if (spectrum_cmd->parsed()) {
            const auto config = build_config(spectrum_opts);
            const auto dec = run_spectrum(config);
            if (to_stdout(config)) std::cout << spectrum_to_csv(dec);
            return kExitOk;
        }
        if (oracle->parsed()) {
            const auto summary = run_oracle_check(n_max, cases, oracle_seed, &std::cerr);
            std::cout << "oracle-check: " << summary.cases << " cases, " << summary.failures
                      << " failures, max |diff| = " << format_double(summary.max_abs_error) << "\n";
            return summary.ok() ? kExitOk : kExitFailure;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const spinbath::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
