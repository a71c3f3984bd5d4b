// harness.hpp: experiment runner behind the `spinbath` command-line tool
//
// Builds a model from an inline document or a seeded generator, runs the simulation
// (sampled r(t)), prediction (lemma verdict), comparison and oracle pipelines, and renders
// CSV/JSON artifacts. Every number is written with 17 significant digits so that output
// round-trips and identical inputs give byte-identical files.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include "spinbath/evolution.hpp"
#include "spinbath/lemma.hpp"
#include "spinbath/model.hpp"
#include "spinbath/spectrum.hpp"

namespace spinbath::harness {

enum class OutputFormat { Csv, Json };

struct RandomSource {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    CouplingLaw coupling = UniformPositive{};
    PhaseLaw phase = PhaseLaw::Zero;
    PopulationRange population;
};

using ModelSource = std::variant<RandomSource, SpinBathModel>;

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    std::size_t steps = 2000;
};

struct OutputSpec {
    std::optional<OutputFormat> format;  // unset: CSV for simulate/spectrum, JSON otherwise
    std::string path;                    // empty: standard output
};

struct ExperimentConfig {
    ModelSource model_source;
    std::optional<TimeGrid> time_grid;
    std::optional<RelevantObservable> observable;
    lemma::VerdictConfig verdict;
    OutputSpec output;

    SpinBathModel build_model() const;
    /// The configured grid, or [0, 20 / mean|g_i|] with 2000 steps.
    TimeGrid resolved_grid(const SpinBathModel& model) const;
};

inline constexpr std::size_t kDefaultGridSteps = 2000;
inline constexpr double kDefaultGridSpan = 20.0;  // in units of 1 / mean|g_i|

// ---------------------------------------------------------------------------
// Documents

/// Parses an experiment document. Throws ConfigError naming the offending field path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Model schema: {"a": [re, im], "b": [re, im], "spins": [{"alpha": [re, im], "beta": [re, im], "g": x}]}.
std::string model_to_json(const SpinBathModel& model);
/// Throws ConfigError (field paths rooted at `root`) for schema violations and for models that
/// fail validation.
SpinBathModel model_from_json(const std::string& json_text, const std::string& root = "model");
SpinBathModel load_model(const std::filesystem::path& path);

std::string observable_to_json(const FullObservable& obs);

std::string format_double(double value);
std::string series_to_csv(const evolution::TimeSeries& series);
std::string series_to_json(const evolution::TimeSeries& series);
std::string spectrum_to_csv(const spectrum::SpectralDecomposition& dec);
std::string report_to_json(const lemma::LemmaReport& report, const lemma::VerdictConfig& config);

/// Writes to a temporary sibling and renames it over `path`. Throws IoError.
void write_atomically(const std::filesystem::path& path, const std::string& content);

// ---------------------------------------------------------------------------
// Pipelines

/// Samples r(t), |r(t)|^2 and <O_R>(t) on the grid; the observable defaults to sigma_x of
/// the central spin. Writes CSV (t,re_r,im_r,r_sq,expectation) or JSON when a path is set.
evolution::TimeSeries run_simulate(const ExperimentConfig& config);

lemma::LemmaReport run_predict(const ExperimentConfig& config);

struct DecayStats {
    double mean_r_squared_last_half = 0.0;
    double min_r_squared = 0.0;
    double lower_bound = 0.0;        // prod_i (2 |alpha_i|^2 - 1)^2
    double consistency_bound = 0.0;  // max(10 lower, 10 max weight, 1e-4)
};

enum class Agreement { Consistent, Tension };

struct ComparisonReport {
    lemma::LemmaReport verdict;
    DecayStats decay;
    Agreement agreement = Agreement::Consistent;
    std::string description;
};

DecayStats decay_statistics(const SpinBathModel& model, const evolution::TimeSeries& series, double max_weight);
ComparisonReport compare(const SpinBathModel& model, const TimeGrid& grid, const lemma::VerdictConfig& config);
ComparisonReport run_compare(const ExperimentConfig& config);
std::string comparison_to_json(const ComparisonReport& report, const lemma::VerdictConfig& config);

/// Dumps the spectral decomposition as CSV (omega,weight,multiplicity).
spectrum::SpectralDecomposition run_spectrum(const ExperimentConfig& config);

struct OracleCheckSummary {
    std::size_t cases = 0;
    std::size_t failures = 0;
    double max_abs_error = 0.0;
    std::string first_failure;  // reproduction parameters, including model and observable JSON

    bool ok() const { return failures == 0; }
};

inline constexpr double kOracleTolerance = 1e-10;

/// For each case draws N in [min(2, n_max), n_max], a random model (random central amplitudes,
/// uniform couplings and phases), a random product observable and t in [0, 50], and compares
/// expectation_full with the brute-force state vector. Throws ConfigError for n_max = 0,
/// n_max above the oracle cap, or cases = 0.
OracleCheckSummary run_oracle_check(std::size_t n_max, std::size_t cases, std::uint64_t seed,
                                    std::ostream* log = nullptr);

const char* to_string(Agreement agreement);

}  // namespace spinbath::harness
