#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lcpsim/dynamics.hpp"
#include "lcpsim/model.hpp"
#include "lcpsim/spectral.hpp"

namespace lcpsim {

inline constexpr std::string_view kArtifactVersion = "lcpsim-batch/1";
inline constexpr std::uint64_t kSupercriticalStepCap = 1'000'000;
inline constexpr std::uint64_t kSubcriticalStepCap = 10'000'000;

struct ExperimentConfig {
  ModelSpec model;
  PopulationState initial;
  std::uint64_t replicates = 1;
  /// Defaults to default_step_cap(model) when unset.
  std::optional<std::uint64_t> step_cap;
  std::optional<double> time_cap;  ///< CTMC mode only
  std::uint64_t seed = 0;
  /// Run each replicate until its survivor set freezes; otherwise stop at sigma.
  bool run_to_freeze = true;
  unsigned threads = 1;
  std::optional<std::filesystem::path> summary_path;
  std::optional<std::filesystem::path> samples_path;
  std::optional<std::filesystem::path> trajectories_path;
};

/// 10^6 steps in the supercritical regime and for urns, 10^7 otherwise.
std::uint64_t default_step_cap(const ModelSpec& spec);

/// Throws ValidationError when the config cannot be run.
void validate_config(const ExperimentConfig& config);

/// FNV-1a hash of everything that determines the batch result.
std::uint64_t config_hash(const ExperimentConfig& config);

struct SigmaSample {
  std::uint64_t replicate = 0;
  std::optional<std::uint64_t> sigma;  ///< nullopt when censored
  std::optional<double> sigma_time;
  std::optional<SurvivorSet> survivors;
  StopReason stop_reason = StopReason::StepBudget;
  std::uint64_t steps = 0;
  std::optional<std::string> failure;  ///< overflow or other per-replicate error

  bool censored() const noexcept { return !sigma.has_value(); }
};

struct Manifest {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::string artifact_version;
  std::uint64_t step_cap = 0;
  std::string regime;
};

struct BatchSummary {
  std::uint64_t replicates = 0;
  std::vector<SigmaSample> samples;  ///< ordered by replicate
  std::uint64_t censored_count = 0;
  std::optional<double> sigma_mean;
  std::optional<double> sigma_median;
  std::map<double, double> sigma_quantiles;  ///< level -> value, uncensored runs only
  std::map<SurvivorSet, std::uint64_t> survivor_frequencies;
  std::uint64_t unresolved_count = 0;       ///< budget ran out before freeze
  std::uint64_t full_extinction_count = 0;
  std::uint64_t failure_count = 0;
  /// Frozen replicates whose survivor set is reachable but absent from the
  /// recursive-procedure catalog (possible only on directed graphs).
  std::uint64_t outside_catalog_count = 0;
  Manifest manifest;

  double censored_fraction() const;
};

/// Runs every replicate (replicate r draws from stream (seed, r)) and
/// aggregates. An observed survivor set outside survivor_support of the
/// initially positive subgraph raises Error. Writes the configured outputs.
BatchSummary run_batch(const ExperimentConfig& config);

/// Linear-interpolation quantile of sorted data.
double quantile(const std::vector<double>& sorted, double level);

/// Deterministic JSON rendering (no timestamps).
std::string summary_json(const BatchSummary& summary);
/// Per-replicate sample table.
void write_samples_csv(std::ostream& out, const BatchSummary& summary);
/// Sidecar with the wall-clock timestamp, next to the summary file.
void write_manifest_sidecar(const std::filesystem::path& summary_path, const BatchSummary& summary);

/// Trajectory CSV: replicate,step,time,component,delta,state_0..state_{n-1}.
/// Each replicate starts with a step-0 row holding the initial state.
void write_trajectory_csv(std::ostream& out, std::size_t n, const std::vector<std::pair<std::uint64_t, Trajectory>>& runs);

/// Simulates every replicate with event recording and writes the CSV to
/// config.trajectories_path. Returns the number of data rows.
std::size_t export_trajectories(const ExperimentConfig& config);

struct TablesConfig {
  std::size_t n_min = 1;
  std::size_t n_max = 12;
  std::vector<Rational> betas{Rational(1, 2), Rational(1), Rational(2)};
  double tolerance = 1e-9;
};

struct TableCell {
  std::string family;
  std::size_t n = 0;
  std::optional<Rational> beta;  ///< unset for the count rows
  std::string quantity;          ///< "count", "lambda1" or "lambdaN"
  double computed = 0.0;
  double expected = 0.0;
  bool pass = false;
};

struct TablesReport {
  std::vector<TableCell> cells;
  bool all_pass() const;
};

/// Limit-set counts and extreme eigenvalues of the cycle, line and star
/// families against their closed forms.
TablesReport reproduce_tables(const TablesConfig& config = {});

std::uint64_t closed_form_count(std::string_view family, std::size_t n);
double closed_form_lambda1(std::string_view family, std::size_t n, double beta);
double closed_form_lambda_n(std::string_view family, std::size_t n, double beta);

}  // namespace lcpsim
