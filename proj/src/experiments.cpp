#include "lcpsim/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <bit>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lcpsim/error.hpp"
#include "lcpsim/families.hpp"
#include "lcpsim/graph.hpp"

namespace lcpsim {

using nlohmann::json;

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::string hex_hash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void fnv_mix(std::uint64_t& h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  h ^= 0xff;
  h *= kFnvPrime;
}

const std::vector<double> kQuantileLevels{0.05, 0.25, 0.5, 0.75, 0.95, 0.99};

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::string join_state(const PopulationState& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  return out;
}

/// Admissibility of observed survivor sets, judged on the subgraph spanned
/// by the initially positive components and reported in the original indices.
class SurvivorCatalog {
 public:
  SurvivorCatalog(const InteractionMatrix& a, const PopulationState& initial) {
    for (std::size_t i = 0; i < initial.size(); ++i) {
      if (initial[i] > 0) support_.push_back(i);
    }
    sub_ = a.submatrix(support_);
    if (support_.empty() || support_.size() > kMaxEnumerationSize) return;
    for (const auto& set : enumerate_limit_sets(sub_).sets) procedure_masks_.push_back(lift(set.mask()));
    std::sort(procedure_masks_.begin(), procedure_masks_.end());
    enumerated_ = true;
  }

  /// Hard check: the set is a possible freeze of the process.
  bool reachable(const SurvivorSet& set) const {
    const auto local = restrict(set);
    return local && in_survivor_support(sub_, *local);
  }

  /// Membership in the recursive-procedure catalog; nullopt when too large to enumerate.
  std::optional<bool> in_catalog(const SurvivorSet& set) const {
    if (!enumerated_) return std::nullopt;
    return std::binary_search(procedure_masks_.begin(), procedure_masks_.end(), set.mask());
  }

 private:
  std::uint64_t lift(std::uint64_t local) const {
    std::uint64_t mask = 0;
    for (; local; local &= local - 1) mask |= std::uint64_t{1} << support_[std::countr_zero(local)];
    return mask;
  }

  std::optional<SurvivorSet> restrict(const SurvivorSet& set) const {
    SurvivorSet local;
    for (auto m : set.members) {
      const auto it = std::lower_bound(support_.begin(), support_.end(), m);
      if (it == support_.end() || *it != m) return std::nullopt;
      local.members.push_back(static_cast<std::size_t>(it - support_.begin()));
    }
    return local;
  }

  std::vector<std::size_t> support_;
  InteractionMatrix sub_;
  std::vector<std::uint64_t> procedure_masks_;
  bool enumerated_ = false;
};

SigmaSample run_replicate(const ExperimentConfig& config, std::uint64_t cap, std::uint64_t r) {
  SigmaSample s;
  s.replicate = r;
  try {
    if (config.run_to_freeze) {
      Budget budget{cap, config.time_cap};
      const auto traj = simulate(config.model, config.initial, budget, config.seed, r, {false, false});
      s.sigma = traj.first_extinction_step;
      s.sigma_time = traj.first_extinction_time;
      s.survivors = traj.survivors;
      s.stop_reason = traj.stop_reason;
      s.steps = traj.steps;
    } else {
      const auto rec = first_extinction(config.model, config.initial, cap, config.seed, r);
      s.sigma = rec.sigma;
      s.sigma_time = rec.sigma_tilde;
      s.survivors = rec.survivor_set;
      s.steps = rec.sigma.value_or(cap);
      s.stop_reason = rec.survivor_set ? StopReason::SurvivorSetFrozen : StopReason::StepBudget;
    }
  } catch (const Error& e) {
    s.failure = e.what();
  }
  return s;
}

}  // namespace

std::uint64_t default_step_cap(const ModelSpec& spec) {
  if (spec.mode == Mode::UrnRemovals) return kSupercriticalStepCap;
  return classify_regime(spec.alpha, spec.matrix) == Regime::Supercritical ? kSupercriticalStepCap
                                                                            : kSubcriticalStepCap;
}

namespace {

std::vector<std::string> config_problems(const ExperimentConfig& config) {
  std::vector<std::string> problems;
  auto model_report = validate_model(config.model);
  problems = model_report.violations;
  auto state_report = validate_state(config.model, config.initial);
  problems.insert(problems.end(), state_report.violations.begin(), state_report.violations.end());
  if (config.step_cap && *config.step_cap < 1) problems.push_back("step_cap must be at least 1");
  if (config.time_cap && !(*config.time_cap > 0)) problems.push_back("time_cap must be positive");
  if (config.time_cap && config.model.mode != Mode::LcpCtmc) problems.push_back("time_cap requires mode lcp");
  if (!config.run_to_freeze && !config.initial.all_positive()) {
    problems.push_back("first-extinction runs need a strictly positive initial state");
  }
  return problems;
}

}  // namespace

void validate_config(const ExperimentConfig& config) {
  auto problems = config_problems(config);
  if (config.replicates < 1) problems.insert(problems.begin(), "replicates must be at least 1");
  if (!problems.empty()) throw ValidationError(problems);
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, kArtifactVersion);
  fnv_mix(h, serialize_model(config.model));
  fnv_mix(h, join_state(config.initial));
  fnv_mix(h, std::to_string(config.replicates));
  fnv_mix(h, std::to_string(config.step_cap.value_or(default_step_cap(config.model))));
  if (config.time_cap) {
    std::ostringstream os;
    os.precision(17);
    os << *config.time_cap;
    fnv_mix(h, os.str());
  }
  fnv_mix(h, std::to_string(config.seed));
  fnv_mix(h, config.run_to_freeze ? "freeze" : "sigma");
  return h;
}

double BatchSummary::censored_fraction() const {
  return replicates == 0 ? 0.0 : static_cast<double>(censored_count) / static_cast<double>(replicates);
}

double quantile(const std::vector<double>& sorted, double level) {
  if (sorted.empty()) throw PreconditionError("quantile of an empty sample");
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BatchSummary run_batch(const ExperimentConfig& config) {
  validate_config(config);
  const std::uint64_t cap = config.step_cap.value_or(default_step_cap(config.model));

  BatchSummary summary;
  summary.replicates = config.replicates;
  summary.samples.resize(config.replicates);

  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::uint64_t>(config.threads == 0 ? std::thread::hardware_concurrency() : config.threads,
                                                      1, config.replicates));
  auto work = [&](unsigned w) {
    for (std::uint64_t r = w; r < config.replicates; r += workers) summary.samples[r] = run_replicate(config, cap, r);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  const SurvivorCatalog catalog(config.model.matrix, config.initial);
  std::vector<double> sigmas;
  for (const auto& s : summary.samples) {
    if (s.failure) {
      ++summary.failure_count;
      ++summary.censored_count;
      continue;
    }
    if (s.sigma) {
      sigmas.push_back(static_cast<double>(*s.sigma));
    } else {
      ++summary.censored_count;
    }
    if (s.stop_reason == StopReason::FullExtinction) {
      ++summary.full_extinction_count;
    } else if (s.survivors) {
      if (!catalog.reachable(*s.survivors)) {
        throw Error("replicate " + std::to_string(s.replicate) + " froze on " + s.survivors->to_string() +
                    ", which is not an admissible survivor set");
      }
      if (catalog.in_catalog(*s.survivors) == false) ++summary.outside_catalog_count;
      ++summary.survivor_frequencies[*s.survivors];
    } else {
      ++summary.unresolved_count;
    }
  }

  std::uint64_t total = summary.unresolved_count + summary.full_extinction_count + summary.failure_count;
  for (const auto& [set, count] : summary.survivor_frequencies) total += count;
  if (total != summary.replicates) throw Error("batch outcome counts do not sum to the replicate count");

  if (!sigmas.empty()) {
    std::sort(sigmas.begin(), sigmas.end());
    double sum = 0.0;
    for (double x : sigmas) sum += x;
    summary.sigma_mean = sum / static_cast<double>(sigmas.size());
    summary.sigma_median = quantile(sigmas, 0.5);
    for (double level : kQuantileLevels) summary.sigma_quantiles[level] = quantile(sigmas, level);
  }

  summary.manifest.seed = config.seed;
  summary.manifest.config_hash = config_hash(config);
  summary.manifest.artifact_version = std::string(kArtifactVersion);
  summary.manifest.step_cap = cap;
  summary.manifest.regime = config.model.mode == Mode::UrnRemovals
                                ? "urn"
                                : std::string(regime_name(classify_regime(config.model.alpha, config.model.matrix)));

  if (config.summary_path) {
    auto out = open_output(*config.summary_path);
    out << summary_json(summary) << '\n';
    write_manifest_sidecar(*config.summary_path, summary);
  }
  if (config.samples_path) {
    auto out = open_output(*config.samples_path);
    write_samples_csv(out, summary);
  }
  if (config.trajectories_path) export_trajectories(config);
  return summary;
}

std::string summary_json(const BatchSummary& summary) {
  json j;
  j["artifact_version"] = summary.manifest.artifact_version;
  j["manifest"] = {{"seed", summary.manifest.seed},
                   {"config_hash", hex_hash(summary.manifest.config_hash)},
                   {"artifact_version", summary.manifest.artifact_version},
                   {"step_cap", summary.manifest.step_cap},
                   {"regime", summary.manifest.regime}};
  j["replicates"] = summary.replicates;
  j["censored_count"] = summary.censored_count;
  j["censored_fraction"] = summary.censored_fraction();
  j["unresolved_count"] = summary.unresolved_count;
  j["full_extinction_count"] = summary.full_extinction_count;
  j["failure_count"] = summary.failure_count;
  j["outside_catalog_count"] = summary.outside_catalog_count;
  j["sigma_mean"] = summary.sigma_mean ? json(*summary.sigma_mean) : json(nullptr);
  j["sigma_median"] = summary.sigma_median ? json(*summary.sigma_median) : json(nullptr);
  json quantiles = json::array();
  for (const auto& [level, value] : summary.sigma_quantiles) quantiles.push_back({{"level", level}, {"value", value}});
  j["sigma_quantiles"] = quantiles;
  json freqs = json::array();
  for (const auto& [set, count] : summary.survivor_frequencies) {
    std::vector<std::size_t> members;
    for (auto m : set.members) members.push_back(m + 1);
    freqs.push_back({{"set", members}, {"count", count}});
  }
  j["survivor_frequencies"] = freqs;
  json samples = json::array();
  for (const auto& s : summary.samples) {
    json row = {{"replicate", s.replicate},
                {"sigma", s.sigma ? json(*s.sigma) : json(nullptr)},
                {"censored", s.censored()},
                {"steps", s.steps},
                {"stop_reason", s.failure ? "failure" : std::string(stop_reason_name(s.stop_reason))}};
    if (s.sigma_time) row["sigma_time"] = *s.sigma_time;
    if (s.failure) row["failure"] = *s.failure;
    samples.push_back(std::move(row));
  }
  j["sigma_samples"] = samples;
  return j.dump(2);
}

void write_samples_csv(std::ostream& out, const BatchSummary& summary) {
  out << "replicate,sigma,censored,sigma_time,steps,stop_reason,survivors\n";
  out.precision(17);
  for (const auto& s : summary.samples) {
    out << s.replicate << ',';
    if (s.sigma) out << *s.sigma;
    out << ',' << (s.censored() ? 1 : 0) << ',';
    if (s.sigma_time) out << *s.sigma_time;
    out << ',' << s.steps << ',' << (s.failure ? "failure" : stop_reason_name(s.stop_reason)) << ',';
    if (s.survivors) out << '"' << s.survivors->to_string() << '"';
    out << '\n';
  }
}

void write_manifest_sidecar(const std::filesystem::path& summary_path, const BatchSummary& summary) {
  auto path = summary_path;
  path += ".manifest.json";
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  json j = {{"seed", summary.manifest.seed},
            {"config_hash", hex_hash(summary.manifest.config_hash)},
            {"artifact_version", summary.manifest.artifact_version},
            {"library_version", LCPSIM_VERSION},
            {"step_cap", summary.manifest.step_cap},
            {"created_utc", stamp}};
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

namespace {

void write_trajectory_header(std::ostream& out, std::size_t n) {
  out << "replicate,step,time,component,delta";
  for (std::size_t i = 0; i < n; ++i) out << ",state_" << i;
  out << '\n';
}

std::size_t write_trajectory_rows(std::ostream& out, std::uint64_t replicate, const Trajectory& traj) {
  out.precision(17);
  const bool ctmc = traj.mode == Mode::LcpCtmc;
  PopulationState state = traj.initial;
  out << replicate << ",0," << (ctmc ? "0" : "") << ",," << ',' << join_state(state) << '\n';
  for (const auto& e : traj.events) {
    state.counts[e.component] += e.delta;
    for (const auto& [j, removed] : e.removals) state.counts[j] -= removed;
    out << replicate << ',' << e.step << ',';
    if (e.time) out << *e.time;
    out << ',' << e.component + 1 << ',' << e.delta << ',' << join_state(state) << '\n';
  }
  return traj.events.size() + 1;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, std::size_t n,
                          const std::vector<std::pair<std::uint64_t, Trajectory>>& runs) {
  write_trajectory_header(out, n);
  for (const auto& [replicate, traj] : runs) write_trajectory_rows(out, replicate, traj);
}

std::size_t export_trajectories(const ExperimentConfig& config) {
  // An empty replicate set is allowed here and yields a header-only file.
  if (auto problems = config_problems(config); !problems.empty()) throw ValidationError(problems);
  if (!config.trajectories_path) throw PreconditionError("export_trajectories needs trajectories_path");
  const std::uint64_t cap = config.step_cap.value_or(default_step_cap(config.model));
  auto out = open_output(*config.trajectories_path);
  write_trajectory_header(out, config.model.size());
  std::size_t rows = 0;
  for (std::uint64_t r = 0; r < config.replicates; ++r) {
    rows += write_trajectory_rows(out, r, simulate(config.model, config.initial, Budget{cap, config.time_cap},
                                                   config.seed, r));
  }
  return rows;
}

bool TablesReport::all_pass() const {
  return std::all_of(cells.begin(), cells.end(), [](const TableCell& c) { return c.pass; });
}

std::uint64_t closed_form_count(std::string_view family, std::size_t n) {
  const long k = static_cast<long>(n);
  if (family == "line") return families::shifted_fibonacci(k) - 1;
  if (family == "cycle") return families::shifted_fibonacci(k - 1) + families::shifted_fibonacci(k - 3) - 1;
  if (family == "star") return std::uint64_t{1} << (n - 1);
  throw PreconditionError("no closed-form count for family " + std::string(family));
}

double closed_form_lambda1(std::string_view family, std::size_t n, double beta) {
  const double nd = static_cast<double>(n);
  if (family == "line") return 2 * beta * std::cos(std::numbers::pi / (nd + 1));
  if (family == "cycle") return 2 * beta;
  if (family == "star") return beta * std::sqrt(nd - 1);
  throw PreconditionError("no closed-form eigenvalue for family " + std::string(family));
}

double closed_form_lambda_n(std::string_view family, std::size_t n, double beta) {
  const double nd = static_cast<double>(n);
  if (family == "line") return -2 * beta * std::cos(std::numbers::pi / (nd + 1));
  if (family == "cycle") return -2 * beta * std::cos(n % 2 == 1 ? std::numbers::pi / nd : 0.0);
  if (family == "star") return -beta * std::sqrt(nd - 1);
  throw PreconditionError("no closed-form eigenvalue for family " + std::string(family));
}

TablesReport reproduce_tables(const TablesConfig& config) {
  if (config.n_max > kMaxEnumerationSize) throw SizeLimitError("tables are limited to N <= 24");
  TablesReport report;
  const std::vector<std::pair<std::string, std::size_t>> families_with_min{{"cycle", 3}, {"line", 1}, {"star", 2}};
  for (const auto& [family, smallest] : families_with_min) {
    for (std::size_t n = std::max(config.n_min, smallest); n <= config.n_max; ++n) {
      TableCell count{family, n, std::nullopt, "count"};
      count.computed = static_cast<double>(count_limit_sets(families::by_name(family, n, Rational(1))));
      count.expected = static_cast<double>(closed_form_count(family, n));
      count.pass = count.computed == count.expected;
      report.cells.push_back(count);

      for (const auto& beta : config.betas) {
        const auto a = families::by_name(family, n, beta);
        const auto spectrum = full_spectrum(a);
        const double b = beta.get_d();
        TableCell top{family, n, beta, "lambda1"};
        top.computed = perron_root(a).lambda;
        top.expected = closed_form_lambda1(family, n, b);
        top.pass = std::abs(top.computed - top.expected) <= config.tolerance;
        report.cells.push_back(top);

        TableCell bottom{family, n, beta, "lambdaN"};
        double min_real = spectrum.front().real();
        for (const auto& z : spectrum) min_real = std::min(min_real, z.real());
        bottom.computed = min_real;
        bottom.expected = closed_form_lambda_n(family, n, b);
        bottom.pass = std::abs(bottom.computed - bottom.expected) <= config.tolerance;
        report.cells.push_back(bottom);
      }
    }
  }
  return report;
}

}  // namespace lcpsim
