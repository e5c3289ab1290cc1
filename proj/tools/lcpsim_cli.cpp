// lcpsim command-line interface.
//
// Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage or
// I/O errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lcpsim/diagnostics.hpp"
#include "lcpsim/dynamics.hpp"
#include "lcpsim/error.hpp"
#include "lcpsim/experiments.hpp"
#include "lcpsim/graph.hpp"
#include "lcpsim/model.hpp"
#include "lcpsim/spectral.hpp"

namespace {

using nlohmann::json;
using namespace lcpsim;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::string model_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string format = "json";
};

json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json rationals_json(const std::vector<Rational>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}

json set_json(const SurvivorSet& s) {
  json out = json::array();
  for (auto m : s.members) out.push_back(m + 1);
  return out;
}

ModelSpec require_model(const GlobalOptions& g) {
  if (g.model_path.empty()) throw CLI::ValidationError("--model", "a model file is required");
  return load_model(g.model_path);
}

PopulationState initial_state(const ModelSpec& spec, const std::string& text) {
  if (!text.empty()) return parse_state(text);
  if (spec.initial) return *spec.initial;
  throw CLI::ValidationError("--init", "no initial state given and the model has none");
}

int cmd_spectrum(const GlobalOptions& g) {
  const auto spec = require_model(g);
  const auto s = spectral_summary(spec.alpha, spec.matrix);
  if (g.format == "csv") {
    std::cout << "index,re,im\n";
    std::cout.precision(17);
    for (std::size_t i = 0; i < s.spectrum.size(); ++i) {
      std::cout << i + 1 << ',' << s.spectrum[i].real() << ',' << s.spectrum[i].imag() << '\n';
    }
    return kExitPass;
  }
  json j;
  j["lambda1"] = s.lambda1;
  j["v1"] = s.v1;
  j["regime"] = regime_name(s.regime);
  j["irreducible"] = s.irreducible;
  j["gamma"] = to_string(s.gamma);
  json spectrum = json::array();
  for (auto z : s.spectrum) spectrum.push_back(complex_json(z));
  j["spectrum"] = spectrum;
  if (s.min_real) {
    j["lambdaN"] = complex_json(s.min_real->lambda);
    json vn = json::array();
    for (auto z : s.min_real->vector) vn.push_back(complex_json(z));
    j["vN"] = vn;
  } else {
    j["lambdaN"] = nullptr;
  }
  j["u"] = s.u ? rationals_json(*s.u) : json(nullptr);
  std::cout << j.dump(2) << '\n';
  return kExitPass;
}

int cmd_enumerate(const GlobalOptions& g, bool csv, bool support) {
  const auto spec = require_model(g);
  const auto catalog = support ? survivor_support(spec.matrix) : enumerate_limit_sets(spec.matrix);
  if (csv || g.format == "csv") {
    std::cout << "index,survivors\n";
    for (std::size_t i = 0; i < catalog.sets.size(); ++i) {
      std::cout << i + 1 << ",\"" << catalog.sets[i].to_string() << "\"\n";
    }
    return kExitPass;
  }
  json sets = json::array();
  for (const auto& s : catalog.sets) sets.push_back(set_json(s));
  std::cout << json{{"count", catalog.count}, {"sets", sets}}.dump(2) << '\n';
  return kExitPass;
}

struct SimulateArgs {
  std::string init;
  std::uint64_t replicates = 1;
  std::uint64_t max_steps = 1'000'000;
  std::optional<double> max_time;
  std::string out;
};

int cmd_simulate(const GlobalOptions& g, const SimulateArgs& a) {
  const auto spec = require_model(g);
  ExperimentConfig config;
  config.model = spec;
  config.initial = initial_state(spec, a.init);
  config.replicates = a.replicates;
  config.step_cap = a.max_steps;
  config.time_cap = a.max_time;
  config.seed = g.seed;
  const std::filesystem::path out = a.out.empty() ? std::filesystem::path(g.out_dir) / "trajectories.csv"
                                                  : std::filesystem::path(a.out);
  config.trajectories_path = out;
  validate_config(config);

  json runs = json::array();
  for (std::uint64_t r = 0; r < a.replicates; ++r) {
    const auto t = simulate(spec, config.initial, Budget{a.max_steps, a.max_time}, g.seed, r, {false, false});
    json row = {{"replicate", r},
                {"stop_reason", stop_reason_name(t.stop_reason)},
                {"steps", t.steps},
                {"terminal_state", t.terminal_state.counts},
                {"sigma", t.first_extinction_step ? json(*t.first_extinction_step) : json(nullptr)}};
    if (spec.mode == Mode::LcpCtmc) row["time"] = t.time;
    row["survivors"] = t.survivors ? set_json(*t.survivors) : json(nullptr);
    runs.push_back(row);
  }
  const auto rows = export_trajectories(config);
  std::cout << json{{"trajectory_csv", out.string()}, {"rows", rows}, {"runs", runs}}.dump(2) << '\n';
  return kExitPass;
}

struct CheckPrinter {
  json results = json::array();
  bool failed = false;

  void exact(const std::string& id, const std::string& label, const ExactCheck& c) {
    results.push_back({{"id", id}, {"check", label}, {"lhs", to_string(c.lhs)}, {"rhs", to_string(c.rhs)},
                       {"status", c.holds ? "PASS" : "FAIL"}});
    failed = failed || !c.holds;
  }
  void floating(const std::string& id, const std::string& label, const FloatCheck& c) {
    results.push_back({{"id", id}, {"check", label}, {"lhs", complex_json(c.lhs)}, {"rhs", complex_json(c.rhs)},
                       {"error", c.error}, {"status", c.holds ? "PASS" : "FAIL"}});
    failed = failed || !c.holds;
  }
  void skip(const std::string& id, const std::string& reason) {
    results.push_back({{"id", id}, {"status", "SKIP"}, {"reason", reason}});
  }
};

void check_drift1(CheckPrinter& p, const PopulationState& s, const ModelSpec& spec) {
  const auto checks = component_drift_check(s, spec);
  for (std::size_t i = 0; i < checks.size(); ++i) p.exact("drift1", "component " + std::to_string(i + 1), checks[i]);
}

void check_eqmart(CheckPrinter& p, const PopulationState& s, const ModelSpec& spec) {
  const auto perron = perron_root(spec.matrix);
  std::vector<std::complex<double>> v1(perron.vector.begin(), perron.vector.end());
  if (const auto exact = exact_perron_root(spec.matrix); exact && spec.matrix.is_zero()) {
    p.exact("eqmart", "v1 (exact)", projected_drift(s, spec, std::vector<Rational>(spec.size(), Rational(1)), *exact));
  } else {
    p.floating("eqmart", "v1", projected_drift(s, spec, v1, perron.lambda));
  }
  if (perron.lambda > kPerronTolerance) {
    const auto vn = min_real_eigenpair(spec.matrix);
    p.floating("eqmart", "vN", projected_drift(s, spec, vn.vector, vn.lambda));
  }
}

void check_tdrift(CheckPrinter& p, const PopulationState& s, const ModelSpec& spec) {
  if (!is_exactly_subcritical(spec.alpha, spec.matrix)) {
    p.skip("tdrift", "requires lambda1 < alpha");
    return;
  }
  const auto t = t_report(s, spec);
  p.exact("tdrift", "E[dT] = alpha", ExactCheck{t.drift, spec.alpha, t.drift == spec.alpha});
  p.exact("tr", "T >= R", ExactCheck{t.t, t.r, t.t >= t.r});
}

void check_vdrift(CheckPrinter& p, const PopulationState& s, const ModelSpec& spec) {
  const bool shape = spec.size() == 2 && spec.alpha == 1 && spec.matrix(0, 1) == 0 && !spec.has_immigration();
  if (!shape) {
    p.skip("vdrift", "requires alpha = 1 and the single edge 1 -> 2");
    return;
  }
  p.exact("vdrift", "V = y/(x+y)", v_drift_triangular(s[0], s[1], spec.matrix(1, 0)));
}

void check_secondmoment(CheckPrinter& p, const PopulationState& s, const ModelSpec& spec) {
  if (spec.has_immigration()) {
    p.skip("secondmoment", "closed form assumes no immigration");
    return;
  }
  for (std::size_t i = 0; i < spec.size(); ++i) {
    for (std::size_t j = i; j < spec.size(); ++j) {
      p.exact("secondmoment", "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")",
              second_moment_drift(s, spec, i, j));
    }
  }
}

void check_rdrift(CheckPrinter& p, const PopulationState& s, const ModelSpec& spec) {
  if (spec.has_immigration()) {
    p.skip("rdrift", "bound assumes no immigration");
    return;
  }
  p.exact("rdrift", "E[dR] <= alpha", r_drift_bound(s, spec));
}

void check_ubound(CheckPrinter& p, const PopulationState& s, const ModelSpec& spec) {
  if (spec.has_immigration() || perron_root(spec.matrix).lambda <= kPerronTolerance) {
    p.skip("ubound", "requires lambda1 > 0 and no immigration");
    return;
  }
  p.floating("ubound", "R E[d|U|^2] >= 2(alpha - Re lambdaN)|U|^2", u_second_moment_check(s, spec));
}

int cmd_drift_check(const GlobalOptions& g, const std::string& state_text, const std::vector<std::string>& ids) {
  const auto spec = require_model(g);
  if (spec.mode == Mode::UrnRemovals) throw CLI::ValidationError("--model", "drift-check applies to lcp/dtmc models");
  const auto state = initial_state(spec, state_text);
  if (!state.all_positive()) throw CLI::ValidationError("--state", "drift identities need a strictly positive state");

  CheckPrinter p;
  const std::vector<std::string> all{"drift1", "eqmart", "tdrift", "rdrift", "vdrift", "secondmoment", "ubound"};
  for (const auto& id : ids.empty() ? all : ids) {
    if (id == "drift1") check_drift1(p, state, spec);
    else if (id == "eqmart") check_eqmart(p, state, spec);
    else if (id == "tdrift" || id == "tr") check_tdrift(p, state, spec);
    else if (id == "rdrift") check_rdrift(p, state, spec);
    else if (id == "vdrift") check_vdrift(p, state, spec);
    else if (id == "secondmoment") check_secondmoment(p, state, spec);
    else if (id == "ubound") check_ubound(p, state, spec);
    else throw CLI::ValidationError("--id", "unknown identity " + id);
  }
  if (g.format == "csv") {
    std::cout << "id,check,lhs,rhs,status\n";
    for (const auto& r : p.results) {
      auto field = [&](const char* k) {
        if (!r.contains(k)) return std::string();
        return r[k].is_string() ? r[k].get<std::string>() : r[k].dump();
      };
      std::cout << field("id") << ",\"" << field("check") << "\",\"" << field("lhs") << "\",\"" << field("rhs")
                << "\"," << field("status") << '\n';
    }
  } else {
    std::cout << json{{"state", state.counts}, {"checks", p.results}}.dump(2) << '\n';
  }
  return p.failed ? kExitFail : kExitPass;
}

struct BatchArgs {
  std::string init;
  std::uint64_t replicates = 1000;
  std::optional<std::uint64_t> max_steps;
  bool to_sigma = false;
  unsigned threads = 1;
};

int cmd_batch(const GlobalOptions& g, const BatchArgs& a) {
  ExperimentConfig config;
  config.model = require_model(g);
  config.initial = initial_state(config.model, a.init);
  config.replicates = a.replicates;
  config.step_cap = a.max_steps;
  config.seed = g.seed;
  config.run_to_freeze = !a.to_sigma;
  config.threads = a.threads;
  const std::filesystem::path dir(g.out_dir);
  config.summary_path = dir / "summary.json";
  config.samples_path = dir / "samples.csv";
  const auto summary = run_batch(config);
  std::cout << json{{"summary", config.summary_path->string()},
                    {"samples", config.samples_path->string()},
                    {"replicates", summary.replicates},
                    {"censored_count", summary.censored_count},
                    {"sigma_mean", summary.sigma_mean ? json(*summary.sigma_mean) : json(nullptr)},
                    {"failure_count", summary.failure_count}}
                   .dump(2)
            << '\n';
  return summary.failure_count == 0 ? kExitPass : kExitFail;
}

int cmd_tables(const GlobalOptions& g, std::size_t n_min, std::size_t n_max) {
  TablesConfig config;
  config.n_min = n_min;
  config.n_max = n_max;
  const auto report = reproduce_tables(config);
  if (g.format == "csv") {
    std::cout << "family,n,beta,quantity,computed,expected,status\n";
    std::cout.precision(15);
    for (const auto& c : report.cells) {
      std::cout << c.family << ',' << c.n << ',' << (c.beta ? to_string(*c.beta) : "") << ',' << c.quantity << ','
                << c.computed << ',' << c.expected << ',' << (c.pass ? "PASS" : "FAIL") << '\n';
    }
  } else {
    json cells = json::array();
    for (const auto& c : report.cells) {
      cells.push_back({{"family", c.family},
                       {"n", c.n},
                       {"beta", c.beta ? json(to_string(*c.beta)) : json(nullptr)},
                       {"quantity", c.quantity},
                       {"computed", c.computed},
                       {"expected", c.expected},
                       {"status", c.pass ? "PASS" : "FAIL"}});
    }
    std::cout << json{{"all_pass", report.all_pass()}, {"cells", cells}}.dump(2) << '\n';
  }
  return report.all_pass() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear competition process toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LCPSIM_VERSION);

  GlobalOptions g;
  app.add_option("--model", g.model_path, "Model specification (JSON)");
  app.add_option("--seed", g.seed, "Root random seed");
  app.add_option("--out-dir", g.out_dir, "Directory for output files");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  auto* spectrum = app.add_subcommand("spectrum", "Perron root, spectrum, lambda_N, u and the regime");
  bool spectrum_json = false;
  spectrum->add_flag("--json", spectrum_json, "JSON output (default)");

  auto* enumerate = app.add_subcommand("enumerate", "Catalog of admissible survivor sets");
  bool enum_json = false, enum_csv = false;
  enumerate->add_flag("--json", enum_json, "JSON output (default)");
  enumerate->add_flag("--csv", enum_csv, "CSV output");
  bool enum_support = false;
  enumerate->add_flag("--support", enum_support,
                      "List every set the process can freeze on (differs from the catalog only on directed graphs)");

  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate trajectories to freeze and export them as CSV");
  SimulateArgs sim;
  simulate_cmd->add_option("--init", sim.init, "Initial state, e.g. 50,50");
  simulate_cmd->add_option("--replicates", sim.replicates)->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--max-steps", sim.max_steps)->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--max-time", sim.max_time, "Clock budget (lcp mode)")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--out", sim.out, "Trajectory CSV path");

  auto* drift = app.add_subcommand("drift-check", "Check drift identities at one state");
  std::string drift_state;
  std::vector<std::string> drift_ids;
  bool drift_all = false;
  drift->add_option("--state", drift_state, "State, e.g. 2,3");
  drift->add_flag("--all", drift_all, "Run every identity (default)");
  drift->add_option("--id", drift_ids, "eqmart|tdrift|tr|vdrift|secondmoment|drift1|rdrift|ubound");

  auto* batch = app.add_subcommand("batch", "Monte Carlo batch with summary JSON and sample CSV");
  BatchArgs batch_args;
  batch->add_option("--init", batch_args.init, "Initial state");
  batch->add_option("--replicates", batch_args.replicates)->check(CLI::PositiveNumber);
  batch->add_option("--max-steps", batch_args.max_steps, "Step cap (default by regime)")->check(CLI::PositiveNumber);
  batch->add_flag("--to-sigma", batch_args.to_sigma, "Stop each replicate at the first extinction");
  batch->add_option("--threads", batch_args.threads)->check(CLI::PositiveNumber);

  auto* tables = app.add_subcommand("tables", "Family counts and eigenvalues against closed forms");
  std::size_t n_min = 1, n_max = 12;
  tables->add_option("--n-min", n_min)->check(CLI::PositiveNumber);
  tables->add_option("--n-max", n_max)->check(CLI::Range(1, 24));

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*spectrum) return cmd_spectrum(g);
    if (*enumerate) return cmd_enumerate(g, enum_csv, enum_support);
    if (*simulate_cmd) return cmd_simulate(g, sim);
    if (*drift) return cmd_drift_check(g, drift_state, drift_all ? std::vector<std::string>{} : drift_ids);
    if (*batch) return cmd_batch(g, batch_args);
    if (*tables) return cmd_tables(g, n_min, n_max);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
