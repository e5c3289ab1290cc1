#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "lcpsim/diagnostics.hpp"
#include "lcpsim/dynamics.hpp"
#include "lcpsim/error.hpp"
#include "lcpsim/experiments.hpp"
#include "lcpsim/families.hpp"
#include "lcpsim/graph.hpp"
#include "lcpsim/model.hpp"
#include "lcpsim/spectral.hpp"

namespace py = pybind11;
using namespace lcpsim;

namespace {

py::object fraction(const Rational& x) {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls(to_string(x));
}

Rational from_python(const py::handle& obj) {
  return parse_rational(py::str(obj).cast<std::string>());
}

py::list fractions(const std::vector<Rational>& v) {
  py::list out;
  for (const auto& x : v) out.append(fraction(x));
  return out;
}

PopulationState state_of(const std::vector<std::int64_t>& counts) { return PopulationState{counts}; }

py::tuple set_tuple(const SurvivorSet& s) {
  py::list members;
  for (auto m : s.members) members.append(m + 1);
  return py::tuple(members);
}

py::object json_to_python(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

py::dict trajectory_dict(const Trajectory& t) {
  py::dict d;
  d["mode"] = std::string(mode_name(t.mode));
  d["initial"] = t.initial.counts;
  d["terminal_state"] = t.terminal_state.counts;
  d["stop_reason"] = std::string(stop_reason_name(t.stop_reason));
  d["steps"] = t.steps;
  d["time"] = t.time;
  d["survivors"] = t.survivors ? py::object(set_tuple(*t.survivors)) : py::none();
  d["sigma"] = t.first_extinction_step ? py::object(py::int_(*t.first_extinction_step)) : py::none();
  py::list events;
  for (const auto& e : t.events) {
    events.append(py::make_tuple(e.step, e.component + 1, e.delta));
  }
  d["events"] = events;
  return d;
}

}  // namespace

PYBIND11_MODULE(_lcpsim, m) {
  m.doc() = "Linear competition process core";
  m.attr("__version__") = LCPSIM_VERSION;

  // Translators run newest first, so the base class goes in before its subclasses.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);

  py::class_<ModelSpec>(m, "Model")
      .def_property_readonly("alpha", [](const ModelSpec& s) { return fraction(s.alpha); })
      .def_property_readonly("matrix",
                             [](const ModelSpec& s) {
                               py::list rows;
                               for (const auto& r : s.matrix.rows()) rows.append(fractions(r));
                               return rows;
                             })
      .def_property_readonly("mode", [](const ModelSpec& s) { return std::string(mode_name(s.mode)); })
      .def_property_readonly("initial",
                             [](const ModelSpec& s) {
                               return s.initial ? py::object(py::cast(s.initial->counts)) : py::none();
                             })
      .def_property_readonly("size", &ModelSpec::size)
      .def("to_json", &serialize_model)
      .def("__repr__", [](const ModelSpec& s) {
        return "<lcpsim.Model n=" + std::to_string(s.size()) + " alpha=" + to_string(s.alpha) + " mode=" +
               std::string(mode_name(s.mode)) + ">";
      });

  m.def("parse_model", [](const std::string& text) { return parse_model(text); }, py::arg("text"),
        "Parse a model from its JSON text.");
  m.def("load_model", [](const std::string& path) { return load_model(path); }, py::arg("path"));
  m.def(
      "family_model",
      [](const std::string& family, std::size_t n, const py::object& beta, const py::object& alpha,
         const std::string& mode) {
        ModelSpec spec;
        spec.alpha = from_python(alpha);
        spec.matrix = families::by_name(family, n, from_python(beta));
        spec.mode = parse_mode(mode);
        auto report = validate_model(spec);
        if (!report.ok()) throw ValidationError(report.violations);
        return spec;
      },
      py::arg("family"), py::arg("n"), py::arg("beta") = 1, py::arg("alpha") = 1, py::arg("mode") = "dtmc",
      "Model on a named graph family: complete, line, cycle, star or triangular.");

  m.def(
      "spectrum",
      [](const ModelSpec& spec) {
        const auto s = spectral_summary(spec.alpha, spec.matrix);
        py::dict d;
        d["lambda1"] = s.lambda1;
        d["v1"] = s.v1;
        d["spectrum"] = s.spectrum;
        d["lambdaN"] = s.min_real ? py::cast(s.min_real->lambda) : py::none();
        d["vN"] = s.min_real ? py::cast(s.min_real->vector) : py::none();
        d["u"] = s.u ? py::object(fractions(*s.u)) : py::none();
        d["gamma"] = fraction(s.gamma);
        d["regime"] = std::string(regime_name(s.regime));
        d["irreducible"] = s.irreducible;
        return d;
      },
      py::arg("model"));

  m.def(
      "enumerate_limit_sets",
      [](const ModelSpec& spec) {
        py::list out;
        for (const auto& s : enumerate_limit_sets(spec.matrix).sets) out.append(set_tuple(s));
        return out;
      },
      py::arg("model"), "Admissible survivor sets as 1-based tuples.");
  m.def(
      "survivor_support",
      [](const ModelSpec& spec) {
        py::list out;
        for (const auto& s : survivor_support(spec.matrix).sets) out.append(set_tuple(s));
        return out;
      },
      py::arg("model"), "Every set the process can freeze on, as 1-based tuples.");
  m.def("count_limit_sets", [](const ModelSpec& spec) { return count_limit_sets(spec.matrix); }, py::arg("model"));

  m.def(
      "simulate",
      [](const ModelSpec& spec, const std::vector<std::int64_t>& initial, std::uint64_t seed,
         std::uint64_t replicate, std::uint64_t max_steps, std::optional<double> max_time, bool record_events) {
        Trajectory t;
        {
          py::gil_scoped_release release;
          t = simulate(spec, state_of(initial), Budget{max_steps, max_time}, seed, replicate,
                       SimulateOptions{record_events, false});
        }
        return trajectory_dict(t);
      },
      py::arg("model"), py::arg("initial"), py::arg("seed") = 0, py::arg("replicate") = 0,
      py::arg("max_steps") = 1'000'000, py::arg("max_time") = py::none(), py::arg("record_events") = true);

  m.def(
      "first_extinction",
      [](const ModelSpec& spec, const std::vector<std::int64_t>& initial, std::uint64_t cap, std::uint64_t seed,
         std::uint64_t replicate) {
        const auto r = first_extinction(spec, state_of(initial), cap, seed, replicate);
        py::dict d;
        d["sigma"] = r.sigma ? py::object(py::int_(*r.sigma)) : py::none();
        d["sigma_time"] = r.sigma_tilde ? py::object(py::float_(*r.sigma_tilde)) : py::none();
        d["survivors"] = r.survivor_set ? py::object(set_tuple(*r.survivor_set)) : py::none();
        return d;
      },
      py::arg("model"), py::arg("initial"), py::arg("cap") = 1'000'000, py::arg("seed") = 0,
      py::arg("replicate") = 0);

  m.def(
      "transitions",
      [](const ModelSpec& spec, const std::vector<std::int64_t>& state) {
        const auto s = state_of(state);
        const auto ts = spec.mode == Mode::UrnRemovals ? urn_transitions(s, spec) : lcp_transitions(s, spec);
        py::list out;
        for (const auto& t : ts) out.append(py::make_tuple(t.next.counts, fraction(t.probability)));
        return out;
      },
      py::arg("model"), py::arg("state"), "Exact one-step outcomes with their probabilities.");
  m.def(
      "total_rate", [](const ModelSpec& spec, const std::vector<std::int64_t>& state) {
        return fraction(total_rate(state_of(state), spec));
      },
      py::arg("model"), py::arg("state"));
  m.def(
      "second_moment_drift",
      [](const ModelSpec& spec, const std::vector<std::int64_t>& state, std::size_t i, std::size_t j) {
        if (i < 1 || j < 1) throw PreconditionError("indices are 1-based");
        const auto c = second_moment_drift(state_of(state), spec, i - 1, j - 1);
        return py::make_tuple(fraction(c.lhs), fraction(c.rhs));
      },
      py::arg("model"), py::arg("state"), py::arg("i"), py::arg("j"),
      "(enumerated, closed form) for R E[d(x_i x_j)], 1-based indices.");
  m.def(
      "v_drift_triangular",
      [](std::int64_t x, std::int64_t y, const py::object& beta) {
        const auto c = v_drift_triangular(x, y, from_python(beta));
        return py::make_tuple(fraction(c.lhs), fraction(c.rhs));
      },
      py::arg("x"), py::arg("y"), py::arg("beta"));
  m.def(
      "t_report",
      [](const ModelSpec& spec, const std::vector<std::int64_t>& state) {
        const auto t = t_report(state_of(state), spec);
        py::dict d;
        d["u"] = fractions(t.u);
        d["T"] = fraction(t.t);
        d["R"] = fraction(t.r);
        d["drift"] = fraction(t.drift);
        return d;
      },
      py::arg("model"), py::arg("state"));
  m.def(
      "extinction_bound",
      [](const ModelSpec& spec, const std::vector<std::int64_t>& initial) {
        const auto b = extinction_bound(spec, state_of(initial));
        return py::make_tuple(b.rho, b.bound);
      },
      py::arg("model"), py::arg("initial"), "(rho, bound) on the mean first-extinction step.");

  m.def(
      "run_batch",
      [](const ModelSpec& spec, const std::vector<std::int64_t>& initial, std::uint64_t replicates,
         std::uint64_t seed, std::optional<std::uint64_t> step_cap, bool to_sigma, unsigned threads) {
        ExperimentConfig config;
        config.model = spec;
        config.initial = state_of(initial);
        config.replicates = replicates;
        config.seed = seed;
        config.step_cap = step_cap;
        config.run_to_freeze = !to_sigma;
        config.threads = threads;
        std::string text;
        {
          py::gil_scoped_release release;
          text = summary_json(run_batch(config));
        }
        return json_to_python(text);
      },
      py::arg("model"), py::arg("initial"), py::arg("replicates"), py::arg("seed") = 0,
      py::arg("step_cap") = py::none(), py::arg("to_sigma") = false, py::arg("threads") = 1,
      "Batch summary as a dict (same schema as the summary JSON file).");

  m.def(
      "reproduce_tables",
      [](std::size_t n_min, std::size_t n_max) {
        TablesConfig config;
        config.n_min = n_min;
        config.n_max = n_max;
        const auto report = reproduce_tables(config);
        py::list cells;
        for (const auto& c : report.cells) {
          py::dict d;
          d["family"] = c.family;
          d["n"] = c.n;
          d["beta"] = c.beta ? fraction(*c.beta) : py::none();
          d["quantity"] = c.quantity;
          d["computed"] = c.computed;
          d["expected"] = c.expected;
          d["pass"] = c.pass;
          cells.append(d);
        }
        return py::make_tuple(report.all_pass(), cells);
      },
      py::arg("n_min") = 1, py::arg("n_max") = 12);
}
