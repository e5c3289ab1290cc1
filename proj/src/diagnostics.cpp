#include "lcpsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "lcpsim/error.hpp"

namespace lcpsim {

namespace {

void require_state(const ModelSpec& spec, const PopulationState& state) {
  auto report = validate_state(spec, state);
  if (!report.ok()) throw PreconditionError("invalid state: " + report.violations.front());
}

void require_positive(const PopulationState& state, const char* what) {
  if (!state.all_positive()) throw PreconditionError(std::string(what) + " requires a strictly positive state");
}

void require_no_immigration(const ModelSpec& spec, const char* what) {
  if (spec.has_immigration()) throw PreconditionError(std::string(what) + " is stated for models without immigration");
}

void require_lcp(const ModelSpec& spec, const char* what) {
  if (spec.mode == Mode::UrnRemovals) throw PreconditionError(std::string(what) + " applies to the competition process, not the urn");
}

Rational dot(const std::vector<Rational>& v, const PopulationState& x) {
  Rational out = 0;
  for (std::size_t i = 0; i < v.size(); ++i) out += v[i] * x[i];
  return out;
}

std::complex<double> dot(const std::vector<std::complex<double>>& v, const PopulationState& x) {
  std::complex<double> out = 0;
  for (std::size_t i = 0; i < v.size(); ++i) out += v[i] * static_cast<double>(x[i]);
  return out;
}

/// (A x)_i
Rational interaction(const ModelSpec& spec, const PopulationState& x, std::size_t i) {
  Rational out = 0;
  for (std::size_t j = 0; j < spec.size(); ++j) out += spec.matrix(i, j) * x[j];
  return out;
}

std::vector<Rational> lcp_rates(const PopulationState& state, const ModelSpec& spec) {
  const std::size_t n = spec.size();
  std::vector<Rational> rates(2 * n, Rational(0));
  const bool immigration = spec.has_immigration();
  for (std::size_t i = 0; i < n; ++i) {
    rates[i] = spec.alpha * state[i];
    if (immigration) rates[i] += (*spec.immigration)[i];
    if (state[i] > 0) rates[n + i] = interaction(spec, state, i);
  }
  return rates;
}

}  // namespace

std::vector<Transition> lcp_transitions(const PopulationState& state, const ModelSpec& spec) {
  require_state(spec, state);
  require_lcp(spec, "lcp_transitions");
  const std::size_t n = spec.size();
  const auto rates = lcp_rates(state, spec);
  Rational total = 0;
  for (const auto& r : rates) total += r;
  if (total == 0) throw ZeroRateError("total rate is zero at this state");

  std::vector<Transition> out;
  out.reserve(2 * n);
  for (std::size_t k = 0; k < 2 * n; ++k) {
    Transition t{state, rates[k] / total};
    if (rates[k] > 0) t.next[k % n] += k < n ? 1 : -1;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Transition> urn_transitions(const PopulationState& state, const ModelSpec& spec) {
  require_state(spec, state);
  if (spec.mode != Mode::UrnRemovals) throw PreconditionError("urn_transitions requires urn mode");
  const std::size_t n = spec.size();
  std::int64_t total = 0;
  for (auto y : state.counts) total += y;
  if (total == 0) throw ZeroRateError("urn is empty");

  const std::int64_t alpha = spec.alpha.get_num().get_si();
  std::vector<Transition> out;
  for (std::size_t i = 0; i < n; ++i) {
    Transition t{state, ratio(state[i], total)};
    if (state[i] > 0) {
      t.next[i] += alpha;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const std::int64_t a = spec.matrix(j, i).get_num().get_si();
        t.next[j] -= std::min(a, state[j]);
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

std::vector<Transition> transitions_for(const PopulationState& state, const ModelSpec& spec) {
  return spec.mode == Mode::UrnRemovals ? urn_transitions(state, spec) : lcp_transitions(state, spec);
}

}  // namespace

Rational expected_increment(const PopulationState& state, const ModelSpec& spec,
                            const std::function<Rational(const PopulationState&)>& f) {
  const Rational base = f(state);
  Rational out = 0;
  for (const auto& t : transitions_for(state, spec)) {
    if (t.probability != 0) out += t.probability * (f(t.next) - base);
  }
  return out;
}

std::complex<double> expected_increment(const PopulationState& state, const ModelSpec& spec,
                                        const std::function<std::complex<double>(const PopulationState&)>& f) {
  const std::complex<double> base = f(state);
  std::complex<double> out = 0;
  for (const auto& t : transitions_for(state, spec)) {
    if (t.probability != 0) out += t.probability.get_d() * (f(t.next) - base);
  }
  return out;
}

Rational total_rate(const PopulationState& state, const ModelSpec& spec) {
  require_state(spec, state);
  Rational total = 0;
  for (const auto& r : lcp_rates(state, spec)) total += r;
  return total;
}

std::vector<Rational> component_drift(const PopulationState& state, const ModelSpec& spec) {
  std::vector<Rational> out;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    out.push_back(expected_increment(state, spec, [i](const PopulationState& x) -> Rational { return Rational(x[i]); }));
  }
  return out;
}

std::vector<ExactCheck> component_drift_check(const PopulationState& state, const ModelSpec& spec) {
  require_positive(state, "component_drift_check");
  require_lcp(spec, "component_drift_check");
  const Rational r = total_rate(state, spec);
  const auto drift = component_drift(state, spec);
  std::vector<ExactCheck> out;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    ExactCheck c;
    c.lhs = drift[i];
    c.rhs = spec.alpha * state[i] - interaction(spec, state, i);
    if (spec.has_immigration()) c.rhs += (*spec.immigration)[i];
    c.rhs /= r;
    c.holds = c.lhs == c.rhs;
    out.push_back(std::move(c));
  }
  return out;
}

ExactCheck projected_drift(const PopulationState& state, const ModelSpec& spec, const std::vector<Rational>& v,
                           const Rational& lambda) {
  require_positive(state, "projected_drift");
  if (v.size() != spec.size()) throw PreconditionError("projected_drift: vector length mismatch");
  ExactCheck c;
  c.lhs = expected_increment(state, spec, [&](const PopulationState& x) -> Rational { return dot(v, x); });
  c.rhs = (spec.alpha - lambda) * dot(v, state) / total_rate(state, spec);
  c.holds = c.lhs == c.rhs;
  return c;
}

FloatCheck projected_drift(const PopulationState& state, const ModelSpec& spec,
                           const std::vector<std::complex<double>>& v, std::complex<double> lambda) {
  require_positive(state, "projected_drift");
  if (v.size() != spec.size()) throw PreconditionError("projected_drift: vector length mismatch");
  FloatCheck c;
  c.lhs = expected_increment(state, spec, [&](const PopulationState& x) { return dot(v, x); });
  c.rhs = (spec.alpha.get_d() - lambda) * dot(v, state) / total_rate(state, spec).get_d();
  c.error = std::abs(c.lhs - c.rhs) / std::max(1.0, std::abs(c.rhs));
  c.holds = c.error <= kFloatIdentityTolerance;
  return c;
}

Rational t_functional(const PopulationState& state, const ModelSpec& spec, const std::vector<Rational>& u) {
  require_positive(state, "t_functional");
  if (u.size() != spec.size()) throw PreconditionError("t_functional: u has the wrong length");
  return spec.alpha * dot(u, state);
}

Rational t_drift(const PopulationState& state, const ModelSpec& spec, const std::vector<Rational>& u) {
  require_positive(state, "t_drift");
  if (u.size() != spec.size()) throw PreconditionError("t_drift: u has the wrong length");
  return expected_increment(state, spec, [&](const PopulationState& x) -> Rational { return spec.alpha * dot(u, x); });
}

TReport t_report(const PopulationState& state, const ModelSpec& spec) {
  require_lcp(spec, "t_report");
  TReport r;
  r.u = compute_u(spec.alpha, spec.matrix);
  r.t = t_functional(state, spec, r.u);
  r.r = total_rate(state, spec);
  r.drift = t_drift(state, spec, r.u);
  return r;
}

ExactCheck r_drift_bound(const PopulationState& state, const ModelSpec& spec) {
  require_positive(state, "r_drift_bound");
  require_no_immigration(spec, "r_drift_bound");
  ExactCheck c;
  c.lhs = expected_increment(state, spec, [&](const PopulationState& x) -> Rational { return total_rate(x, spec); });
  c.rhs = spec.alpha;
  c.holds = c.lhs <= c.rhs;
  return c;
}

ExactCheck v_drift_triangular(std::int64_t x, std::int64_t y, const Rational& beta) {
  if (x <= 0 || y <= 0 || x + y <= 1) throw PreconditionError("v_drift_triangular requires x, y > 0 and x + y > 1");
  if (beta < 0) throw PreconditionError("v_drift_triangular requires beta >= 0");
  ModelSpec spec;
  spec.alpha = 1;
  spec.matrix = InteractionMatrix({{Rational(0), Rational(0)}, {beta, Rational(0)}});
  const PopulationState state{{x, y}};

  ExactCheck c;
  c.lhs = expected_increment(state, spec, [](const PopulationState& s) -> Rational {
    return ratio(s[1], s[0] + s[1]);
  });
  const Rational xs = x, ys = y;
  c.rhs = -beta * xs * xs / ((xs + ys) * (xs + ys - 1) * (xs + ys + beta * xs));
  c.holds = c.lhs == c.rhs;
  return c;
}

ExactCheck second_moment_drift(const PopulationState& state, const ModelSpec& spec, std::size_t i, std::size_t j) {
  require_positive(state, "second_moment_drift");
  require_no_immigration(spec, "second_moment_drift");
  require_lcp(spec, "second_moment_drift");
  if (i >= spec.size() || j >= spec.size()) throw PreconditionError("second_moment_drift: index out of range");
  const Rational r = total_rate(state, spec);
  ExactCheck c;
  c.lhs = r * expected_increment(state, spec, [i, j](const PopulationState& x) -> Rational {
            return Rational(x[i]) * Rational(x[j]);
          });
  const Rational xi = state[i], xj = state[j];
  const Rational ai = interaction(spec, state, i), aj = interaction(spec, state, j);
  if (i != j) {
    c.rhs = 2 * spec.alpha * xi * xj - xi * aj - xj * ai;
  } else {
    c.rhs = 2 * spec.alpha * xi * xi + spec.alpha * xi + (-2 * xi + 1) * ai;
  }
  c.holds = c.lhs == c.rhs;
  return c;
}

FloatCheck u_second_moment_check(const PopulationState& state, const ModelSpec& spec, const EigenPair& min_real) {
  require_positive(state, "u_second_moment_check");
  require_no_immigration(spec, "u_second_moment_check");
  require_lcp(spec, "u_second_moment_check");
  const auto& v = min_real.vector;
  const double r = total_rate(state, spec).get_d();
  FloatCheck c;
  c.lhs = r * expected_increment(state, spec, [&](const PopulationState& x) {
            return std::complex<double>(std::norm(dot(v, x)), 0.0);
          });
  c.rhs = 2.0 * (spec.alpha.get_d() - min_real.lambda.real()) * std::norm(dot(v, state));
  const double slack = kFloatIdentityTolerance * std::max(1.0, std::abs(c.rhs));
  c.error = std::max(0.0, c.rhs.real() - c.lhs.real()) / std::max(1.0, std::abs(c.rhs));
  c.holds = c.lhs.real() >= c.rhs.real() - slack;
  return c;
}

FloatCheck u_second_moment_check(const PopulationState& state, const ModelSpec& spec) {
  return u_second_moment_check(state, spec, min_real_eigenpair(spec.matrix));
}

ExtinctionBound extinction_bound(const ModelSpec& spec, const PopulationState& initial) {
  require_state(spec, initial);
  require_positive(initial, "extinction_bound");
  if (classify_regime(spec.alpha, spec.matrix) != Regime::Supercritical) {
    throw PreconditionError("extinction_bound requires lambda1 > alpha");
  }
  const auto perron = perron_root(spec.matrix);
  const double alpha = spec.alpha.get_d();
  const std::size_t n = spec.size();
  ExtinctionBound out;
  out.rho = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t k = 0; k < n; ++k) col += spec.matrix(k, j).get_d();
    out.rho = std::min(out.rho, perron.vector[j] / (alpha + col));
  }
  if (!(out.rho > 0)) {
    throw PreconditionError("extinction_bound requires a strictly positive Perron vector (irreducible A)");
  }
  double s0 = 0.0;
  for (std::size_t j = 0; j < n; ++j) s0 += perron.vector[j] * static_cast<double>(initial[j]);
  out.bound = s0 / ((perron.lambda - alpha) * out.rho);
  return out;
}

TailExponent tail_exponent_info(const ModelSpec& spec) {
  if (!is_exactly_subcritical(spec.alpha, spec.matrix)) {
    throw PreconditionError("tail_exponent_info requires lambda1 < alpha");
  }
  TailExponent out;
  const auto perron = perron_root(spec.matrix);
  if (perron.lambda <= kPerronTolerance) {
    out.message = "lambda1 = 0: no eigenvalue with negative real part";
    return out;
  }
  const auto min_real = min_real_eigenpair(spec.matrix);
  const double alpha = spec.alpha.get_d();
  const double gap = alpha - min_real.lambda.real();

  long best = 0;
  for (long k = 1; k <= kEpsilonGridDenominator * kEpsilonGridDenominator; ++k) {
    const double eps = static_cast<double>(k) / kEpsilonGridDenominator;
    if (!(gap > (alpha + 2 * eps) * (1 + eps / 2))) break;
    best = k;
  }
  if (best == 0) {
    out.message = "no grid point epsilon = k/1024 satisfies the gap inequality";
    return out;
  }
  out.epsilon = ratio(best, kEpsilonGridDenominator);
  const double eps = out.epsilon->get_d();
  const double gamma = gamma_constant(spec.matrix).get_d();
  out.exponent = eps / (4 + 2 * eps) * alpha / (gamma + alpha);
  out.message = "ok";
  return out;
}

Rational urn_fraction_drift(const PopulationState& state, const ModelSpec& spec, std::size_t i) {
  if (spec.mode != Mode::UrnRemovals) throw PreconditionError("urn_fraction_drift requires urn mode");
  if (i >= spec.size()) throw PreconditionError("urn_fraction_drift: index out of range");
  return expected_increment(state, spec, [i](const PopulationState& y) -> Rational {
    std::int64_t total = 0;
    for (auto c : y.counts) total += c;
    return total == 0 ? Rational(0) : ratio(y[i], total);
  });
}

DriftReport drift_report(const PopulationState& state, const ModelSpec& spec) {
  require_lcp(spec, "drift_report");
  const std::size_t n = spec.size();
  DriftReport d;
  d.state = state;
  d.r = total_rate(state, spec);
  d.component_drift = component_drift(state, spec);

  const auto perron = perron_root(spec.matrix);
  for (std::size_t i = 0; i < n; ++i) d.s += perron.vector[i] * static_cast<double>(state[i]);

  const bool positive = state.all_positive();
  if (positive && is_exactly_subcritical(spec.alpha, spec.matrix)) {
    d.t = t_functional(state, spec, compute_u(spec.alpha, spec.matrix));
  }

  std::vector<std::complex<double>> v1(perron.vector.begin(), perron.vector.end());
  d.projected_drifts[1] = expected_increment(state, spec, [&](const PopulationState& x) { return dot(v1, x); });
  if (perron.lambda > kPerronTolerance) {
    const auto min_real = min_real_eigenpair(spec.matrix);
    d.u = dot(min_real.vector, state);
    d.projected_drifts[n] =
        expected_increment(state, spec, [&](const PopulationState& x) { return dot(min_real.vector, x); });
  }
  if (n == 2 && state[0] + state[1] > 0) d.v = ratio(state[1], state[0] + state[1]);

  d.second_moments.assign(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d.second_moments[i][j] = expected_increment(state, spec, [i, j](const PopulationState& x) -> Rational {
        return Rational(x[i]) * Rational(x[j]);
      });
    }
  }
  return d;
}

}  // namespace lcpsim
