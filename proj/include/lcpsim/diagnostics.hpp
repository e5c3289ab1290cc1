#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lcpsim/model.hpp"
#include "lcpsim/spectral.hpp"

namespace lcpsim {

/// One outcome of a single jump with its exact probability.
struct Transition {
  PopulationState next;
  Rational probability;
};

/// The 2n outcomes of the embedded chain at `state` in the order
/// +e_1..+e_n, -e_1..-e_n (zero-probability outcomes included), using the
/// indicator form of the rates so boundary states are handled directly.
/// Throws ZeroRateError when R(state) = 0.
std::vector<Transition> lcp_transitions(const PopulationState& state, const ModelSpec& spec);

/// The n outcomes of one urn draw, in type order.
std::vector<Transition> urn_transitions(const PopulationState& state, const ModelSpec& spec);

/// E[f(next) - f(state)], summed over the enumerated transitions of the
/// model's mode. Every expected increment below goes through this function.
Rational expected_increment(const PopulationState& state, const ModelSpec& spec,
                            const std::function<Rational(const PopulationState&)>& f);
std::complex<double> expected_increment(const PopulationState& state, const ModelSpec& spec,
                                        const std::function<std::complex<double>(const PopulationState&)>& f);

/// R(state) = sum_i (alpha x_i + 1{x_i > 0} sum_j a_ij x_j) (+ immigration).
Rational total_rate(const PopulationState& state, const ModelSpec& spec);

/// E[next_i - state_i] for each component.
std::vector<Rational> component_drift(const PopulationState& state, const ModelSpec& spec);

/// An exact identity or inequality: `lhs` from transition enumeration,
/// `rhs` from the closed form.
struct ExactCheck {
  Rational lhs;
  Rational rhs;
  bool holds = false;
};

struct FloatCheck {
  std::complex<double> lhs;
  std::complex<double> rhs;
  double error = 0.0;  ///< |lhs - rhs| / max(1, |rhs|) for equalities
  bool holds = false;
};

inline constexpr double kFloatIdentityTolerance = 1e-9;

/// Component drift by enumeration against (alpha x + immigration - A x) / R,
/// one check per component. Requires state > 0.
std::vector<ExactCheck> component_drift_check(const PopulationState& state, const ModelSpec& spec);

/// E[v.next - v.state] against (alpha - lambda)(v.state)/R for a left
/// eigenpair (v, lambda) of A. Requires state > 0.
ExactCheck projected_drift(const PopulationState& state, const ModelSpec& spec,
                           const std::vector<Rational>& v, const Rational& lambda);
FloatCheck projected_drift(const PopulationState& state, const ModelSpec& spec,
                           const std::vector<std::complex<double>>& v, std::complex<double> lambda);

/// T = alpha u.state. Requires lambda1 < alpha and state > 0.
Rational t_functional(const PopulationState& state, const ModelSpec& spec, const std::vector<Rational>& u);
/// E[T(next) - T(state)]; equals alpha exactly in the subcritical regime.
Rational t_drift(const PopulationState& state, const ModelSpec& spec, const std::vector<Rational>& u);

struct TReport {
  std::vector<Rational> u;
  Rational t;
  Rational r;
  Rational drift;
};
/// T, R and the T drift, computing u from the model.
TReport t_report(const PopulationState& state, const ModelSpec& spec);

/// lhs = E[R(next) - R(state)], rhs = alpha; the contract is lhs <= alpha.
ExactCheck r_drift_bound(const PopulationState& state, const ModelSpec& spec);

/// Drift of V = y / (x + y) for the single-edge model 1 -> 2 with alpha = 1:
/// lhs by enumeration, rhs = -beta x^2 / ((x+y)(x+y-1)(x+y+beta x)).
ExactCheck v_drift_triangular(std::int64_t x, std::int64_t y, const Rational& beta);

/// R E[next_i next_j - state_i state_j] by enumeration against the
/// closed-form second-moment drift. Indices 0-based. Requires state > 0.
ExactCheck second_moment_drift(const PopulationState& state, const ModelSpec& spec, std::size_t i, std::size_t j);

/// lhs = R E[|v_N.next|^2 - |v_N.state|^2], rhs = 2 (alpha - Re lambda_N) |v_N.state|^2;
/// holds when lhs >= rhs - 1e-9 max(1, |rhs|). Requires state > 0 and lambda1 > 0.
FloatCheck u_second_moment_check(const PopulationState& state, const ModelSpec& spec);
FloatCheck u_second_moment_check(const PopulationState& state, const ModelSpec& spec, const EigenPair& min_real);

struct ExtinctionBound {
  double rho = 0.0;    ///< min_j (v1 . e_j) / (alpha + sum_k a_kj)
  double bound = 0.0;  ///< v1 . initial / ((lambda1 - alpha) rho)
};

/// Upper bound on E[sigma] in the supercritical regime.
ExtinctionBound extinction_bound(const ModelSpec& spec, const PopulationState& initial);

struct TailExponent {
  std::optional<Rational> epsilon;  ///< largest k/1024 with alpha - Re lambda_N > (alpha + 2e)(1 + e/2)
  double exponent = 0.0;            ///< e/(4 + 2e) * alpha/(gamma + alpha)
  std::string message;
};

inline constexpr long kEpsilonGridDenominator = 1024;

/// Informational tail exponent of sigma for the subcritical regime.
TailExponent tail_exponent_info(const ModelSpec& spec);

/// E[Y_i / sum Y] drift of the urn; zero for a classical Polya urn.
Rational urn_fraction_drift(const PopulationState& state, const ModelSpec& spec, std::size_t i);

/// Every functional at one state.
struct DriftReport {
  PopulationState state;
  Rational r;
  std::vector<Rational> component_drift;
  double s = 0.0;                           ///< v1 . state
  std::optional<Rational> t;                ///< subcritical only
  std::optional<std::complex<double>> u;    ///< v_N . state when lambda1 > 0
  std::map<std::size_t, std::complex<double>> projected_drifts;  ///< 1 and N (1-based)
  std::optional<Rational> v;                ///< y/(x+y), two components only
  std::vector<std::vector<Rational>> second_moments;  ///< E[next_i next_j - state_i state_j]
};

DriftReport drift_report(const PopulationState& state, const ModelSpec& spec);

}  // namespace lcpsim
