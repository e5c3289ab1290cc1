#include "lcpsim/dynamics.hpp"

#include <bit>
#include <cmath>
#include <numeric>

#include "lcpsim/error.hpp"

namespace lcpsim {

namespace {

using u128 = uint128_t;

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError("population count overflow");
  return out;
}

std::int64_t to_int64(const mpz_class& z, const char* what) {
  if (!z.fits_slong_p()) throw OverflowError(std::string("scaled rate does not fit in 64 bits: ") + what);
  return z.get_si();
}

void require_state(const ModelSpec& spec, const PopulationState& state) {
  auto report = validate_state(spec, state);
  if (!report.ok()) throw PreconditionError("invalid state: " + report.violations.front());
}

}  // namespace

std::string_view stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::SurvivorSetFrozen: return "survivor_set_frozen";
    case StopReason::StepBudget: return "step_budget";
    case StopReason::TimeBudget: return "time_budget";
    case StopReason::FullExtinction: return "full_extinction";
  }
  return "step_budget";
}

// ---------------------------------------------------------------------------
// Stepper

Stepper::Stepper(const ModelSpec& spec, PopulationState initial)
    : mode_(spec.mode), n_(spec.size()), immigration_(spec.has_immigration()), state_(std::move(initial)) {
  if (n_ > 64) throw SizeLimitError("simulation supports at most 64 components");
  require_state(spec, state_);

  mpz_class denom = spec.alpha.get_den();
  for (const auto& row : spec.matrix.rows()) {
    for (const auto& x : row) mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), x.get_den().get_mpz_t());
  }
  if (immigration_) {
    for (const auto& x : *spec.immigration) mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), x.get_den().get_mpz_t());
  }
  denominator_ = denom.get_d();

  const auto scale = [&](const Rational& x) {
    const Rational scaled = x * Rational(denom);
    return to_int64(scaled.get_num(), "rate");
  };
  alpha_ = scale(spec.alpha);
  rates_.resize(n_ * n_);
  interacts_.assign(n_, 0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      rates_[i * n_ + j] = scale(spec.matrix(i, j));
      if (spec.matrix(i, j) > 0) {
        interacts_[i] |= std::uint64_t{1} << j;
        interacts_[j] |= std::uint64_t{1} << i;
      }
    }
  }
  immigration_rates_.assign(n_, 0);
  if (immigration_) {
    for (std::size_t i = 0; i < n_; ++i) immigration_rates_[i] = scale((*spec.immigration)[i]);
  }
  death_sum_.assign(n_, 0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) death_sum_[i] += static_cast<int128_t>(rates_[i * n_ + j]) * state_[j];
  }
}

u128 Stepper::total_weight() const {
  u128 total = 0;
  if (mode_ == Mode::UrnRemovals) {
    for (auto y : state_.counts) total += static_cast<u128>(y);
    return total;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    total += static_cast<u128>(static_cast<int128_t>(alpha_) * state_[i] + immigration_rates_[i]);
    if (state_[i] > 0) total += static_cast<u128>(death_sum_[i]);
  }
  return total;
}

void Stepper::add(std::size_t i, std::int64_t delta) {
  const auto next = checked_add(state_[i], delta);
  if (next < 0) throw PreconditionError("population count would become negative");
  state_[i] = next;
  for (std::size_t k = 0; k < n_; ++k) death_sum_[k] += static_cast<int128_t>(rates_[k * n_ + i]) * delta;
}

double Stepper::holding_time(const RandomStream& rng) const {
  const double rate = total_rate();
  if (!(rate > 0)) throw ZeroRateError("total rate is zero; no jump possible");
  const double u = (static_cast<double>(rng.draw(RandomStream::kHoldingTimeLane) >> 11) + 1.0) * 0x1.0p-53;
  return -std::log(u) / rate;
}

Stepper::Jump Stepper::step(RandomStream& rng) {
  return mode_ == Mode::UrnRemovals ? urn_step(rng) : lcp_step(rng);
}

Stepper::Jump Stepper::lcp_step(RandomStream& rng) {
  const u128 total = total_weight();
  if (total == 0) {
    throw ZeroRateError(state_.all_zero() ? "full extinction: no jump possible" : "total rate is zero");
  }
  u128 r = rng.below(total);
  Jump jump;
  // Outcome order: births +e_1..+e_n, then deaths -e_1..-e_n.
  for (std::size_t i = 0; i < n_; ++i) {
    const auto w = static_cast<u128>(static_cast<int128_t>(alpha_) * state_[i] + immigration_rates_[i]);
    if (r < w) {
      add(i, +1);
      jump.component = i;
      jump.delta = +1;
      return jump;
    }
    r -= w;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (state_[i] <= 0) continue;
    const auto w = static_cast<u128>(death_sum_[i]);
    if (r < w) {
      add(i, -1);
      jump.component = i;
      jump.delta = -1;
      jump.zero_hit = state_[i] == 0;
      return jump;
    }
    r -= w;
  }
  throw ZeroRateError("internal: jump selection fell through");
}

Stepper::Jump Stepper::urn_step(RandomStream& rng) {
  const u128 total = total_weight();
  if (total == 0) throw ZeroRateError("urn is empty");
  u128 r = rng.below(total);
  std::size_t picked = 0;
  for (; picked < n_; ++picked) {
    const auto y = static_cast<u128>(state_[picked]);
    if (r < y) break;
    r -= y;
  }
  Jump jump;
  jump.component = picked;
  jump.delta = alpha_;
  if (alpha_ != 0) add(picked, alpha_);
  for (std::size_t j = 0; j < n_; ++j) {
    if (j == picked) continue;
    const std::int64_t removed = std::min(rates_[j * n_ + picked], state_[j]);
    if (removed > 0) {
      add(j, -removed);
      jump.removals.emplace_back(j, removed);
      if (state_[j] == 0) jump.zero_hit = true;
    }
  }
  return jump;
}

std::uint64_t Stepper::positive_mask() const {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (state_[i] > 0) mask |= std::uint64_t{1} << i;
  }
  return mask;
}

bool Stepper::frozen() const {
  if (immigration_) return false;
  const auto positive = positive_mask();
  for (auto rest = positive; rest; rest &= rest - 1) {
    if (interacts_[std::countr_zero(rest)] & positive) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Single steps

PopulationState dtmc_step(const PopulationState& state, const ModelSpec& spec, RandomStream& rng) {
  if (spec.mode == Mode::UrnRemovals) throw PreconditionError("dtmc_step: model is in urn mode");
  Stepper s(spec, state);
  s.step(rng);
  return s.state();
}

CtmcJump ctmc_step(const PopulationState& state, const ModelSpec& spec, RandomStream& rng) {
  if (spec.mode == Mode::UrnRemovals) throw PreconditionError("ctmc_step: model is in urn mode");
  Stepper s(spec, state);
  if (s.total_weight() == 0) {
    throw ZeroRateError(state.all_zero() ? "full extinction: no jump possible" : "total rate is zero");
  }
  CtmcJump out;
  out.holding_time = s.holding_time(rng);
  s.step(rng);
  out.state = s.state();
  return out;
}

PopulationState urn_step(const PopulationState& state, const ModelSpec& spec, RandomStream& rng) {
  if (spec.mode != Mode::UrnRemovals) throw PreconditionError("urn_step: model is not in urn mode");
  Stepper s(spec, state);
  s.step(rng);
  return s.state();
}

// ---------------------------------------------------------------------------
// Trajectories

std::vector<PopulationState> Trajectory::replay() const {
  std::vector<PopulationState> states{initial};
  PopulationState current = initial;
  for (const auto& e : events) {
    current[e.component] = checked_add(current[e.component], e.delta);
    for (const auto& [j, removed] : e.removals) current[j] = checked_add(current[j], -removed);
    for (auto c : current.counts) {
      if (c < 0) throw PreconditionError("replay produced a negative count");
    }
    states.push_back(current);
  }
  return states;
}

Trajectory simulate(const ModelSpec& spec, const PopulationState& initial, const Budget& budget,
                    std::uint64_t seed, std::uint64_t replicate, const SimulateOptions& options) {
  Stepper stepper(spec, initial);
  RandomStream rng(seed, replicate);
  const bool ctmc = spec.mode == Mode::LcpCtmc;
  const bool immigration = spec.has_immigration();

  Trajectory traj;
  traj.mode = spec.mode;
  traj.initial = initial;
  if (initial.min() == 0) {
    traj.first_extinction_step = 0;
    if (ctmc) traj.first_extinction_time = 0.0;
  }

  std::uint64_t steps = 0;
  double clock = 0.0;
  bool check_freeze = true;
  for (;;) {
    if (stepper.state().all_zero() && !immigration) {
      traj.stop_reason = StopReason::FullExtinction;
      break;
    }
    if (check_freeze && stepper.frozen()) {
      traj.stop_reason = StopReason::SurvivorSetFrozen;
      traj.survivors = SurvivorSet::from_mask(stepper.positive_mask());
      break;
    }
    check_freeze = false;
    if (steps >= budget.max_steps) {
      traj.stop_reason = StopReason::StepBudget;
      break;
    }
    if (options.stop_at_first_extinction && traj.first_extinction_step) {
      traj.stop_reason = StopReason::StepBudget;
      break;
    }

    rng.at_step(steps);
    double holding = 0.0;
    if (ctmc) {
      holding = stepper.holding_time(rng);
      if (budget.max_time && clock + holding > *budget.max_time) {
        traj.stop_reason = StopReason::TimeBudget;
        break;
      }
    }
    auto jump = stepper.step(rng);
    ++steps;
    clock += holding;

    if (options.record_events) {
      Event e;
      e.step = steps;
      if (ctmc) e.time = clock;
      e.component = jump.component;
      e.delta = jump.delta;
      e.removals = std::move(jump.removals);
      traj.events.push_back(std::move(e));
    }
    if (jump.zero_hit) {
      check_freeze = true;
      if (!traj.first_extinction_step) {
        traj.first_extinction_step = steps;
        if (ctmc) traj.first_extinction_time = clock;
      }
    }
  }

  traj.terminal_state = stepper.state();
  traj.steps = steps;
  traj.time = ctmc ? clock : 0.0;
  return traj;
}

ExtinctionRecord first_extinction(const ModelSpec& spec, const PopulationState& initial, std::uint64_t cap,
                                  std::uint64_t seed, std::uint64_t replicate) {
  require_state(spec, initial);
  if (!initial.all_positive()) throw PreconditionError("first_extinction requires a strictly positive start");
  Stepper stepper(spec, initial);
  ExtinctionRecord record;
  // A frozen start can never lose a component.
  if (stepper.frozen()) return record;

  RandomStream rng(seed, replicate);
  const bool ctmc = spec.mode == Mode::LcpCtmc;
  double clock = 0.0;
  for (std::uint64_t steps = 0; steps < cap;) {
    rng.at_step(steps);
    if (ctmc) clock += stepper.holding_time(rng);
    const auto jump = stepper.step(rng);
    ++steps;
    if (jump.zero_hit) {
      record.sigma = steps;
      if (ctmc) record.sigma_tilde = clock;
      if (stepper.frozen()) record.survivor_set = SurvivorSet::from_mask(stepper.positive_mask());
      return record;
    }
  }
  return record;
}

}  // namespace lcpsim
