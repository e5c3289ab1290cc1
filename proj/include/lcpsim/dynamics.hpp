#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "lcpsim/model.hpp"
#include "lcpsim/rng.hpp"

namespace lcpsim {

enum class StopReason { SurvivorSetFrozen, StepBudget, TimeBudget, FullExtinction };

std::string_view stop_reason_name(StopReason reason);

/// One jump of the process. `step` is the index of the state after the jump.
struct Event {
  std::uint64_t step = 0;
  std::optional<double> time;  ///< CTMC clock after the jump; empty outside CTMC mode
  std::size_t component = 0;   ///< 0-based; the born/dying component, or the drawn urn type
  std::int64_t delta = 0;      ///< +1 / -1, or +alpha in urn mode
  /// Urn mode only: balls removed from other types, (type, count) with count > 0.
  std::vector<std::pair<std::size_t, std::int64_t>> removals;

  friend bool operator==(const Event&, const Event&) = default;
};

struct Trajectory {
  Mode mode = Mode::EmbeddedDtmc;
  PopulationState initial;
  std::vector<Event> events;
  PopulationState terminal_state;
  StopReason stop_reason = StopReason::StepBudget;
  std::uint64_t steps = 0;
  double time = 0.0;  ///< CTMC clock at stop; 0 outside CTMC mode
  std::optional<SurvivorSet> survivors;                 ///< set when frozen
  std::optional<std::uint64_t> first_extinction_step;   ///< sigma, if observed
  std::optional<double> first_extinction_time;         ///< CTMC only

  /// Replays the recorded events; throws if a coordinate would go negative.
  std::vector<PopulationState> replay() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct ExtinctionRecord {
  std::optional<std::uint64_t> sigma;  ///< nullopt when censored at the cap
  std::optional<double> sigma_tilde;   ///< continuous time of sigma, CTMC mode
  std::optional<SurvivorSet> survivor_set;

  bool censored() const noexcept { return !sigma.has_value(); }
};

struct Budget {
  std::uint64_t max_steps = 1'000'000;
  std::optional<double> max_time;  ///< CTMC mode only
};

/// Integer-scaled jump weights for one model, with incremental bookkeeping of
/// the death rates. All rates are multiplied by the common denominator of
/// alpha, A and the immigration rates, so jump probabilities are exact ratios
/// of integers and a uniform integer draw selects a jump without rounding bias.
class Stepper {
 public:
  Stepper(const ModelSpec& spec, PopulationState initial);

  struct Jump {
    std::size_t component = 0;
    std::int64_t delta = 0;
    bool zero_hit = false;      ///< some coordinate reached 0 during this jump
    std::vector<std::pair<std::size_t, std::int64_t>> removals;
  };

  const PopulationState& state() const noexcept { return state_; }
  Mode mode() const noexcept { return mode_; }

  /// Sum of all jump weights; the total rate is total_weight() / denominator().
  uint128_t total_weight() const;
  double denominator() const noexcept { return denominator_; }
  double total_rate() const { return static_cast<double>(total_weight()) / denominator_; }

  /// Performs one jump of the model's mode. Throws ZeroRateError if none is possible.
  Jump step(RandomStream& rng);

  /// Exp(total_rate()) draw from the dedicated holding-time lane of the
  /// stream's current step, so CTMC and DTMC runs share their jump chain.
  double holding_time(const RandomStream& rng) const;

  /// Positive components are pairwise non-interacting (immigration disables this).
  bool frozen() const;
  std::uint64_t positive_mask() const;

 private:
  Jump lcp_step(RandomStream& rng);
  Jump urn_step(RandomStream& rng);
  void add(std::size_t i, std::int64_t delta);

  Mode mode_;
  std::size_t n_;
  bool immigration_;
  double denominator_ = 1.0;
  std::int64_t alpha_ = 0;
  std::vector<std::int64_t> rates_;       // n x n, scaled
  std::vector<std::int64_t> immigration_rates_;
  std::vector<std::uint64_t> interacts_;  // symmetric interaction pattern
  std::vector<int128_t> death_sum_;       // sum_j a_ij x_j, scaled
  PopulationState state_;
};

/// One jump of the embedded chain from `state`.
PopulationState dtmc_step(const PopulationState& state, const ModelSpec& spec, RandomStream& rng);

struct CtmcJump {
  double holding_time = 0.0;
  PopulationState state;
};

/// Exponential holding time with rate R(state), then the embedded jump.
CtmcJump ctmc_step(const PopulationState& state, const ModelSpec& spec, RandomStream& rng);

/// One draw of the urn with removals.
PopulationState urn_step(const PopulationState& state, const ModelSpec& spec, RandomStream& rng);

struct SimulateOptions {
  bool record_events = true;
  /// Stop as soon as some coordinate hits zero instead of running to freeze.
  bool stop_at_first_extinction = false;
};

/// Runs the model's stepper from `initial` until the positive components are
/// pairwise non-interacting, everything is extinct, or the budget runs out.
/// Step k draws from RandomStream(seed, replicate, k), so the result is a
/// pure function of the arguments.
Trajectory simulate(const ModelSpec& spec, const PopulationState& initial, const Budget& budget,
                    std::uint64_t seed, std::uint64_t replicate, const SimulateOptions& options = {});

/// sigma: the first step at which some coordinate is zero, censored at `cap`.
/// Requires initial > 0 componentwise.
ExtinctionRecord first_extinction(const ModelSpec& spec, const PopulationState& initial, std::uint64_t cap,
                                  std::uint64_t seed, std::uint64_t replicate);

}  // namespace lcpsim
