#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "lcpsim/error.hpp"
#include "lcpsim/families.hpp"
#include "lcpsim/dynamics.hpp"
#include "lcpsim/graph.hpp"
#include "support.hpp"

using namespace lcpsim;
using lcpsim::testing::make_model;
using lcpsim::testing::random_matrix;
using lcpsim::testing::random_positive_state;
using lcpsim::testing::with_matrix;

namespace {

Rational row_sum(const InteractionMatrix& a, std::size_t i) {
  Rational s;
  for (std::size_t j = 0; j < a.size(); ++j) s += a(i, j);
  return s;
}

PopulationState state(std::initializer_list<std::int64_t> xs) { return PopulationState{std::vector<std::int64_t>(xs)}; }

/// Upper tail of the chi-square law with three degrees of freedom.
double chi_square3_pvalue(double x) {
  return std::erfc(std::sqrt(x / 2)) + std::sqrt(2 * x / M_PI) * std::exp(-x / 2);
}

std::map<std::vector<std::int64_t>, int> sample_steps(const ModelSpec& spec, const PopulationState& from, int draws,
                                                      std::uint64_t seed) {
  std::map<std::vector<std::int64_t>, int> counts;
  for (int k = 0; k < draws; ++k) {
    RandomStream rng(seed, static_cast<std::uint64_t>(k));
    const auto next = spec.mode == Mode::UrnRemovals ? urn_step(from, spec, rng) : dtmc_step(from, spec, rng);
    ++counts[next.counts];
  }
  return counts;
}

}  // namespace

TEST_CASE("chi-square helper matches tabulated quantiles") {
  CHECK(chi_square3_pvalue(16.266) == doctest::Approx(0.001).epsilon(1e-3));
  CHECK(chi_square3_pvalue(7.815) == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("dtmc_step transition law at (2,3) on the complete pair") {
  const auto spec = with_matrix("1", families::complete(2, Rational(1)));
  const int draws = 200000;
  const auto counts = sample_steps(spec, state({2, 3}), draws, 11);
  const std::map<std::vector<std::int64_t>, double> expected{
      {{3, 3}, 0.2}, {{2, 4}, 0.3}, {{1, 3}, 0.3}, {{2, 2}, 0.2}};
  REQUIRE(counts.size() == 4);
  double chi2 = 0.0;
  for (const auto& [s, p] : expected) {
    REQUIRE(counts.count(s));
    const double e = p * draws;
    chi2 += (counts.at(s) - e) * (counts.at(s) - e) / e;
  }
  CHECK(chi_square3_pvalue(chi2) > 0.001);
}

TEST_CASE("dtmc_step with A = 0 is a pure birth step") {
  const auto spec = with_matrix("1", InteractionMatrix::zero(3));
  for (const auto& [s, c] : sample_steps(spec, state({1, 0, 4}), 2000, 3)) {
    CHECK(s[1] == 0);
    CHECK(s[0] + s[1] + s[2] == 6);
    CHECK(s[0] >= 1);
    CHECK(s[2] >= 4);
  }
}

TEST_CASE("zero coordinates are never touched without immigration") {
  const auto spec = with_matrix("1", families::complete(3, Rational(1)));
  for (const auto& [s, c] : sample_steps(spec, state({3, 0, 2}), 5000, 5)) CHECK(s[1] == 0);
}

TEST_CASE("dtmc_step preconditions") {
  const auto spec = with_matrix("1", families::complete(2, Rational(1)));
  RandomStream rng(1, 0);
  CHECK_THROWS_AS(dtmc_step(state({0, 0}), spec, rng), ZeroRateError);
  CHECK_THROWS_AS(ctmc_step(state({0, 0}), spec, rng), ZeroRateError);
  CHECK_THROWS(dtmc_step(state({1, 2, 3}), spec, rng));
}

TEST_CASE("immigration revives a zero component") {
  auto spec = with_matrix("1", families::complete(2, Rational(1)));
  spec.immigration = std::vector<Rational>{Rational(0), Rational(5)};
  const auto counts = sample_steps(spec, state({4, 0}), 4000, 9);
  bool revived = false;
  for (const auto& [s, c] : counts) revived = revived || s[1] == 1;
  CHECK(revived);
  RandomStream rng(1, 0);
  CHECK_NOTHROW(dtmc_step(state({0, 0}), spec, rng));
}

TEST_CASE("ctmc_step holding times on the Yule process") {
  const auto spec = with_matrix("1", InteractionMatrix::zero(1), Mode::LcpCtmc);
  const int draws = 40000;
  double sum = 0.0, sq = 0.0;
  for (int k = 0; k < draws; ++k) {
    RandomStream rng(4, static_cast<std::uint64_t>(k));
    const auto jump = ctmc_step(state({5}), spec, rng);
    CHECK(jump.state == state({6}));
    CHECK(jump.holding_time > 0.0);
    sum += jump.holding_time;
    sq += jump.holding_time * jump.holding_time;
  }
  const double mean = sum / draws;
  const double sd = std::sqrt(sq / draws - mean * mean);
  // Exp(5): mean 0.2, standard deviation 0.2.
  CHECK(std::abs(mean - 0.2) < 4 * 0.2 / std::sqrt(draws));
  CHECK(sd == doctest::Approx(0.2).epsilon(0.03));
}

TEST_CASE("ctmc_step at (2,3) has holding rate 10 and the embedded jump law") {
  const auto spec = with_matrix("1", families::complete(2, Rational(1)), Mode::LcpCtmc);
  const auto dtmc = with_matrix("1", families::complete(2, Rational(1)));
  double sum = 0.0;
  const int draws = 20000;
  for (int k = 0; k < draws; ++k) {
    RandomStream a(2, static_cast<std::uint64_t>(k)), b(2, static_cast<std::uint64_t>(k));
    const auto jump = ctmc_step(state({2, 3}), spec, a);
    CHECK(jump.state == dtmc_step(state({2, 3}), dtmc, b));
    sum += jump.holding_time;
  }
  CHECK(std::abs(sum / draws - 0.1) < 4 * 0.1 / std::sqrt(draws));
}

TEST_CASE("urn_step examples") {
  const auto spec = make_model("1", {{"0", "2"}, {"2", "0"}}, Mode::UrnRemovals);
  const int draws = 40000;
  const auto counts = sample_steps(spec, state({3, 1}), draws, 6);
  REQUIRE(counts.size() == 2);
  REQUIRE(counts.count({4, 0}));
  REQUIRE(counts.count({1, 2}));
  const double p = static_cast<double>(counts.at({4, 0})) / draws;
  CHECK(std::abs(p - 0.75) < 4 * std::sqrt(0.75 * 0.25 / draws));

  const auto polya = with_matrix("1", InteractionMatrix::zero(2), Mode::UrnRemovals);
  for (const auto& [s, c] : sample_steps(polya, state({2, 5}), 1000, 1)) {
    CHECK(s[0] + s[1] == 8);
  }

  const auto corral = make_model("0", {{"0", "1"}, {"1", "0"}}, Mode::UrnRemovals);
  const auto c = sample_steps(corral, state({10, 10}), 1000, 2);
  CHECK(c.size() == 2);
  CHECK(c.count({10, 9}));
  CHECK(c.count({9, 10}));

  RandomStream rng(1, 0);
  CHECK_THROWS_AS(urn_step(state({0, 0}), spec, rng), ZeroRateError);
}

TEST_CASE("simulate is deterministic and its events replay to the terminal state") {
  const auto spec = with_matrix("1", families::complete(3, Rational(1)));
  const Budget budget{100000, std::nullopt};
  const auto a = simulate(spec, state({6, 6, 6}), budget, 17, 3);
  const auto b = simulate(spec, state({6, 6, 6}), budget, 17, 3);
  CHECK(a == b);
  const auto c = simulate(spec, state({6, 6, 6}), budget, 17, 4);
  CHECK_FALSE(a == c);

  REQUIRE(a.stop_reason == StopReason::SurvivorSetFrozen);
  const auto states = a.replay();
  REQUIRE(states.size() == a.events.size() + 1);
  CHECK(states.back() == a.terminal_state);
  CHECK(a.steps == a.events.size());
  for (std::size_t k = 0; k < a.events.size(); ++k) {
    CHECK(a.events[k].step == k + 1);
    CHECK(a.events[k].delta * a.events[k].delta == 1);
    CHECK_FALSE(a.events[k].time);
  }
  REQUIRE(a.survivors);
  CHECK(a.survivors->members.size() == 1);
}

TEST_CASE("trajectory invariants on random models") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 5;
    const Mode mode = trial % 3 == 0 ? Mode::LcpCtmc : Mode::EmbeddedDtmc;
    const auto spec = with_matrix("1", random_matrix(gen, n, 0.4), mode);
    const auto init = random_positive_state(gen, n, 8);
    const auto t = simulate(spec, init, Budget{20000, std::nullopt}, 5, static_cast<std::uint64_t>(trial));
    CAPTURE(trial);
    const auto states = t.replay();
    std::vector<bool> dead(n, false);
    for (std::size_t k = 0; k < states.size(); ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(states[k][i] >= 0);
        if (dead[i]) CHECK(states[k][i] == 0);
        dead[i] = dead[i] || states[k][i] == 0;
      }
    }
    double clock = 0.0;
    for (const auto& e : t.events) {
      CHECK(e.delta * e.delta == 1);
      if (mode == Mode::LcpCtmc) {
        REQUIRE(e.time);
        CHECK(*e.time > clock);
        clock = *e.time;
      }
      // A component with no death pressure never decreases.
      if (row_sum(spec.matrix, e.component) == 0) CHECK(e.delta == 1);
    }
    if (t.stop_reason == StopReason::SurvivorSetFrozen) {
      REQUIRE(t.survivors);
      CHECK(t.survivors->pairwise_non_interacting(spec.matrix));
      CHECK(in_survivor_support(spec.matrix, *t.survivors));
      if (spec.matrix == spec.matrix.transposed()) {
        const auto catalog = enumerate_limit_sets(spec.matrix);
        CHECK(std::find(catalog.sets.begin(), catalog.sets.end(), *t.survivors) != catalog.sets.end());
      }
    }
  }
}

TEST_CASE("simulate stop conditions") {
  const auto free = with_matrix("1", InteractionMatrix::zero(3));
  const auto t = simulate(free, state({2, 0, 1}), Budget{}, 1, 0);
  CHECK(t.stop_reason == StopReason::SurvivorSetFrozen);
  CHECK(t.steps == 0);
  REQUIRE(t.survivors);
  CHECK(t.survivors->members == std::vector<std::size_t>{0, 2});

  const auto tri = with_matrix("1", families::triangular(Rational(1)));
  int finished = 0;
  for (std::uint64_t r = 0; r < 200; ++r) {
    const auto run = simulate(tri, state({1, 1}), Budget{1'000'000, std::nullopt}, 2, r, {false, false});
    CHECK(run.events.empty());
    if (run.stop_reason == StopReason::StepBudget) continue;
    REQUIRE(run.stop_reason == StopReason::SurvivorSetFrozen);
    CHECK(run.survivors->members == std::vector<std::size_t>{0});
    ++finished;
  }
  CHECK(finished >= 190);

  const auto k2 = with_matrix("1", families::complete(2, Rational(1)));
  const auto capped = simulate(k2, state({500, 500}), Budget{10, std::nullopt}, 1, 0);
  CHECK(capped.stop_reason == StopReason::StepBudget);
  CHECK(capped.steps == 10);

  const auto ctmc = with_matrix("1", families::complete(2, Rational(1)), Mode::LcpCtmc);
  const auto timed = simulate(ctmc, state({500, 500}), Budget{1'000'000, 0.01}, 1, 0);
  CHECK(timed.stop_reason == StopReason::TimeBudget);
  CHECK(timed.time <= 0.01);

  const auto corral = make_model("0", {{"0", "1"}, {"1", "0"}}, Mode::UrnRemovals);
  const auto duel = simulate(corral, state({3, 3}), Budget{}, 1, 0);
  CHECK(duel.stop_reason == StopReason::SurvivorSetFrozen);
  CHECK(duel.terminal_state.counts[0] * duel.terminal_state.counts[1] == 0);
  CHECK_FALSE(duel.terminal_state.all_zero());

  // Urn removals can clear both types at once.
  const auto heavy = make_model("0", {{"0", "5"}, {"5", "0"}}, Mode::UrnRemovals);
  const auto wipe = simulate(heavy, state({1, 1}), Budget{}, 1, 0);
  CHECK(wipe.stop_reason == StopReason::SurvivorSetFrozen);
  const bool one_left = wipe.terminal_state == state({1, 0}) || wipe.terminal_state == state({0, 1});
  CHECK(one_left);

  CHECK_THROWS(simulate(k2, state({1}), Budget{}, 1, 0));
}

TEST_CASE("CTMC and DTMC runs share the jump chain") {
  const auto dtmc = with_matrix("1", families::complete(3, Rational(1)));
  const auto ctmc = with_matrix("1", families::complete(3, Rational(1)), Mode::LcpCtmc);
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto a = simulate(dtmc, state({5, 5, 5}), Budget{}, 8, r);
    const auto b = simulate(ctmc, state({5, 5, 5}), Budget{}, 8, r);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t k = 0; k < a.events.size(); ++k) {
      CHECK(a.events[k].component == b.events[k].component);
      CHECK(a.events[k].delta == b.events[k].delta);
    }
    CHECK(a.terminal_state == b.terminal_state);
    CHECK(b.time > 0.0);
  }
}

TEST_CASE("first_extinction") {
  const auto k2 = with_matrix("1", families::complete(2, Rational(1)));
  for (std::uint64_t r = 0; r < 200; ++r) {
    const auto rec = first_extinction(k2, state({1, 1}), 1'000'000, 1, r);
    REQUIRE_FALSE(rec.censored());
    CHECK(*rec.sigma >= 1);
    CHECK_FALSE(rec.sigma_tilde);
    const auto t = simulate(k2, state({1, 1}), Budget{1'000'000, std::nullopt}, 1, r);
    REQUIRE(t.first_extinction_step);
    CHECK(*t.first_extinction_step == *rec.sigma);
  }

  const auto free = with_matrix("1", InteractionMatrix::zero(2));
  const auto never = first_extinction(free, state({1, 1}), 1000, 1, 0);
  CHECK(never.censored());

  const auto ctmc = with_matrix("1", families::complete(2, Rational(3, 2)), Mode::LcpCtmc);
  const auto timed = first_extinction(ctmc, state({10, 10}), 1'000'000, 3, 0);
  REQUIRE_FALSE(timed.censored());
  REQUIRE(timed.sigma_tilde);
  CHECK(*timed.sigma_tilde > 0.0);

  CHECK_THROWS_AS(first_extinction(k2, state({0, 1}), 10, 1, 0), PreconditionError);

  const auto sup = with_matrix("1", families::complete(2, Rational(3, 2)));
  for (std::uint64_t r = 0; r < 50; ++r) {
    CHECK_FALSE(first_extinction(sup, state({50, 50}), 1'000'000, 7, r).censored());
  }
}
