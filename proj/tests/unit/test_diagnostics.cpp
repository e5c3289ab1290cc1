#include <doctest.h>

#include <cmath>
#include <random>

#include "lcpsim/diagnostics.hpp"
#include "lcpsim/error.hpp"
#include "lcpsim/families.hpp"
#include "support.hpp"

using namespace lcpsim;
using lcpsim::testing::make_model;
using lcpsim::testing::random_matrix;
using lcpsim::testing::random_positive_state;
using lcpsim::testing::with_matrix;

namespace {

PopulationState state(std::initializer_list<std::int64_t> xs) { return PopulationState{std::vector<std::int64_t>(xs)}; }

ModelSpec complete_pair(const Rational& beta) { return with_matrix("1", families::complete(2, beta)); }

Rational sum(const std::vector<Rational>& xs) {
  Rational s;
  for (const auto& x : xs) s += x;
  return s;
}

}  // namespace

TEST_CASE("lcp_transitions at (2,3) on the complete pair") {
  const auto t = lcp_transitions(state({2, 3}), complete_pair(Rational(1)));
  REQUIRE(t.size() == 4);
  CHECK(t[0].next == state({3, 3}));
  CHECK(t[0].probability == Rational(1, 5));
  CHECK(t[1].next == state({2, 4}));
  CHECK(t[1].probability == Rational(3, 10));
  CHECK(t[2].next == state({1, 3}));
  CHECK(t[2].probability == Rational(3, 10));
  CHECK(t[3].next == state({2, 2}));
  CHECK(t[3].probability == Rational(1, 5));
  CHECK_THROWS_AS(lcp_transitions(state({0, 0}), complete_pair(Rational(1))), ZeroRateError);
}

TEST_CASE("urn_transitions") {
  const auto spec = make_model("1", {{"0", "2"}, {"2", "0"}}, Mode::UrnRemovals);
  const auto t = urn_transitions(state({3, 1}), spec);
  REQUIRE(t.size() == 2);
  CHECK(t[0].next == state({4, 0}));
  CHECK(t[0].probability == Rational(3, 4));
  CHECK(t[1].next == state({1, 2}));
  CHECK(t[1].probability == Rational(1, 4));
}

TEST_CASE("total_rate examples") {
  CHECK(total_rate(state({2, 3}), complete_pair(Rational(1))) == 10);
  CHECK(total_rate(state({0, 0}), complete_pair(Rational(1))) == 0);
  CHECK(total_rate(state({0, 5}), with_matrix("1", families::triangular(Rational(7)))) == 5);
}

TEST_CASE("component_drift examples") {
  CHECK(component_drift(state({2, 3}), complete_pair(Rational(1))) ==
        std::vector<Rational>{Rational(-1, 10), Rational(1, 10)});
  const auto free = component_drift(state({1, 2, 5}), with_matrix("1", InteractionMatrix::zero(3)));
  CHECK(free == std::vector<Rational>{Rational(1, 8), Rational(1, 4), Rational(5, 8)});
  const auto sym = component_drift(state({4, 4, 4, 4, 4}), with_matrix("2", families::cycle(5, Rational(1, 3))));
  for (const auto& d : sym) CHECK(d == sym[0]);
}

TEST_CASE("projected_drift examples") {
  const auto spec = complete_pair(Rational(1));
  const auto a = projected_drift(state({2, 3}), spec, {Rational(1), Rational(-1)}, Rational(-1));
  CHECK(a.lhs == Rational(-1, 5));
  CHECK(a.rhs == Rational(-1, 5));
  CHECK(a.holds);
  const auto b = projected_drift(state({2, 3}), spec, {Rational(1), Rational(1)}, Rational(1));
  CHECK(b.lhs == 0);
  CHECK(b.holds);
  const auto free = with_matrix("3", InteractionMatrix::zero(2));
  const auto c = projected_drift(state({2, 5}), free, {Rational(4), Rational(-7)}, Rational(0));
  CHECK(c.rhs == Rational(3) * Rational(8 - 35) / Rational(21));
  CHECK(c.holds);
}

TEST_CASE("T functional examples") {
  const auto spec = make_model("1", {{"0", "1/2"}, {"1/2", "0"}});
  const auto r = t_report(state({1, 1}), spec);
  CHECK(r.u == std::vector<Rational>{Rational(3), Rational(3)});
  CHECK(r.t == 6);
  CHECK(r.r == 3);
  CHECK(r.drift == 1);

  const auto free = t_report(state({2, 7, 1}), with_matrix("5/2", InteractionMatrix::zero(3)));
  CHECK(free.t == free.r);
  CHECK(free.drift == Rational(5, 2));

  CHECK_THROWS_AS(t_report(state({1, 1}), complete_pair(Rational(1))), PreconditionError);
  CHECK_THROWS_AS(t_report(state({0, 1}), spec), PreconditionError);
}

TEST_CASE("r_drift_bound examples") {
  const auto a = r_drift_bound(state({2, 3}), complete_pair(Rational(1)));
  CHECK(a.lhs == 0);
  CHECK(a.rhs == 1);
  CHECK(a.holds);
  const auto free = r_drift_bound(state({4, 1}), with_matrix("3/2", InteractionMatrix::zero(2)));
  CHECK(free.lhs == Rational(3, 2));
  CHECK(free.holds);
}

TEST_CASE("v_drift_triangular examples") {
  const auto a = v_drift_triangular(3, 2, Rational(1));
  CHECK(a.lhs == Rational(-9, 160));
  CHECK(a.rhs == Rational(-9, 160));
  const auto b = v_drift_triangular(1, 1, Rational(2));
  CHECK(b.lhs == Rational(-1, 4));
  CHECK(b.rhs == Rational(-1, 4));
  const auto c = v_drift_triangular(4, 9, Rational(0));
  CHECK(c.lhs == 0);
  CHECK(c.rhs == 0);
  CHECK_THROWS_AS(v_drift_triangular(1, 0, Rational(1)), PreconditionError);
}

TEST_CASE("v_drift_triangular closed form on the full grid") {
  for (const auto& beta : {Rational(1, 2), Rational(1), Rational(2)}) {
    for (std::int64_t x = 1; x <= 30; ++x) {
      for (std::int64_t y = 1; y <= 30; ++y) {
        if (x + y <= 1) continue;
        const auto c = v_drift_triangular(x, y, beta);
        CHECK(c.lhs == c.rhs);
        CHECK(c.holds);
      }
    }
  }
}

TEST_CASE("second_moment_drift examples") {
  const auto spec = complete_pair(Rational(1));
  const auto cross = second_moment_drift(state({2, 3}), spec, 0, 1);
  // 2 alpha x1 x2 - x1 (Ax)_2 - x2 (Ax)_1 = 12 - 2*2 - 3*3
  CHECK(cross.lhs == -1);
  CHECK(cross.rhs == -1);
  const auto diag = second_moment_drift(state({2, 3}), spec, 0, 0);
  CHECK(diag.lhs == 1);
  CHECK(diag.rhs == 1);
  const auto free = second_moment_drift(state({3, 4}), with_matrix("2", InteractionMatrix::zero(2)), 0, 1);
  CHECK(free.lhs == 2 * 2 * 3 * 4);
  CHECK(free.holds);
}

TEST_CASE("u_second_moment_check examples") {
  const auto spec = complete_pair(Rational(1));
  const auto a = u_second_moment_check(state({2, 3}), spec);
  CHECK(a.rhs.real() == doctest::Approx(4.0));
  CHECK(a.lhs.real() >= 4.0);
  CHECK(a.holds);
  const auto b = u_second_moment_check(state({2, 2}), spec);
  CHECK(std::abs(b.rhs) <= 1e-12);
  CHECK(b.lhs.real() >= 0.0);
  CHECK(b.holds);
  CHECK_THROWS_AS(u_second_moment_check(state({2, 2}), with_matrix("1", InteractionMatrix::zero(2))),
                  PreconditionError);
}

TEST_CASE("extinction_bound examples") {
  const auto spec = complete_pair(Rational(3, 2));
  const auto b = extinction_bound(spec, state({50, 50}));
  CHECK(b.rho == doctest::Approx(0.2).epsilon(1e-12));  // v1 normalized to sum 1
  CHECK(b.bound == doctest::Approx(500.0).epsilon(1e-9));
  CHECK(extinction_bound(spec, state({150, 150})).bound == doctest::Approx(1500.0).epsilon(1e-9));
  CHECK(extinction_bound(complete_pair(Rational(101, 100)), state({50, 50})).bound > 1e4);
  CHECK_THROWS_AS(extinction_bound(complete_pair(Rational(1, 2)), state({50, 50})), PreconditionError);
}

TEST_CASE("tail_exponent_info examples") {
  const auto info = tail_exponent_info(complete_pair(Rational(1, 2)));
  REQUIRE(info.epsilon);
  CHECK(*info.epsilon == ratio(190, 1024));
  const double e = info.epsilon->get_d();
  CHECK(info.exponent == doctest::Approx(e / (4 + 2 * e) * (1.0 / 1.5)));
  CHECK(info.exponent > 0.0196);

  const auto near = tail_exponent_info(complete_pair(Rational(99, 100)));
  REQUIRE(near.epsilon);
  CHECK(near.exponent > 0.0);

  const auto free = tail_exponent_info(with_matrix("1", InteractionMatrix::zero(2)));
  CHECK_FALSE(free.epsilon);
  CHECK_FALSE(free.message.empty());
  CHECK_THROWS_AS(tail_exponent_info(complete_pair(Rational(3, 2))), PreconditionError);
}

TEST_CASE("urn fraction drift of a classical Polya urn is zero") {
  const auto polya = with_matrix("3", InteractionMatrix::zero(3), Mode::UrnRemovals);
  std::mt19937_64 gen(1);
  for (int k = 0; k < 50; ++k) {
    const auto s = random_positive_state(gen, 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(urn_fraction_drift(s, polya, i) == 0);
  }
  const auto corral = make_model("0", {{"0", "1"}, {"1", "0"}}, Mode::UrnRemovals);
  CHECK(urn_fraction_drift(state({10, 10}), corral, 0) == 0);
  CHECK(urn_fraction_drift(state({3, 1}), corral, 0) != 0);
}

TEST_CASE("exact identities on random rational models") {
  std::mt19937_64 gen(2024);
  int subcritical = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 5;
    std::uniform_int_distribution<long> anum(1, 6), aden(1, 3);
    auto spec = with_matrix("1", random_matrix(gen, n, 0.3));
    spec.alpha = ratio(anum(gen), aden(gen));
    const auto x = random_positive_state(gen, n);
    CAPTURE(trial);

    const auto drift = component_drift_check(x, spec);
    for (const auto& c : drift) CHECK(c.lhs == c.rhs);

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto c = second_moment_drift(x, spec, i, j);
        CHECK(c.lhs == c.rhs);
      }
    }

    const auto rb = r_drift_bound(x, spec);
    CHECK(rb.lhs <= spec.alpha);
    CHECK(rb.holds);

    // Probabilities of the enumerated transitions form a distribution.
    Rational mass;
    for (const auto& t : lcp_transitions(x, spec)) {
      CHECK(t.probability >= 0);
      mass += t.probability;
    }
    CHECK(mass == 1);

    if (classify_regime(spec.alpha, spec.matrix) == Regime::Subcritical) {
      ++subcritical;
      const auto r = t_report(x, spec);
      CHECK(r.drift == spec.alpha);
      CHECK(r.t >= r.r);
    }

    const auto again = component_drift(x, spec);
    CHECK(again == component_drift(x, spec));
  }
  CHECK(subcritical >= 40);
}

TEST_CASE("eigen-projected drift on the complete family") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const Rational beta = ratio(1 + trial % 4, 1 + trial % 3);
    auto spec = with_matrix("1", families::complete(n, beta));
    spec.alpha = ratio(1 + trial % 5, 2);
    const auto x = random_positive_state(gen, n);
    CAPTURE(trial);

    const auto top = projected_drift(x, spec, std::vector<Rational>(n, Rational(1)),
                                     beta * static_cast<long>(n - 1));
    CHECK(top.lhs == top.rhs);
    for (std::size_t k = 1; k < n; ++k) {
      std::vector<Rational> v(n, Rational(0));
      v[0] = 1;
      v[k] = -1;
      const auto c = projected_drift(x, spec, v, -beta);
      CHECK(c.lhs == c.rhs);
    }
  }
}

TEST_CASE("floating-point identities with irrational eigenpairs") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const auto spec = with_matrix("1", random_matrix(gen, n, 0.2));
    if (perron_root(spec.matrix).lambda <= 1e-6) continue;
    const auto x = random_positive_state(gen, n);
    CAPTURE(trial);
    const auto vn = min_real_eigenpair(spec.matrix);
    const auto eq = projected_drift(x, spec, vn.vector, vn.lambda);
    CHECK(eq.error <= kFloatIdentityTolerance);
    CHECK(eq.holds);
    if (vn.lambda.imag() == 0.0) {
      const auto u = u_second_moment_check(x, spec, vn);
      CHECK(u.holds);
    }
  }
}

TEST_CASE("drift_report collects the functionals") {
  const auto r = drift_report(state({2, 3}), complete_pair(Rational(1, 2)));
  CHECK(r.r == Rational(15, 2));
  CHECK(sum(r.component_drift) == Rational(1, 3));
  CHECK(r.s == doctest::Approx(2.5));
  REQUIRE(r.t);
  REQUIRE(r.u);
  REQUIRE(r.v);
  CHECK(*r.v == Rational(3, 5));
  CHECK(r.second_moments.size() == 2);
  CHECK(r.projected_drifts.count(1));
  CHECK(r.projected_drifts.count(2));
}
