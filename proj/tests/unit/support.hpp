#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lcpsim/model.hpp"

namespace lcpsim::testing {

inline ModelSpec make_model(const std::string& alpha, const std::vector<std::vector<std::string>>& entries,
                            Mode mode = Mode::EmbeddedDtmc) {
  std::vector<std::vector<Rational>> rows;
  for (const auto& r : entries) {
    std::vector<Rational> row;
    for (const auto& x : r) row.push_back(parse_rational(x));
    rows.push_back(std::move(row));
  }
  ModelSpec spec;
  spec.alpha = parse_rational(alpha);
  spec.matrix = InteractionMatrix(std::move(rows));
  spec.mode = mode;
  return spec;
}

inline ModelSpec with_matrix(const std::string& alpha, InteractionMatrix a, Mode mode = Mode::EmbeddedDtmc) {
  ModelSpec spec;
  spec.alpha = parse_rational(alpha);
  spec.matrix = std::move(a);
  spec.mode = mode;
  return spec;
}

/// Entries in {0,...,3}/{1,...,4}, zero with probability `sparsity`.
inline InteractionMatrix random_matrix(std::mt19937_64& gen, std::size_t n, double sparsity = 0.3) {
  std::uniform_int_distribution<long> num(0, 3), den(1, 4);
  std::bernoulli_distribution zero(sparsity);
  std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || zero(gen)) continue;
      rows[i][j] = ratio(num(gen), den(gen));
    }
  }
  return InteractionMatrix(std::move(rows));
}

inline PopulationState random_positive_state(std::mt19937_64& gen, std::size_t n, std::int64_t max = 20) {
  std::uniform_int_distribution<std::int64_t> d(1, max);
  PopulationState s;
  for (std::size_t i = 0; i < n; ++i) s.counts.push_back(d(gen));
  return s;
}

}  // namespace lcpsim::testing
