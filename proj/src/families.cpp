#include "lcpsim/families.hpp"

#include <stdexcept>

namespace lcpsim::families {

namespace {

std::vector<std::vector<Rational>> zeros(std::size_t n) {
  return std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, Rational(0)));
}

void link(std::vector<std::vector<Rational>>& rows, std::size_t i, std::size_t j, const Rational& beta) {
  rows[i][j] = beta;
  rows[j][i] = beta;
}

}  // namespace

InteractionMatrix complete(std::size_t n, const Rational& beta) {
  auto rows = zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) rows[i][j] = beta;
    }
  }
  return InteractionMatrix(std::move(rows));
}

InteractionMatrix line(std::size_t n, const Rational& beta) {
  auto rows = zeros(n);
  for (std::size_t i = 0; i + 1 < n; ++i) link(rows, i, i + 1, beta);
  return InteractionMatrix(std::move(rows));
}

InteractionMatrix cycle(std::size_t n, const Rational& beta) {
  if (n < 3) throw std::invalid_argument("cycle graph needs at least 3 vertices");
  auto rows = zeros(n);
  for (std::size_t i = 0; i < n; ++i) link(rows, i, (i + 1) % n, beta);
  return InteractionMatrix(std::move(rows));
}

InteractionMatrix star(std::size_t n, const Rational& beta) {
  auto rows = zeros(n);
  for (std::size_t i = 1; i < n; ++i) link(rows, 0, i, beta);
  return InteractionMatrix(std::move(rows));
}

InteractionMatrix triangular(const Rational& beta) {
  auto rows = zeros(2);
  rows[1][0] = beta;
  return InteractionMatrix(std::move(rows));
}

InteractionMatrix by_name(std::string_view family, std::size_t n, const Rational& beta) {
  if (family == "complete") return complete(n, beta);
  if (family == "line") return line(n, beta);
  if (family == "cycle") return cycle(n, beta);
  if (family == "star") return star(n, beta);
  throw std::invalid_argument("unknown graph family '" + std::string(family) + "'");
}

std::uint64_t shifted_fibonacci(long k) {
  // Standard Fibonacci Fib(k + 2) with Fib(1) = Fib(2) = 1.
  if (k < -1) throw std::invalid_argument("shifted_fibonacci: index must be >= -1");
  if (k == -1) return 1;
  std::uint64_t a = 1, b = 1;  // Fib(1), Fib(2)
  for (long i = 0; i < k; ++i) {
    const auto next = a + b;
    a = b;
    b = next;
  }
  return b;
}

}  // namespace lcpsim::families
