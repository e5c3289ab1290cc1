#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "lcpsim/model.hpp"

namespace lcpsim::families {

/// beta on every off-diagonal entry.
InteractionMatrix complete(std::size_t n, const Rational& beta);
/// Symmetric path 1 ~ 2 ~ ... ~ n.
InteractionMatrix line(std::size_t n, const Rational& beta);
/// Symmetric cycle 1 ~ 2 ~ ... ~ n ~ 1 (n >= 3).
InteractionMatrix cycle(std::size_t n, const Rational& beta);
/// Symmetric star, vertex 1 at the centre with n - 1 leaves.
InteractionMatrix star(std::size_t n, const Rational& beta);
/// Single edge 1 -> 2: component 1 kills component 2 at rate beta.
InteractionMatrix triangular(const Rational& beta);

/// One of "complete", "line", "cycle", "star".
InteractionMatrix by_name(std::string_view family, std::size_t n, const Rational& beta);

/// Fibonacci numbers indexed so that F_1 = 2, F_2 = 3, F_3 = 5 (and F_0 = 1,
/// F_{-1} = 1). With this indexing a path on n vertices has F_n - 1 non-empty
/// independent sets.
std::uint64_t shifted_fibonacci(long k);

}  // namespace lcpsim::families
