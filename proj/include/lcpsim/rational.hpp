#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace lcpsim {

/// Arbitrary-precision rational; all model rates are held in this type.
using Rational = mpq_class;

/// Parses "7", "-3/10", "+2/4" or a finite decimal such as "1.5" exactly.
/// Throws std::invalid_argument on anything else (including zero denominators).
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form, or "p" when the denominator is 1.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// num/den in lowest terms; den must be nonzero.
inline Rational ratio(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

bool is_integer(const Rational& value);

/// Dense row-major rational matrix used by the exact solvers.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  RationalMatrix transposed() const;

  static RationalMatrix identity(std::size_t n);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

std::vector<Rational> multiply(const RationalMatrix& m, const std::vector<Rational>& x);

/// Solves m·x = rhs exactly by Gaussian elimination.
/// Throws PreconditionError if m is singular or not square.
std::vector<Rational> solve_exact(const RationalMatrix& m, const std::vector<Rational>& rhs);

/// Exact determinant by Gaussian elimination.
Rational determinant(const RationalMatrix& m);

/// True when every leading principal minor of m is strictly positive.
bool leading_minors_positive(const RationalMatrix& m);

}  // namespace lcpsim
