#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "lcpsim/model.hpp"

namespace lcpsim {

enum class Regime { Subcritical, Critical, Supercritical };

std::string_view regime_name(Regime regime);

/// Perron root and left Perron vector (v1^T A = lambda1 v1^T, v1 >= 0, sum 1).
struct PerronPair {
  double lambda = 0.0;
  std::vector<double> vector;
  double residual = 0.0;       ///< max-norm of v1^T A - lambda1 v1^T
  std::size_t iterations = 0;
};

struct EigenPair {
  std::complex<double> lambda;
  std::vector<std::complex<double>> vector;  ///< left eigenvector
  double residual = 0.0;
};

struct SpectralSummary {
  double lambda1 = 0.0;
  std::vector<double> v1;
  std::optional<EigenPair> min_real;  ///< lambda_N, v_N; absent when lambda1 = 0
  std::vector<std::complex<double>> spectrum;
  std::optional<std::vector<Rational>> u;  ///< only in the subcritical regime
  Rational gamma;
  Regime regime = Regime::Subcritical;
  bool irreducible = false;
};

inline constexpr double kPerronTolerance = 1e-10;
inline constexpr double kSpectrumTolerance = 1e-9;
inline constexpr std::size_t kMaxSpectralSize = 64;

/// Shifted power iteration on A^T. Reducible matrices are handled by taking
/// the largest Perron root over the strongly connected blocks and recovering
/// the vector by inverse iteration. A = 0 yields (0, uniform).
/// Throws ConvergenceError if the residual stays above 1e-10 max(1, lambda1).
PerronPair perron_root(const InteractionMatrix& a);

/// Exact Perron root for matrices with a recognised closed form
/// (the zero matrix and constant off-diagonal matrices).
std::optional<Rational> exact_perron_root(const InteractionMatrix& a);

/// All n eigenvalues, sorted by real part then imaginary part, descending.
std::vector<std::complex<double>> full_spectrum(const InteractionMatrix& a);

/// Eigenvalue with minimal real part (ties: largest imaginary part) and its
/// left eigenvector, scaled so the largest-modulus coordinate equals 1.
/// Throws PreconditionError when lambda1 = 0.
EigenPair min_real_eigenpair(const InteractionMatrix& a);

/// u = (alpha I + A^T)(alpha I - A^T)^{-1} 1, solved exactly.
/// Throws PreconditionError unless lambda1 < alpha.
std::vector<Rational> compute_u(const Rational& alpha, const InteractionMatrix& a);

/// Maximum column sum of A.
Rational gamma_constant(const InteractionMatrix& a);

/// Exact test of lambda1 < alpha: alpha I - A is then a nonsingular M-matrix,
/// which holds iff all its leading principal minors are positive.
bool is_exactly_subcritical(const Rational& alpha, const InteractionMatrix& a);

/// Subcritical and Supercritical are decided exactly whenever possible; when
/// alpha is itself an eigenvalue and not below lambda1, lambda1 is compared
/// against alpha with tolerance 1e-9 max(1, alpha).
Regime classify_regime(const Rational& alpha, const InteractionMatrix& a);

bool is_irreducible(const InteractionMatrix& a);

SpectralSummary spectral_summary(const Rational& alpha, const InteractionMatrix& a);

}  // namespace lcpsim
