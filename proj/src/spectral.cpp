#include "lcpsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "lcpsim/error.hpp"
#include "lcpsim/graph.hpp"

namespace lcpsim {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr std::size_t kPowerIterationBudget = 200000;
constexpr std::size_t kInverseIterationBudget = 200;

MatrixXd to_eigen(const InteractionMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a(i, j).get_d();
  }
  return m;
}

void check_size(const InteractionMatrix& a) {
  if (a.size() > kMaxSpectralSize) {
    throw SizeLimitError("spectral routines support at most " + std::to_string(kMaxSpectralSize) +
                         " components, got " + std::to_string(a.size()));
  }
}

double residual_of(const MatrixXd& at, const VectorXd& v, double lambda) {
  return (at * v - lambda * v).cwiseAbs().maxCoeff();
}

double perron_tolerance(double lambda) { return kPerronTolerance * std::max(1.0, lambda); }

struct PowerResult {
  double lambda;
  VectorXd v;
  double residual;
  std::size_t iterations;
};

/// Power iteration on b^T + shift I for a nonnegative, irreducible b. The
/// shift makes the operator primitive so the Perron root strictly dominates.
PowerResult shifted_power_iteration(const MatrixXd& bt) {
  const auto n = bt.rows();
  const double shift = std::max(0.5 * bt.rowwise().sum().maxCoeff(), 1e-300);
  VectorXd v = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  PowerResult r{0.0, v, std::numeric_limits<double>::infinity(), 0};
  for (std::size_t it = 1; it <= kPowerIterationBudget; ++it) {
    VectorXd w = bt * v + shift * v;
    w /= w.sum();
    v = std::move(w);
    const VectorXd av = bt * v;
    const double lambda = av.sum();  // ||A^T v||_1 with ||v||_1 = 1, v >= 0
    const double res = (av - lambda * v).cwiseAbs().maxCoeff();
    r = {lambda, v, res, it};
    if (res <= 0.1 * perron_tolerance(lambda)) break;
  }
  return r;
}

VectorXd normalized_nonnegative(VectorXd v) {
  if (v.sum() < 0) v = -v;
  const double scale = v.cwiseAbs().maxCoeff();
  for (auto& x : v) {
    if (x < 0 && -x <= 1e-13 * scale) x = 0.0;
  }
  return v / v.sum();
}

}  // namespace

std::string_view regime_name(Regime regime) {
  switch (regime) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
  }
  return "subcritical";
}

bool is_irreducible(const InteractionMatrix& a) {
  return scc_decompose(build_graph(a)).components.size() == 1;
}

PerronPair perron_root(const InteractionMatrix& a) {
  check_size(a);
  const std::size_t n = a.size();
  if (n == 0) throw PreconditionError("perron_root: empty matrix");
  if (a.is_zero()) {
    return PerronPair{0.0, std::vector<double>(n, 1.0 / static_cast<double>(n)), 0.0, 0};
  }

  const MatrixXd at = to_eigen(a).transpose();
  const auto scc = scc_decompose(build_graph(a));

  PerronPair out;
  if (scc.components.size() == 1) {
    auto r = shifted_power_iteration(at);
    out.lambda = r.lambda;
    out.vector.assign(r.v.data(), r.v.data() + n);
    out.residual = r.residual;
    out.iterations = r.iterations;
  } else {
    // The Perron root of a reducible matrix is the largest Perron root over
    // its irreducible diagonal blocks; single vertices contribute 0.
    double rho = 0.0;
    std::size_t iterations = 0;
    for (const auto& comp : scc.components) {
      if (comp.size() < 2) continue;
      const auto m = static_cast<Eigen::Index>(comp.size());
      MatrixXd block(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) block(i, j) = at(comp[i], comp[j]);
      }
      auto r = shifted_power_iteration(block);
      rho = std::max(rho, r.lambda);
      iterations += r.iterations;
    }

    // Inverse iteration just above rho keeps (mu I - A^T)^{-1} nonnegative.
    const double mu = rho + 1e-12 * std::max(1.0, rho);
    const Eigen::PartialPivLU<MatrixXd> lu(mu * MatrixXd::Identity(n, n) - at);
    VectorXd v = VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
    double res = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < kInverseIterationBudget; ++it) {
      v = normalized_nonnegative(lu.solve(v));
      ++iterations;
      res = residual_of(at, v, rho);
      if (res <= 0.1 * perron_tolerance(rho)) break;
    }
    const double scale = v.cwiseAbs().maxCoeff();
    for (auto& x : v) {
      if (x < 0 && -x <= 1e-9 * scale) x = 0.0;
    }
    v /= v.sum();
    res = residual_of(at, v, rho);
    out.lambda = rho;
    out.vector.assign(v.data(), v.data() + n);
    out.residual = res;
    out.iterations = iterations;
  }

  if (!(out.residual <= perron_tolerance(out.lambda))) {
    throw ConvergenceError("perron_root did not converge (residual " + std::to_string(out.residual) + ")",
                           out.residual);
  }
  return out;
}

std::optional<Rational> exact_perron_root(const InteractionMatrix& a) {
  const std::size_t n = a.size();
  if (n == 0) return std::nullopt;
  if (a.is_zero()) return Rational(0);
  if (n < 2) return std::nullopt;
  const Rational beta = a(0, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && a(i, j) != beta) return std::nullopt;
    }
  }
  return Rational(beta * static_cast<long>(n - 1));
}

std::vector<std::complex<double>> full_spectrum(const InteractionMatrix& a) {
  check_size(a);
  const std::size_t n = a.size();
  std::vector<std::complex<double>> out;
  if (n == 0) return out;
  // The spectrum is the union of the spectra of the diagonal blocks in the
  // strongly connected ordering. Solving per block keeps acyclic parts exact.
  const MatrixXd m = to_eigen(a);
  const auto scc = scc_decompose(build_graph(a));
  out.reserve(n);
  for (const auto& comp : scc.components) {
    const auto k = static_cast<Eigen::Index>(comp.size());
    if (k == 1) {
      out.emplace_back(m(comp[0], comp[0]), 0.0);
      continue;
    }
    MatrixXd block(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) block(i, j) = m(comp[i], comp[j]);
    }
    Eigen::EigenSolver<MatrixXd> solver(block, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw ConvergenceError("full_spectrum: eigen-solver failed", NAN);
    const auto& ev = solver.eigenvalues();
    out.insert(out.end(), ev.data(), ev.data() + k);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return out;
}

EigenPair min_real_eigenpair(const InteractionMatrix& a) {
  check_size(a);
  const std::size_t n = a.size();
  if (n == 0) throw PreconditionError("min_real_eigenpair: empty matrix");
  const auto perron = perron_root(a);
  if (perron.lambda <= perron_tolerance(0.0)) {
    throw PreconditionError("min_real_eigenpair requires lambda1 > 0 (interaction graph has no cycle)");
  }

  const MatrixXd at = to_eigen(a).transpose();
  Eigen::EigenSolver<MatrixXd> solver(at, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) throw ConvergenceError("min_real_eigenpair: eigen-solver failed", NAN);
  const VectorXcd values = solver.eigenvalues();
  const MatrixXcd vectors = solver.eigenvectors();

  const double scale = std::max(1.0, perron.lambda);
  const auto spectrum = full_spectrum(a);
  std::complex<double> target = spectrum.back();
  for (auto z : spectrum) {
    if (std::abs(z.real() - target.real()) <= kSpectrumTolerance * scale && z.imag() > target.imag()) target = z;
  }
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < values.size(); ++k) {
    if (std::abs(values[k] - target) < std::abs(values[best] - target)) best = k;
  }

  std::complex<double> lambda = values[best];
  VectorXcd v = vectors.col(best);
  const MatrixXcd atc = at.cast<std::complex<double>>();
  const auto residual = [&](const VectorXcd& x, std::complex<double> l) {
    return (atc * x - l * x).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff();
  };

  // Polish with a few inverse-iteration steps next to the computed eigenvalue.
  double res = residual(v, lambda);
  if (res > 0.1 * kSpectrumTolerance * scale) {
    const std::complex<double> shift = lambda + std::complex<double>(1e-10 * scale, 0.0);
    const Eigen::PartialPivLU<MatrixXcd> lu(atc - shift * MatrixXcd::Identity(n, n));
    for (int it = 0; it < 5 && res > 0.1 * kSpectrumTolerance * scale; ++it) {
      VectorXcd w = lu.solve(v);
      v = w / w.cwiseAbs().maxCoeff();
      lambda = v.dot(atc * v) / v.squaredNorm();  // Rayleigh quotient (dot conjugates v)
      res = residual(v, lambda);
    }
  }

  // Scale so the first largest-modulus coordinate is exactly 1.
  Eigen::Index pivot = 0;
  const double vmax = v.cwiseAbs().maxCoeff();
  while (std::abs(v[pivot]) < vmax * (1.0 - 1e-12)) ++pivot;
  v /= v[pivot];
  v[pivot] = 1.0;

  EigenPair out;
  out.lambda = lambda;
  out.vector.assign(v.data(), v.data() + n);
  out.residual = residual(v, lambda);
  if (out.residual > kSpectrumTolerance * scale) {
    throw ConvergenceError("min_real_eigenpair: eigenvector residual too large", out.residual);
  }
  return out;
}

bool is_exactly_subcritical(const Rational& alpha, const InteractionMatrix& a) {
  const std::size_t n = a.size();
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = (i == j ? alpha : Rational(0)) - a(i, j);
  }
  return leading_minors_positive(m);
}

std::vector<Rational> compute_u(const Rational& alpha, const InteractionMatrix& a) {
  if (!is_exactly_subcritical(alpha, a)) {
    throw PreconditionError("compute_u requires lambda1 < alpha");
  }
  const std::size_t n = a.size();
  RationalMatrix minus(n, n), plus(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Rational diag = i == j ? alpha : Rational(0);
      minus(i, j) = diag - a(j, i);
      plus(i, j) = diag + a(j, i);
    }
  }
  const auto x = solve_exact(minus, std::vector<Rational>(n, Rational(1)));
  return multiply(plus, x);
}

Rational gamma_constant(const InteractionMatrix& a) {
  Rational best = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    Rational col = 0;
    for (std::size_t i = 0; i < a.size(); ++i) col += a(i, j);
    if (col > best) best = col;
  }
  return best;
}

Regime classify_regime(const Rational& alpha, const InteractionMatrix& a) {
  if (is_exactly_subcritical(alpha, a)) return Regime::Subcritical;

  // lambda1 >= alpha from here on. If alpha is not an eigenvalue at all,
  // lambda1 cannot equal it.
  const std::size_t n = a.size();
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = (i == j ? alpha : Rational(0)) - a(i, j);
  }
  if (determinant(m) != 0) return Regime::Supercritical;

  if (auto exact = exact_perron_root(a)) {
    return *exact == alpha ? Regime::Critical : Regime::Supercritical;
  }
  const double alpha_d = alpha.get_d();
  const double tol = 1e-9 * std::max(1.0, alpha_d);
  return perron_root(a).lambda > alpha_d + tol ? Regime::Supercritical : Regime::Critical;
}

SpectralSummary spectral_summary(const Rational& alpha, const InteractionMatrix& a) {
  SpectralSummary s;
  const auto perron = perron_root(a);
  s.lambda1 = perron.lambda;
  s.v1 = perron.vector;
  s.spectrum = full_spectrum(a);
  if (perron.lambda > perron_tolerance(0.0)) s.min_real = min_real_eigenpair(a);
  s.gamma = gamma_constant(a);
  s.regime = classify_regime(alpha, a);
  if (s.regime == Regime::Subcritical) s.u = compute_u(alpha, a);
  s.irreducible = is_irreducible(a);
  return s;
}

}  // namespace lcpsim
