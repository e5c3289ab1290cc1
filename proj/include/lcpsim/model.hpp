#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lcpsim/rational.hpp"

namespace lcpsim {

/// Which stochastic process a model describes.
enum class Mode {
  LcpCtmc,       ///< continuous-time competition process ("lcp")
  EmbeddedDtmc,  ///< its jump chain ("dtmc")
  UrnRemovals,   ///< Polya urn with removals ("urn")
};

std::string_view mode_name(Mode mode);
Mode parse_mode(std::string_view name);

/// Square matrix of nonnegative rates with zero diagonal.
///
/// Entry (i, j) is the rate at which component j kills component i. The
/// class stores whatever it is given; `validate_model` reports violations.
class InteractionMatrix {
 public:
  InteractionMatrix() = default;
  explicit InteractionMatrix(std::vector<std::vector<Rational>> rows);

  /// n x n zero matrix.
  static InteractionMatrix zero(std::size_t n);

  std::size_t size() const noexcept { return rows_.size(); }
  const Rational& operator()(std::size_t i, std::size_t j) const { return rows_[i][j]; }
  const std::vector<std::vector<Rational>>& rows() const noexcept { return rows_; }

  bool is_square() const;
  bool is_zero() const;
  /// Pattern only: true when (i, j) and (j, i) are both zero.
  bool non_interacting(std::size_t i, std::size_t j) const {
    return rows_[i][j] == 0 && rows_[j][i] == 0;
  }

  InteractionMatrix scaled(const Rational& c) const;
  InteractionMatrix transposed() const;
  /// Simultaneous row/column relabeling: result(i, j) = this(perm[i], perm[j]).
  InteractionMatrix permuted(const std::vector<std::size_t>& perm) const;
  InteractionMatrix submatrix(const std::vector<std::size_t>& keep) const;

  RationalMatrix to_rational_matrix() const;
  std::vector<double> to_doubles() const;  // row-major

  friend bool operator==(const InteractionMatrix&, const InteractionMatrix&) = default;

 private:
  std::vector<std::vector<Rational>> rows_;
};

/// Per-component counts: population sizes or ball counts depending on mode.
struct PopulationState {
  std::vector<std::int64_t> counts;

  std::size_t size() const noexcept { return counts.size(); }
  std::int64_t operator[](std::size_t i) const { return counts[i]; }
  std::int64_t& operator[](std::size_t i) { return counts[i]; }
  bool all_positive() const;
  bool all_zero() const;
  std::int64_t min() const;

  friend bool operator==(const PopulationState&, const PopulationState&) = default;
};

/// Components that persist forever; members are 0-based and sorted.
struct SurvivorSet {
  std::vector<std::size_t> members;

  static SurvivorSet from_mask(std::uint64_t mask);
  std::uint64_t mask() const;
  bool contains(std::size_t i) const;
  bool pairwise_non_interacting(const InteractionMatrix& a) const;
  /// 1-based, e.g. "{1,3}".
  std::string to_string() const;

  friend auto operator<=>(const SurvivorSet&, const SurvivorSet&) = default;
};

struct ModelSpec {
  Rational alpha;
  InteractionMatrix matrix;
  std::optional<std::vector<Rational>> immigration;
  Mode mode = Mode::EmbeddedDtmc;
  /// Default starting state from the model file, if any.
  std::optional<PopulationState> initial;

  std::size_t size() const noexcept { return matrix.size(); }
  /// Immigration applies outside urn mode when at least one rate is positive.
  bool has_immigration() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate_model(const ModelSpec& spec);

/// Checks a state against a model: length n, no negative entries.
ValidationReport validate_state(const ModelSpec& spec, const PopulationState& state);

/// Parses the JSON model format. Throws ParseError or ValidationError.
ModelSpec parse_model(std::string_view json_text);
ModelSpec load_model(const std::filesystem::path& path);

/// Canonical JSON text; `parse_model(serialize_model(m)) == m` for valid m.
std::string serialize_model(const ModelSpec& spec);

/// Parses "50,50" style count lists.
PopulationState parse_state(std::string_view text);

}  // namespace lcpsim
