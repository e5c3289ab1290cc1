#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "lcpsim/model.hpp"

namespace lcpsim {

/// Directed interaction graph: edge i -> j exactly when a_ji > 0 (i harms j).
class GraphView {
 public:
  explicit GraphView(std::size_t n) : out_(n), in_(n) {}

  std::size_t size() const noexcept { return out_.size(); }
  void add_edge(std::size_t from, std::size_t to);
  bool has_edge(std::size_t from, std::size_t to) const;

  const std::vector<std::size_t>& out_neighbors(std::size_t v) const { return out_[v]; }
  const std::vector<std::size_t>& in_neighbors(std::size_t v) const { return in_[v]; }

  /// All edges sorted lexicographically.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

 private:
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

GraphView build_graph(const InteractionMatrix& a);

struct SccDecomposition {
  /// Components ordered by smallest member; members sorted ascending.
  std::vector<std::vector<std::size_t>> components;
  std::vector<std::size_t> component_of;
  /// Condensation edges between component indices, sorted, no duplicates.
  std::vector<std::pair<std::size_t, std::size_t>> condensation;

  std::vector<std::size_t> in_degree() const;
  /// Kahn's algorithm on the condensation; false if it has a cycle.
  bool condensation_is_acyclic() const;
};

SccDecomposition scc_decompose(const GraphView& g);

/// Components with no incoming condensation edge. Never empty for n >= 1.
std::vector<std::vector<std::size_t>> source_subgraphs(const SccDecomposition& d);

/// Restriction of a model to a source vertex set (0-based indices).
/// Throws PreconditionError if an edge enters `vertices` from outside.
ModelSpec restrict_model(const ModelSpec& spec, std::vector<std::size_t> vertices);

/// Largest model size accepted by the limit-set enumeration.
inline constexpr std::size_t kMaxEnumerationSize = 24;

struct LimitSetCatalog {
  /// Sorted by bitmask ascending.
  std::vector<SurvivorSet> sets;
  std::size_t count = 0;

  std::vector<std::uint32_t> masks() const;
};

/// Every survivor configuration produced by the recursive removal procedure:
/// pick a strongly connected source subgraph; if it has several vertices,
/// branch over which one goes extinct; if it is a single vertex v, v survives
/// and all out-neighbours of v go extinct. Memoized on the remaining-vertex mask.
/// Throws SizeLimitError when n > kMaxEnumerationSize.
LimitSetCatalog enumerate_limit_sets(const InteractionMatrix& a);

std::size_t count_limit_sets(const InteractionMatrix& a);

bool is_admissible_limit_set(const InteractionMatrix& a, const SurvivorSet& set);

/// Every set the process can freeze on: non-empty sets with no edge between
/// members from which every vertex is reachable in G(A) (equivalently, sets
/// meeting every strongly connected source component). These are exactly the
/// terminal sets of sequences of single deaths in which each dying vertex has
/// a living in-neighbour. Contains enumerate_limit_sets(a) and coincides with
/// it when A is symmetric; on directed graphs it can be strictly larger (for
/// the chain 1 -> 2 -> 3 it also contains {1}).
LimitSetCatalog survivor_support(const InteractionMatrix& a);

bool in_survivor_support(const InteractionMatrix& a, const SurvivorSet& set);

}  // namespace lcpsim
