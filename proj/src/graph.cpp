#include "lcpsim/graph.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <set>
#include <unordered_map>

#include "lcpsim/error.hpp"

namespace lcpsim {

void GraphView::add_edge(std::size_t from, std::size_t to) {
  if (has_edge(from, to)) return;
  auto insert_sorted = [](std::vector<std::size_t>& v, std::size_t x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
  };
  insert_sorted(out_[from], to);
  insert_sorted(in_[to], from);
}

bool GraphView::has_edge(std::size_t from, std::size_t to) const {
  return std::binary_search(out_[from].begin(), out_[from].end(), to);
}

std::vector<std::pair<std::size_t, std::size_t>> GraphView::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t v = 0; v < size(); ++v) {
    for (auto w : out_[v]) out.emplace_back(v, w);
  }
  return out;
}

GraphView build_graph(const InteractionMatrix& a) {
  GraphView g(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (i != j && a(j, i) > 0) g.add_edge(i, j);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> SccDecomposition::in_degree() const {
  std::vector<std::size_t> deg(components.size(), 0);
  for (const auto& [from, to] : condensation) ++deg[to];
  return deg;
}

bool SccDecomposition::condensation_is_acyclic() const {
  auto deg = in_degree();
  std::vector<std::vector<std::size_t>> out(components.size());
  for (const auto& [from, to] : condensation) out[from].push_back(to);
  std::deque<std::size_t> ready;
  for (std::size_t c = 0; c < deg.size(); ++c) {
    if (deg[c] == 0) ready.push_back(c);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto c = ready.front();
    ready.pop_front();
    ++visited;
    for (auto d : out[c]) {
      if (--deg[d] == 0) ready.push_back(d);
    }
  }
  return visited == components.size();
}

SccDecomposition scc_decompose(const GraphView& g) {
  // Tarjan's algorithm.
  const std::size_t n = g.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> found;
  std::size_t counter = 0;

  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (auto w : g.out_neighbors(v)) {
      if (index[w] == kUnvisited) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      found.push_back(std::move(comp));
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] == kUnvisited) visit(v);
  }

  SccDecomposition d;
  std::sort(found.begin(), found.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  d.components = std::move(found);
  d.component_of.assign(n, 0);
  for (std::size_t c = 0; c < d.components.size(); ++c) {
    for (auto v : d.components[c]) d.component_of[v] = c;
  }
  std::set<std::pair<std::size_t, std::size_t>> cond;
  for (const auto& [from, to] : g.edges()) {
    auto cf = d.component_of[from], ct = d.component_of[to];
    if (cf != ct) cond.emplace(cf, ct);
  }
  d.condensation.assign(cond.begin(), cond.end());
  return d;
}

std::vector<std::vector<std::size_t>> source_subgraphs(const SccDecomposition& d) {
  auto deg = d.in_degree();
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t c = 0; c < d.components.size(); ++c) {
    if (deg[c] == 0) out.push_back(d.components[c]);
  }
  return out;
}

ModelSpec restrict_model(const ModelSpec& spec, std::vector<std::size_t> vertices) {
  const std::size_t n = spec.size();
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  if (vertices.empty()) throw PreconditionError("restrict: vertex set must be non-empty");
  std::vector<bool> inside(n, false);
  for (auto v : vertices) {
    if (v >= n) throw PreconditionError("restrict: vertex " + std::to_string(v + 1) + " out of range");
    inside[v] = true;
  }
  // An edge u -> v with u outside and v inside means a_vu > 0.
  for (auto v : vertices) {
    for (std::size_t u = 0; u < n; ++u) {
      if (!inside[u] && spec.matrix(v, u) > 0) {
        throw PreconditionError("restrict: edge " + std::to_string(u + 1) + "->" +
                                std::to_string(v + 1) + " enters the vertex set; not a source subgraph");
      }
    }
  }

  ModelSpec out;
  out.alpha = spec.alpha;
  out.mode = spec.mode;
  out.matrix = spec.matrix.submatrix(vertices);
  if (spec.immigration) {
    std::vector<Rational> imm;
    for (auto v : vertices) imm.push_back((*spec.immigration)[v]);
    out.immigration = std::move(imm);
  }
  if (spec.initial) {
    PopulationState init;
    for (auto v : vertices) init.counts.push_back((*spec.initial)[v]);
    out.initial = std::move(init);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Limit-set enumeration

std::vector<std::uint32_t> LimitSetCatalog::masks() const {
  std::vector<std::uint32_t> out;
  out.reserve(sets.size());
  for (const auto& s : sets) out.push_back(static_cast<std::uint32_t>(s.mask()));
  return out;
}

namespace {

class LimitSetEnumerator {
 public:
  explicit LimitSetEnumerator(const InteractionMatrix& a) : n_(a.size()), out_(n_, 0), in_(n_, 0) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (i != j && a(j, i) > 0) {  // edge i -> j
          out_[i] |= bit(j);
          in_[j] |= bit(i);
        }
      }
    }
  }

  const std::vector<std::uint32_t>& solve(std::uint32_t mask) {
    if (auto it = memo_.find(mask); it != memo_.end()) return it->second;

    std::vector<std::uint32_t> result;
    if (mask == 0) {
      result.push_back(0);
    } else {
      const std::uint32_t source = first_source(mask);
      if (std::popcount(source) >= 2) {
        // Some vertex of the source component goes extinct; any of them may.
        for (std::uint32_t rest = source; rest; rest &= rest - 1) {
          const std::uint32_t v = rest & (~rest + 1);
          const auto& sub = solve(mask & ~v);
          result.insert(result.end(), sub.begin(), sub.end());
        }
      } else {
        // A lone source vertex has no predator left: it survives, its prey dies.
        const std::size_t v = static_cast<std::size_t>(std::countr_zero(source));
        const std::uint32_t removed = source | (out_[v] & mask);
        for (auto s : solve(mask & ~removed)) result.push_back(s | source);
      }
      std::sort(result.begin(), result.end());
      result.erase(std::unique(result.begin(), result.end()), result.end());
    }
    return memo_.emplace(mask, std::move(result)).first->second;
  }

 private:
  static std::uint32_t bit(std::size_t i) { return std::uint32_t{1} << i; }

  std::uint32_t reach(std::size_t start, std::uint32_t mask, const std::vector<std::uint32_t>& adj) const {
    std::uint32_t seen = bit(start), frontier = seen;
    while (frontier) {
      std::uint32_t next = 0;
      for (std::uint32_t f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
      next &= mask & ~seen;
      seen |= next;
      frontier = next;
    }
    return seen;
  }

  /// Strongly connected source component containing the lowest possible vertex.
  std::uint32_t first_source(std::uint32_t mask) const {
    for (std::uint32_t rest = mask; rest; rest &= rest - 1) {
      const auto v = static_cast<std::size_t>(std::countr_zero(rest));
      const std::uint32_t comp = reach(v, mask, out_) & reach(v, mask, in_);
      bool is_source = true;
      for (std::uint32_t c = comp; c; c &= c - 1) {
        if (in_[std::countr_zero(c)] & mask & ~comp) {
          is_source = false;
          break;
        }
      }
      if (is_source) return comp;
    }
    return 0;  // unreachable: every non-empty graph has a source component
  }

  std::size_t n_;
  std::vector<std::uint32_t> out_;
  std::vector<std::uint32_t> in_;
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> memo_;
};

}  // namespace

LimitSetCatalog enumerate_limit_sets(const InteractionMatrix& a) {
  const std::size_t n = a.size();
  if (n > kMaxEnumerationSize) {
    throw SizeLimitError("enumerate_limit_sets supports at most " +
                         std::to_string(kMaxEnumerationSize) + " components, got " + std::to_string(n));
  }
  LimitSetCatalog catalog;
  if (n == 0) return catalog;
  LimitSetEnumerator e(a);
  const std::uint32_t all = n == 32 ? ~0u : ((std::uint32_t{1} << n) - 1);
  for (auto m : e.solve(all)) catalog.sets.push_back(SurvivorSet::from_mask(m));
  catalog.count = catalog.sets.size();
  return catalog;
}

std::size_t count_limit_sets(const InteractionMatrix& a) { return enumerate_limit_sets(a).count; }

bool is_admissible_limit_set(const InteractionMatrix& a, const SurvivorSet& set) {
  const auto catalog = enumerate_limit_sets(a);
  return std::binary_search(catalog.sets.begin(), catalog.sets.end(), set,
                            [](const SurvivorSet& x, const SurvivorSet& y) { return x.mask() < y.mask(); });
}

namespace {

struct PatternMasks {
  std::vector<std::uint64_t> out, in;
};

PatternMasks pattern_masks(const InteractionMatrix& a) {
  const std::size_t n = a.size();
  PatternMasks p{std::vector<std::uint64_t>(n, 0), std::vector<std::uint64_t>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && a(j, i) > 0) {
        p.out[i] |= std::uint64_t{1} << j;
        p.in[j] |= std::uint64_t{1} << i;
      }
    }
  }
  return p;
}

std::uint64_t reachable_from(std::uint64_t start, const std::vector<std::uint64_t>& out) {
  std::uint64_t seen = start, frontier = start;
  while (frontier) {
    std::uint64_t next = 0;
    for (std::uint64_t f = frontier; f; f &= f - 1) next |= out[std::countr_zero(f)];
    next &= ~seen;
    seen |= next;
    frontier = next;
  }
  return seen;
}

}  // namespace

LimitSetCatalog survivor_support(const InteractionMatrix& a) {
  const std::size_t n = a.size();
  if (n > kMaxEnumerationSize) {
    throw SizeLimitError("survivor_support supports at most " + std::to_string(kMaxEnumerationSize) +
                         " components, got " + std::to_string(n));
  }
  LimitSetCatalog catalog;
  if (n == 0) return catalog;
  const auto p = pattern_masks(a);
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;

  // Independent sets by backtracking over vertices in index order.
  std::vector<std::uint64_t> found;
  auto extend = [&](auto&& self, std::size_t v, std::uint64_t chosen, std::uint64_t blocked) -> void {
    if (v == n) {
      if (chosen && reachable_from(chosen, p.out) == all) found.push_back(chosen);
      return;
    }
    self(self, v + 1, chosen, blocked);
    const std::uint64_t b = std::uint64_t{1} << v;
    if (!(blocked & b)) self(self, v + 1, chosen | b, blocked | b | p.out[v] | p.in[v]);
  };
  extend(extend, 0, 0, 0);
  std::sort(found.begin(), found.end());
  for (auto m : found) catalog.sets.push_back(SurvivorSet::from_mask(m));
  catalog.count = catalog.sets.size();
  return catalog;
}

bool in_survivor_support(const InteractionMatrix& a, const SurvivorSet& set) {
  const std::size_t n = a.size();
  if (set.members.empty()) return false;
  for (auto m : set.members) {
    if (m >= n) return false;
  }
  if (!set.pairwise_non_interacting(a)) return false;
  const auto p = pattern_masks(a);
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  return reachable_from(set.mask(), p.out) == all;
}

}  // namespace lcpsim
