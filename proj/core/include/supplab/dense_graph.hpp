#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace supplab {

/// Undirected graph on vertices 0..v-1 with bitset adjacency rows.
/// Small and dense by design; the exact searches below are exponential in the
/// worst case and are meant for graphs that are either tiny or heavily
/// structured (collapsed query classes, candidate neighbourhoods).
class DenseGraph {
 public:
  explicit DenseGraph(std::size_t vertex_count);

  std::size_t vertex_count() const { return count_; }

  /// Adds the undirected edge {a, b}. Self loops are rejected.
  void add_edge(std::size_t a, std::size_t b);

  bool adjacent(std::size_t a, std::size_t b) const;

  std::size_t degree(std::size_t v) const;

 private:
  std::size_t count_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::size_t> degree_;
};

/// Exact search for a clique with exactly `size` vertices.
/// Branch and bound with greedy colouring bounds; stops at the first hit.
/// Returns the vertices sorted ascending, or nullopt when no such clique
/// exists. size 0 yields an empty clique.
std::optional<std::vector<std::size_t>> exact_clique(const DenseGraph& graph,
                                                     std::size_t size);

/// Like exact_clique but the returned clique must contain `anchor`.
std::optional<std::vector<std::size_t>> exact_clique_containing(
    const DenseGraph& graph, std::size_t size, std::size_t anchor);

/// Exact proper colouring with at most `colors` colours, or nullopt when none
/// exists. Backtracking over vertices in descending degree order; the result
/// maps each vertex to a colour in [0, colors).
std::optional<std::vector<int>> exact_color(const DenseGraph& graph,
                                            int colors);

}  // namespace supplab
