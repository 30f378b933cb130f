#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "supplab/oracle.hpp"

namespace supplab {

/// Samples queried at one index, split by the recorded answer.
struct IndexGroup {
  std::vector<SampleId> zero_side;
  std::vector<SampleId> one_side;
};

/// Undirected edge between two sample handles, certified by the smallest
/// index at which their recorded answers differ.
struct ContradictionEdge {
  SampleId a = 0;
  SampleId b = 0;
  std::uint32_t certificate = 0;
};

/// Result of the capacity bound check. `bound` is (m+1) * log2(m+1); `holds`
/// is decided exactly (integer arithmetic), the double is for reporting.
struct HanselCheck {
  bool colorable = false;
  std::uint64_t capacity = 0;
  double bound = 0.0;
  bool holds = false;
};

/// Contradiction graph of a query transcript. Vertices are the sample handles
/// that appear in the transcript; two samples are adjacent when some index was
/// queried on both with differing answers. Immutable after construction and
/// safe to share across threads; every operation is a pure function.
class ContradictionGraph {
 public:
  const std::vector<SampleId>& vertices() const { return vertices_; }

  /// Per-index query groups, keyed by 1-based index, for indices with at
  /// least one recorded query.
  const std::map<std::uint32_t, IndexGroup>& groups() const { return groups_; }

  /// The (index, answer) pairs recorded for one sample, sorted by index.
  /// Throws if the handle is not a vertex.
  const std::vector<std::pair<std::uint32_t, int>>& answers_of(
      SampleId handle) const;

  /// Smallest index certifying adjacency of the two handles, or nullopt when
  /// they do not contradict each other anywhere both were queried.
  std::optional<std::uint32_t> certificate(SampleId a, SampleId b) const;

  /// True when the handles are distinct vertices and pairwise adjacent.
  bool certifies_clique(const std::vector<SampleId>& handles) const;

  /// All edges with their smallest certifying index, sorted by (a, b) with
  /// a < b. Materialised on every call; the cost is sum over indices of
  /// |zero side| * |one side|, so keep this off hot paths for big transcripts.
  std::vector<ContradictionEdge> edges() const;

  /// JSON object with vertices, edges (with certificates) and per-index
  /// groups. Deterministic field and element order.
  std::string to_json_string(bool pretty = true) const;

 private:
  friend ContradictionGraph build_contradiction_graph(const QueryLog& log);

  std::vector<SampleId> vertices_;
  std::map<SampleId, std::vector<std::pair<std::uint32_t, int>>> answers_;
  std::map<std::uint32_t, IndexGroup> groups_;
};

/// Builds the contradiction graph of a transcript. Repeated queries of the
/// same (sample, index) pair collapse to one entry; a transcript that answers
/// the same pair inconsistently is rejected.
ContradictionGraph build_contradiction_graph(const QueryLog& log);

/// Exact proper-colorability decision. Returns a verified proper colouring
/// (handle to colour in [0, m)) when one exists, nullopt otherwise.
///
/// Vertices with identical (index, answer) lists are interchangeable: they
/// are never adjacent and see the same neighbours, so the search runs on one
/// representative per class and the colouring extends class-wise. The exact
/// backtracking refuses graphs with more than 40 such classes.
std::optional<std::map<SampleId, int>> is_m_colorable(
    const ContradictionGraph& graph, int m);

/// Exact search for `size` pairwise adjacent samples, branch and bound with
/// colouring bounds. Returns the handles sorted ascending, or nullopt when no
/// such clique exists. As in is_m_colorable the search runs on query classes,
/// which loses nothing: a clique never contains two samples of one class.
std::optional<std::vector<SampleId>> find_clique(const ContradictionGraph& graph,
                                                 std::size_t size);

/// Number of distinct (sample, index) query pairs in the transcript, which
/// equals the total size of the per-index groups.
std::uint64_t edge_cover_capacity(const ContradictionGraph& graph);

/// Checks the capacity bound: a graph that is not m-colorable must satisfy
/// capacity >= (m+1) * log2(m+1). Colorability is decided by first searching
/// for an (m+1)-clique (which certifies non-colorability at any graph size)
/// and only falling back to the exact colouring, with its class-count guard,
/// when no clique exists.
HanselCheck check_hansel_bound(const ContradictionGraph& graph, int m);

}  // namespace supplab
