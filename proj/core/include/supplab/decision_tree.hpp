#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "supplab/oracle.hpp"

namespace supplab {

/// Answers a tester has already paid for, per sample handle and 1-based
/// index. Checked for internal consistency: the oracle never answers one
/// (sample, index) pair two ways, so a contradiction here is a caller bug.
class AnswerRecord {
 public:
  /// Stores an answer; re-noting the same pair with the same answer is a
  /// no-op, a different answer is a logic error.
  void note(SampleId handle, std::uint32_t index, int answer);

  std::optional<int> lookup(SampleId handle, std::uint32_t index) const;

  /// Smallest index at which both samples have recorded answers that differ.
  std::optional<std::uint32_t> separating_index(SampleId a, SampleId b) const;

  /// All recorded (index, answer) pairs for one handle; empty map when none.
  const std::map<std::uint32_t, int>& row(SampleId handle) const;

 private:
  std::map<SampleId, std::map<std::uint32_t, int>> rows_;
};

/// Binary decision tree distinguishing a growing set of samples. Internal
/// nodes hold a query index (0-answer routes left), leaves hold distinct
/// sample handles. Every element has recorded answers along its whole
/// root-to-leaf path, and routing an element by those answers reaches its own
/// leaf.
class IncrementalDecisionTree {
 public:
  /// Single-leaf tree holding one element.
  explicit IncrementalDecisionTree(SampleId first);

  std::size_t leaf_count() const { return leaves_; }

  /// Longest root-to-leaf edge count; 0 for a single leaf.
  std::size_t height() const;

  /// Leaf elements, left to right.
  std::vector<SampleId> elements() const;

  /// Routes a sample to a leaf by querying it at each internal node's index
  /// through the session (one paid query per node, so at most height many),
  /// recording every answer. Returns the leaf's element.
  SampleId locate(OracleSession& session, AnswerRecord& record,
                  SampleId handle) const;

  /// Routes on recorded answers only, zero queries. Logic error when an
  /// answer along the path is missing.
  SampleId locate_recorded(const AnswerRecord& record, SampleId handle) const;

  /// Replaces the leaf of `colliding` by an internal node on `index` whose
  /// children are `colliding` and `fresh`, ordered by their recorded answers.
  /// Zero queries. Preconditions (both answers recorded and differing,
  /// recorded routing of `fresh` reaches the colliding leaf, `fresh` not
  /// already present) are checked; violations are logic errors.
  void insert(const AnswerRecord& record, SampleId fresh, SampleId colliding,
              std::uint32_t index);

 private:
  struct Node {
    bool leaf = true;
    SampleId element = 0;
    std::uint32_t index = 0;
    int zero_child = -1;
    int one_child = -1;
  };

  int route_recorded(const AnswerRecord& record, SampleId handle) const;
  std::size_t depth_below(int node) const;

  std::vector<Node> nodes_;
  std::size_t leaves_ = 1;
};

/// Builds a tree over pairwise-distinguished elements in their given order:
/// each element after the first is located (paid queries), certified against
/// the collision by the smallest recorded separating index, and inserted.
/// The paid queries total at most (number of elements)^2. A missing
/// separating index means the elements were never distinguished and is a
/// logic error.
IncrementalDecisionTree construct_tree(OracleSession& session,
                                       AnswerRecord& record,
                                       const std::vector<SampleId>& elements);

}  // namespace supplab
