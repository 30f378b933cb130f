#include "supplab/decision_tree.hpp"

#include <stdexcept>

#include "supplab/errors.hpp"

namespace supplab {

void AnswerRecord::note(SampleId handle, std::uint32_t index, int answer) {
  auto [it, inserted] = rows_[handle].emplace(index, answer);
  if (!inserted && it->second != answer) {
    throw std::logic_error("answer record: contradictory answer noted");
  }
}

std::optional<int> AnswerRecord::lookup(SampleId handle,
                                        std::uint32_t index) const {
  auto row = rows_.find(handle);
  if (row == rows_.end()) return std::nullopt;
  auto cell = row->second.find(index);
  if (cell == row->second.end()) return std::nullopt;
  return cell->second;
}

std::optional<std::uint32_t> AnswerRecord::separating_index(SampleId a,
                                                            SampleId b) const {
  auto ra = rows_.find(a);
  auto rb = rows_.find(b);
  if (ra == rows_.end() || rb == rows_.end()) return std::nullopt;
  auto ia = ra->second.begin();
  auto ib = rb->second.begin();
  while (ia != ra->second.end() && ib != rb->second.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      if (ia->second != ib->second) return ia->first;
      ++ia;
      ++ib;
    }
  }
  return std::nullopt;
}

const std::map<std::uint32_t, int>& AnswerRecord::row(SampleId handle) const {
  static const std::map<std::uint32_t, int> empty;
  auto it = rows_.find(handle);
  return it == rows_.end() ? empty : it->second;
}

IncrementalDecisionTree::IncrementalDecisionTree(SampleId first) {
  Node root;
  root.leaf = true;
  root.element = first;
  nodes_.push_back(root);
}

std::size_t IncrementalDecisionTree::depth_below(int node) const {
  const Node& n = nodes_[std::size_t(node)];
  if (n.leaf) return 0;
  std::size_t zero = depth_below(n.zero_child);
  std::size_t one = depth_below(n.one_child);
  return 1 + (zero > one ? zero : one);
}

std::size_t IncrementalDecisionTree::height() const { return depth_below(0); }

std::vector<SampleId> IncrementalDecisionTree::elements() const {
  std::vector<SampleId> out;
  out.reserve(leaves_);
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    const Node& n = nodes_[std::size_t(id)];
    if (n.leaf) {
      out.push_back(n.element);
    } else {
      // Right pushed first so the left child pops first.
      stack.push_back(n.one_child);
      stack.push_back(n.zero_child);
    }
  }
  return out;
}

SampleId IncrementalDecisionTree::locate(OracleSession& session,
                                         AnswerRecord& record,
                                         SampleId handle) const {
  int id = 0;
  while (!nodes_[std::size_t(id)].leaf) {
    const Node& n = nodes_[std::size_t(id)];
    int answer = session.query(handle, n.index);
    record.note(handle, n.index, answer);
    id = answer == 0 ? n.zero_child : n.one_child;
  }
  return nodes_[std::size_t(id)].element;
}

int IncrementalDecisionTree::route_recorded(const AnswerRecord& record,
                                            SampleId handle) const {
  int id = 0;
  while (!nodes_[std::size_t(id)].leaf) {
    const Node& n = nodes_[std::size_t(id)];
    auto answer = record.lookup(handle, n.index);
    if (!answer) {
      throw std::logic_error("decision tree: unrecorded answer on routing path");
    }
    id = *answer == 0 ? n.zero_child : n.one_child;
  }
  return id;
}

SampleId IncrementalDecisionTree::locate_recorded(const AnswerRecord& record,
                                                  SampleId handle) const {
  return nodes_[std::size_t(route_recorded(record, handle))].element;
}

void IncrementalDecisionTree::insert(const AnswerRecord& record,
                                     SampleId fresh, SampleId colliding,
                                     std::uint32_t index) {
  auto fresh_answer = record.lookup(fresh, index);
  auto colliding_answer = record.lookup(colliding, index);
  if (!fresh_answer || !colliding_answer) {
    throw std::logic_error("decision tree: separating answers not recorded");
  }
  if (*fresh_answer == *colliding_answer) {
    throw std::logic_error("decision tree: separating index does not separate");
  }
  for (const Node& n : nodes_) {
    if (n.leaf && n.element == fresh) {
      throw std::logic_error("decision tree: element already present");
    }
  }
  int id = route_recorded(record, fresh);
  Node& leaf = nodes_[std::size_t(id)];
  if (leaf.element != colliding) {
    throw std::logic_error("decision tree: fresh element routes elsewhere");
  }

  Node zero;
  zero.leaf = true;
  zero.element = *fresh_answer == 0 ? fresh : colliding;
  Node one;
  one.leaf = true;
  one.element = *fresh_answer == 0 ? colliding : fresh;
  int zero_id = int(nodes_.size());
  nodes_.push_back(zero);
  int one_id = int(nodes_.size());
  nodes_.push_back(one);

  Node& split = nodes_[std::size_t(id)];
  split.leaf = false;
  split.element = 0;
  split.index = index;
  split.zero_child = zero_id;
  split.one_child = one_id;
  ++leaves_;
}

IncrementalDecisionTree construct_tree(OracleSession& session,
                                       AnswerRecord& record,
                                       const std::vector<SampleId>& elements) {
  if (elements.empty()) {
    throw ParameterRange("construct_tree: no elements");
  }
  IncrementalDecisionTree tree(elements.front());
  for (std::size_t pos = 1; pos < elements.size(); ++pos) {
    SampleId fresh = elements[pos];
    SampleId colliding = tree.locate(session, record, fresh);
    auto index = record.separating_index(fresh, colliding);
    if (!index) {
      throw std::logic_error(
          "construct_tree: no recorded separating index for a collision");
    }
    tree.insert(record, fresh, colliding, *index);
  }
  return tree;
}

}  // namespace supplab
