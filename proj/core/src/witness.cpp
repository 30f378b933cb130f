#include "supplab/witness.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "supplab/dense_graph.hpp"
#include "supplab/errors.hpp"
#include "supplab/rational.hpp"

namespace supplab {

namespace {

// Interchangeability classes: samples with identical (index, answer) lists
// are never adjacent and have identical neighbourhoods, so clique search and
// colouring may work on one representative per class. Class adjacency is read
// off the per-index groups instead of pairwise list walks.
struct ClassView {
  std::vector<SampleId> reps;
  std::map<SampleId, std::size_t> cls;
  DenseGraph graph{0};
};

ClassView collapse_classes(const ContradictionGraph& g) {
  ClassView view;
  std::map<std::vector<std::pair<std::uint32_t, int>>, std::size_t> seen;
  for (SampleId v : g.vertices()) {
    const auto& list = g.answers_of(v);
    auto [it, inserted] = seen.emplace(list, view.reps.size());
    if (inserted) view.reps.push_back(v);
    view.cls.emplace(v, it->second);
  }
  view.graph = DenseGraph(view.reps.size());
  for (const auto& [index, group] : g.groups()) {
    std::set<std::size_t> zero;
    std::set<std::size_t> one;
    for (SampleId v : group.zero_side) zero.insert(view.cls.at(v));
    for (SampleId v : group.one_side) one.insert(view.cls.at(v));
    for (std::size_t a : zero) {
      for (std::size_t b : one) view.graph.add_edge(a, b);
    }
  }
  return view;
}

constexpr std::size_t kColorClassGuard = 40;

}  // namespace

const std::vector<std::pair<std::uint32_t, int>>& ContradictionGraph::answers_of(
    SampleId handle) const {
  auto it = answers_.find(handle);
  if (it == answers_.end()) {
    throw ParameterRange("contradiction graph: unknown sample handle");
  }
  return it->second;
}

std::optional<std::uint32_t> ContradictionGraph::certificate(SampleId a,
                                                             SampleId b) const {
  const auto& la = answers_of(a);
  const auto& lb = answers_of(b);
  std::size_t pa = 0;
  std::size_t pb = 0;
  while (pa < la.size() && pb < lb.size()) {
    if (la[pa].first < lb[pb].first) {
      ++pa;
    } else if (lb[pb].first < la[pa].first) {
      ++pb;
    } else {
      if (la[pa].second != lb[pb].second) return la[pa].first;
      ++pa;
      ++pb;
    }
  }
  return std::nullopt;
}

bool ContradictionGraph::certifies_clique(
    const std::vector<SampleId>& handles) const {
  std::set<SampleId> distinct(handles.begin(), handles.end());
  if (distinct.size() != handles.size()) return false;
  for (SampleId h : handles) {
    if (answers_.find(h) == answers_.end()) return false;
  }
  for (std::size_t i = 0; i < handles.size(); ++i) {
    for (std::size_t j = i + 1; j < handles.size(); ++j) {
      if (!certificate(handles[i], handles[j])) return false;
    }
  }
  return true;
}

std::vector<ContradictionEdge> ContradictionGraph::edges() const {
  std::map<std::pair<SampleId, SampleId>, std::uint32_t> smallest;
  for (const auto& [index, group] : groups_) {
    for (SampleId l : group.zero_side) {
      for (SampleId r : group.one_side) {
        auto key = std::minmax(l, r);
        smallest.emplace(std::pair<SampleId, SampleId>(key.first, key.second),
                         index);
      }
    }
  }
  std::vector<ContradictionEdge> out;
  out.reserve(smallest.size());
  for (const auto& [pair, index] : smallest) {
    out.push_back(ContradictionEdge{pair.first, pair.second, index});
  }
  return out;
}

std::string ContradictionGraph::to_json_string(bool pretty) const {
  nlohmann::json root;
  root["vertices"] = vertices_;
  nlohmann::json edge_list = nlohmann::json::array();
  for (const ContradictionEdge& e : edges()) {
    edge_list.push_back({{"a", e.a}, {"b", e.b}, {"j", e.certificate}});
  }
  root["edges"] = std::move(edge_list);
  nlohmann::json group_list = nlohmann::json::array();
  for (const auto& [index, group] : groups_) {
    group_list.push_back({{"j", index},
                          {"zero_side", group.zero_side},
                          {"one_side", group.one_side}});
  }
  root["groups"] = std::move(group_list);
  return pretty ? root.dump(2) : root.dump();
}

ContradictionGraph build_contradiction_graph(const QueryLog& log) {
  std::map<SampleId, std::map<std::uint32_t, int>> recorded;
  for (const TranscriptEvent& ev : log.events()) {
    if (ev.kind == TranscriptEvent::Kind::Sample) {
      recorded[ev.i];
      continue;
    }
    auto [it, inserted] = recorded[ev.i].emplace(ev.j, ev.answer);
    if (!inserted && it->second != ev.answer) {
      throw ParameterRange(
          "contradiction graph: transcript answers one query inconsistently");
    }
  }

  ContradictionGraph g;
  for (const auto& [handle, list] : recorded) {
    g.vertices_.push_back(handle);
    auto& flat = g.answers_[handle];
    flat.reserve(list.size());
    for (const auto& [index, answer] : list) {
      flat.emplace_back(index, answer);
      IndexGroup& group = g.groups_[index];
      (answer == 0 ? group.zero_side : group.one_side).push_back(handle);
    }
  }
  return g;
}

std::optional<std::map<SampleId, int>> is_m_colorable(
    const ContradictionGraph& graph, int m) {
  if (m < 1) throw ParameterRange("is_m_colorable: m must be at least 1");
  ClassView view = collapse_classes(graph);
  if (view.reps.size() > kColorClassGuard) {
    throw ScaleExceeded(
        "is_m_colorable: more than 40 distinct query classes, exact "
        "backtracking refused");
  }
  auto colors = exact_color(view.graph, m);
  if (!colors) return std::nullopt;

  for (std::size_t a = 0; a < view.reps.size(); ++a) {
    if ((*colors)[a] < 0 || (*colors)[a] >= m) {
      throw std::logic_error("is_m_colorable: colour out of range");
    }
    for (std::size_t b = a + 1; b < view.reps.size(); ++b) {
      if (view.graph.adjacent(a, b) && (*colors)[a] == (*colors)[b]) {
        throw std::logic_error("is_m_colorable: improper colouring");
      }
    }
  }

  std::map<SampleId, int> out;
  for (SampleId v : graph.vertices()) out[v] = (*colors)[view.cls.at(v)];
  return out;
}

std::optional<std::vector<SampleId>> find_clique(const ContradictionGraph& graph,
                                                 std::size_t size) {
  if (size < 1) throw ParameterRange("find_clique: size must be at least 1");
  ClassView view = collapse_classes(graph);
  auto hit = exact_clique(view.graph, size);
  if (!hit) return std::nullopt;
  std::vector<SampleId> out;
  out.reserve(hit->size());
  for (std::size_t c : *hit) out.push_back(view.reps[c]);
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t edge_cover_capacity(const ContradictionGraph& graph) {
  std::uint64_t total = 0;
  for (const auto& [index, group] : graph.groups()) {
    total += group.zero_side.size() + group.one_side.size();
  }
  return total;
}

HanselCheck check_hansel_bound(const ContradictionGraph& graph, int m) {
  if (m < 1) throw ParameterRange("check_hansel_bound: m must be at least 1");
  HanselCheck out;
  out.capacity = edge_cover_capacity(graph);
  out.bound = (m + 1) * std::log2(double(m + 1));

  // An (m+1)-clique certifies non-colorability without running the guarded
  // colouring, which keeps the check usable on transcripts of any size.
  if (find_clique(graph, std::size_t(m) + 1)) {
    out.colorable = false;
  } else {
    out.colorable = is_m_colorable(graph, m).has_value();
  }

  if (out.colorable) {
    out.holds = true;
    return out;
  }
  // capacity >= (m+1) log2(m+1)  iff  2^capacity >= (m+1)^(m+1).
  if (out.capacity >= 64 * (std::uint64_t(m) + 1)) {
    out.holds = true;
  } else {
    BigInt lhs = BigInt(1) << unsigned(out.capacity);
    BigInt rhs = boost::multiprecision::pow(BigInt(m + 1), unsigned(m + 1));
    out.holds = lhs >= rhs;
  }
  return out;
}

}  // namespace supplab
