#include "supplab/dense_graph.hpp"

#include <algorithm>
#include <stdexcept>

#include "supplab/errors.hpp"

namespace supplab {

DenseGraph::DenseGraph(std::size_t vertex_count)
    : count_(vertex_count),
      words_((vertex_count + 63) / 64),
      bits_(count_ * words_, 0),
      degree_(count_, 0) {}

void DenseGraph::add_edge(std::size_t a, std::size_t b) {
  if (a >= count_ || b >= count_) {
    throw ParameterRange("dense graph: vertex out of range");
  }
  if (a == b) {
    throw ParameterRange("dense graph: self loop");
  }
  std::uint64_t& wa = bits_[a * words_ + b / 64];
  if ((wa >> (b % 64)) & 1u) return;
  wa |= std::uint64_t{1} << (b % 64);
  bits_[b * words_ + a / 64] |= std::uint64_t{1} << (a % 64);
  ++degree_[a];
  ++degree_[b];
}

bool DenseGraph::adjacent(std::size_t a, std::size_t b) const {
  if (a >= count_ || b >= count_) {
    throw ParameterRange("dense graph: vertex out of range");
  }
  return (bits_[a * words_ + b / 64] >> (b % 64)) & 1u;
}

std::size_t DenseGraph::degree(std::size_t v) const {
  if (v >= count_) {
    throw ParameterRange("dense graph: vertex out of range");
  }
  return degree_[v];
}

namespace {

// Branch and bound clique search in the style of Tomita's MCQ: candidates are
// greedily coloured, colour counts bound the reachable clique size, and the
// search stops as soon as the target size is met.
class CliqueSearch {
 public:
  CliqueSearch(const DenseGraph& graph, std::size_t target)
      : graph_(graph), target_(target) {}

  std::optional<std::vector<std::size_t>> run(std::vector<std::size_t> seed,
                                              std::vector<std::size_t> cand) {
    current_ = std::move(seed);
    expand(cand);
    if (!found_) return std::nullopt;
    std::sort(best_.begin(), best_.end());
    return best_;
  }

 private:
  void expand(std::vector<std::size_t>& cand) {
    if (found_) return;
    if (current_.size() >= target_) {
      best_ = current_;
      found_ = true;
      return;
    }
    if (current_.size() + cand.size() < target_) return;

    // Greedy colour classes over the candidates; vertices are emitted class by
    // class so the class number bounds the clique extension from that point.
    std::vector<std::size_t> ordered;
    std::vector<std::size_t> bound;
    ordered.reserve(cand.size());
    bound.reserve(cand.size());
    std::vector<std::size_t> rest = cand;
    std::size_t color = 0;
    while (!rest.empty()) {
      ++color;
      std::vector<std::size_t> next_rest;
      std::vector<std::size_t> cls;
      for (std::size_t v : rest) {
        bool clashes = false;
        for (std::size_t u : cls) {
          if (graph_.adjacent(u, v)) {
            clashes = true;
            break;
          }
        }
        if (clashes) {
          next_rest.push_back(v);
        } else {
          cls.push_back(v);
        }
      }
      for (std::size_t v : cls) {
        ordered.push_back(v);
        bound.push_back(color);
      }
      rest = std::move(next_rest);
    }

    for (std::size_t pos = ordered.size(); pos-- > 0;) {
      if (current_.size() + bound[pos] < target_) return;
      std::size_t v = ordered[pos];
      current_.push_back(v);
      std::vector<std::size_t> next;
      for (std::size_t q = 0; q < pos; ++q) {
        if (graph_.adjacent(ordered[q], v)) next.push_back(ordered[q]);
      }
      expand(next);
      if (found_) return;
      current_.pop_back();
    }
  }

  const DenseGraph& graph_;
  std::size_t target_;
  std::vector<std::size_t> current_;
  std::vector<std::size_t> best_;
  bool found_ = false;
};

}  // namespace

std::optional<std::vector<std::size_t>> exact_clique(const DenseGraph& graph,
                                                     std::size_t size) {
  if (size == 0) return std::vector<std::size_t>{};
  if (size > graph.vertex_count()) return std::nullopt;
  std::vector<std::size_t> cand(graph.vertex_count());
  for (std::size_t v = 0; v < cand.size(); ++v) cand[v] = v;
  CliqueSearch search(graph, size);
  return search.run({}, std::move(cand));
}

std::optional<std::vector<std::size_t>> exact_clique_containing(
    const DenseGraph& graph, std::size_t size, std::size_t anchor) {
  if (anchor >= graph.vertex_count()) {
    throw ParameterRange("dense graph: anchor out of range");
  }
  if (size == 0) return std::vector<std::size_t>{};
  std::vector<std::size_t> cand;
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    if (v != anchor && graph.adjacent(anchor, v)) cand.push_back(v);
  }
  CliqueSearch search(graph, size);
  return search.run({anchor}, std::move(cand));
}

std::optional<std::vector<int>> exact_color(const DenseGraph& graph,
                                            int colors) {
  if (colors < 0) throw ParameterRange("exact_color: negative colour count");
  std::size_t v_count = graph.vertex_count();
  if (v_count == 0) return std::vector<int>{};
  if (colors == 0) return std::nullopt;

  std::vector<std::size_t> order(v_count);
  for (std::size_t v = 0; v < v_count; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (graph.degree(a) != graph.degree(b)) {
      return graph.degree(a) > graph.degree(b);
    }
    return a < b;
  });

  std::vector<int> color(v_count, -1);
  // Recursive assignment with symmetry breaking: a vertex may open at most one
  // colour beyond those already in use.
  struct Rec {
    const DenseGraph& graph;
    const std::vector<std::size_t>& order;
    std::vector<int>& color;
    int limit;

    bool assign(std::size_t pos, int used) {
      if (pos == order.size()) return true;
      std::size_t v = order[pos];
      int top = std::min(limit, used + 1);
      for (int c = 0; c < top; ++c) {
        bool ok = true;
        for (std::size_t q = 0; q < pos; ++q) {
          std::size_t u = order[q];
          if (color[u] == c && graph.adjacent(u, v)) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        color[v] = c;
        if (assign(pos + 1, std::max(used, c + 1))) return true;
        color[v] = -1;
      }
      return false;
    }
  };

  Rec rec{graph, order, color, colors};
  if (!rec.assign(0, 0)) return std::nullopt;
  return color;
}

}  // namespace supplab
