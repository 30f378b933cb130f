#include "supplab/distances.hpp"
#include "supplab/errors.hpp"

#include <limits>
#include <vector>

namespace supplab {

namespace {

// Min-cost flow with exact big-integer capacities. The graph is tiny (two
// atom layers plus source/sink), so Bellman-Ford shortest paths are fine.
class ExactFlow {
public:
    struct Arc {
        int to;
        BigInt cap;
        long long cost;
        int rev;
    };

    explicit ExactFlow(int nodes) : graph_(nodes) {}

    void add_arc(int from, int to, BigInt cap, long long cost) {
        graph_[from].push_back({to, std::move(cap), cost, static_cast<int>(graph_[to].size())});
        graph_[to].push_back({from, BigInt(0), -cost, static_cast<int>(graph_[from].size()) - 1});
    }

    // Pushes max flow from source to sink at min cost. Returns total pushed.
    BigInt run(int source, int sink) {
        const long long kInf = std::numeric_limits<long long>::max() / 4;
        const std::size_t arc_budget = 4 * total_arcs() + 64;
        BigInt pushed(0);
        std::size_t rounds = 0;
        for (;;) {
            if (++rounds > arc_budget) throw std::logic_error("ExactFlow: augmentation budget exceeded");
            int n = static_cast<int>(graph_.size());
            std::vector<long long> dist(n, kInf);
            std::vector<int> par_node(n, -1), par_arc(n, -1);
            dist[source] = 0;
            for (int round = 0; round < n; ++round) {
                bool changed = false;
                for (int u = 0; u < n; ++u) {
                    if (dist[u] == kInf) continue;
                    for (int e = 0; e < static_cast<int>(graph_[u].size()); ++e) {
                        const Arc& a = graph_[u][e];
                        if (a.cap > 0 && dist[u] + a.cost < dist[a.to]) {
                            dist[a.to] = dist[u] + a.cost;
                            par_node[a.to] = u;
                            par_arc[a.to] = e;
                            changed = true;
                        }
                    }
                }
                if (!changed) break;
            }
            if (dist[sink] == kInf) return pushed;
            BigInt bottleneck(0);
            bool first = true;
            for (int v = sink; v != source; v = par_node[v]) {
                const Arc& a = graph_[par_node[v]][par_arc[v]];
                if (first || a.cap < bottleneck) bottleneck = a.cap;
                first = false;
            }
            for (int v = sink; v != source; v = par_node[v]) {
                Arc& a = graph_[par_node[v]][par_arc[v]];
                a.cap -= bottleneck;
                graph_[a.to][a.rev].cap += bottleneck;
            }
            pushed += bottleneck;
        }
    }

    const std::vector<std::vector<Arc>>& graph() const { return graph_; }

private:
    std::size_t total_arcs() const {
        std::size_t c = 0;
        for (const auto& v : graph_) c += v.size();
        return c;
    }
    std::vector<std::vector<Arc>> graph_;
};

BigInt common_denominator(const DistributionSpec& p, const DistributionSpec& q) {
    BigInt l(1);
    for (const auto& a : p.atoms()) l = boost::multiprecision::lcm(l, a.weight.denominator());
    for (const auto& a : q.atoms()) l = boost::multiprecision::lcm(l, a.weight.denominator());
    return l;
}

} // namespace

EmdResult emd(const DistributionSpec& p, const DistributionSpec& q) {
    if (p.n() != q.n()) throw ParameterRange("emd: dimension mismatch");
    const auto& pa = p.atoms();
    const auto& qa = q.atoms();
    const int r = static_cast<int>(pa.size());
    const int s = static_cast<int>(qa.size());
    const BigInt scale = common_denominator(p, q);

    // Node layout: 0 = source, 1..r = P atoms, r+1..r+s = Q atoms, r+s+1 = sink.
    ExactFlow flow(r + s + 2);
    const int sink = r + s + 1;
    for (int i = 0; i < r; ++i) {
        BigInt supply = pa[i].weight.numerator() * (scale / pa[i].weight.denominator());
        flow.add_arc(0, 1 + i, std::move(supply), 0);
    }
    for (int j = 0; j < s; ++j) {
        BigInt demand = qa[j].weight.numerator() * (scale / qa[j].weight.denominator());
        flow.add_arc(1 + r + j, sink, std::move(demand), 0);
    }
    // Cross arcs; remember where each lives for flow readback.
    std::vector<std::vector<int>> cross(r, std::vector<int>(s));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < s; ++j) {
            cross[i][j] = static_cast<int>(flow.graph()[1 + i].size());
            flow.add_arc(1 + i, 1 + r + j, scale, pa[i].bits.hamming(qa[j].bits));
        }

    BigInt pushed = flow.run(0, sink);
    if (pushed != scale) throw std::logic_error("emd: transportation problem infeasible");

    TransferPlan plan;
    BigInt raw_cost(0);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < s; ++j) {
            // Flow pushed over a cross arc sits in its reverse arc's capacity.
            const auto& arc = flow.graph()[1 + i][cross[i][j]];
            BigInt moved = flow.graph()[arc.to][arc.rev].cap;
            if (moved > 0) {
                raw_cost += moved * arc.cost;
                plan.moves.push_back({pa[i].bits, qa[j].bits, Rat(moved, scale)});
            }
        }
    Rat value(raw_cost, scale * BigInt(p.n()));
    return {value, std::move(plan)};
}

} // namespace supplab
