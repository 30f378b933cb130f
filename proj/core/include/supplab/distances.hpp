#pragma once

#include "supplab/bitstring.hpp"
#include "supplab/distribution.hpp"
#include "supplab/rational.hpp"

#include <cstdint>
#include <vector>

namespace supplab {

/// Normalized Hamming distance |{i : u_i != v_i}| / n.
Rat hamming_distance(const BitString& u, const BitString& v);

/// min over A of the normalized Hamming distance; A must be nonempty.
Rat distance_to_set(const BitString& x, const std::vector<BitString>& set);

/// Half L1 distance of the weight functions.
Rat variation_distance(const DistributionSpec& p, const DistributionSpec& q);

/// One entry of a transfer plan: mass moved from a source atom to a target atom.
struct TransferMove {
    BitString source;
    BitString target;
    Rat mass;
};

struct TransferPlan {
    std::vector<TransferMove> moves;
    /// Expected normalized Hamming distance under the plan.
    Rat cost() const;
};

struct EmdResult {
    Rat value;
    TransferPlan plan;
};

/// Exact earth mover's distance with normalized-Hamming cost, solved as an
/// integer min-cost flow on the bipartite support graph after clearing
/// denominators. The returned plan attains the optimum.
EmdResult emd(const DistributionSpec& p, const DistributionSpec& q);

/// Checks the plan's marginals against P and Q (exactly for Exact-mode
/// inputs, within `tolerance` otherwise).
bool validate_plan(const TransferPlan& plan, const DistributionSpec& p, const DistributionSpec& q,
                   const Rat& tolerance);

struct SupportDistanceResult {
    Rat value;
    std::vector<BitString> centers;
    /// assignment[i] = index into centers for atom i (construction order).
    std::vector<int> assignment;
};

/// Exact distance from P to the class of distributions with support size at
/// most m: minimum over all partitions of supp(P) into <= m clusters of the
/// probability-weighted distance to each cluster's majority center (bit ties
/// resolve to 0). Exhaustive over clusters, so the support is guarded at 12
/// atoms ("oracle scale exceeded" beyond that).
SupportDistanceResult distance_to_support_m(const DistributionSpec& p, int m);

} // namespace supplab
