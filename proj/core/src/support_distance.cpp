#include "supplab/distances.hpp"
#include "supplab/errors.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>
#include <vector>

namespace supplab {

namespace {

struct ColumnPattern {
    std::uint32_t atoms_with_one; // bit i set => atom i has a 1 in these coordinates
    std::uint32_t count;          // how many coordinates share the pattern
};

} // namespace

SupportDistanceResult distance_to_support_m(const DistributionSpec& p, int m) {
    if (m < 1) throw ParameterRange("distance_to_support_m: m must be at least 1");
    const auto& atoms = p.atoms();
    const int s = static_cast<int>(atoms.size());
    if (s > 12) throw ScaleExceeded("distance_to_support_m: oracle scale exceeded (more than 12 atoms)");
    const std::uint32_t n = p.n();

    SupportDistanceResult result;
    if (s <= m) {
        result.value = Rat(0);
        result.assignment.resize(s);
        for (int i = 0; i < s; ++i) {
            result.centers.push_back(atoms[i].bits);
            result.assignment[i] = i;
        }
        return result;
    }

    // Integer weights after clearing denominators.
    BigInt scale(1);
    for (const auto& a : atoms) scale = boost::multiprecision::lcm(scale, a.weight.denominator());
    std::vector<BigInt> w(s);
    for (int i = 0; i < s; ++i)
        w[i] = atoms[i].weight.numerator() * (scale / atoms[i].weight.denominator());

    const std::uint32_t full = (1u << s) - 1;

    // Coordinates collapse to their atom-column pattern; identical columns
    // contribute identically to every cluster cost.
    std::unordered_map<std::uint32_t, std::uint32_t> pattern_index;
    std::vector<ColumnPattern> patterns;
    std::vector<std::uint32_t> coord_pattern(n);
    for (std::uint32_t j = 0; j < n; ++j) {
        std::uint32_t pat = 0;
        for (int i = 0; i < s; ++i)
            if (atoms[i].bits.bit(j)) pat |= 1u << i;
        auto [it, inserted] = pattern_index.emplace(pat, patterns.size());
        if (inserted)
            patterns.push_back({pat, 1});
        else
            ++patterns[it->second].count;
        coord_pattern[j] = it->second;
    }

    // subset_weight[S] = total integer weight of atoms in S.
    std::vector<BigInt> subset_weight(full + 1);
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        std::uint32_t low = mask & (~mask + 1);
        int i = std::countr_zero(low);
        subset_weight[mask] = subset_weight[mask ^ low] + w[i];
    }

    // cluster_cost[S]: weighted unnormalized distance of S's atoms to S's
    // majority center (bit ties resolve toward 0).
    std::vector<BigInt> cluster_cost(full + 1);
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        const BigInt& total = subset_weight[mask];
        BigInt cost(0);
        for (const auto& pat : patterns) {
            const BigInt& ones = subset_weight[pat.atoms_with_one & mask];
            if (2 * ones > total)
                cost += BigInt(pat.count) * (total - ones);
            else
                cost += BigInt(pat.count) * ones;
        }
        cluster_cost[mask] = std::move(cost);
    }

    // dp over partitions into at most m blocks; low bit anchors each block.
    std::vector<BigInt> prev = cluster_cost;
    std::vector<std::vector<std::uint16_t>> choice(m + 1);
    for (int blocks = 2; blocks <= m; ++blocks) {
        std::vector<BigInt> cur(full + 1);
        choice[blocks].assign(full + 1, 0);
        for (std::uint32_t mask = 1; mask <= full; ++mask) {
            std::uint32_t low = mask & (~mask + 1);
            std::uint32_t rest = mask ^ low;
            BigInt best = cluster_cost[mask];
            std::uint16_t best_t = static_cast<std::uint16_t>(mask);
            for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
                std::uint32_t t = sub | low;
                if (t != mask) {
                    BigInt cand = cluster_cost[t] + prev[mask ^ t];
                    if (cand < best) {
                        best = std::move(cand);
                        best_t = static_cast<std::uint16_t>(t);
                    }
                }
                if (sub == 0) break;
            }
            cur[mask] = std::move(best);
            choice[blocks][mask] = best_t;
        }
        prev = std::move(cur);
    }

    // Reconstruct the chosen blocks.
    std::vector<std::uint32_t> blocks_chosen;
    std::uint32_t mask = full;
    for (int blocks = m; blocks >= 1 && mask; --blocks) {
        std::uint32_t t = blocks == 1 ? mask : choice[blocks][mask];
        blocks_chosen.push_back(t);
        mask ^= t;
    }

    result.value = Rat(prev[full], scale * BigInt(n));
    result.assignment.assign(s, -1);
    for (const auto& block : blocks_chosen) {
        BitString center(n);
        const BigInt& total = subset_weight[block];
        for (std::uint32_t j = 0; j < n; ++j) {
            const BigInt& ones = subset_weight[patterns[coord_pattern[j]].atoms_with_one & block];
            if (2 * ones > total) center.set_bit(j, 1);
        }
        int cluster = static_cast<int>(result.centers.size());
        result.centers.push_back(std::move(center));
        for (int i = 0; i < s; ++i)
            if (block & (1u << i)) result.assignment[i] = cluster;
    }
    return result;
}

} // namespace supplab
