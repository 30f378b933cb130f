#include "supplab/distances.hpp"
#include "supplab/errors.hpp"

#include <map>

namespace supplab {

Rat hamming_distance(const BitString& u, const BitString& v) {
    if (u.size() != v.size()) throw ParameterRange("hamming_distance: length mismatch");
    return Rat(BigInt(u.hamming(v)), BigInt(u.size()));
}

Rat distance_to_set(const BitString& x, const std::vector<BitString>& set) {
    if (set.empty()) throw ParameterRange("distance_to_set: empty set");
    std::uint32_t best = x.size() + 1;
    for (const auto& v : set) {
        if (v.size() != x.size()) throw ParameterRange("distance_to_set: length mismatch");
        best = std::min(best, x.hamming(v));
    }
    return Rat(BigInt(best), BigInt(x.size()));
}

Rat variation_distance(const DistributionSpec& p, const DistributionSpec& q) {
    if (p.n() != q.n()) throw ParameterRange("variation_distance: dimension mismatch");
    std::map<BitString, Rat> delta;
    for (const auto& a : p.atoms()) delta[a.bits] += a.weight;
    for (const auto& a : q.atoms()) delta[a.bits] -= a.weight;
    Rat total(0);
    for (const auto& [bits, diff] : delta) total += diff < Rat(0) ? -diff : diff;
    return total / Rat(2);
}

Rat TransferPlan::cost() const {
    Rat total(0);
    for (const auto& mv : moves) total += mv.mass * hamming_distance(mv.source, mv.target);
    return total;
}

bool validate_plan(const TransferPlan& plan, const DistributionSpec& p, const DistributionSpec& q,
                   const Rat& tolerance) {
    std::map<BitString, Rat> rows, cols;
    for (const auto& mv : plan.moves) {
        if (mv.mass < Rat(0)) return false;
        rows[mv.source] += mv.mass;
        cols[mv.target] += mv.mass;
    }
    auto close = [&tolerance](const Rat& a, const Rat& b) {
        Rat diff = a - b;
        if (diff < Rat(0)) diff = -diff;
        return diff <= tolerance;
    };
    for (const auto& a : p.atoms())
        if (!close(rows[a.bits], a.weight)) return false;
    for (const auto& [bits, sum] : rows)
        if (!close(sum, p.weight_of(bits))) return false;
    for (const auto& a : q.atoms())
        if (!close(cols[a.bits], a.weight)) return false;
    for (const auto& [bits, sum] : cols)
        if (!close(sum, q.weight_of(bits))) return false;
    return true;
}

} // namespace supplab
