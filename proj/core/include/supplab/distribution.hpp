#pragma once

#include "supplab/bitstring.hpp"
#include "supplab/rational.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace supplab {

/// How weights entered the object. Exact weights validate with equality;
/// weights that arrived through doubles validate with a 1e-12 absolute
/// tolerance. Either way the stored values are rationals, so downstream
/// distance computations stay exact.
enum class WeightMode { Exact, Double };

struct Atom {
    BitString bits;
    Rat weight;
};

/// A distribution over {0,1}^n given by its finite support. Atoms are kept in
/// construction order; that order is the serialization order and fixes the
/// inverse-CDF used for sampling.
class DistributionSpec {
public:
    DistributionSpec(std::uint32_t n, std::vector<Atom> atoms, WeightMode mode = WeightMode::Exact);

    static DistributionSpec point_mass(BitString atom);
    /// Equal weight on the given (distinct) strings.
    static DistributionSpec uniform_on(std::vector<BitString> atoms);

    std::uint32_t n() const { return n_; }
    std::size_t support_size() const { return atoms_.size(); }
    const std::vector<Atom>& atoms() const { return atoms_; }
    WeightMode mode() const { return mode_; }

    /// Weight of a string (zero if absent).
    Rat weight_of(const BitString& s) const;

    bool same_distribution(const DistributionSpec& other) const;

    /// Cumulative weight thresholds scaled to 2^64, for O(log s) sampling.
    const std::vector<std::uint64_t>& cdf_thresholds() const;

    std::string to_json_string(bool pretty = false) const;
    static DistributionSpec from_json_string(std::string_view text);

private:
    std::uint32_t n_;
    std::vector<Atom> atoms_;
    WeightMode mode_;
    mutable std::vector<std::uint64_t> thresholds_;
};

/// Pushforward of a distribution along f: atoms map through f, colliding
/// images merge by summing weights (first-occurrence order). Images must
/// keep the ambient length.
DistributionSpec sample_map(const DistributionSpec& dist,
                            const std::function<BitString(const BitString&)>& f);

/// Concatenates `times` copies of every atom, keeping weights. Pairwise
/// distances are preserved, so distance lower bounds carry to the lift.
DistributionSpec repetition_lift(const DistributionSpec& dist, std::uint32_t times);

} // namespace supplab
