#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "supplab/bitstring.hpp"
#include "supplab/distribution.hpp"
#include "supplab/rational.hpp"

namespace supplab {

/// A generated distribution is claimed to be epsilon-far from every
/// distribution whose support has at most m elements.
struct FarnessClaim {
    std::uint64_t m = 0;
    Rat epsilon;
};

/// A generated distribution together with the ground truth of its draw: family
/// tag, drawn parameters, the farness claim, and (when the support is small
/// enough for the exact oracle) the verified distance.
struct GroundTruthInstance {
    GroundTruthInstance(DistributionSpec dist, std::string family_tag)
        : distribution(std::move(dist)), family(std::move(family_tag)) {}

    DistributionSpec distribution;
    std::string family;
    std::uint32_t lift_factor = 1;

    /// Dyadic density parameter of the planted-coordinate construction.
    std::optional<Rat> alpha;
    /// Drawn coordinate pool (1-based), when the family has one.
    std::vector<std::uint32_t> coordinate_pool;
    /// Per-atom coordinate subsets; atom k is the indicator of entry k.
    std::vector<std::vector<std::uint32_t>> indicator_sets;
    /// Separation parameter of the paired-ensemble construction.
    std::optional<Rat> delta;

    std::optional<FarnessClaim> claim;
    std::optional<Rat> verified_distance;

    /// True when the oracle value is present and strictly exceeds the claimed
    /// epsilon. False when the claim is refuted or nothing was verified.
    bool far_claim_verified() const;

    /// Sidecar document: family, parameters, claim, verified distance.
    std::string metadata_json(bool pretty = true) const;
};

/// Two equal-sized string families that look identical under small coordinate
/// restrictions yet sit far apart.
struct SecretEnsemble {
    std::vector<BitString> side0;
    std::vector<BitString> side1;
};

/// Planted-subset family: draws a dyadic alpha with log2(1/alpha) uniform on
/// {2, ..., floor(log2(1/epsilon)) - 2}, a coordinate pool D with per-index
/// probability 4*alpha, and t subsets A_k of D with conditional probability
/// 1/2 per index. Atoms: the all-zero string with weight 1 - 2*epsilon/alpha
/// and each indicator of A_k with weight 2*epsilon/(alpha*t); colliding atoms
/// merge by summing weights. t = 1 gives the matching in-class construction.
GroundTruthInstance gen_dno(std::uint64_t t, const Rat& epsilon, std::uint32_t n,
                            std::uint64_t seed);

/// Anchored family: the all-zero string with weight 1 - 10*epsilon plus 2m
/// uniform random strings with weight 5*epsilon/m each (collisions merge).
GroundTruthInstance gen_anchor(std::uint64_t m, const Rat& epsilon, std::uint32_t n,
                               std::uint64_t seed);

/// Seeded random search for two cosets of a binary linear code whose small
/// coordinate restrictions agree as multisets while distinct members stay more
/// than delta apart (normalized Hamming). The returned ensemble has passed
/// verify_secret_ensemble; search exhaustion raises ConstructionFailed.
/// target_count_per_side must be a power of two; n is capped at 24 so the
/// restriction check can be exhaustive.
SecretEnsemble gen_secret_ensemble(std::uint32_t n, std::uint64_t target_count_per_side,
                                   const Rat& delta, const Rat& zeta, std::uint64_t seed);

/// Exhaustive check of the ensemble contract: equal side sizes with distinct
/// members per side, every cross-pair equal or more than delta apart, and for
/// every index set I with |I| <= floor(zeta * n) the multisets of restrictions
/// of the two sides to I coincide. Guards on n and side size keep the
/// enumeration bounded; past them it refuses with ScaleExceeded.
bool verify_secret_ensemble(const std::vector<BitString>& side0,
                            const std::vector<BitString>& side1, const Rat& delta,
                            const Rat& zeta);

/// Weighted instance over a verified ensemble: side0 atoms carry
/// (1 - 4*epsilon/delta) split uniformly, side1 atoms carry 4*epsilon/delta
/// split uniformly. With per-side count 2m/3 the support has 4m/3 elements;
/// requires epsilon < delta/4 and an even per-side count.
GroundTruthInstance gen_secret_instance(const std::vector<BitString>& side0,
                                        const std::vector<BitString>& side1,
                                        const Rat& epsilon, const Rat& delta);

/// Replaces the distribution by its `times`-fold repetition (weights and the
/// farness claim unchanged) and re-runs oracle verification at the new length.
GroundTruthInstance lift_instance(const GroundTruthInstance& inst, std::uint32_t times);

/// Fills verified_distance from the exact oracle when a claim is present and
/// the support is within the oracle guard of 12 atoms; otherwise leaves the
/// instance untouched.
void verify_farness(GroundTruthInstance& inst);

}  // namespace supplab
