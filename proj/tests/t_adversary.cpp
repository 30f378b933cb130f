#include <doctest.h>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "supplab/adversary.hpp"
#include "supplab/bitstring.hpp"
#include "supplab/distances.hpp"
#include "supplab/distribution.hpp"
#include "supplab/errors.hpp"

using namespace supplab;

namespace {
BitString bs(const char* text) { return BitString::from_string(text); }
}

TEST_CASE("planted family with one subset has at most two atoms") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto inst = gen_dno(1, Rat(1, 64), 256, seed);
        REQUIRE(inst.alpha.has_value());
        const Rat& alpha = *inst.alpha;
        const auto& atoms = inst.distribution.atoms();
        CHECK(atoms.size() <= 2);
        REQUIRE(inst.claim.has_value());
        CHECK(inst.claim->m == 1);
        CHECK(inst.claim->epsilon == Rat(1, 64));
        if (atoms.size() == 2) {
            Rat rest = Rat(2) * Rat(1, 64) / alpha;
            bool seen_zero = false;
            for (const auto& [value, weight] : atoms) {
                if (value.count_ones() == 0) {
                    seen_zero = true;
                    CHECK(weight == Rat(1) - rest);
                } else {
                    CHECK(weight == rest);
                }
            }
            CHECK(seen_zero);
        }
    }
}

TEST_CASE("planted family atoms rebuild from the drawn subsets") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::uint64_t t = 4;
        Rat eps(1, 64);
        std::uint32_t n = 512;
        auto inst = gen_dno(t, eps, n, seed);
        REQUIRE(inst.alpha.has_value());
        const Rat& alpha = *inst.alpha;
        // Alpha is dyadic with log2(1/alpha) between 2 and log2(1/eps) - 2.
        CHECK(alpha.numerator() == 1);
        int levels = floor_log2_inverse(alpha);
        CHECK(Rat(1, BigInt(1) << levels) == alpha);
        CHECK(levels >= 2);
        CHECK(levels <= 4);

        REQUIRE(inst.indicator_sets.size() == t);
        std::map<std::string, Rat> expected;
        expected[BitString(n).to_string()] += Rat(1) - Rat(2) * eps / alpha;
        for (const auto& set : inst.indicator_sets) {
            for (auto j : set) {
                bool in_pool = false;
                for (auto pool_j : inst.coordinate_pool) in_pool |= (pool_j == j);
                CHECK(in_pool);
            }
            expected[BitString::from_indicator(set, n).to_string()] +=
                Rat(2) * eps / (alpha * Rat(BigInt(t)));
        }
        std::map<std::string, Rat> actual;
        for (const auto& [value, weight] : inst.distribution.atoms())
            actual[value.to_string()] = weight;
        // Merged-collision view must match the distribution exactly.
        for (auto it = expected.begin(); it != expected.end();) {
            if (it->second == Rat(0)) it = expected.erase(it); else ++it;
        }
        CHECK(actual == expected);
        CHECK(inst.claim->m == (t + 1) / 2);
    }
}

TEST_CASE("planted family instances are usually verified far") {
    int verified = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto inst = gen_dno(4, Rat(1, 64), 2048, seed);
        REQUIRE(inst.verified_distance.has_value());
        if (inst.far_claim_verified()) ++verified;
    }
    CHECK(verified >= 90);
}

TEST_CASE("planted family rejects an epsilon too large for the alpha range") {
    CHECK_THROWS_AS(gen_dno(2, Rat(1, 8), 128, 0), ParameterRange);
}

TEST_CASE("anchored family splits weight as promised") {
    int verified = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto inst = gen_anchor(2, Rat(1, 40), 64, seed);
        const auto& atoms = inst.distribution.atoms();
        Rat zero_weight(0);
        int heavy = 0;
        for (const auto& [value, weight] : atoms) {
            if (value.count_ones() == 0) zero_weight = weight;
            if (weight == Rat(1, 16)) ++heavy; // 5 eps / m
        }
        CHECK(zero_weight >= Rat(3, 4));
        if (atoms.size() == 5) {
            CHECK(zero_weight == Rat(3, 4));
            CHECK(heavy == 4);
        }
        REQUIRE(inst.claim.has_value());
        CHECK(inst.claim->m == 2);
        if (inst.far_claim_verified()) ++verified;
    }
    CHECK(verified >= 95);
}

TEST_CASE("reference ensemble passes and perturbed contracts fail") {
    std::vector<BitString> side0 = {bs("0000"), bs("1111")};
    std::vector<BitString> side1 = {bs("0011"), bs("1100")};
    CHECK(verify_secret_ensemble(side0, side1, Rat(49, 100), Rat(1, 4)));
    // Distances are exactly 1/2, so a delta above it fails.
    CHECK_FALSE(verify_secret_ensemble(side0, side1, Rat(51, 100), Rat(1, 4)));
    // Width-2 restrictions distinguish the sides.
    CHECK_FALSE(verify_secret_ensemble(side0, side1, Rat(49, 100), Rat(1, 2)));
    // Duplicate members within a side break the contract.
    std::vector<BitString> dup = {bs("0000"), bs("0000")};
    CHECK_FALSE(verify_secret_ensemble(dup, side1, Rat(49, 100), Rat(1, 4)));
}

TEST_CASE("generated ensembles verify under their own parameters") {
    struct Config { std::uint32_t n; std::uint64_t per_side; Rat delta; Rat zeta; };
    std::vector<Config> configs = {
        {12, 2, Rat(1, 30), Rat(1, 12)},
        {16, 2, Rat(49, 100), Rat(1, 12)},
        {8, 16, Rat(1, 30), Rat(1, 4)},
    };
    for (const auto& config : configs) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            auto ensemble = gen_secret_ensemble(config.n, config.per_side,
                                                config.delta, config.zeta, seed);
            CHECK(ensemble.side0.size() == config.per_side);
            CHECK(ensemble.side1.size() == config.per_side);
            for (const auto& s : ensemble.side0) CHECK(s.size() == config.n);
            CHECK(verify_secret_ensemble(ensemble.side0, ensemble.side1,
                                         config.delta, config.zeta));
        }
    }
}

TEST_CASE("impossible ensemble widths exhaust the search") {
    // Two strings per side force a one-dimensional code, whose generator
    // matrix cannot have two independent columns.
    CHECK_THROWS_AS(gen_secret_ensemble(4, 2, Rat(1, 30), Rat(1, 2), 0),
                    ConstructionFailed);
}

TEST_CASE("weighted ensemble instance carries the promised masses") {
    auto ensemble = gen_secret_ensemble(16, 2, Rat(49, 100), Rat(1, 12), 1);
    Rat eps(1, 16), delta(49, 100);
    auto inst = gen_secret_instance(ensemble.side0, ensemble.side1, eps, delta);
    const auto& atoms = inst.distribution.atoms();
    CHECK(atoms.size() == 4);
    Rat side1_mass = Rat(4) * eps / delta;
    Rat light = (Rat(1) - side1_mass) / 2;
    Rat heavy = side1_mass / 2;
    auto weight_of = [&](const BitString& s) {
        for (const auto& [value, weight] : atoms)
            if (value.to_string() == s.to_string()) return weight;
        return Rat(-1);
    };
    for (const auto& s : ensemble.side0) CHECK(weight_of(s) == light);
    for (const auto& s : ensemble.side1) CHECK(weight_of(s) == heavy);
    REQUIRE(inst.claim.has_value());
    CHECK(inst.claim->m == 3); // per side 2m/3 = 2
    CHECK(inst.claim->epsilon == eps);
    CHECK(inst.delta == delta);
    CHECK(inst.far_claim_verified());

    CHECK_THROWS_AS(gen_secret_instance(ensemble.side0, ensemble.side1,
                                        Rat(1, 4), delta), ParameterRange);
    std::vector<BitString> odd0 = {bs("0000")}, odd1 = {bs("1111")};
    CHECK_THROWS_AS(gen_secret_instance(odd0, odd1, Rat(1, 100), Rat(1, 2)),
                    ParameterRange);
}

TEST_CASE("lifting repeats the strings and never shrinks the distance") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto inst = gen_anchor(2, Rat(1, 40), 16, seed);
        REQUIRE(inst.verified_distance.has_value());
        auto lifted = lift_instance(inst, 3);
        CHECK(lifted.distribution.n() == 48);
        CHECK(lifted.lift_factor == 3);
        CHECK(lifted.claim->m == inst.claim->m);
        CHECK(lifted.claim->epsilon == inst.claim->epsilon);
        CHECK(lifted.distribution.atoms().size() == inst.distribution.atoms().size());
        REQUIRE(lifted.verified_distance.has_value());
        CHECK(*lifted.verified_distance >= *inst.verified_distance);
        // The repeated strings in the lift restrict back to the originals.
        for (std::size_t k = 0; k < inst.distribution.atoms().size(); ++k) {
            const auto& [value, weight] = inst.distribution.atoms()[k];
            const auto& [lvalue, lweight] = lifted.distribution.atoms()[k];
            CHECK(lweight == weight);
            CHECK(lvalue.to_string().substr(0, 16) == value.to_string());
        }
    }
}

TEST_CASE("metadata names the family and the claim") {
    auto inst = gen_anchor(2, Rat(1, 40), 32, 0);
    auto text = inst.metadata_json();
    CHECK(text.find("\"family\"") != std::string::npos);
    CHECK(text.find("anchor") != std::string::npos);
    CHECK(text.find("\"claimed_far_from_m\"") != std::string::npos);
    CHECK(text.find("1/40") != std::string::npos);

    GroundTruthInstance bare(DistributionSpec::point_mass(bs("0")), "adhoc");
    CHECK_FALSE(bare.far_claim_verified());
    CHECK(bare.metadata_json().find("adhoc") != std::string::npos);
}
