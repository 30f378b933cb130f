#include "supplab/adversary.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <functional>
#include <map>
#include <numeric>
#include <utility>

#include <json.hpp>

#include "supplab/distances.hpp"
#include "supplab/errors.hpp"
#include "supplab/rng.hpp"

namespace supplab {
namespace {

void check_epsilon(const Rat& epsilon, const char* who) {
    if (!(epsilon > Rat(0)) || !(epsilon < Rat(1)))
        throw ParameterRange(std::string(who) + ": epsilon must lie in (0, 1)");
}

/// Append weight to the atom with these bits, creating it on first sight.
void merge_atom(std::vector<Atom>& atoms, std::map<BitString, std::size_t>& where,
                BitString bits, const Rat& weight) {
    auto [it, fresh] = where.emplace(bits, atoms.size());
    if (fresh)
        atoms.push_back(Atom{std::move(bits), weight});
    else
        atoms[it->second].weight += weight;
}

nlohmann::json rat_or_null(const std::optional<Rat>& r) {
    if (!r) return nullptr;
    return format_rational(*r);
}

}  // namespace

bool GroundTruthInstance::far_claim_verified() const {
    return claim && verified_distance && *verified_distance > claim->epsilon;
}

std::string GroundTruthInstance::metadata_json(bool pretty) const {
    nlohmann::json j;
    j["family"] = family;
    j["n"] = distribution.n();
    j["support"] = distribution.atoms().size();
    j["lift_factor"] = lift_factor;
    if (alpha) {
        j["alpha"] = format_rational(*alpha);
        j["coordinate_pool"] = coordinate_pool;
        j["indicator_sets"] = indicator_sets;
    }
    if (delta) j["delta"] = format_rational(*delta);
    if (claim) {
        j["claimed_far_from_m"] = {{"m", claim->m},
                                   {"epsilon", format_rational(claim->epsilon)}};
    } else {
        j["claimed_far_from_m"] = nullptr;
    }
    j["verified_distance"] = rat_or_null(verified_distance);
    if (claim && verified_distance)
        j["far_claim_verified"] = far_claim_verified();
    else
        j["far_claim_verified"] = nullptr;
    return pretty ? j.dump(2) : j.dump();
}

void verify_farness(GroundTruthInstance& inst) {
    if (!inst.claim) return;
    if (inst.distribution.atoms().size() > 12) return;
    inst.verified_distance =
        distance_to_support_m(inst.distribution, static_cast<int>(inst.claim->m)).value;
}

GroundTruthInstance gen_dno(std::uint64_t t, const Rat& epsilon, std::uint32_t n,
                            std::uint64_t seed) {
    if (t < 1) throw ParameterRange("gen_dno: t must be at least 1");
    if (n < 1) throw ParameterRange("gen_dno: n must be at least 1");
    check_epsilon(epsilon, "gen_dno");
    int f = floor_log2_inverse(epsilon);
    if (f - 2 < 2)
        throw ParameterRange("gen_dno: epsilon too large, need floor(log2(1/epsilon)) >= 4");
    if (f - 2 > 66)
        throw ScaleExceeded("gen_dno: alpha range extends below the rng resolution");

    RngStream rng(seed, "gen-dno", 0);
    std::uint64_t e = 2 + rng.below(static_cast<std::uint64_t>(f) - 3);
    Rat alpha(BigInt(1), BigInt(1) << static_cast<unsigned>(e));

    std::vector<std::uint32_t> pool;
    if (e == 2) {
        pool.resize(n);
        std::iota(pool.begin(), pool.end(), 1u);
    } else {
        // Pr[j in pool] = 4 * alpha = 2^(2-e), exact as a 64-bit threshold.
        std::uint64_t threshold = std::uint64_t(1) << static_cast<unsigned>(66 - e);
        for (std::uint32_t j = 1; j <= n; ++j)
            if (rng.below_threshold(threshold)) pool.push_back(j);
    }

    std::vector<std::vector<std::uint32_t>> sets(t);
    for (auto& set : sets)
        for (std::uint32_t j : pool)
            if (rng.bit()) set.push_back(j);

    Rat special = Rat(BigInt(1) << static_cast<unsigned>(e + 1)) * epsilon;
    std::vector<Atom> atoms{Atom{BitString::zeros(n), Rat(1) - special}};
    std::map<BitString, std::size_t> where{{atoms[0].bits, 0}};
    Rat share = special / Rat(BigInt(t));
    for (const auto& set : sets) merge_atom(atoms, where, BitString::from_indicator(set, n), share);

    GroundTruthInstance inst(DistributionSpec(n, std::move(atoms)), "dno");
    inst.alpha = alpha;
    inst.coordinate_pool = std::move(pool);
    inst.indicator_sets = std::move(sets);
    inst.claim = FarnessClaim{(t + 1) / 2, epsilon};
    verify_farness(inst);
    return inst;
}

GroundTruthInstance gen_anchor(std::uint64_t m, const Rat& epsilon, std::uint32_t n,
                               std::uint64_t seed) {
    if (m < 1) throw ParameterRange("gen_anchor: m must be at least 1");
    if (n < 1) throw ParameterRange("gen_anchor: n must be at least 1");
    check_epsilon(epsilon, "gen_anchor");
    if (!(Rat(10) * epsilon <= Rat(1)))
        throw ParameterRange("gen_anchor: need 10 * epsilon <= 1");

    RngStream rng(seed, "gen-anchor", 0);
    std::vector<Atom> atoms{Atom{BitString::zeros(n), Rat(1) - Rat(10) * epsilon}};
    std::map<BitString, std::size_t> where{{atoms[0].bits, 0}};
    Rat share = Rat(5) * epsilon / Rat(BigInt(m));
    for (std::uint64_t i = 0; i < 2 * m; ++i) {
        BitString s(n);
        for (std::uint32_t pos = 0; pos < n; ++pos) s.set_bit(pos, rng.bit());
        merge_atom(atoms, where, std::move(s), share);
    }

    GroundTruthInstance inst(DistributionSpec(n, std::move(atoms)), "anchor");
    inst.claim = FarnessClaim{m, epsilon};
    verify_farness(inst);
    return inst;
}

namespace {

constexpr std::uint64_t kEnsembleSideGuard = 256;
constexpr std::uint32_t kEnsembleLengthGuard = 24;
constexpr std::uint64_t kRestrictionSubsetGuard = 2'000'000;

std::uint64_t restriction_width(const Rat& zeta, std::uint32_t n) {
    Rat scaled = zeta * Rat(BigInt(n));
    BigInt w = scaled.numerator() / scaled.denominator();  // floor for non-negatives
    return static_cast<std::uint64_t>(w);
}

/// Visits every k-subset of {0, ..., n-1}; stops early once fn returns false.
bool for_each_combination(std::uint32_t n, std::uint32_t k,
                          const std::function<bool(const std::vector<std::uint32_t>&)>& fn) {
    std::vector<std::uint32_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0u);
    while (true) {
        if (!fn(idx)) return false;
        std::uint32_t i = k;
        while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) return true;
        ++idx[i - 1];
        for (std::uint32_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

std::uint32_t string_word(const BitString& s) {
    std::uint32_t word = 0;
    for (std::uint32_t pos = 0; pos < s.size(); ++pos)
        word |= static_cast<std::uint32_t>(s.bit(pos)) << pos;
    return word;
}

BitString word_string(std::uint32_t word, std::uint32_t n) {
    BitString s(n);
    for (std::uint32_t pos = 0; pos < n; ++pos) s.set_bit(pos, (word >> pos) & 1u);
    return s;
}

using XorBasis = std::array<std::uint32_t, 32>;

std::uint32_t xor_reduce(std::uint32_t v, const XorBasis& slot) {
    while (v != 0) {
        unsigned lead = 31u - static_cast<unsigned>(std::countl_zero(v));
        if (slot[lead] == 0) break;
        v ^= slot[lead];
    }
    return v;
}

std::uint32_t gf2_rank(const std::vector<std::uint32_t>& vectors) {
    XorBasis slot{};
    std::uint32_t rank = 0;
    for (std::uint32_t v : vectors) {
        std::uint32_t r = xor_reduce(v, slot);
        if (r != 0) {
            slot[31u - static_cast<unsigned>(std::countl_zero(r))] = r;
            ++rank;
        }
    }
    return rank;
}

/// Extends the current independent prefix by one more column; a reduction to
/// zero exhibits a dependent subset of size at most `width`.
bool independent_extend(const std::vector<std::uint32_t>& cols, std::uint64_t width,
                        XorBasis& slot, std::uint64_t depth, std::uint32_t from) {
    for (std::uint32_t i = from; i < cols.size(); ++i) {
        std::uint32_t v = xor_reduce(cols[i], slot);
        if (v == 0) return false;
        if (depth + 1 < width) {
            unsigned lead = 31u - static_cast<unsigned>(std::countl_zero(v));
            slot[lead] = v;
            if (!independent_extend(cols, width, slot, depth + 1, i + 1)) return false;
            slot[lead] = 0;
        }
    }
    return true;
}

/// True when no subset of at most `width` columns is linearly dependent.
bool small_subsets_independent(const std::vector<std::uint32_t>& cols, std::uint64_t width) {
    if (width == 0) return true;
    XorBasis slot{};
    return independent_extend(cols, width, slot, 0, 0);
}

}  // namespace

bool verify_secret_ensemble(const std::vector<BitString>& side0,
                            const std::vector<BitString>& side1, const Rat& delta,
                            const Rat& zeta) {
    if (side0.empty() || side0.size() != side1.size()) return false;
    if (side0.size() > kEnsembleSideGuard)
        throw ScaleExceeded("verify_secret_ensemble: side size past the exhaustive guard");
    std::uint32_t n = side0[0].size();
    if (n == 0) return false;
    if (n > kEnsembleLengthGuard)
        throw ScaleExceeded("verify_secret_ensemble: string length past the exhaustive guard");
    for (const auto& side : {std::cref(side0), std::cref(side1)})
        for (const BitString& s : side.get())
            if (s.size() != n) return false;

    std::vector<std::uint32_t> words0, words1;
    for (const BitString& s : side0) words0.push_back(string_word(s));
    for (const BitString& s : side1) words1.push_back(string_word(s));
    auto distinct = [](std::vector<std::uint32_t> w) {
        std::sort(w.begin(), w.end());
        return std::adjacent_find(w.begin(), w.end()) == w.end();
    };
    if (!distinct(words0) || !distinct(words1)) return false;

    std::vector<std::uint32_t> all(words0);
    all.insert(all.end(), words1.begin(), words1.end());
    for (std::size_t a = 0; a < all.size(); ++a)
        for (std::size_t b = a + 1; b < all.size(); ++b) {
            auto dist = static_cast<std::uint32_t>(std::popcount(all[a] ^ all[b]));
            if (dist != 0 && !(Rat(BigInt(dist), BigInt(n)) > delta)) return false;
        }

    std::uint64_t width = std::min<std::uint64_t>(restriction_width(zeta, n), n);
    std::uint64_t total = 0, binom = 1;
    for (std::uint64_t k = 1; k <= width; ++k) {
        binom = binom * (n - (k - 1)) / k;
        total += binom;
        if (total > kRestrictionSubsetGuard)
            throw ScaleExceeded("verify_secret_ensemble: restriction subsets past the guard");
    }

    std::vector<std::uint32_t> counts;
    for (std::uint64_t k = 1; k <= width; ++k) {
        counts.assign(std::size_t(1) << k, 0u);
        bool ok = for_each_combination(
            n, static_cast<std::uint32_t>(k), [&](const std::vector<std::uint32_t>& idx) {
                std::fill(counts.begin(), counts.end(), 0u);
                auto pattern = [&](std::uint32_t word) {
                    std::uint32_t p = 0;
                    for (std::size_t i = 0; i < idx.size(); ++i)
                        p |= ((word >> idx[i]) & 1u) << i;
                    return p;
                };
                for (std::uint32_t w : words0) ++counts[pattern(w)];
                for (std::uint32_t w : words1) --counts[pattern(w)];
                return std::all_of(counts.begin(), counts.end(),
                                   [](std::uint32_t c) { return c == 0; });
            });
        if (!ok) return false;
    }
    return true;
}

SecretEnsemble gen_secret_ensemble(std::uint32_t n, std::uint64_t target_count_per_side,
                                   const Rat& delta, const Rat& zeta, std::uint64_t seed) {
    if (n < 1 || n > kEnsembleLengthGuard)
        throw ParameterRange("gen_secret_ensemble: n must lie in [1, 24]");
    if (target_count_per_side < 1 || !std::has_single_bit(target_count_per_side))
        throw ParameterRange("gen_secret_ensemble: count per side must be a power of two");
    if (target_count_per_side > kEnsembleSideGuard)
        throw ScaleExceeded("gen_secret_ensemble: side size past the exhaustive guard");
    if (!(delta >= Rat(0)) || !(delta < Rat(1)))
        throw ParameterRange("gen_secret_ensemble: delta must lie in [0, 1)");
    if (!(zeta >= Rat(0)) || !(zeta <= Rat(1)))
        throw ParameterRange("gen_secret_ensemble: zeta must lie in [0, 1]");
    auto dim = static_cast<unsigned>(std::countr_zero(target_count_per_side));
    if (dim > n)
        throw ParameterRange("gen_secret_ensemble: count per side exceeds the string space");

    std::uint64_t width = restriction_width(zeta, n);
    if (width > dim)
        throw ConstructionFailed(
            "gen_secret_ensemble: restriction width exceeds the code dimension; raise the "
            "per-side count or lower zeta");

    RngStream rng(seed, "gen-secret", 0);
    const int kAttempts = 20000;
    // weight > delta * n  <=>  weight * den(delta) > num(delta) * n, kept exact.
    BigInt delta_scaled = delta.numerator() * n;

    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        // A zero generator column can never survive a width >= 1 independence
        // check, so draw columns from the nonzero vectors directly. (dim = 0
        // only ever pairs with width = 0; the all-zero matrix is the code.)
        std::vector<std::uint32_t> cols(n, 0);
        if (dim > 0)
            for (auto& c : cols)
                c = static_cast<std::uint32_t>(1 + rng.below((std::uint64_t(1) << dim) - 1));
        if (gf2_rank(cols) < dim) continue;
        if (!small_subsets_independent(cols, width)) continue;

        std::vector<std::uint32_t> code(std::size_t(1) << dim, 0);
        for (std::size_t x = 0; x < code.size(); ++x) {
            std::uint32_t word = 0;
            for (std::uint32_t j = 0; j < n; ++j)
                word |= static_cast<std::uint32_t>(
                            std::popcount(static_cast<std::uint32_t>(x) & cols[j]) & 1)
                        << j;
            code[x] = word;
        }
        auto heavy_enough = [&](std::uint32_t word) {
            return BigInt(std::popcount(word)) * delta.denominator() > delta_scaled;
        };
        if (!std::all_of(code.begin() + 1, code.end(), heavy_enough)) continue;

        std::vector<std::uint32_t> sorted_code(code);
        std::sort(sorted_code.begin(), sorted_code.end());
        std::optional<std::uint32_t> shift;
        for (int tries = 0; tries < 64 && !shift; ++tries) {
            auto b = static_cast<std::uint32_t>(rng.below(std::uint64_t(1) << n));
            if (std::binary_search(sorted_code.begin(), sorted_code.end(), b)) continue;
            if (std::all_of(code.begin(), code.end(),
                            [&](std::uint32_t c) { return heavy_enough(b ^ c); }))
                shift = b;
        }
        if (!shift) continue;
        auto offset = static_cast<std::uint32_t>(rng.below(std::uint64_t(1) << n));

        std::vector<std::uint32_t> base, coset;
        for (std::uint32_t c : code) {
            base.push_back(c ^ offset);
            coset.push_back(c ^ *shift ^ offset);
        }
        std::sort(base.begin(), base.end());
        std::sort(coset.begin(), coset.end());

        SecretEnsemble ensemble;
        for (std::uint32_t w : base) ensemble.side0.push_back(word_string(w, n));
        for (std::uint32_t w : coset) ensemble.side1.push_back(word_string(w, n));
        if (verify_secret_ensemble(ensemble.side0, ensemble.side1, delta, zeta))
            return ensemble;
    }
    throw ConstructionFailed("gen_secret_ensemble: no verified ensemble within the attempt budget");
}

GroundTruthInstance gen_secret_instance(const std::vector<BitString>& side0,
                                        const std::vector<BitString>& side1,
                                        const Rat& epsilon, const Rat& delta) {
    std::uint64_t per = side0.size();
    if (per == 0 || side1.size() != per)
        throw ParameterRange("gen_secret_instance: sides must be nonempty and equal in size");
    if (per % 2 != 0)
        throw ParameterRange("gen_secret_instance: per-side count must be even");
    std::uint32_t n = side0[0].size();
    for (const auto& side : {std::cref(side0), std::cref(side1)})
        for (const BitString& s : side.get())
            if (s.size() != n)
                throw ParameterRange("gen_secret_instance: strings must share one length");
    check_epsilon(epsilon, "gen_secret_instance");
    if (!(delta > Rat(0)) || !(delta <= Rat(1)))
        throw ParameterRange("gen_secret_instance: delta must lie in (0, 1]");
    if (!(epsilon < delta / Rat(4)))
        throw ParameterRange("gen_secret_instance: need epsilon < delta / 4");

    Rat light_total = Rat(4) * epsilon / delta;
    Rat heavy_each = (Rat(1) - light_total) / Rat(BigInt(per));
    Rat light_each = light_total / Rat(BigInt(per));
    std::vector<Atom> atoms;
    for (const BitString& s : side0) atoms.push_back(Atom{s, heavy_each});
    for (const BitString& s : side1) atoms.push_back(Atom{s, light_each});

    GroundTruthInstance inst(DistributionSpec(n, std::move(atoms)), "secret");
    inst.delta = delta;
    inst.claim = FarnessClaim{3 * per / 2, epsilon};
    verify_farness(inst);
    return inst;
}

GroundTruthInstance lift_instance(const GroundTruthInstance& inst, std::uint32_t times) {
    if (times < 1) throw ParameterRange("lift_instance: times must be at least 1");
    GroundTruthInstance lifted = inst;
    lifted.distribution = repetition_lift(inst.distribution, times);
    lifted.lift_factor = inst.lift_factor * times;
    lifted.verified_distance.reset();
    verify_farness(lifted);
    return lifted;
}

}  // namespace supplab
