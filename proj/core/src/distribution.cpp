#include "supplab/distribution.hpp"
#include "supplab/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <map>
#include <unordered_map>

namespace supplab {

using nlohmann::json;

namespace {

const Rat kSumTolerance(BigInt(1), BigInt(1000000000000ll)); // 1e-12

Rat abs_rat(const Rat& r) { return r < Rat(0) ? -r : r; }

} // namespace

DistributionSpec::DistributionSpec(std::uint32_t n, std::vector<Atom> atoms, WeightMode mode)
    : n_(n), atoms_(std::move(atoms)), mode_(mode) {
    if (atoms_.empty()) throw ParameterRange("DistributionSpec: empty support");
    Rat sum(0);
    std::unordered_map<BitString, int, BitStringHash> seen;
    for (const auto& a : atoms_) {
        if (a.bits.size() != n_) throw ParameterRange("DistributionSpec: atom length differs from n");
        if (a.weight <= Rat(0)) throw ParameterRange("DistributionSpec: weights must be positive");
        if (!seen.emplace(a.bits, 1).second) throw ParameterRange("DistributionSpec: atoms must be distinct");
        sum += a.weight;
    }
    bool ok = mode_ == WeightMode::Exact ? sum == Rat(1) : abs_rat(sum - Rat(1)) <= kSumTolerance;
    if (!ok) throw ParameterRange("DistributionSpec: weights must sum to 1");
}

DistributionSpec DistributionSpec::point_mass(BitString atom) {
    std::uint32_t n = atom.size();
    return DistributionSpec(n, {{std::move(atom), Rat(1)}});
}

DistributionSpec DistributionSpec::uniform_on(std::vector<BitString> atoms) {
    if (atoms.empty()) throw ParameterRange("uniform_on: empty support");
    std::uint32_t n = atoms.front().size();
    Rat w(BigInt(1), BigInt(atoms.size()));
    std::vector<Atom> list;
    list.reserve(atoms.size());
    for (auto& a : atoms) list.push_back({std::move(a), w});
    return DistributionSpec(n, std::move(list));
}

Rat DistributionSpec::weight_of(const BitString& s) const {
    for (const auto& a : atoms_)
        if (a.bits == s) return a.weight;
    return Rat(0);
}

bool DistributionSpec::same_distribution(const DistributionSpec& other) const {
    if (n_ != other.n_ || atoms_.size() != other.atoms_.size()) return false;
    std::map<BitString, Rat> mine;
    for (const auto& a : atoms_) mine.emplace(a.bits, a.weight);
    for (const auto& a : other.atoms_) {
        auto it = mine.find(a.bits);
        if (it == mine.end() || it->second != a.weight) return false;
    }
    return true;
}

const std::vector<std::uint64_t>& DistributionSpec::cdf_thresholds() const {
    if (thresholds_.empty()) {
        thresholds_.reserve(atoms_.size());
        BigInt two64 = BigInt(1) << 64;
        Rat cum(0);
        for (const auto& a : atoms_) {
            cum += a.weight;
            // floor(cum * 2^64), clamped to 2^64.
            BigInt scaled = cum.numerator() * two64 / cum.denominator();
            if (scaled > two64) scaled = two64;
            thresholds_.push_back(scaled == two64
                                      ? ~std::uint64_t{0}
                                      : scaled.convert_to<std::uint64_t>());
        }
        thresholds_.back() = ~std::uint64_t{0};
    }
    return thresholds_;
}

std::string DistributionSpec::to_json_string(bool pretty) const {
    json atoms = json::array();
    for (const auto& a : atoms_) {
        json entry;
        entry["bits"] = a.bits.to_string();
        if (mode_ == WeightMode::Exact) {
            entry["weight"] = format_rational(a.weight);
        } else {
            entry["weight"] = rat_to_double(a.weight);
        }
        atoms.push_back(std::move(entry));
    }
    json doc;
    doc["n"] = n_;
    doc["atoms"] = std::move(atoms);
    return pretty ? doc.dump(2) : doc.dump();
}

DistributionSpec DistributionSpec::from_json_string(std::string_view text) {
    json doc = json::parse(text, nullptr, true);
    if (!doc.contains("n") || !doc.contains("atoms"))
        throw ParameterRange("DistributionSpec: JSON needs 'n' and 'atoms'");
    std::uint32_t n = doc.at("n").get<std::uint32_t>();
    std::vector<Atom> atoms;
    WeightMode mode = WeightMode::Exact;
    for (const auto& entry : doc.at("atoms")) {
        BitString bits = BitString::from_string(entry.at("bits").get<std::string>());
        const auto& w = entry.at("weight");
        Rat weight;
        if (w.is_string()) {
            weight = parse_rational(w.get<std::string>());
        } else if (w.is_number()) {
            weight = rat_from_double(w.get<double>());
            mode = WeightMode::Double;
        } else {
            throw ParameterRange("DistributionSpec: weight must be a number or a string");
        }
        atoms.push_back({std::move(bits), std::move(weight)});
    }
    return DistributionSpec(n, std::move(atoms), mode);
}

DistributionSpec sample_map(const DistributionSpec& dist,
                            const std::function<BitString(const BitString&)>& f) {
    std::vector<Atom> out;
    std::unordered_map<BitString, std::size_t, BitStringHash> index;
    for (const auto& a : dist.atoms()) {
        BitString image = f(a.bits);
        if (image.size() != dist.n()) throw ParameterRange("sample_map: f must preserve length");
        auto it = index.find(image);
        if (it == index.end()) {
            index.emplace(image, out.size());
            out.push_back({std::move(image), a.weight});
        } else {
            out[it->second].weight += a.weight;
        }
    }
    return DistributionSpec(dist.n(), std::move(out), dist.mode());
}

DistributionSpec repetition_lift(const DistributionSpec& dist, std::uint32_t times) {
    if (times == 0) throw ParameterRange("repetition_lift: times must be positive");
    std::vector<Atom> out;
    out.reserve(dist.support_size());
    for (const auto& a : dist.atoms()) out.push_back({a.bits.repeat(times), a.weight});
    return DistributionSpec(dist.n() * times, std::move(out), dist.mode());
}

} // namespace supplab
