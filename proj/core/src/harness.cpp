#include "supplab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "supplab/distances.hpp"
#include "supplab/errors.hpp"
#include "supplab/oracle.hpp"
#include "supplab/rng.hpp"
#include "supplab/testers.hpp"
#include "supplab/witness.hpp"

namespace supplab {

namespace {

constexpr int kSchemaVersion = 1;
constexpr std::size_t kOracleAtomGuard = 12;

// Fixed base construction for the secret family; the grid's n must be a
// multiple of the base length and the instance is lifted up to it.
constexpr std::uint32_t kSecretBaseLength = 16;
const Rat kSecretDelta{49, 100};
const Rat kSecretZeta{1, 12};

const std::vector<std::string> kFamilies = {"support", "dno", "anchor", "secret"};
const std::vector<std::string> kTesters = {"nonadaptive", "adaptive", "baseline"};

bool known_name(const std::vector<std::string>& table, const std::string& name) {
    return std::find(table.begin(), table.end(), name) != table.end();
}

std::string sanitize_error(std::string text) {
    for (auto& c : text) {
        if (c == ',') c = ';';
        if (c == '\n' || c == '\r') c = ' ';
    }
    return text;
}

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

struct GridCell {
    std::string family;
    std::uint64_t m = 0;
    Rat epsilon;
    std::uint32_t n = 0;
    std::uint64_t t = 0;  // 0 outside the dno family
    std::uint64_t cell_index = 0;
};

std::vector<GridCell> enumerate_cells(const ExperimentConfig& config) {
    std::vector<GridCell> cells;
    std::uint64_t index = 0;
    for (const auto& family : config.families)
        for (auto m : config.m_grid)
            for (const auto& eps : config.epsilon_grid)
                for (auto n : config.n_grid) {
                    std::vector<std::uint64_t> ts = {0};
                    if (family == "dno")
                        ts = config.t_grid.empty() ? std::vector<std::uint64_t>{2 * m}
                                                   : config.t_grid;
                    for (auto t : ts)
                        cells.push_back({family, m, eps, n, t, index++});
                }
    return cells;
}

GroundTruthInstance make_instance(const GridCell& cell, std::uint64_t instance_seed) {
    return gen_family_instance(cell.family, cell.m, cell.epsilon, cell.n, cell.t,
                               instance_seed);
}

std::string distance_column(const GroundTruthInstance& inst, std::uint64_t m) {
    if (inst.distribution.atoms().size() > kOracleAtomGuard) return "unverified";
    // m beyond the atom count only ever yields singleton clusters; clamping
    // keeps the int cast safe without changing the value.
    int m_eff = int(std::min<std::uint64_t>(m, kOracleAtomGuard));
    return format_rational(distance_to_support_m(inst.distribution, m_eff).value);
}

TesterVerdict dispatch_tester(const std::string& name, OracleSession& session, std::uint64_t m,
                              const Rat& epsilon) {
    if (name == "nonadaptive") return run_nonadaptive_test(session, m, epsilon);
    if (name == "adaptive") return run_adaptive_test(session, m, epsilon);
    return run_baseline_test(session, m, epsilon);
}

std::vector<ResultRow> generation_error_rows(const GridCell& cell, std::uint64_t seed_ordinal,
                                             const std::vector<std::string>& testers,
                                             const char* what) {
    std::vector<ResultRow> rows;
    for (const auto& tester : testers) {
        ResultRow row;
        row.family = cell.family;
        row.m = cell.m;
        row.epsilon = cell.epsilon;
        row.n = cell.n;
        row.t = cell.t;
        row.seed = seed_ordinal;
        row.tester = tester;
        row.verdict = "error";
        row.witness_valid = "na";
        row.verified_distance = "na";
        row.error = sanitize_error(what);
        rows.push_back(std::move(row));
    }
    return rows;
}

ResultRow run_one_row(const GroundTruthInstance& inst, const std::string& distance,
                      const GridCell& cell, std::uint64_t seed_ordinal,
                      const std::string& tester, std::uint64_t instance_seed,
                      const ExperimentConfig& config) {
    ResultRow row;
    row.family = cell.family;
    row.m = cell.m;
    row.epsilon = cell.epsilon;
    row.n = cell.n;
    row.t = cell.t;
    row.seed = seed_ordinal;
    row.tester = tester;
    row.witness_valid = "na";
    row.verified_distance = distance;

    SessionBudgets budgets;
    if (config.max_samples > 0) budgets.max_samples = config.max_samples;
    if (config.max_queries > 0) budgets.max_queries = config.max_queries;
    OracleSession session(inst.distribution, instance_seed, budgets);
    auto started = std::chrono::steady_clock::now();
    try {
        TesterVerdict verdict = dispatch_tester(tester, session, cell.m, cell.epsilon);
        if (verdict.reject) {
            auto graph = build_contradiction_graph(session.log());
            if (verdict.witness.size() != cell.m + 1 || !graph.certifies_clique(verdict.witness))
                throw std::logic_error(
                    "campaign: rejection without a verified (m+1)-clique witness");
            row.witness_valid = "true";
        }
        row.verdict = verdict.reject ? "reject" : "accept";
    } catch (const std::invalid_argument& e) {
        row.verdict = "error";
        row.error = sanitize_error(e.what());
    } catch (const std::runtime_error& e) {
        // budget, scale and construction errors all land here; the witness
        // invariant above is a logic_error and deliberately escapes
        row.verdict = "error";
        row.error = sanitize_error(e.what());
    }
    if (config.timings) {
        auto elapsed = std::chrono::steady_clock::now() - started;
        row.wall_time_ms = std::uint64_t(
            std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count());
    }
    row.queries_used = session.queries_used();
    row.samples_used = session.samples_used();
    return row;
}

}  // namespace

void ExperimentConfig::validate() const {
    for (const auto& f : families)
        if (!known_name(kFamilies, f))
            throw ParameterRange("config: unknown family \"" + f + "\"");
    for (const auto& t : testers)
        if (!known_name(kTesters, t))
            throw ParameterRange("config: unknown tester \"" + t + "\"");
    for (const auto& eps : epsilon_grid)
        if (!(eps > Rat(0)) || !(eps < Rat(1)))
            throw ParameterRange("config: epsilon must lie in (0, 1)");
    for (auto m : m_grid)
        if (m < 1) throw ParameterRange("config: m must be at least 1");
    for (auto n : n_grid)
        if (n < 1) throw ParameterRange("config: n must be at least 1");
    for (auto t : t_grid)
        if (t < 1) throw ParameterRange("config: t must be at least 1");
    if (seed_count < 1) throw ParameterRange("config: seed count must be at least 1");
    if (threads < 1) throw ParameterRange("config: thread count must be at least 1");
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParameterRange(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw ParameterRange("config: top level must be a JSON object");

    static const std::set<std::string> kKeys = {
        "families", "m", "epsilon", "t", "n", "testers", "base_seed", "seed_count",
        "max_queries", "max_samples", "threads", "timings", "csv_path"};
    for (const auto& item : doc.items())
        if (kKeys.find(item.key()) == kKeys.end())
            throw ParameterRange("config: unknown key \"" + item.key() + "\"");

    ExperimentConfig config;
    try {
        if (doc.contains("families")) config.families = doc["families"].get<std::vector<std::string>>();
        if (doc.contains("m")) config.m_grid = doc["m"].get<std::vector<std::uint64_t>>();
        if (doc.contains("epsilon"))
            for (const auto& entry : doc["epsilon"]) {
                if (entry.is_string())
                    config.epsilon_grid.push_back(parse_rational(entry.get<std::string>()));
                else if (entry.is_number_integer())
                    config.epsilon_grid.push_back(Rat(BigInt(entry.get<std::int64_t>())));
                else
                    throw ParameterRange(
                        "config: epsilon entries must be rational strings like \"1/16\"");
            }
        if (doc.contains("t")) config.t_grid = doc["t"].get<std::vector<std::uint64_t>>();
        if (doc.contains("n")) config.n_grid = doc["n"].get<std::vector<std::uint32_t>>();
        if (doc.contains("testers")) config.testers = doc["testers"].get<std::vector<std::string>>();
        if (doc.contains("base_seed")) config.base_seed = doc["base_seed"].get<std::uint64_t>();
        if (doc.contains("seed_count")) config.seed_count = doc["seed_count"].get<std::uint64_t>();
        if (doc.contains("max_queries")) config.max_queries = doc["max_queries"].get<std::uint64_t>();
        if (doc.contains("max_samples")) config.max_samples = doc["max_samples"].get<std::uint64_t>();
        if (doc.contains("threads")) config.threads = doc["threads"].get<unsigned>();
        if (doc.contains("timings")) config.timings = doc["timings"].get<bool>();
        if (doc.contains("csv_path")) config.csv_path = doc["csv_path"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParameterRange(std::string("config: ") + e.what());
    }
    config.validate();
    return config;
}

std::string ExperimentConfig::to_json_string(bool pretty) const {
    nlohmann::json doc;
    doc["families"] = families;
    doc["m"] = m_grid;
    nlohmann::json eps = nlohmann::json::array();
    for (const auto& e : epsilon_grid) eps.push_back(format_rational(e));
    doc["epsilon"] = eps;
    doc["t"] = t_grid;
    doc["n"] = n_grid;
    doc["testers"] = testers;
    doc["base_seed"] = base_seed;
    doc["seed_count"] = seed_count;
    doc["max_queries"] = max_queries;
    doc["max_samples"] = max_samples;
    doc["threads"] = threads;
    doc["timings"] = timings;
    doc["csv_path"] = csv_path;
    return pretty ? doc.dump(2) : doc.dump();
}

std::string ResultRow::csv_header() {
    return "schema_version,family,m,epsilon,n,t,seed,tester,verdict,queries_used,"
           "samples_used,witness_valid,verified_distance,wall_time_ms,error";
}

std::string ResultRow::csv_row() const {
    std::ostringstream out;
    out << kSchemaVersion << ',' << family << ',' << m << ',' << format_rational(epsilon)
        << ',' << n << ',' << t << ',' << seed << ',' << tester << ',' << verdict << ','
        << queries_used << ',' << samples_used << ',' << witness_valid << ','
        << verified_distance << ',' << wall_time_ms << ',' << error;
    return out.str();
}

std::vector<ResultRow> run_campaign(const ExperimentConfig& config) {
    config.validate();
    auto cells = enumerate_cells(config);

    struct Task {
        const GridCell* cell;
        std::uint64_t seed_ordinal;
    };
    std::vector<Task> tasks;
    tasks.reserve(cells.size() * config.seed_count);
    for (const auto& cell : cells)
        for (std::uint64_t s = 0; s < config.seed_count; ++s) tasks.push_back({&cell, s});

    std::vector<std::vector<ResultRow>> slots(tasks.size());
    std::vector<std::exception_ptr> failures(tasks.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            std::size_t index = next.fetch_add(1);
            if (index >= tasks.size()) return;
            const auto& task = tasks[index];
            const auto& cell = *task.cell;
            try {
                std::uint64_t instance_seed =
                    RngStream(config.base_seed, "campaign",
                              cell.cell_index * config.seed_count + task.seed_ordinal)
                        .next_u64();
                std::vector<ResultRow> rows;
                try {
                    auto inst = make_instance(cell, instance_seed);
                    auto distance = distance_column(inst, cell.m);
                    for (const auto& tester : config.testers)
                        rows.push_back(run_one_row(inst, distance, cell, task.seed_ordinal,
                                                   tester, instance_seed, config));
                } catch (const std::invalid_argument& e) {
                    rows = generation_error_rows(cell, task.seed_ordinal, config.testers, e.what());
                } catch (const ScaleExceeded& e) {
                    rows = generation_error_rows(cell, task.seed_ordinal, config.testers, e.what());
                } catch (const ConstructionFailed& e) {
                    rows = generation_error_rows(cell, task.seed_ordinal, config.testers, e.what());
                }
                slots[index] = std::move(rows);
            } catch (...) {
                failures[index] = std::current_exception();
            }
        }
    };

    unsigned thread_count =
        unsigned(std::min<std::size_t>(std::max(1u, config.threads), std::max<std::size_t>(tasks.size(), 1)));
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (unsigned i = 0; i < thread_count; ++i) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();

    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);

    std::vector<ResultRow> rows;
    rows.reserve(tasks.size() * config.testers.size());
    for (auto& slot : slots)
        for (auto& row : slot) rows.push_back(std::move(row));
    return rows;
}

std::string campaign_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << ResultRow::csv_header() << '\n';
    for (const auto& row : rows) out << row.csv_row() << '\n';
    return out.str();
}

GroundTruthInstance gen_support_instance(std::uint64_t m, std::uint32_t n, std::uint64_t seed) {
    if (m < 1) throw ParameterRange("gen_support_instance: m must be at least 1");
    if (n < 1) throw ParameterRange("gen_support_instance: n must be at least 1");
    RngStream rng(seed, "gen-support", 0);
    std::uint64_t size = 1 + rng.below(m);
    if (n < 20) size = std::min(size, std::uint64_t(1) << n);

    std::set<BitString> strings;
    while (strings.size() < size) {
        BitString candidate = BitString::zeros(n);
        for (std::uint32_t pos = 0; pos < n; ++pos) candidate.set_bit(pos, rng.bit());
        strings.insert(candidate);
    }
    std::vector<std::uint64_t> raw;
    BigInt total = 0;
    for (std::size_t i = 0; i < strings.size(); ++i) {
        raw.push_back(1 + rng.below(1000));
        total += raw.back();
    }
    std::vector<Atom> atoms;
    std::size_t i = 0;
    for (const auto& value : strings) atoms.push_back({value, Rat(BigInt(raw[i++]), total)});
    return GroundTruthInstance(DistributionSpec(n, std::move(atoms)), "support");
}

GroundTruthInstance gen_family_instance(const std::string& family, std::uint64_t m,
                                        const Rat& epsilon, std::uint32_t n,
                                        std::uint64_t t, std::uint64_t seed) {
    if (family == "support") return gen_support_instance(m, n, seed);
    if (family == "dno") return gen_dno(t == 0 ? 2 * m : t, epsilon, n, seed);
    if (family == "anchor") return gen_anchor(m, epsilon, n, seed);
    if (family != "secret") throw ParameterRange("unknown family \"" + family + "\"");
    // secret: base ensemble at length 16, lifted to the grid length
    if (m % 3 != 0) throw ParameterRange("secret family: m must be 3 * (count per side) / 2");
    std::uint64_t per_side = 2 * m / 3;
    if (per_side < 1 || (per_side & (per_side - 1)) != 0)
        throw ParameterRange("secret family: 2m/3 must be a power of two");
    if (n % kSecretBaseLength != 0 || n == 0)
        throw ParameterRange("secret family: n must be a positive multiple of 16");
    auto ensemble =
        gen_secret_ensemble(kSecretBaseLength, per_side, kSecretDelta, kSecretZeta, seed);
    auto inst = gen_secret_instance(ensemble.side0, ensemble.side1, epsilon, kSecretDelta);
    std::uint32_t times = n / kSecretBaseLength;
    if (times > 1) inst = lift_instance(inst, times);
    return inst;
}

WilsonInterval wilson_interval(std::uint64_t hits, std::uint64_t trials) {
    if (trials < 1) throw ParameterRange("wilson_interval: trials must be at least 1");
    if (hits > trials) throw ParameterRange("wilson_interval: hits exceed trials");
    const double z = 1.96;
    double t = double(trials);
    double p = double(hits) / t;
    double z2 = z * z;
    double denom = 1.0 + z2 / t;
    double center = p + z2 / (2.0 * t);
    double radius = z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t));
    WilsonInterval interval;
    interval.low = std::max(0.0, (center - radius) / denom);
    interval.high = std::min(1.0, (center + radius) / denom);
    return interval;
}

std::string scaling_table(const std::vector<ResultRow>& rows,
                          const std::vector<std::string>& group_keys) {
    if (rows.empty()) throw ParameterRange("scaling_table: rows must be nonempty");
    static const std::vector<std::string> kKeys = {"family", "m", "epsilon", "n", "t", "tester"};
    std::set<std::string> seen;
    for (const auto& key : group_keys) {
        if (!known_name(kKeys, key))
            throw ParameterRange("scaling_table: unknown group key \"" + key + "\"");
        if (!seen.insert(key).second)
            throw ParameterRange("scaling_table: duplicate group key \"" + key + "\"");
    }

    auto key_string = [&](const ResultRow& row, const std::string& key) -> std::string {
        if (key == "family") return row.family;
        if (key == "m") return std::to_string(row.m);
        if (key == "epsilon") return format_rational(row.epsilon);
        if (key == "n") return std::to_string(row.n);
        if (key == "t") return std::to_string(row.t);
        return row.tester;
    };

    // group rows by their key tuple; remember one representative row for the
    // typed (numeric-aware) sort below
    std::map<std::vector<std::string>, std::vector<const ResultRow*>> groups;
    for (const auto& row : rows) {
        std::vector<std::string> tuple;
        tuple.reserve(group_keys.size());
        for (const auto& key : group_keys) tuple.push_back(key_string(row, key));
        groups[tuple].push_back(&row);
    }

    std::vector<const std::pair<const std::vector<std::string>, std::vector<const ResultRow*>>*> ordered;
    for (const auto& entry : groups) ordered.push_back(&entry);
    auto typed_less = [&](const ResultRow& a, const ResultRow& b) {
        for (const auto& key : group_keys) {
            if (key == "family") {
                if (a.family != b.family) return a.family < b.family;
            } else if (key == "m") {
                if (a.m != b.m) return a.m < b.m;
            } else if (key == "epsilon") {
                if (a.epsilon != b.epsilon) return a.epsilon < b.epsilon;
            } else if (key == "n") {
                if (a.n != b.n) return a.n < b.n;
            } else if (key == "t") {
                if (a.t != b.t) return a.t < b.t;
            } else {
                if (a.tester != b.tester) return a.tester < b.tester;
            }
        }
        return false;
    };
    std::sort(ordered.begin(), ordered.end(),
              [&](const auto* x, const auto* y) {
                  return typed_less(*x->second.front(), *y->second.front());
              });

    std::ostringstream out;
    for (const auto& key : group_keys) out << key << ',';
    out << "count,errors,rejections,rejection_rate,wilson_low,wilson_high,"
           "mean_queries,max_queries,mean_samples\n";
    for (const auto* entry : ordered) {
        for (const auto& part : entry->first) out << part << ',';
        std::uint64_t count = entry->second.size();
        std::uint64_t errors = 0, rejections = 0, query_sum = 0, query_max = 0, sample_sum = 0;
        for (const auto* row : entry->second) {
            if (row->verdict == "error") {
                ++errors;
                continue;
            }
            if (row->verdict == "reject") ++rejections;
            query_sum += row->queries_used;
            query_max = std::max(query_max, row->queries_used);
            sample_sum += row->samples_used;
        }
        std::uint64_t completed = count - errors;
        out << count << ',' << errors << ',' << rejections << ',';
        if (completed == 0) {
            out << "na,na,na,na,na,na\n";
            continue;
        }
        auto interval = wilson_interval(rejections, completed);
        out << format_double(double(rejections) / double(completed)) << ','
            << format_double(interval.low) << ',' << format_double(interval.high) << ','
            << format_double(double(query_sum) / double(completed)) << ',' << query_max << ','
            << format_double(double(sample_sum) / double(completed)) << '\n';
    }
    return out.str();
}

CompositionDiagnostic diagnose_compositions(const DistributionSpec& dist, std::uint64_t seed,
                                            std::uint64_t m, const Rat& epsilon) {
    if (m > 6) throw ScaleExceeded("diagnose_compositions: m is guarded at 6");

    OracleSession session(dist, seed);
    auto run = run_nonadaptive_detailed(session, m, epsilon);
    const auto& plan = run.plan;
    if (plan.top_level > 60)
        throw ScaleExceeded("diagnose_compositions: top level is guarded at 60");
    int levels = plan.top_level + 1;

    // true string of every planned sample, collapsed to distinct values
    std::map<BitString, int> value_index;
    auto value_of = [&](SampleId handle) {
        BitString truth = replay_draw(dist, seed, handle);
        auto found = value_index.find(truth);
        if (found != value_index.end()) return found->second;
        int fresh = int(value_index.size());
        if (fresh >= 16)
            throw ScaleExceeded("diagnose_compositions: more than 16 distinct sampled values");
        value_index.emplace(std::move(truth), fresh);
        return fresh;
    };

    int anchor_value = value_of(plan.anchor);
    std::vector<std::uint32_t> presence(std::size_t(levels), 0);
    for (int a = 0; a < int(plan.blocks.size()); ++a)
        for (const auto& block : plan.blocks[std::size_t(a)])
            for (SampleId handle : block)
                presence[std::size_t(a)] |= std::uint32_t(1) << value_of(handle);

    std::vector<BitString> values(value_index.size());
    for (const auto& [value, index] : value_index) values[std::size_t(index)] = value;
    std::size_t count = values.size();

    // ok[v][a]: values far enough from v to join right after it at level a
    std::vector<std::vector<std::uint32_t>> ok(count, std::vector<std::uint32_t>(std::size_t(levels), 0));
    for (std::size_t v = 0; v < count; ++v)
        for (std::size_t u = 0; u < count; ++u) {
            if (u == v) continue;
            Rat d = hamming_distance(values[u], values[v]);
            for (int a = 0; a < levels; ++a)
                if (d > Rat(BigInt(1), BigInt(1) << (a + 1)))
                    ok[v][std::size_t(a)] |= std::uint32_t(1) << u;
        }
    auto joinable = [&](std::uint32_t mask, int v, int a) {
        std::uint32_t far_from_all = ~std::uint32_t(0);
        for (std::size_t u = 0; u < count; ++u)
            if (mask & (std::uint32_t(1) << u)) far_from_all &= ok[u][std::size_t(a)];
        return ((far_from_all >> v) & 1u) != 0;
    };

    auto state_key = [&](std::uint32_t mask, int cap) {
        return (std::uint64_t(mask) << 8) | std::uint64_t(std::uint32_t(cap));
    };

    // longest valid extension of the set `mask` with join levels <= cap
    std::unordered_map<std::uint64_t, int> longest_memo;
    std::function<int(std::uint32_t, int)> longest = [&](std::uint32_t mask, int cap) -> int {
        auto found = longest_memo.find(state_key(mask, cap));
        if (found != longest_memo.end()) return found->second;
        int best = 0;
        for (int a = cap; a >= 0; --a) {
            std::uint32_t candidates = presence[std::size_t(a)] & ~mask;
            for (std::size_t v = 0; v < count; ++v)
                if ((candidates & (std::uint32_t(1) << v)) && joinable(mask, int(v), a))
                    best = std::max(best, 1 + longest(mask | (std::uint32_t(1) << v), a));
        }
        longest_memo.emplace(state_key(mask, cap), best);
        return best;
    };

    // maximum-rank extension: the highest feasible join level always wins,
    // and among its candidate values the lexicographically largest suffix
    // (longer beats prefix) decides
    struct RankResult {
        std::vector<int> levels;
        std::vector<int> values;
    };
    std::unordered_map<std::uint64_t, RankResult> rank_memo;
    std::function<const RankResult&(std::uint32_t, int)> best_rank =
        [&](std::uint32_t mask, int cap) -> const RankResult& {
        auto found = rank_memo.find(state_key(mask, cap));
        if (found != rank_memo.end()) return found->second;
        RankResult best;
        for (int a = cap; a >= 0 && best.levels.empty(); --a) {
            std::uint32_t candidates = presence[std::size_t(a)] & ~mask;
            bool any = false;
            RankResult at_level;
            for (std::size_t v = 0; v < count; ++v) {
                if (!(candidates & (std::uint32_t(1) << v)) || !joinable(mask, int(v), a)) continue;
                const RankResult& rest = best_rank(mask | (std::uint32_t(1) << v), a);
                RankResult candidate;
                candidate.levels.reserve(rest.levels.size() + 1);
                candidate.levels.push_back(a);
                candidate.levels.insert(candidate.levels.end(), rest.levels.begin(),
                                        rest.levels.end());
                candidate.values.push_back(int(v));
                candidate.values.insert(candidate.values.end(), rest.values.begin(),
                                        rest.values.end());
                if (!any || std::lexicographical_compare(at_level.levels.begin(),
                                                         at_level.levels.end(),
                                                         candidate.levels.begin(),
                                                         candidate.levels.end())) {
                    at_level = std::move(candidate);
                    any = true;
                }
            }
            if (any) best = std::move(at_level);
        }
        return rank_memo.emplace(state_key(mask, cap), std::move(best)).first->second;
    };

    std::uint32_t anchor_mask = std::uint32_t(1) << anchor_value;
    CompositionDiagnostic report;
    report.max_length = 1 + std::uint64_t(longest(anchor_mask, plan.top_level));
    const RankResult& rank = best_rank(anchor_mask, plan.top_level);
    report.max_rank_length = 1 + rank.levels.size();
    report.levels = rank.levels;
    report.values.emplace_back(values[std::size_t(anchor_value)], plan.top_level);
    for (std::size_t i = 0; i < rank.values.size(); ++i)
        report.values.emplace_back(values[std::size_t(rank.values[i])], rank.levels[i]);
    report.full_composition_exists = report.max_length >= m + 1;
    report.bad_event = report.max_rank_length <= m;
    return report;
}

}  // namespace supplab
