#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "supplab/bitstring.hpp"
#include "supplab/decision_tree.hpp"
#include "supplab/distribution.hpp"
#include "supplab/errors.hpp"
#include "supplab/harness.hpp"
#include "supplab/oracle.hpp"
#include "supplab/rng.hpp"
#include "supplab/testers.hpp"
#include "supplab/witness.hpp"

using namespace supplab;

namespace {

BitString bs(const char* text) { return BitString::from_string(text); }

DistributionSpec four_far_atoms() {
    std::string a(64, '0'), b(64, '1'), c, d;
    for (int i = 0; i < 32; ++i) { c += "01"; d += "10"; }
    return DistributionSpec::uniform_on(
        {BitString::from_string(a), BitString::from_string(b),
         BitString::from_string(c), BitString::from_string(d)});
}

// Checks a rejection against the session it came from: the witness handles
// must form a clique in the contradiction graph of the transcript, and every
// certificate must point at a coordinate where the true draws differ.
void check_witness(const TesterVerdict& verdict, const OracleSession& session,
                   const DistributionSpec& dist, std::uint64_t m) {
    REQUIRE(verdict.reject);
    REQUIRE(verdict.witness.size() == m + 1);
    auto graph = build_contradiction_graph(session.log());
    CHECK(graph.certifies_clique(verdict.witness));
    CHECK(verdict.certificates.size() == m * (m + 1) / 2);
    for (const auto& pair : verdict.certificates) {
        auto u = replay_draw(dist, session.seed(), pair.a);
        auto v = replay_draw(dist, session.seed(), pair.b);
        CHECK(u.bit(pair.index - 1) != v.bit(pair.index - 1));
    }
}

// Adjacency under a level plan: answers differ somewhere on the shared
// prefix of the master list.
bool plan_adjacent(const LevelPlan& plan, const AnswerMap& answers, SampleId g,
                   SampleId h) {
    auto size_of = [&](SampleId s) { return plan.level_size(plan.sample_levels.at(s)); };
    std::size_t shared = std::min(size_of(g), size_of(h));
    for (std::size_t p = 0; p < shared; ++p) {
        std::uint32_t j = plan.master[p];
        if (answers.at({g, j}) != answers.at({h, j})) return true;
    }
    return false;
}

bool exists_composition_brute(const LevelPlan& plan, const AnswerMap& answers,
                              std::uint64_t m) {
    std::vector<SampleId> others;
    for (const auto& [handle, level] : plan.sample_levels)
        if (handle != plan.anchor) others.push_back(handle);
    std::vector<SampleId> chosen;
    auto rec = [&](auto&& self, std::size_t from) -> bool {
        if (chosen.size() == m) {
            for (std::size_t i = 0; i < chosen.size(); ++i) {
                if (!plan_adjacent(plan, answers, plan.anchor, chosen[i])) return false;
                for (std::size_t k = i + 1; k < chosen.size(); ++k)
                    if (!plan_adjacent(plan, answers, chosen[i], chosen[k])) return false;
            }
            return true;
        }
        for (std::size_t i = from; i < others.size(); ++i) {
            chosen.push_back(others[i]);
            if (self(self, i + 1)) { chosen.pop_back(); return true; }
            chosen.pop_back();
        }
        return false;
    };
    return rec(rec, 0);
}

LevelPlan small_plan() {
    LevelPlan plan;
    plan.epsilon_hat = Rat(1, 4);
    plan.top_level = 2;
    plan.master = {3, 7, 1, 12, 9, 5};
    plan.level_sizes = {2, 4, 6};
    plan.anchor = 1;
    plan.blocks = {{{2, 3}, {4, 5}}, {{6, 7}}, {{8, 9}}};
    plan.sample_levels = {{1, 2}, {2, 0}, {3, 0}, {4, 0}, {5, 0},
                          {6, 1}, {7, 1}, {8, 2}, {9, 2}};
    return plan;
}

} // namespace

TEST_CASE("answer record stores, separates and guards") {
    AnswerRecord record;
    record.note(1, 3, 0);
    record.note(1, 7, 1);
    record.note(2, 3, 1);
    record.note(2, 7, 1);
    record.note(1, 3, 0); // same pair, same answer: fine
    CHECK(record.lookup(1, 3) == 0);
    CHECK(record.lookup(2, 3) == 1);
    CHECK_FALSE(record.lookup(1, 4).has_value());
    CHECK(record.separating_index(1, 2) == 3);
    CHECK_FALSE(record.separating_index(1, 1).has_value());
    CHECK(record.row(1).size() == 2);
    CHECK(record.row(99).empty());
    CHECK_THROWS_AS(record.note(1, 3, 1), std::logic_error);
}

TEST_CASE("decision tree grows from a single leaf") {
    IncrementalDecisionTree tree(5);
    CHECK(tree.leaf_count() == 1);
    CHECK(tree.height() == 0);
    CHECK(tree.elements() == std::vector<SampleId>{5});

    AnswerRecord record;
    record.note(5, 4, 0);
    record.note(8, 4, 1);
    tree.insert(record, 8, 5, 4);
    CHECK(tree.leaf_count() == 2);
    CHECK(tree.height() == 1);
    CHECK(tree.locate_recorded(record, 5) == 5);
    CHECK(tree.locate_recorded(record, 8) == 8);

    // A third element routed to 8's side and split off there.
    record.note(11, 4, 1);
    record.note(11, 9, 0);
    record.note(8, 9, 1);
    tree.insert(record, 11, 8, 9);
    CHECK(tree.leaf_count() == 3);
    CHECK(tree.height() == 2);
    auto elements = tree.elements();
    std::sort(elements.begin(), elements.end());
    CHECK(elements == std::vector<SampleId>{5, 8, 11});
    CHECK(tree.locate_recorded(record, 11) == 11);
    CHECK(tree.locate_recorded(record, 8) == 8);
    CHECK(tree.locate_recorded(record, 5) == 5);
}

TEST_CASE("tree insert preconditions are enforced") {
    AnswerRecord record;
    record.note(1, 2, 0);
    record.note(3, 2, 1);
    IncrementalDecisionTree tree(1);
    // Same answers at the split index.
    AnswerRecord same;
    same.note(1, 2, 0);
    same.note(3, 2, 0);
    IncrementalDecisionTree t1(1);
    CHECK_THROWS_AS(t1.insert(same, 3, 1, 2), std::logic_error);
    // Missing recorded answer.
    AnswerRecord missing;
    missing.note(1, 2, 0);
    IncrementalDecisionTree t2(1);
    CHECK_THROWS_AS(t2.insert(missing, 3, 1, 2), std::logic_error);
    // Fresh already present.
    tree.insert(record, 3, 1, 2);
    AnswerRecord again;
    again.note(1, 5, 0);
    again.note(3, 5, 1);
    CHECK_THROWS_AS(tree.insert(again, 3, 1, 5), std::logic_error);
}

TEST_CASE("construct_tree separates distinct draws within the query bound") {
    auto p = four_far_atoms();
    std::uint64_t seed = 7;
    OracleSession session(p, seed);
    // Find four handles with pairwise distinct values.
    std::vector<SampleId> elements;
    std::set<std::string> seen;
    for (int i = 0; i < 64 && elements.size() < 4; ++i) {
        auto h = session.draw_sample();
        auto value = replay_draw(p, seed, h).to_string();
        if (seen.insert(value).second) elements.push_back(h);
    }
    REQUIRE(elements.size() == 4);
    // Prefill the record with true answers so separating indices exist.
    AnswerRecord record;
    for (auto h : elements) {
        auto value = replay_draw(p, seed, h);
        for (std::uint32_t j = 1; j <= p.n(); ++j) record.note(h, j, value.bit(j - 1));
    }
    std::uint64_t before = session.queries_used();
    auto tree = construct_tree(session, record, elements);
    CHECK(session.queries_used() - before <= elements.size() * elements.size());
    CHECK(tree.leaf_count() == 4);
    CHECK(tree.height() <= 3);
    auto leaves = tree.elements();
    std::sort(leaves.begin(), leaves.end());
    auto sorted = elements;
    std::sort(sorted.begin(), sorted.end());
    CHECK(leaves == sorted);
    for (auto h : elements) {
        CHECK(tree.locate_recorded(record, h) == h);
        CHECK(tree.locate(session, record, h) == h);
    }
}

TEST_CASE("batches fail on a point mass and succeed across a gap") {
    auto point = DistributionSpec::point_mass(bs("0110011001100110"));
    OracleSession still(point, 3);
    DistinguishedSet set;
    set.members = {still.draw_sample()};
    auto outcome = run_batch(still, set, 0, Rat(1, 4), 2);
    CHECK_FALSE(outcome.success);
    CHECK(set.members.size() == 1);
    CHECK_FALSE(outcome.indices.empty());

    auto gap = DistributionSpec::uniform_on(
        {BitString(64), BitString::from_string(std::string(64, '1'))});
    OracleSession session(gap, 3);
    DistinguishedSet pair;
    pair.members = {session.draw_sample()};
    auto result = run_batch(session, pair, 0, Rat(1, 4), 2);
    REQUIRE(result.success);
    CHECK(pair.members.size() == 2);
    CHECK(pair.members[1] == result.fresh);
    CHECK(pair.record.separating_index(pair.members[0], pair.members[1]).has_value());
}

TEST_CASE("second phase iterations insert across gaps within triple m queries") {
    auto p = four_far_atoms();
    std::uint64_t m = 3;
    std::uint64_t seed = 19;
    OracleSession session(p, seed);
    DistinguishedSet set;
    auto first = session.draw_sample();
    set.members = {first};
    IncrementalDecisionTree tree(first);
    int inserted = 0;
    for (int i = 0; i < 40 && set.members.size() <= m; ++i) {
        auto fresh = session.draw_sample();
        std::uint64_t before = session.queries_used();
        bool did = run_second_phase_iteration(session, fresh, set, tree, m);
        CHECK(session.queries_used() - before <= 3 * m);
        if (did) {
            ++inserted;
            CHECK(set.members.back() == fresh);
            CHECK(tree.leaf_count() == set.members.size());
        }
    }
    // Distinct values are 3/4 likely per draw and every distinct pair is far,
    // so the set should have grown past m within 40 iterations.
    CHECK(inserted >= 3);
    CHECK(set.members.size() == m + 1);
}

TEST_CASE("non-adaptive query counts depend only on m and epsilon") {
    auto p1 = DistributionSpec::point_mass(bs("0000000000000000"));
    auto p2 = four_far_atoms();
    OracleSession a(p1, 0), b(p2, 123);
    auto va = run_nonadaptive_test(a, 2, Rat(1, 8));
    auto vb = run_nonadaptive_test(b, 2, Rat(1, 8));
    CHECK(va.queries == 6803);
    CHECK(vb.queries == 6803);
    CHECK(va.samples == vb.samples);
    CHECK(va.queries == a.queries_used());
    CHECK(va.samples == a.samples_used());

    OracleSession c(p2, 5);
    CHECK(run_nonadaptive_test(c, 4, Rat(1, 8)).queries == 19723);

    // Epsilon rounds down to the next power of two: 1/5 behaves like 1/8.
    OracleSession d(p1, 0);
    CHECK(run_nonadaptive_test(d, 2, Rat(1, 5)).queries == 6803);
}

TEST_CASE("non-adaptive runs expose a coherent plan") {
    auto p = four_far_atoms();
    OracleSession session(p, 11);
    auto run = run_nonadaptive_detailed(session, 2, Rat(1, 8));
    const auto& plan = run.plan;
    CHECK(plan.epsilon_hat == Rat(1, 8));
    CHECK(plan.top_level == 3);
    CHECK(plan.master.size() == plan.level_sizes.back());
    for (std::size_t a = 0; a + 1 < plan.level_sizes.size(); ++a)
        CHECK(plan.level_sizes[a] <= plan.level_sizes[a + 1]);
    for (auto j : plan.master) {
        CHECK(j >= 1);
        CHECK(j <= p.n());
    }
    CHECK(plan.sample_levels.at(plan.anchor) == plan.top_level);
    CHECK(plan.blocks.size() == std::size_t(plan.top_level) + 1);
    for (int a = 0; a <= plan.top_level; ++a) {
        CHECK(plan.blocks[std::size_t(a)].size() == 4); // 2m blocks
        for (const auto& block : plan.blocks[std::size_t(a)])
            for (auto h : block) CHECK(plan.sample_levels.at(h) == a);
    }
    // Every planned query is answered, and answers match the true draws.
    for (const auto& [handle, level] : plan.sample_levels) {
        auto truth = replay_draw(p, 11, handle);
        for (std::size_t pos = 0; pos < plan.level_size(level); ++pos) {
            std::uint32_t j = plan.master[pos];
            REQUIRE(run.answers.count({handle, j}) == 1);
            CHECK(run.answers.at({handle, j}) == truth.bit(j - 1));
        }
    }
    if (run.verdict.reject) {
        REQUIRE(run.composition.has_value());
        CHECK(run.composition->entries.size() == 3);
        CHECK(run.composition->entries[0].handle == plan.anchor);
    }
}

TEST_CASE("composition search agrees with brute force on crafted plans") {
    auto plan = small_plan();
    std::vector<SampleId> participants;
    for (const auto& [handle, level] : plan.sample_levels) participants.push_back(handle);

    auto fill = [&](RngStream& rng, bool biased) {
        AnswerMap answers;
        for (auto handle : participants) {
            std::size_t size = plan.level_size(plan.sample_levels.at(handle));
            for (std::size_t p = 0; p < size; ++p) {
                int bit = biased ? int(rng.below(16) == 0) : int(rng.bit());
                answers[{handle, plan.master[p]}] = bit;
            }
        }
        return answers;
    };

    RngStream rng(4242, "composition-trials", 0);
    int found = 0, absent = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto answers = fill(rng, trial % 2 == 0);
        auto result = find_distinguishable_composition(plan, answers, 2);
        CHECK(result.has_value() == exists_composition_brute(plan, answers, 2));
        if (!result.has_value()) { ++absent; continue; }
        ++found;
        const auto& entries = result->entries;
        REQUIRE(entries.size() == 3);
        CHECK(entries[0].handle == plan.anchor);
        CHECK(entries[0].level == plan.top_level);
        for (const auto& e : entries) CHECK(plan.sample_levels.at(e.handle) == e.level);
        for (std::size_t i = 0; i < entries.size(); ++i)
            for (std::size_t k = i + 1; k < entries.size(); ++k)
                CHECK(plan_adjacent(plan, answers, entries[i].handle, entries[k].handle));
        for (std::size_t i = 1; i + 1 < entries.size(); ++i)
            CHECK(entries[i].level >= entries[i + 1].level);
    }
    CHECK(found > 0);
    CHECK(absent > 0);

    // All samples answering alike can never split.
    AnswerMap flat;
    for (auto handle : participants) {
        std::size_t size = plan.level_size(plan.sample_levels.at(handle));
        for (std::size_t p = 0; p < size; ++p) flat[{handle, plan.master[p]}] = 0;
    }
    CHECK_FALSE(find_distinguishable_composition(plan, flat, 2).has_value());
}

TEST_CASE("adaptive tester delegates at the regime boundary") {
    auto p = four_far_atoms();
    // epsilon = 1/4 = 1/m^2 for m = 2, so the adaptive tester runs the
    // non-adaptive plan; under one seed the runs are identical.
    OracleSession left(p, 21), right(p, 21);
    auto adaptive = run_adaptive_test(left, 2, Rat(1, 4));
    auto nonadaptive = run_nonadaptive_test(right, 2, Rat(1, 4));
    CHECK(adaptive.reject == nonadaptive.reject);
    CHECK(adaptive.witness == nonadaptive.witness);
    CHECK(adaptive.queries == nonadaptive.queries);
    CHECK(adaptive.samples == nonadaptive.samples);
    CHECK(left.log().to_jsonl() == right.log().to_jsonl());
}

TEST_CASE("far distributions are rejected with checkable witnesses") {
    auto p = four_far_atoms();
    std::uint64_t m = 2;

    OracleSession na(p, 2);
    auto verdict = run_nonadaptive_test(na, m, Rat(1, 16));
    check_witness(verdict, na, p, m);
    auto json = verdict.to_json_string();
    CHECK(json.find("\"verdict\": \"reject\"") != std::string::npos);
    CHECK(json.find("\"clique\"") != std::string::npos);

    OracleSession ad(p, 2);
    auto averdict = run_adaptive_test(ad, m, Rat(1, 16));
    check_witness(averdict, ad, p, m);
    CHECK(averdict.queries == ad.queries_used());

    OracleSession base(p, 2);
    auto bverdict = run_baseline_test(base, m, Rat(1, 16));
    check_witness(bverdict, base, p, m);
}

TEST_CASE("supported distributions are never rejected") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto instance = gen_support_instance(3, 32, seed);
        const auto& p = instance.distribution;
        OracleSession na(p, seed), ad(p, seed), base(p, seed);
        CHECK_FALSE(run_nonadaptive_test(na, 3, Rat(1, 16)).reject);
        CHECK_FALSE(run_adaptive_test(ad, 3, Rat(1, 16)).reject);
        CHECK_FALSE(run_baseline_test(base, 3, Rat(1, 16)).reject);
    }
}

TEST_CASE("parameter guards on the tester entry points") {
    auto p = four_far_atoms();
    OracleSession session(p, 0);
    CHECK_THROWS_AS(run_nonadaptive_test(session, 1, Rat(1, 8)), ParameterRange);
    CHECK_THROWS_AS(run_nonadaptive_test(session, 2, Rat(1)), ParameterRange);
    CHECK_THROWS_AS(run_adaptive_test(session, 2, Rat(0)), ParameterRange);
    CHECK_THROWS_AS(run_adaptive_test(session, 1, Rat(1, 8)), ParameterRange);
    CHECK_THROWS_AS(run_baseline_test(session, 2, Rat(3, 2)), ParameterRange);
}
