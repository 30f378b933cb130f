#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "supplab/bitstring.hpp"
#include "supplab/distribution.hpp"
#include "supplab/errors.hpp"
#include "supplab/oracle.hpp"
#include "supplab/rng.hpp"
#include "supplab/witness.hpp"

using namespace supplab;

namespace {

QueryLog log_of(const std::vector<TranscriptEvent>& events) {
    QueryLog log;
    for (const auto& event : events) {
        if (event.kind == TranscriptEvent::Kind::Sample)
            log.record_sample(event.i);
        else
            log.record_query(event.i, event.j, event.answer);
    }
    return log;
}

QueryLog queries(const std::vector<std::tuple<SampleId, std::uint32_t, int>>& rows) {
    QueryLog log;
    SampleId top = 0;
    for (const auto& [i, j, a] : rows) top = std::max(top, i);
    for (SampleId i = 1; i <= top; ++i) log.record_sample(i);
    for (const auto& [i, j, a] : rows) log.record_query(i, j, a);
    return log;
}

} // namespace

TEST_CASE("agreeing samples give an edgeless graph") {
    auto graph = build_contradiction_graph(
        queries({{1, 1, 0}, {1, 2, 1}, {2, 1, 0}, {2, 2, 1}, {3, 3, 0}}));
    CHECK(graph.vertices().size() == 3);
    CHECK(graph.edges().empty());
    CHECK_FALSE(graph.certificate(1, 2).has_value());
    CHECK_FALSE(graph.certifies_clique({1, 2}));
}

TEST_CASE("one disagreement makes one certified edge") {
    auto graph = build_contradiction_graph(queries({{1, 4, 0}, {2, 4, 1}}));
    auto edges = graph.edges();
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].a == 1);
    CHECK(edges[0].b == 2);
    CHECK(edges[0].certificate == 4);
    CHECK(graph.certificate(1, 2) == 4);
    CHECK(graph.certificate(2, 1) == 4);
    CHECK(graph.certifies_clique({1, 2}));
}

TEST_CASE("certificate picks the smallest differing index") {
    auto graph = build_contradiction_graph(
        queries({{1, 2, 0}, {2, 2, 0}, {1, 5, 1}, {2, 5, 0}, {1, 7, 0}, {2, 7, 1}}));
    CHECK(graph.certificate(1, 2) == 5);
}

TEST_CASE("three mutually contradicting samples form a triangle") {
    // 00, 01, 10 on indices 1 and 2.
    auto graph = build_contradiction_graph(
        queries({{1, 1, 0}, {1, 2, 0}, {2, 1, 0}, {2, 2, 1}, {3, 1, 1}, {3, 2, 0}}));
    CHECK(graph.edges().size() == 3);
    CHECK(graph.certifies_clique({1, 2, 3}));
    CHECK(graph.certificate(1, 2) == 2);
    CHECK(graph.certificate(1, 3) == 1);
    CHECK(graph.certificate(2, 3) == 1);
    CHECK_FALSE(is_m_colorable(graph, 2).has_value());
    REQUIRE(is_m_colorable(graph, 3).has_value());
    auto clique = find_clique(graph, 3);
    REQUIRE(clique.has_value());
    CHECK(*clique == std::vector<SampleId>{1, 2, 3});
    CHECK_FALSE(find_clique(graph, 4).has_value());
}

TEST_CASE("clique lists must be distinct vertices") {
    auto graph = build_contradiction_graph(queries({{1, 1, 0}, {2, 1, 1}}));
    CHECK_FALSE(graph.certifies_clique({1, 1}));
    CHECK(graph.certifies_clique({1, 2}));
}

TEST_CASE("inconsistent transcripts are rejected") {
    auto log = queries({{1, 3, 0}, {1, 3, 1}});
    CHECK_THROWS_AS(build_contradiction_graph(log), std::invalid_argument);
    // A query without a preceding sample event still names a vertex.
    auto orphan = log_of({{TranscriptEvent::Kind::Query, 1, 1, 0}});
    CHECK(build_contradiction_graph(orphan).vertices().size() == 1);
}

TEST_CASE("repeated consistent queries collapse to one entry") {
    auto graph = build_contradiction_graph(queries({{1, 2, 1}, {1, 2, 1}, {2, 2, 0}}));
    CHECK(graph.answers_of(1).size() == 1);
    CHECK(edge_cover_capacity(graph) == 2);
    CHECK_THROWS_AS(graph.answers_of(7), std::invalid_argument);
}

TEST_CASE("coloring decisions on small graphs") {
    auto empty = build_contradiction_graph(QueryLog{});
    CHECK(empty.vertices().empty());
    CHECK(is_m_colorable(empty, 1).has_value());
    CHECK(edge_cover_capacity(empty) == 0);

    // Path 1-2-3 is 2-colorable but not 1-colorable.
    auto path = build_contradiction_graph(
        queries({{1, 1, 0}, {2, 1, 1}, {2, 2, 0}, {3, 2, 1}}));
    CHECK_FALSE(is_m_colorable(path, 1).has_value());
    auto coloring = is_m_colorable(path, 2);
    REQUIRE(coloring.has_value());
    CHECK(coloring->at(1) != coloring->at(2));
    CHECK(coloring->at(2) != coloring->at(3));
    CHECK_FALSE(find_clique(path, 3).has_value());
    REQUIRE(find_clique(path, 2).has_value());
}

TEST_CASE("colorings found on random transcripts are proper and tight") {
    RngStream rng(77, "witness-random", 0);
    for (int trial = 0; trial < 30; ++trial) {
        QueryLog log;
        int samples = 2 + int(rng.below(5));
        for (SampleId i = 1; i <= SampleId(samples); ++i) log.record_sample(i);
        for (SampleId i = 1; i <= SampleId(samples); ++i)
            for (std::uint32_t j = 1; j <= 4; ++j)
                if (rng.bit()) log.record_query(i, j, int(rng.bit()));
        auto graph = build_contradiction_graph(log);
        auto edges = graph.edges();
        for (const auto& e : edges) {
            CHECK(e.a < e.b);
            CHECK(graph.certificate(e.a, e.b) == e.certificate);
        }
        for (int m = 1; m <= samples; ++m) {
            auto coloring = is_m_colorable(graph, m);
            bool clique_blocks = find_clique(graph, std::size_t(m) + 1).has_value();
            if (coloring.has_value()) {
                for (const auto& e : edges) CHECK(coloring->at(e.a) != coloring->at(e.b));
                CHECK_FALSE(clique_blocks);
            }
            if (clique_blocks) CHECK_FALSE(coloring.has_value());
        }
    }
}

TEST_CASE("capacity counts distinct queried pairs") {
    auto graph = build_contradiction_graph(
        queries({{1, 1, 0}, {1, 2, 0}, {1, 3, 0}, {2, 1, 1}, {2, 2, 1}, {2, 3, 1}}));
    CHECK(edge_cover_capacity(graph) == 6);
    CHECK(graph.groups().size() == 3);
    for (const auto& [index, group] : graph.groups()) {
        CHECK(group.zero_side == std::vector<SampleId>{1});
        CHECK(group.one_side == std::vector<SampleId>{2});
    }
}

TEST_CASE("capacity bound holds exactly at the two sample boundary") {
    // m = 1: two samples disagreeing at one index. Capacity 2 equals
    // (m+1) log2(m+1) = 2, so the bound holds with no slack.
    auto graph = build_contradiction_graph(queries({{1, 6, 0}, {2, 6, 1}}));
    auto check = check_hansel_bound(graph, 1);
    CHECK_FALSE(check.colorable);
    CHECK(check.capacity == 2);
    CHECK(check.bound == doctest::Approx(2.0));
    CHECK(check.holds);
}

TEST_CASE("capacity bound is vacuous for colorable graphs") {
    auto graph = build_contradiction_graph(queries({{1, 1, 0}, {2, 1, 1}}));
    auto check = check_hansel_bound(graph, 2);
    CHECK(check.colorable);
    CHECK(check.holds);
}

TEST_CASE("session transcripts feed the graph directly") {
    auto p = DistributionSpec::uniform_on(
        {BitString::from_string("000"), BitString::from_string("110"),
         BitString::from_string("011")});
    OracleSession session(p, 99);
    for (int i = 0; i < 6; ++i) session.draw_sample();
    for (SampleId i = 1; i <= 6; ++i)
        for (std::uint32_t j = 1; j <= 3; ++j) session.query(i, j);
    auto graph = build_contradiction_graph(session.log());
    CHECK(graph.vertices().size() == 6);
    // Answers recorded for a handle match the replayed draw.
    for (SampleId i = 1; i <= 6; ++i) {
        auto truth = replay_draw(p, 99, i);
        for (const auto& [j, a] : graph.answers_of(i)) CHECK(a == truth.bit(j - 1));
    }
}

TEST_CASE("graph json names vertices and certificates") {
    auto graph = build_contradiction_graph(queries({{1, 2, 0}, {2, 2, 1}}));
    auto text = graph.to_json_string();
    CHECK(text.find("\"vertices\"") != std::string::npos);
    CHECK(text.find("\"edges\"") != std::string::npos);
    CHECK(text.find("\"j\": 2") != std::string::npos);
}
