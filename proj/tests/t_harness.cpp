#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "supplab/bitstring.hpp"
#include "supplab/distances.hpp"
#include "supplab/distribution.hpp"
#include "supplab/errors.hpp"
#include "supplab/harness.hpp"

using namespace supplab;

namespace {

ExperimentConfig support_config() {
    ExperimentConfig config;
    config.families = {"support"};
    config.m_grid = {2, 3};
    config.epsilon_grid = {Rat(1, 8)};
    config.n_grid = {32};
    config.testers = {"nonadaptive", "baseline"};
    config.seed_count = 2;
    return config;
}

std::size_t line_count(const std::string& text) {
    std::size_t count = 0;
    for (char c : text) count += (c == '\n');
    return count;
}

} // namespace

TEST_CASE("empty grids make a header-only csv") {
    ExperimentConfig config;
    config.validate();
    auto rows = run_campaign(config);
    CHECK(rows.empty());
    CHECK(campaign_csv(rows) == ResultRow::csv_header() + "\n");
}

TEST_CASE("supported instances never reject across the grid") {
    auto rows = run_campaign(support_config());
    CHECK(rows.size() == 2 * 2 * 2); // m x seed x tester
    for (const auto& row : rows) {
        CHECK(row.verdict == "accept");
        CHECK(row.witness_valid == "na");
        CHECK(row.error.empty());
        CHECK(row.queries_used > 0);
        CHECK(row.wall_time_ms == 0);
        CHECK(row.t == 0);
    }
}

TEST_CASE("campaigns are byte identical across reruns and thread counts") {
    auto config = support_config();
    auto first = campaign_csv(run_campaign(config));
    auto second = campaign_csv(run_campaign(config));
    CHECK(first == second);
    config.threads = 4;
    auto threaded = campaign_csv(run_campaign(config));
    CHECK(first == threaded);
    CHECK(line_count(first) == 9);
}

TEST_CASE("far cells reject with verified witnesses and distances") {
    ExperimentConfig config;
    config.families = {"dno"};
    config.m_grid = {2};
    config.epsilon_grid = {Rat(1, 32)};
    config.n_grid = {512};
    config.testers = {"adaptive"};
    config.seed_count = 6;
    auto rows = run_campaign(config);
    CHECK(rows.size() == 6);
    int rejects = 0;
    for (const auto& row : rows) {
        CHECK(row.t == 4);
        CHECK(row.error.empty());
        if (row.verdict != "reject") continue;
        ++rejects;
        CHECK(row.witness_valid == "true");
        CHECK(row.verified_distance != "na");
        CHECK(row.verified_distance != "unverified");
        CHECK(parse_rational(row.verified_distance) > Rat(1, 32));
    }
    CHECK(rejects >= 4);
}

TEST_CASE("generation failures become error rows and the campaign continues") {
    ExperimentConfig config;
    config.families = {"secret", "support"};
    config.m_grid = {4}; // secret needs m divisible by 3
    config.epsilon_grid = {Rat(1, 16)};
    config.n_grid = {32};
    config.testers = {"baseline"};
    config.seed_count = 1;
    auto rows = run_campaign(config);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].family == "secret");
    CHECK(rows[0].verdict == "error");
    CHECK_FALSE(rows[0].error.empty());
    CHECK(rows[0].verified_distance == "na");
    CHECK(rows[1].family == "support");
    CHECK(rows[1].verdict == "accept");
}

TEST_CASE("query budgets surface as error rows") {
    ExperimentConfig config;
    config.families = {"support"};
    config.m_grid = {2};
    config.epsilon_grid = {Rat(1, 8)};
    config.n_grid = {32};
    config.testers = {"nonadaptive"};
    config.max_queries = 10; // far below the plan size
    auto rows = run_campaign(config);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].verdict == "error");
    CHECK(rows[0].error.find("budget") != std::string::npos);
}

TEST_CASE("config json round trips and rejects junk") {
    auto config = support_config();
    config.base_seed = 77;
    config.epsilon_grid = {Rat(1, 8), Rat(3, 32)};
    auto text = config.to_json_string();
    auto back = ExperimentConfig::from_json_string(text);
    CHECK(back.to_json_string() == text);
    CHECK(back.epsilon_grid == config.epsilon_grid);
    CHECK(back.base_seed == 77);

    CHECK_THROWS_AS(ExperimentConfig::from_json_string("{\"familes\": []}"),
                    ParameterRange);
    CHECK_THROWS_AS(ExperimentConfig::from_json_string("not json"), ParameterRange);
    CHECK_THROWS_AS(ExperimentConfig::from_json_string(
                        "{\"epsilon\": [0.125]}"), ParameterRange);

    auto bad_tester = support_config();
    bad_tester.testers = {"psychic"};
    CHECK_THROWS_AS(bad_tester.validate(), ParameterRange);
    auto bad_eps = support_config();
    bad_eps.epsilon_grid = {Rat(2)};
    CHECK_THROWS_AS(bad_eps.validate(), ParameterRange);
    auto no_seeds = support_config();
    no_seeds.seed_count = 0;
    CHECK_THROWS_AS(no_seeds.validate(), ParameterRange);
}

TEST_CASE("csv rows quote nothing and keep the column count") {
    auto rows = run_campaign(support_config());
    auto header = ResultRow::csv_header();
    auto header_commas = std::count(header.begin(), header.end(), ',');
    for (const auto& row : rows) {
        auto text = row.csv_row();
        CHECK(std::count(text.begin(), text.end(), ',') == header_commas);
        CHECK(text.find('\n') == std::string::npos);
    }
}

TEST_CASE("scaling tables aggregate and sort numerically") {
    std::vector<ResultRow> rows;
    for (std::uint64_t m : {10, 2, 3}) {
        for (int i = 0; i < 4; ++i) {
            ResultRow row;
            row.family = "support";
            row.m = m;
            row.epsilon = Rat(1, 8);
            row.n = 32;
            row.tester = "nonadaptive";
            row.verdict = (m == 2 && i == 0) ? "reject" : "accept";
            row.queries_used = 100 * m + std::uint64_t(i);
            row.samples_used = 10;
            rows.push_back(row);
        }
    }
    auto table = scaling_table(rows, {"m"});
    // Numeric group order: 2, 3, 10.
    auto p2 = table.find("\n2,");
    auto p3 = table.find("\n3,");
    auto p10 = table.find("\n10,");
    REQUIRE(p2 != std::string::npos);
    REQUIRE(p3 != std::string::npos);
    REQUIRE(p10 != std::string::npos);
    CHECK(p2 < p3);
    CHECK(p3 < p10);
    CHECK(table.find("rejection_rate") != std::string::npos);
    // Group m=2: 4 rows, 1 rejection.
    CHECK(table.find("\n2,4,0,1,0.25") != std::string::npos);

    CHECK_THROWS_AS(scaling_table({}, {"m"}), ParameterRange);
    CHECK_THROWS_AS(scaling_table(rows, {"m", "m"}), ParameterRange);
    CHECK_THROWS_AS(scaling_table(rows, {"verdict"}), ParameterRange);
}

TEST_CASE("scaling tables write na for all-error groups") {
    ResultRow row;
    row.family = "secret";
    row.m = 4;
    row.epsilon = Rat(1, 8);
    row.n = 32;
    row.tester = "baseline";
    row.verdict = "error";
    row.error = "generation failed";
    auto table = scaling_table({row}, {"family"});
    CHECK(table.find("secret,1,1,0,na,na,na,na,na,na") != std::string::npos);
}

TEST_CASE("wilson intervals bracket the observed rate") {
    auto mid = wilson_interval(200, 300);
    CHECK(mid.low > 0.61);
    CHECK(mid.low < 2.0 / 3.0);
    CHECK(mid.high > 2.0 / 3.0);
    CHECK(mid.high < 0.72);
    auto none = wilson_interval(0, 50);
    CHECK(none.low == 0.0);
    CHECK(none.high > 0.0);
    CHECK(none.high < 0.15);
    auto all = wilson_interval(50, 50);
    CHECK(all.low > 0.9);
    CHECK(all.high == 1.0);
    CHECK_THROWS_AS(wilson_interval(1, 0), ParameterRange);
    CHECK_THROWS_AS(wilson_interval(5, 4), ParameterRange);
}

TEST_CASE("support instances respect their parameters") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto inst = gen_support_instance(4, 16, seed);
        CHECK(inst.family == "support");
        CHECK(inst.distribution.n() == 16);
        CHECK(inst.distribution.atoms().size() >= 1);
        CHECK(inst.distribution.atoms().size() <= 4);
        CHECK_FALSE(inst.claim.has_value());
        // Exact distance to the size-m class is zero by construction.
        CHECK(distance_to_support_m(inst.distribution, 4).value == Rat(0));
    }
    // Tiny ambient spaces cap the support size.
    auto tiny = gen_support_instance(10, 2, 3);
    CHECK(tiny.distribution.atoms().size() <= 4);
}

TEST_CASE("family dispatch wires parameters through") {
    auto dno = gen_family_instance("dno", 2, Rat(1, 32), 256, 0, 5);
    CHECK(dno.family == "dno");
    CHECK(dno.indicator_sets.size() == 4); // t defaults to 2m
    auto anchor = gen_family_instance("anchor", 2, Rat(1, 40), 64, 0, 5);
    CHECK(anchor.family == "anchor");
    CHECK(anchor.distribution.atoms().size() <= 5);
    auto secret = gen_family_instance("secret", 3, Rat(1, 16), 32, 0, 5);
    CHECK(secret.family == "secret");
    CHECK(secret.distribution.n() == 32);
    CHECK(secret.lift_factor == 2);
    CHECK(secret.distribution.atoms().size() == 4);

    CHECK_THROWS_AS(gen_family_instance("secret", 4, Rat(1, 16), 32, 0, 0),
                    ParameterRange);
    CHECK_THROWS_AS(gen_family_instance("secret", 9, Rat(1, 16), 32, 0, 0),
                    ParameterRange);
    CHECK_THROWS_AS(gen_family_instance("secret", 3, Rat(1, 16), 24, 0, 0),
                    ParameterRange);
    CHECK_THROWS_AS(gen_family_instance("mystery", 2, Rat(1, 16), 32, 0, 0),
                    ParameterRange);
}

TEST_CASE("composition diagnostics on a point mass stay at the anchor") {
    auto p = DistributionSpec::point_mass(BitString::from_string("0101010101010101"));
    auto report = diagnose_compositions(p, 3, 2, Rat(1, 8));
    CHECK(report.max_length == 1);
    CHECK(report.max_rank_length == 1);
    CHECK(report.levels.empty());
    REQUIRE(report.values.size() == 1);
    CHECK(report.values[0].second == 3); // anchor at the top level
    CHECK_FALSE(report.full_composition_exists);
    CHECK(report.bad_event);
}

TEST_CASE("composition diagnostics find full chains over far atoms") {
    std::string a(64, '0'), b(64, '1'), c;
    for (int i = 0; i < 32; ++i) c += "01";
    auto p = DistributionSpec::uniform_on(
        {BitString::from_string(a), BitString::from_string(b),
         BitString::from_string(c)});
    int full = 0, bad = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto report = diagnose_compositions(p, seed, 2, Rat(1, 8));
        if (report.full_composition_exists) ++full;
        if (report.bad_event) ++bad;
        CHECK(report.values.size() == report.max_rank_length);
        CHECK(report.levels.size() + 1 == report.max_rank_length);
        // Levels nonincreasing, bounded by the top level.
        int prev = report.values[0].second;
        for (std::size_t i = 1; i < report.values.size(); ++i) {
            CHECK(report.values[i].second <= prev);
            prev = report.values[i].second;
        }
        // Soundness of the reported chain: true distances clear each join bar.
        for (std::size_t i = 0; i < report.values.size(); ++i)
            for (std::size_t k = i + 1; k < report.values.size(); ++k) {
                int level = report.values[k].second;
                Rat bar(1, BigInt(1) << (level + 1));
                CHECK(hamming_distance(report.values[i].first,
                                       report.values[k].first) > bar);
            }
    }
    CHECK(full == 20);
    CHECK(bad == 0);
}

TEST_CASE("composition diagnostics refuse oversized searches") {
    auto p = DistributionSpec::point_mass(BitString::from_string("01"));
    CHECK_THROWS_AS(diagnose_compositions(p, 0, 7, Rat(1, 8)), ScaleExceeded);
}
