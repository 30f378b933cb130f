#include <doctest.h>

#include <cstdint>
#include <vector>

#include "supplab/errors.hpp"
#include "supplab/fishing.hpp"
#include "supplab/rng.hpp"

using namespace supplab;

TEST_CASE("parameter validation") {
    FishingParams ok{4, Rat(1, 3), Rat(1, 8)};
    ok.validate();
    CHECK_THROWS_AS((FishingParams{0, Rat(1, 3), Rat(1, 8)}.validate()), ParameterRange);
    CHECK_THROWS_AS((FishingParams{4, Rat(0), Rat(1, 8)}.validate()), ParameterRange);
    CHECK_THROWS_AS((FishingParams{4, Rat(3, 2), Rat(1, 8)}.validate()), ParameterRange);
    CHECK_THROWS_AS((FishingParams{4, Rat(1, 3), Rat(1)}.validate()), ParameterRange);
    CHECK_THROWS_AS((FishingParams{4, Rat(1, 3), Rat(0)}.validate()), ParameterRange);
}

TEST_CASE("worked schedule for goal 4") {
    // goal 4, threshold 1/3, confidence 1/8: both review counts come to 69.
    FishingParams params{4, Rat(1, 3), Rat(1, 8)};
    auto schedule = checkpoint_schedule(params);
    REQUIRE(schedule.size() == 2);
    CHECK(schedule[0].t == 2);
    CHECK(schedule[0].count == 69);
    CHECK(schedule[1].t == 3);
    CHECK(schedule[1].count == 69);
}

TEST_CASE("goal 1 keeps a single review point") {
    FishingParams params{1, Rat(1, 2), Rat(1, 4)};
    auto schedule = checkpoint_schedule(params);
    REQUIRE(schedule.size() == 1);
    CHECK(schedule[0].t == 2);
    CHECK(schedule[0].count >= 8); // at least 2^2 / threshold
}

TEST_CASE("schedule counts never more than double") {
    std::vector<FishingParams> configs = {
        {64, Rat(1, 5), Rat(1, 16)},
        {1000, Rat(1, 2), Rat(1, 3)},
        {17, Rat(2, 7), Rat(1, 100)},
        {256, Rat(1, 64), Rat(1, 2)},
    };
    for (const auto& params : configs) {
        auto schedule = checkpoint_schedule(params);
        for (std::size_t i = 0; i < schedule.size(); ++i) {
            CHECK(schedule[i].count >= 1);
            if (i > 0) {
                CHECK(schedule[i].t == schedule[i - 1].t + 1);
                CHECK(schedule[i].count >= schedule[i - 1].count);
                CHECK(schedule[i].count <= 2 * schedule[i - 1].count + 1);
            }
        }
    }
}

TEST_CASE("certain success stops at the goal") {
    FishingParams params{5, Rat(1, 2), Rat(1, 8)};
    auto outcome = run_fishing(params, [] { return 1; });
    CHECK(outcome.executions == 5);
    CHECK(outcome.successes == 5);
    CHECK(outcome.stop_reason == StopReason::GoalReached);
    CHECK_FALSE(outcome.forced_final_stop);
    CHECK(outcome.results == std::vector<int>(5, 1));
}

TEST_CASE("certain failure stops at the first review") {
    FishingParams params{4, Rat(1, 3), Rat(1, 8)};
    auto outcome = run_fishing(params, [] { return 0; });
    CHECK(outcome.executions == 69);
    CHECK(outcome.successes == 0);
    CHECK(outcome.stop_reason == StopReason::Futility);
    CHECK_FALSE(outcome.forced_final_stop);
}

TEST_CASE("nonzero results count as successes") {
    FishingParams params{3, Rat(1, 2), Rat(1, 4)};
    int calls = 0;
    auto outcome = run_fishing(params, [&] { return ++calls % 2 == 0 ? calls : 0; });
    CHECK(outcome.successes == 3);
    CHECK(outcome.stop_reason == StopReason::GoalReached);
    CHECK(outcome.executions == 6);
    CHECK(outcome.results.back() == 6);
}

TEST_CASE("termination bound on hand values") {
    FishingParams params{4, Rat(1, 3), Rat(1, 8)};
    CHECK(termination_bound_holds(params, 69, 0));
    CHECK(termination_bound_holds(params, 1, 0));
    CHECK_FALSE(termination_bound_holds(params, 100000, 4));
}

TEST_CASE("every run stays within the termination bound") {
    RngStream rng(5, "fishing-runs", 0);
    for (int trial = 0; trial < 400; ++trial) {
        FishingParams params;
        params.goal = 1 + rng.below(32);
        params.threshold = Rat(1, BigInt(1 + rng.below(10)));
        params.confidence = Rat(1, BigInt(2 + rng.below(30)));
        // Success chance at, above, or below the tuned threshold.
        Rat actual = params.threshold * Rat(BigInt(1 + rng.below(3)), 2);
        if (actual > Rat(1)) actual = Rat(1);
        double rate = actual.numerator().convert_to<double>() / actual.denominator().convert_to<double>();
        auto cut = std::uint64_t(rate * 18446744073709551615.0);
        auto outcome = run_fishing(params, [&] { return rng.below_threshold(cut) ? 1 : 0; });
        CHECK(termination_bound_holds(params, outcome.executions, outcome.successes));
        CHECK(outcome.successes <= params.goal);
        if (outcome.stop_reason == StopReason::GoalReached) CHECK(outcome.successes == params.goal);
        if (!final_checkpoint_decisive(params)) continue;
        CHECK_FALSE(outcome.forced_final_stop);
    }
}

TEST_CASE("decisive final checkpoints exist and fail to exist") {
    // goal 4, threshold 1/3: last review count 69 with futility bar
    // 69/6 > 3 = goal - 1, so the final review always decides.
    CHECK(final_checkpoint_decisive({4, Rat(1, 3), Rat(1, 8)}));
    // A huge goal with an early final review leaves a gap.
    CHECK_FALSE(final_checkpoint_decisive({1000000, Rat(1), Rat(1, 2)}));
}

TEST_CASE("futility bar is half the tuned rate") {
    // threshold 1/2, first review at N_2: success count N_2/4 or more survives.
    FishingParams params{1000000000, Rat(1, 2), Rat(1, 2)};
    auto schedule = checkpoint_schedule(params);
    std::uint64_t first = schedule[0].count;
    std::uint64_t bar = first / 4; // threshold * count / 2
    // Subroutine succeeding exactly bar times in the first block survives
    // review 1 iff bar >= threshold * count / 2.
    std::uint64_t calls = 0;
    auto outcome = run_fishing(params, [&] { return ++calls <= bar ? 1 : 0; });
    bool survived_first = outcome.executions > first;
    CHECK(survived_first == (Rat(BigInt(bar)) >= params.threshold * Rat(BigInt(first)) / 2));
}

TEST_CASE("low success rates stop early with high probability") {
    // Tuned for 1/3 but the true rate is 1/20; with confidence 1/8 at most
    // a 1/8 chance per run of outliving futility plus slack for 200 runs.
    FishingParams params{64, Rat(1, 3), Rat(1, 8)};
    RngStream rng(31, "fishing-mc", 0);
    int futile = 0;
    for (int run = 0; run < 200; ++run) {
        auto outcome = run_fishing(params, [&] { return rng.below(20) == 0 ? 1 : 0; });
        if (outcome.stop_reason == StopReason::Futility) ++futile;
    }
    CHECK(futile >= 150);
}

TEST_CASE("healthy success rates usually reach the goal") {
    // True rate equals the tuned threshold; failure chance per run is at most
    // the confidence budget 1/8, so 200 runs should mostly succeed.
    FishingParams params{16, Rat(1, 3), Rat(1, 8)};
    RngStream rng(32, "fishing-mc", 1);
    int reached = 0;
    for (int run = 0; run < 200; ++run) {
        auto outcome = run_fishing(params, [&] { return rng.below(3) == 0 ? 1 : 0; });
        if (outcome.stop_reason == StopReason::GoalReached) ++reached;
    }
    CHECK(reached >= 150);
}
