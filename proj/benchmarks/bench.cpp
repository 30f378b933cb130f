// Wall-clock benchmarks for the tester pipelines and their helpers. The
// "queries" and "samples" counters carry the oracle cost of the last
// iteration, so a run doubles as a quick query-complexity table:
//
//   supplab_bench --benchmark_counters_tabular=true

#include <benchmark/benchmark.h>

#include <cstdint>

#include "supplab/distances.hpp"
#include "supplab/distribution.hpp"
#include "supplab/fishing.hpp"
#include "supplab/harness.hpp"
#include "supplab/oracle.hpp"
#include "supplab/rng.hpp"
#include "supplab/testers.hpp"
#include "supplab/witness.hpp"

using namespace supplab;

namespace {

DistributionSpec far_instance(std::uint64_t m, int inv_eps, std::uint32_t n) {
    return gen_family_instance("dno", m, Rat(1, inv_eps), n, 0, 2026).distribution;
}

DistributionSpec near_instance(std::uint64_t m, std::uint32_t n) {
    return gen_support_instance(m, n, 2026).distribution;
}

void run_one(benchmark::State& state, const std::string& tester,
             const DistributionSpec& dist) {
    std::uint64_t m = std::uint64_t(state.range(0));
    Rat epsilon(1, int(state.range(1)));
    std::uint64_t seed = 0, queries = 0, samples = 0;
    for (auto _ : state) {
        OracleSession session(dist, ++seed);
        TesterVerdict verdict = tester == "nonadaptive"
                                    ? run_nonadaptive_test(session, m, epsilon)
                                    : tester == "adaptive"
                                          ? run_adaptive_test(session, m, epsilon)
                                          : run_baseline_test(session, m, epsilon);
        queries = verdict.queries;
        samples = verdict.samples;
        benchmark::DoNotOptimize(verdict.reject);
    }
    state.counters["queries"] = double(queries);
    state.counters["samples"] = double(samples);
}

void BM_NonadaptiveFar(benchmark::State& state) {
    auto dist = far_instance(std::uint64_t(state.range(0)), int(state.range(1)), 256);
    run_one(state, "nonadaptive", dist);
}
BENCHMARK(BM_NonadaptiveFar)->Args({2, 16})->Args({2, 32})->Args({4, 32})->Args({8, 32});

void BM_AdaptiveFar(benchmark::State& state) {
    auto dist = far_instance(std::uint64_t(state.range(0)), int(state.range(1)), 256);
    run_one(state, "adaptive", dist);
}
BENCHMARK(BM_AdaptiveFar)->Args({2, 16})->Args({2, 32})->Args({4, 32})->Args({8, 32});

void BM_BaselineFar(benchmark::State& state) {
    auto dist = far_instance(std::uint64_t(state.range(0)), int(state.range(1)), 256);
    run_one(state, "baseline", dist);
}
BENCHMARK(BM_BaselineFar)->Args({2, 16})->Args({2, 32})->Args({4, 32})->Args({8, 32});

// The accepting path runs every phase in full, so it is the cost ceiling.
void BM_NonadaptiveNear(benchmark::State& state) {
    auto dist = near_instance(std::uint64_t(state.range(0)), 256);
    run_one(state, "nonadaptive", dist);
}
BENCHMARK(BM_NonadaptiveNear)->Args({2, 32})->Args({8, 32});

void BM_AdaptiveNear(benchmark::State& state) {
    auto dist = near_instance(std::uint64_t(state.range(0)), 256);
    run_one(state, "adaptive", dist);
}
BENCHMARK(BM_AdaptiveNear)->Args({2, 32})->Args({8, 32});

// Exact transport distance to the best m-point support.
void BM_ExactDistance(benchmark::State& state) {
    RngStream rng(7, "bench-distance", std::uint64_t(state.range(0)));
    std::uint32_t n = 48;
    std::vector<BitString> strings;
    for (int i = 0; i < int(state.range(0)); ++i) {
        BitString s(n);
        for (std::uint32_t j = 0; j < n; ++j) s.set_bit(j, int(rng.bit()));
        strings.push_back(s);
    }
    auto dist = DistributionSpec::uniform_on(strings);
    int m = int(state.range(1));
    for (auto _ : state) {
        auto result = distance_to_support_m(dist, m);
        benchmark::DoNotOptimize(result.value);
    }
}
BENCHMARK(BM_ExactDistance)->Args({6, 2})->Args({9, 3})->Args({12, 4});

// Witness extraction from a rejecting transcript: graph build, clique
// search and the capacity bound check.
void BM_WitnessPipeline(benchmark::State& state) {
    std::uint64_t m = std::uint64_t(state.range(0));
    auto dist = far_instance(m, 16, 256);
    OracleSession session(dist, 5);
    auto verdict = run_adaptive_test(session, m, Rat(1, 16));
    if (!verdict.reject) state.SkipWithError("expected a rejection");
    const auto log = session.log();
    for (auto _ : state) {
        auto graph = build_contradiction_graph(log);
        auto clique = find_clique(graph, std::size_t(m) + 1);
        auto hansel = check_hansel_bound(graph, int(m));
        benchmark::DoNotOptimize(clique.has_value());
        benchmark::DoNotOptimize(hansel.holds);
    }
}
BENCHMARK(BM_WitnessPipeline)->Arg(2)->Arg(3)->Arg(8);

// The repeat-until-enough-successes loop at its futility-heavy worst.
void BM_FishingFutility(benchmark::State& state) {
    FishingParams params{std::uint64_t(state.range(0)), Rat(1, 3), Rat(1, 8)};
    RngStream rng(7, "bench-fishing", std::uint64_t(state.range(0)));
    for (auto _ : state) {
        auto outcome = run_fishing(params, [&] { return rng.below(12) == 0 ? 1 : 0; });
        benchmark::DoNotOptimize(outcome.executions);
    }
}
BENCHMARK(BM_FishingFutility)->Arg(4)->Arg(32);

} // namespace

BENCHMARK_MAIN();
