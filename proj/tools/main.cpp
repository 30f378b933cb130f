// supplab: support-size testing lab over fixed-length bitstrings.
//
// Subcommands: gen, test, campaign, verify-witness, validate-bounds.
// Exit codes: 0 completed, 1 usage or parameter error, 2 internal invariant
// violation.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "supplab/adversary.hpp"
#include "supplab/distribution.hpp"
#include "supplab/errors.hpp"
#include "supplab/harness.hpp"
#include "supplab/oracle.hpp"
#include "supplab/probbounds.hpp"
#include "supplab/rational.hpp"
#include "supplab/testers.hpp"
#include "supplab/witness.hpp"

namespace {

using namespace supplab;

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterRange("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterRange("cannot open " + path + " for writing");
    out << content;
}

struct GenArgs {
    std::string family;
    std::uint64_t m = 2;
    std::string eps = "1/16";
    std::uint64_t t = 0;
    std::uint32_t n = 64;
    std::uint64_t seed = 0;
    std::string out = "-";
    std::string meta;
};

int run_gen(const GenArgs& args) {
    Rat epsilon = args.family == "support" ? Rat(1, 16) : parse_rational(args.eps);
    auto inst = gen_family_instance(args.family, args.m, epsilon, args.n, args.t, args.seed);
    verify_farness(inst);
    write_file(args.out, inst.distribution.to_json_string() + "\n");
    if (!args.meta.empty()) write_file(args.meta, inst.metadata_json() + "\n");
    return 0;
}

struct TestArgs {
    std::string in;
    std::uint64_t m = 0;
    std::string eps;
    std::string tester;
    std::uint64_t seed = 0;
    std::uint64_t max_queries = 0;
    std::uint64_t max_samples = 0;
    std::string transcript;
};

int run_test(const TestArgs& args) {
    auto dist = DistributionSpec::from_json_string(read_file(args.in));
    SessionBudgets budgets;
    if (args.max_queries > 0) budgets.max_queries = args.max_queries;
    if (args.max_samples > 0) budgets.max_samples = args.max_samples;
    OracleSession session(dist, args.seed, budgets);
    Rat epsilon = parse_rational(args.eps);
    TesterVerdict verdict;
    if (args.tester == "nonadaptive")
        verdict = run_nonadaptive_test(session, args.m, epsilon);
    else if (args.tester == "adaptive")
        verdict = run_adaptive_test(session, args.m, epsilon);
    else
        verdict = run_baseline_test(session, args.m, epsilon);
    if (verdict.reject) {
        auto graph = build_contradiction_graph(session.log());
        if (verdict.witness.size() != args.m + 1 || !graph.certifies_clique(verdict.witness))
            throw std::logic_error("rejection without a verified (m+1)-clique witness");
    }
    if (!args.transcript.empty()) write_file(args.transcript, session.log().to_jsonl());
    std::cout << verdict.to_json_string() << "\n";
    return 0;
}

int run_campaign_cmd(const std::string& config_path, const std::string& out_override) {
    auto config = ExperimentConfig::from_json_string(read_file(config_path));
    auto rows = run_campaign(config);
    std::string path = out_override.empty() ? config.csv_path : out_override;
    write_file(path, campaign_csv(rows));
    return 0;
}

int run_verify_witness(const std::string& transcript_path, std::uint64_t m) {
    auto log = QueryLog::from_jsonl_string(read_file(transcript_path));
    auto graph = build_contradiction_graph(log);
    auto clique = find_clique(graph, std::size_t(m) + 1);
    auto hansel = check_hansel_bound(graph, int(m));

    nlohmann::json doc;
    doc["m"] = m;
    doc["vertices"] = graph.vertices().size();
    doc["clique_found"] = clique.has_value();
    doc["clique"] = clique ? *clique : std::vector<SampleId>{};
    doc["capacity"] = hansel.capacity;
    doc["capacity_bound"] = hansel.bound;
    doc["capacity_holds"] = hansel.holds;
    doc["verdict"] = clique ? "reject-support-m" : "no-witness";
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int run_validate_bounds(std::uint64_t trials, std::uint64_t seed) {
    auto reports = run_bound_validations(trials, seed);
    std::cout << TailBoundReport::csv_header() << "\n";
    bool violated = false;
    for (const auto& report : reports) {
        std::cout << report.csv_row() << "\n";
        violated |= report.violation();
    }

    // exact linearization 1 - (1-p)^k >= k p / 2, over the k p <= 1 grid
    std::uint64_t points = 0;
    bool linearization_ok = true;
    for (std::uint64_t q = 1; q <= 64; ++q)
        for (std::uint64_t k = 1; k <= q; ++k) {
            ++points;
            if (!exp_linearization_holds(Rat(1, BigInt(q)), k)) linearization_ok = false;
        }
    std::cout << "exp-linearization," << (linearization_ok ? "ok" : "violated") << " ("
              << points << " grid points)\n";

    if (violated || !linearization_ok) {
        std::cerr << "validate-bounds: bound violation detected\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"support-size testing lab for distributions over bitstrings"};
    app.require_subcommand(1);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "generate an instance and its metadata");
    gen->add_option("--family", gen_args.family, "support, dno, anchor or secret")
        ->required()
        ->check(CLI::IsMember({"support", "dno", "anchor", "secret"}));
    gen->add_option("--m", gen_args.m, "support size bound the instance targets");
    gen->add_option("--eps", gen_args.eps, "distance parameter, e.g. 1/16");
    gen->add_option("--t", gen_args.t, "dno only: indicator count (0 = 2m default)");
    gen->add_option("--n", gen_args.n, "string length");
    gen->add_option("--seed", gen_args.seed, "generator seed");
    gen->add_option("--out", gen_args.out, "distribution JSON path (- = stdout)");
    gen->add_option("--meta", gen_args.meta, "metadata JSON path");

    TestArgs test_args;
    auto* test = app.add_subcommand("test", "run one tester against one instance");
    test->add_option("--in", test_args.in, "distribution JSON path (- = stdin)")->required();
    test->add_option("--m", test_args.m, "support size bound under test")->required();
    test->add_option("--eps", test_args.eps, "distance parameter, e.g. 1/16")->required();
    test->add_option("--tester", test_args.tester, "nonadaptive, adaptive or baseline")
        ->required()
        ->check(CLI::IsMember({"nonadaptive", "adaptive", "baseline"}));
    test->add_option("--seed", test_args.seed, "session seed");
    test->add_option("--max-queries", test_args.max_queries, "query budget (0 = unlimited)");
    test->add_option("--max-samples", test_args.max_samples, "sample budget (0 = unlimited)");
    test->add_option("--transcript", test_args.transcript, "write the session transcript JSONL here");

    std::string campaign_config;
    std::string campaign_out;
    auto* campaign = app.add_subcommand("campaign", "run a config-driven experiment grid");
    campaign->add_option("--config", campaign_config, "campaign config JSON path")->required();
    campaign->add_option("--out", campaign_out, "CSV path override (- = stdout)");

    std::string witness_transcript;
    std::uint64_t witness_m = 0;
    auto* verify = app.add_subcommand("verify-witness",
                                      "check a transcript for an (m+1)-clique witness");
    verify->add_option("--transcript", witness_transcript, "transcript JSONL path (- = stdin)")
        ->required();
    verify->add_option("--m", witness_m, "support size bound the witness refutes")->required();

    std::uint64_t bounds_trials = 100000;
    std::uint64_t bounds_seed = 0;
    auto* bounds = app.add_subcommand("validate-bounds",
                                      "Monte-Carlo tail bound and linearization checks");
    bounds->add_option("--trials", bounds_trials, "trials per configuration");
    bounds->add_option("--seed", bounds_seed, "suite seed");

    try {
        app.parse(argc, argv);
        if (*gen) return run_gen(gen_args);
        if (*test) return run_test(test_args);
        if (*campaign) return run_campaign_cmd(campaign_config, campaign_out);
        if (*verify) return run_verify_witness(witness_transcript, witness_m);
        return run_validate_bounds(bounds_trials, bounds_seed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
