#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "supplab/adversary.hpp"
#include "supplab/bitstring.hpp"
#include "supplab/distribution.hpp"
#include "supplab/rational.hpp"

namespace supplab {

/// Grid-driven experiment description. The campaign runs every family x m x
/// epsilon x n (x t for the dno family) combination against every selected
/// tester for `seed_count` seeds. All grids may be empty, in which case the
/// campaign produces no rows; `validate` still rejects malformed entries and
/// a zero seed count.
struct ExperimentConfig {
  std::vector<std::string> families;   ///< "support", "dno", "anchor", "secret"
  std::vector<std::uint64_t> m_grid;
  std::vector<Rat> epsilon_grid;
  std::vector<std::uint64_t> t_grid;   ///< dno only; empty means t = 2m
  std::vector<std::uint32_t> n_grid;
  std::vector<std::string> testers;    ///< "nonadaptive", "adaptive", "baseline"
  std::uint64_t base_seed = 0;
  std::uint64_t seed_count = 1;
  std::uint64_t max_queries = 0;       ///< 0 = unlimited
  std::uint64_t max_samples = 0;       ///< 0 = unlimited
  unsigned threads = 1;
  bool timings = false;                ///< keep false for byte-identical reruns
  std::string csv_path;                ///< optional; used by the CLI, not by run_campaign

  void validate() const;
  static ExperimentConfig from_json_string(const std::string& text);
  std::string to_json_string(bool pretty = true) const;
};

/// One campaign result. `verdict` is "accept", "reject" or "error";
/// `witness_valid` is "true" on rejecting rows (enforced: a rejecting row
/// whose transcript fails the clique check is never written) and "na"
/// otherwise; `verified_distance` is the exact distance to the size-m support
/// class when the instance fits the oracle guard, else "unverified" ("na" on
/// error rows where no instance exists).
struct ResultRow {
  std::string family;
  std::uint64_t m = 0;
  Rat epsilon;
  std::uint32_t n = 0;
  std::uint64_t t = 0;                 ///< 0 outside the dno family
  std::uint64_t seed = 0;              ///< seed ordinal, 0 .. seed_count-1
  std::string tester;
  std::string verdict;
  std::uint64_t queries_used = 0;
  std::uint64_t samples_used = 0;
  std::string witness_valid;
  std::string verified_distance;
  std::uint64_t wall_time_ms = 0;
  std::string error;

  static std::string csv_header();
  std::string csv_row() const;
};

/// Runs the whole grid. Rows come back in deterministic enumeration order
/// (family, m, epsilon, n, t, seed, tester with tester innermost) regardless
/// of the worker count; the two testers of one cell-seed pair share the
/// sample stream because they share the instance seed. Domain errors during
/// generation or testing become error rows and the campaign continues; a
/// rejection whose witness fails verification is an internal invariant
/// violation and throws std::logic_error.
std::vector<ResultRow> run_campaign(const ExperimentConfig& config);

/// Fixed, versioned CSV encoding of the rows. Zero rows give a header-only
/// file. Equal configs give byte-identical output (timings off).
std::string campaign_csv(const std::vector<ResultRow>& rows);

/// In-property instance: a random distribution with 1 + (seed-dependent)
/// support size of at most m, exact rational weights, no farness claim.
GroundTruthInstance gen_support_instance(std::uint64_t m, std::uint32_t n,
                                         std::uint64_t seed);

/// One instance of a named campaign family. "support" ignores epsilon and t;
/// "dno" uses t (0 means the 2m default); "anchor" ignores t; "secret"
/// requires m = 3 * 2^k / 2 for some k >= 1 and n a multiple of 16 (the
/// ensemble is built at length 16 and lifted). Same dispatch the campaign
/// runner uses, so `gen` output and campaign rows line up seed for seed.
GroundTruthInstance gen_family_instance(const std::string& family, std::uint64_t m,
                                        const Rat& epsilon, std::uint32_t n,
                                        std::uint64_t t, std::uint64_t seed);

/// Wilson score interval (95%, z = 1.96) for a binomial rate.
struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};
WilsonInterval wilson_interval(std::uint64_t hits, std::uint64_t trials);

/// Aggregates rows grouped by a subset of {family, m, epsilon, n, t, tester}.
/// Output is a CSV with the group keys (in the requested order) followed by
/// count, errors, rejections, rejection_rate, wilson_low, wilson_high,
/// mean_queries, max_queries, mean_samples; rates and means run over the
/// non-error rows of the group and read "na" when every row errored. Groups
/// sort by key value (numerically for m, epsilon, n, t). Rows must be
/// nonempty.
std::string scaling_table(const std::vector<ResultRow>& rows,
                          const std::vector<std::string>& group_keys);

/// Ground-truth composition report for one non-adaptive session. Lengths
/// count the anchor; `levels` lists the remaining entries' levels in order
/// (the rank of the maximum-rank valid composition) and `values` the full
/// value sequence, anchor first at the top level.
struct CompositionDiagnostic {
  std::uint64_t max_length = 1;
  std::uint64_t max_rank_length = 1;
  std::vector<int> levels;
  std::vector<std::pair<BitString, int>> values;
  bool full_composition_exists = false; ///< max_length >= m+1
  bool bad_event = false;               ///< max_rank_length <= m
};

/// Replays the non-adaptive tester's plan under `seed`, recovers every
/// planned sample's true string, and searches all valid compositions
/// (anchored, levels nonincreasing, pairwise true distance above 2^-(a+1)
/// at each join level a) for the maximum length and the maximum rank. The
/// search is exact over value classes; it refuses m > 6, more than 16
/// distinct sampled values, or a top level above 60.
CompositionDiagnostic diagnose_compositions(const DistributionSpec& dist,
                                            std::uint64_t seed, std::uint64_t m,
                                            const Rat& epsilon);

}  // namespace supplab
