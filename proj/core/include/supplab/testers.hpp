#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "supplab/decision_tree.hpp"
#include "supplab/oracle.hpp"
#include "supplab/rational.hpp"

namespace supplab {

/// Query layout of the non-adaptive tester. One master list of uniformly
/// drawn 1-based coordinates (with repetitions) is shared by all levels;
/// level a uses the prefix of length level_sizes[a], so the level index sets
/// are nested by construction. The anchor sample is queried at the full
/// master list, every sample of block (a, k) at the level-a prefix.
struct LevelPlan {
  Rat epsilon_hat;                      ///< power of two, 2^-top_level
  int top_level = 0;                    ///< levels run 0 .. top_level
  std::vector<std::uint32_t> master;    ///< coordinate list, length level_sizes[top_level]
  std::vector<std::size_t> level_sizes; ///< prefix length per level
  SampleId anchor = 0;
  std::vector<std::vector<std::vector<SampleId>>> blocks; ///< [level][block] handles
  std::map<SampleId, int> sample_levels; ///< every participant, anchor included

  std::size_t level_size(int level) const { return level_sizes.at(std::size_t(level)); }
};

/// Answers of a bulk non-adaptive request, keyed by (handle, coordinate).
using AnswerMap = std::map<std::pair<SampleId, std::uint32_t>, int>;

/// One element of a composition: a sample handle at the level whose index
/// prefix it was queried on.
struct CompositionEntry {
  SampleId handle = 0;
  int level = 0;
};

/// Pairwise-distinguished samples found by the composition search. The first
/// entry is the anchor at the top level; the rest are ordered by descending
/// level, ties by handle.
struct Composition {
  std::vector<CompositionEntry> entries;
};

/// One edge of an explicit witness: the smallest coordinate at which the two
/// samples' recorded answers differ.
struct CertifiedPair {
  SampleId a = 0;
  SampleId b = 0;
  std::uint32_t index = 0;
};

/// Outcome of one tester run. A rejection always carries an explicit
/// witness: m+1 handles whose certified pairs form a clique in the
/// contradiction graph of the session transcript.
struct TesterVerdict {
  bool reject = false;
  std::vector<SampleId> witness;          ///< empty on accept
  std::vector<CertifiedPair> certificates; ///< all witness pairs on reject
  std::uint64_t queries = 0;
  std::uint64_t samples = 0;

  std::string to_json_string(bool pretty = true) const;
};

/// Non-adaptive outcome plus the plan and raw answers, for diagnostics that
/// want to re-run the composition search or replay the ground truth.
struct NonadaptiveRun {
  TesterVerdict verdict;
  LevelPlan plan;
  AnswerMap answers;
  std::optional<Composition> composition;
};

/// The non-adaptive tester. Rounds epsilon down to the next power of two
/// (epsilon_hat = 2^-ceil(log2 epsilon^-1)), draws the level plan with
/// |I_a| = ceil(2^(a+2) log2(m+1)) and 2m blocks per level of
/// ceil(2^(3-a) / epsilon_hat) samples each, issues all queries as one bulk
/// request, and rejects exactly when a distinguishable composition of size
/// m+1 containing the anchor exists. Requires m >= 2 and epsilon in (0,1).
NonadaptiveRun run_nonadaptive_detailed(OracleSession& session, std::uint64_t m,
                                        const Rat& epsilon);
TesterVerdict run_nonadaptive_test(OracleSession& session, std::uint64_t m,
                                   const Rat& epsilon);

/// Exhaustive search for m+1 pairwise distinguishable samples including the
/// anchor. Samples at levels a and b are adjacent when their answers differ
/// somewhere on the shared prefix (the first min(|I_a|, |I_b|) master
/// positions). Samples with identical (level, answers) are interchangeable,
/// so the branch and bound runs on one representative per class; it is
/// exhaustive, so a nullopt is a proof that no such composition exists.
/// The answer map must cover every planned query.
std::optional<Composition> find_distinguishable_composition(
    const LevelPlan& plan, const AnswerMap& answers, std::uint64_t m);

/// The adaptive tester's growing set of pairwise-distinguished samples,
/// together with every answer it has paid for.
struct DistinguishedSet {
  std::vector<SampleId> members;
  AnswerRecord record;
};

/// Outcome of one batch: on success the qualifying sample has joined the
/// set. `indices` is the J list the batch queried (with repetitions).
struct BatchResult {
  bool success = false;
  SampleId fresh = 0;
  std::vector<std::uint32_t> indices;
};

/// One batch at `level`: draws J of ceil(2^(level+2) log2 m) uniform
/// coordinates, queries every member at J, then draws
/// ceil(2^(2-level) epsilon^-1 log2 m) new samples and queries each at J.
/// Succeeds when some new sample differs from every member somewhere on J;
/// the first such sample (in draw order) joins the set with its J record.
/// Requires |members| <= m and 0 <= level <= ceil(log2 m).
BatchResult run_batch(OracleSession& session, DistinguishedSet& set, int level,
                      const Rat& epsilon, std::uint64_t m);

/// First phase: for each level a = 0 .. ceil(log2 m), runs the fishing loop
/// (goal m+1-|members|, threshold 1/3, confidence 1/(4 (ceil(log2 m)+1)))
/// with the level-a batch as subroutine. Returns true as soon as the set
/// exceeds m elements (a rejection); false leaves the enlarged set behind.
bool run_first_phase(OracleSession& session, DistinguishedSet& set,
                     const Rat& epsilon, std::uint64_t m);

/// One second-phase iteration for an already drawn sample: draws J of m
/// uniform coordinates, locates the colliding member through the tree,
/// queries both at J, and on any difference inserts the sample with the
/// smallest differing coordinate of J as certificate. Returns whether the
/// insert happened. Costs at most 3m queries: height <= m for the locate
/// plus 2|J|.
bool run_second_phase_iteration(OracleSession& session, SampleId fresh,
                                DistinguishedSet& set,
                                IncrementalDecisionTree& tree, std::uint64_t m);

/// The adaptive tester. For epsilon >= 1/m^2 it delegates to the
/// non-adaptive tester. Otherwise: first sample seeds the set, first phase
/// fishes per level, a decision tree is built over the survivors, and
/// ceil(48 epsilon^-1) second-phase iterations follow; the run rejects the
/// moment the set holds m+1 elements. Requires m >= 2 and epsilon in (0,1).
TesterVerdict run_adaptive_test(OracleSession& session, std::uint64_t m,
                                const Rat& epsilon);

/// Naive comparison baseline, here for benchmark contrast only: draws
/// ceil(2 epsilon^-1 m) + 1 samples, queries all of them at one uniform J of
/// ceil(2 epsilon^-1 ln(s^2)) coordinates, and rejects when more than m
/// distinct answer patterns appear.
TesterVerdict run_baseline_test(OracleSession& session, std::uint64_t m,
                                const Rat& epsilon);

}  // namespace supplab
