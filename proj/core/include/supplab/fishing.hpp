#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "supplab/rational.hpp"

namespace supplab {

/// Parameters of the repeat-until-goal-or-futility loop.
struct FishingParams {
  std::uint64_t goal = 1;  ///< successes wanted (k), at least 1
  Rat threshold;           ///< success probability the loop is tuned for (p), in (0,1]
  Rat confidence;          ///< early-stop error budget (q), in (0,1)

  /// Throws ParameterRange unless goal >= 1, 0 < threshold <= 1 and
  /// 0 < confidence < 1.
  void validate() const;
};

/// One entry of the futility-review schedule: after `count` executions in
/// total, stop unless the success count is at least threshold * count / 2.
struct Checkpoint {
  int t = 0;                ///< schedule position, starting at 2
  std::uint64_t count = 0;  ///< cumulative executions reviewed here
};

enum class StopReason {
  GoalReached,
  Futility,
};

/// What one loop run did. `results` holds the raw subroutine outcomes in
/// execution order (0 means fail, anything else success).
struct FishingOutcome {
  std::uint64_t executions = 0;  ///< N
  std::uint64_t successes = 0;   ///< H, counts nonzero results
  std::vector<int> results;
  StopReason stop_reason = StopReason::Futility;
  /// True when the run fell past the last checkpoint with the goal unmet and
  /// no futility trigger, and stopping was forced. Cannot happen when
  /// final_checkpoint_decisive holds for the parameters.
  bool forced_final_stop = false;
};

/// Review points (t, N_t) for t = 2 .. floor(log2 goal) + 1, with
/// N_t = ceil(max{2^t, 5 (log2 confidence^-1 + log2(log2 goal + 1))} / threshold),
/// all logarithms base 2 and real-valued. A goal of 1 would make the range
/// empty, so that case gets the single review point t = 2. Ceilings are taken
/// exactly: in closed form when the log term is rational, otherwise at
/// 100-digit precision with a guard that the value is far from an integer.
std::vector<Checkpoint> checkpoint_schedule(const FishingParams& params);

/// Runs the subroutine until `goal` successes (immediate stop, GoalReached)
/// or a checkpoint whose success count is below threshold * count / 2
/// (Futility). The subroutine is a black box; the stochastic conditions its
/// caller vouches for (failures leave the success chance alone, successes
/// never raise it) are documented preconditions, not enforced.
FishingOutcome run_fishing(const FishingParams& params,
                           const std::function<int()>& subroutine);

/// True when the run obeys executions <=
/// (4 successes + 5 (log2 confidence^-1 + log2(log2 goal + 1))) / threshold + 1.
/// Decided exactly when the log term is rational, otherwise at 100-digit
/// precision with an integer-distance guard.
bool termination_bound_holds(const FishingParams& params,
                             std::uint64_t executions,
                             std::uint64_t successes);

/// True when the last checkpoint always triggers a stop: its futility
/// threshold exceeds goal - 1, so a run that reaches it either has met the
/// goal or reads as futile. Parameters in this regime never force a stop.
bool final_checkpoint_decisive(const FishingParams& params);

}  // namespace supplab
