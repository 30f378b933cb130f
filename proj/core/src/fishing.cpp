#include "supplab/fishing.hpp"

#include <bit>
#include <limits>
#include <optional>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "supplab/errors.hpp"

namespace supplab {

namespace {

using Real = boost::multiprecision::cpp_bin_float_100;

Real to_real(const Rat& r) {
  return Real(r.numerator()) / Real(r.denominator());
}

Real log2_real(const Real& x) {
  return boost::multiprecision::log(x) / boost::multiprecision::log(Real(2));
}

// The schedule's log term: log2(1/confidence) + log2(log2(goal) + 1).
// When rational the value is necessarily an integer: that needs goal = 2^j
// (otherwise log2(goal) is irrational and so is the sum) and
// (j + 1) / confidence a power of two. Every other case is irrational, which
// the high-precision path relies on when taking ceilings.
std::optional<BigInt> exact_log_sum(std::uint64_t goal, const Rat& confidence) {
  if ((goal & (goal - 1)) != 0) return std::nullopt;
  unsigned j = unsigned(std::countr_zero(goal));
  Rat ratio = Rat(BigInt(j + 1)) / confidence;
  if (ratio.denominator() != 1) return std::nullopt;
  BigInt num = ratio.numerator();
  if (num <= 0) return std::nullopt;
  unsigned low = boost::multiprecision::lsb(num);
  if ((BigInt(1) << low) != num) return std::nullopt;
  return BigInt(low);
}

Real log_sum_real(std::uint64_t goal, const Rat& confidence) {
  Real inner = log2_real(Real(goal)) + 1;
  return log2_real(1 / to_real(confidence)) + log2_real(inner);
}

// Exact ceiling of a value known to be irrational: floor + 1, with a guard
// that 100 digits of precision leave no doubt about which side of an integer
// the value sits on.
std::uint64_t ceil_guarded(const Real& x) {
  if (x < 0) throw std::logic_error("fishing: negative schedule value");
  Real fl = boost::multiprecision::floor(x);
  Real frac = x - fl;
  const Real margin("1e-60");
  if (frac < margin || frac > 1 - margin) {
    throw std::logic_error(
        "fishing: schedule value within precision margin of an integer");
  }
  if (fl >= Real(std::numeric_limits<std::int64_t>::max())) {
    throw ScaleExceeded("fishing: checkpoint count exceeds 64-bit range");
  }
  return std::uint64_t(fl.convert_to<std::int64_t>()) + 1;
}

int last_review_position(std::uint64_t goal) {
  int t_max = std::bit_width(goal);
  return t_max < 2 ? 2 : t_max;
}

}  // namespace

void FishingParams::validate() const {
  if (goal < 1) throw ParameterRange("fishing: goal must be at least 1");
  if (threshold <= Rat(0) || threshold > Rat(1)) {
    throw ParameterRange("fishing: threshold must be in (0, 1]");
  }
  if (confidence <= Rat(0) || confidence >= Rat(1)) {
    throw ParameterRange("fishing: confidence must be in (0, 1)");
  }
}

std::vector<Checkpoint> checkpoint_schedule(const FishingParams& params) {
  params.validate();

  std::uint64_t log_branch;
  if (auto exact = exact_log_sum(params.goal, params.confidence)) {
    log_branch = ceil_to_u64(Rat(5 * *exact) / params.threshold);
  } else {
    Real value =
        5 * log_sum_real(params.goal, params.confidence) / to_real(params.threshold);
    log_branch = ceil_guarded(value);
  }

  std::vector<Checkpoint> schedule;
  int t_last = last_review_position(params.goal);
  for (int t = 2; t <= t_last; ++t) {
    std::uint64_t doubling =
        ceil_to_u64(Rat(BigInt(1) << unsigned(t)) / params.threshold);
    schedule.push_back(Checkpoint{t, std::max(doubling, log_branch)});
  }
  return schedule;
}

FishingOutcome run_fishing(const FishingParams& params,
                           const std::function<int()>& subroutine) {
  std::vector<Checkpoint> schedule = checkpoint_schedule(params);
  FishingOutcome out;
  for (const Checkpoint& review : schedule) {
    while (out.executions < review.count && out.successes < params.goal) {
      int result = subroutine();
      out.results.push_back(result);
      ++out.executions;
      if (result != 0) ++out.successes;
    }
    if (out.successes == params.goal) {
      out.stop_reason = StopReason::GoalReached;
      return out;
    }
    // Futility review: stop when successes < threshold * count / 2, exactly.
    if (Rat(BigInt(out.successes) * 2) < params.threshold * Rat(BigInt(review.count))) {
      out.stop_reason = StopReason::Futility;
      return out;
    }
  }
  // Past the last review with the goal unmet and no futility trigger. The
  // loop has nowhere to go, so stopping is forced; decisive-parameter regimes
  // never reach this.
  out.stop_reason = StopReason::Futility;
  out.forced_final_stop = true;
  return out;
}

bool termination_bound_holds(const FishingParams& params,
                             std::uint64_t executions,
                             std::uint64_t successes) {
  if (auto exact = exact_log_sum(params.goal, params.confidence)) {
    Rat bound =
        Rat(BigInt(successes) * 4 + 5 * *exact) / params.threshold + Rat(1);
    return Rat(BigInt(executions)) <= bound;
  }
  Real bound = (4 * Real(successes) +
                5 * log_sum_real(params.goal, params.confidence)) /
                   to_real(params.threshold) +
               1;
  Real diff = bound - Real(executions);
  const Real margin("1e-60");
  if (boost::multiprecision::abs(diff) < margin) {
    throw std::logic_error(
        "fishing: termination bound within precision margin of the count");
  }
  return diff > 0;
}

bool final_checkpoint_decisive(const FishingParams& params) {
  params.validate();
  BigInt rhs = BigInt(params.goal - 1) * 2;
  int t_last = last_review_position(params.goal);
  if ((BigInt(1) << unsigned(t_last)) > rhs) return true;
  if (auto exact = exact_log_sum(params.goal, params.confidence)) {
    return 5 * *exact > rhs;
  }
  Real lhs = 5 * log_sum_real(params.goal, params.confidence);
  Real diff = lhs - Real(rhs);
  const Real margin("1e-60");
  if (boost::multiprecision::abs(diff) < margin) {
    throw std::logic_error(
        "fishing: decisiveness margin within precision of the boundary");
  }
  return diff > 0;
}

}  // namespace supplab
