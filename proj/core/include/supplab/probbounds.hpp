#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "supplab/rational.hpp"
#include "supplab/rng.hpp"

namespace supplab {

enum class TailSide { Upper, Lower };

/// Outcome of one Monte-Carlo check of an analytic tail bound.
struct TailBoundReport {
    std::string name;
    std::string parameters;
    double analytic_bound = 0.0;
    double empirical_frequency = 0.0;
    std::uint64_t trials = 0;
    double standard_error = 0.0;

    /// Empirical frequency exceeds the bound by more than three standard errors.
    bool violation() const {
        return empirical_frequency > analytic_bound + 3.0 * standard_error;
    }

    static std::string csv_header();
    std::string csv_row() const;
};

/// e^{-expectation}: the chance that a sum of independent indicators with this
/// expectation is zero never exceeds it.
double chernoff_zero_bound(double expectation);

/// Multiplicative concentration bound (e^{±delta} / (1±delta)^{1±delta})^expectation,
/// evaluated in log-space. The lower side requires delta < 1.
double multiplicative_chernoff(double expectation, double delta, TailSide side);

/// One row of a finite probability table: elementary weight, value of the
/// variable there, and whether the event holds there.
struct WeightedObservation {
    Rat weight;
    Rat value;
    bool event = false;
};

/// Mass-weighted sum of the variable over the rows where the event holds.
/// Exact, so additivity over disjoint events is an identity.
Rat contribution(const std::vector<WeightedObservation>& observations);

/// One simulated sequence: how many successes accrued and whether the run
/// ended inside the goal set.
struct SequenceRun {
    std::uint64_t successes = 0;
    bool in_goal = false;
};

/// A dependent success sequence with a goal: outside the goal set, step i
/// succeeds with probability at least success_floors[i].
struct GoalSimulator {
    std::vector<double> success_floors;
    std::function<SequenceRun(RngStream&)> run;
};

/// Runs `trials` independent trials, each on its own derived stream, and
/// reports the empirical frequency of the event against the analytic bound.
TailBoundReport monte_carlo_report(std::string name, std::string parameters,
                                   double analytic_bound, std::uint64_t trials,
                                   std::uint64_t seed, std::string_view stream_label,
                                   const std::function<bool(RngStream&)>& event);

/// Estimates Pr[run ends outside the goal and successes fall below
/// (1-delta) * sum of floors] and compares it with the lower-side
/// multiplicative bound at that sum.
TailBoundReport validate_goal_chernoff(const GoalSimulator& simulator, double delta,
                                       std::uint64_t trials, std::uint64_t seed);

/// The packaged validation suite behind the validate-bounds command: random
/// zero-probability configurations, both multiplicative sides, and three goal
/// scenarios including one whose success rate collapses after the goal.
std::vector<TailBoundReport> run_bound_validations(std::uint64_t trials, std::uint64_t seed);

/// Exact rational check of 1 - (1-p)^n >= n*p/2 at one grid point. The
/// inequality is a theorem for n*p <= 1; the function just evaluates it.
/// Requires p in [0, 1] and 1 <= n <= 4096 (the power is taken exactly).
bool exp_linearization_holds(const Rat& p, std::uint64_t n);

}  // namespace supplab
