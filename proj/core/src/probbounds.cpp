#include "supplab/probbounds.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <utility>

#include "supplab/errors.hpp"

namespace supplab {
namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string TailBoundReport::csv_header() {
    return "bound,parameters,analytic,empirical,trials,stderr,violation";
}

std::string TailBoundReport::csv_row() const {
    std::ostringstream out;
    out << name << ',' << parameters << ',' << fmt(analytic_bound) << ','
        << fmt(empirical_frequency) << ',' << trials << ',' << fmt(standard_error) << ','
        << (violation() ? 1 : 0);
    return out.str();
}

double chernoff_zero_bound(double expectation) {
    if (!(expectation >= 0.0))
        throw ParameterRange("chernoff_zero_bound: expectation must be nonnegative");
    return std::exp(-expectation);
}

double multiplicative_chernoff(double expectation, double delta, TailSide side) {
    if (!(expectation >= 0.0))
        throw ParameterRange("multiplicative_chernoff: expectation must be nonnegative");
    if (!(delta > 0.0))
        throw ParameterRange("multiplicative_chernoff: delta must be positive");
    double log_factor = 0.0;
    if (side == TailSide::Upper) {
        log_factor = delta - (1.0 + delta) * std::log1p(delta);
    } else {
        if (!(delta < 1.0))
            throw ParameterRange("multiplicative_chernoff: lower side needs delta < 1");
        log_factor = -delta - (1.0 - delta) * std::log1p(-delta);
    }
    return std::exp(expectation * log_factor);
}

Rat contribution(const std::vector<WeightedObservation>& observations) {
    Rat total(0);
    for (const auto& row : observations)
        if (row.event) total += row.weight * row.value;
    return total;
}

TailBoundReport monte_carlo_report(std::string name, std::string parameters,
                                   double analytic_bound, std::uint64_t trials,
                                   std::uint64_t seed, std::string_view stream_label,
                                   const std::function<bool(RngStream&)>& event) {
    if (trials < 1) throw ParameterRange("monte_carlo_report: trials must be at least 1");
    std::uint64_t hits = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        RngStream stream(seed, stream_label, trial);
        if (event(stream)) ++hits;
    }
    TailBoundReport report;
    report.name = std::move(name);
    report.parameters = std::move(parameters);
    report.analytic_bound = analytic_bound;
    report.trials = trials;
    report.empirical_frequency = static_cast<double>(hits) / static_cast<double>(trials);
    report.standard_error =
        std::sqrt(report.empirical_frequency * (1.0 - report.empirical_frequency) /
                  static_cast<double>(trials));
    return report;
}

TailBoundReport validate_goal_chernoff(const GoalSimulator& simulator, double delta,
                                       std::uint64_t trials, std::uint64_t seed) {
    if (!simulator.run)
        throw ParameterRange("validate_goal_chernoff: simulator has no run function");
    double sum_floors = 0.0;
    for (double p : simulator.success_floors) {
        if (!(p >= 0.0) || p > 1.0)
            throw ParameterRange("validate_goal_chernoff: floors must lie in [0, 1]");
        sum_floors += p;
    }
    double threshold = (1.0 - delta) * sum_floors;
    double bound = multiplicative_chernoff(sum_floors, delta, TailSide::Lower);
    std::ostringstream params;
    params << "delta=" << fmt(delta) << ";sum_floors=" << fmt(sum_floors)
           << ";steps=" << simulator.success_floors.size();
    return monte_carlo_report(
        "chernoff-with-goal", params.str(), bound, trials, seed, "mc-goal",
        [&](RngStream& stream) {
            SequenceRun run = simulator.run(stream);
            return !run.in_goal && static_cast<double>(run.successes) < threshold;
        });
}

namespace {

std::uint64_t bernoulli_sum(RngStream& stream, const std::vector<double>& probs) {
    std::uint64_t count = 0;
    for (double p : probs)
        if (stream.next_double() < p) ++count;
    return count;
}

}  // namespace

std::vector<TailBoundReport> run_bound_validations(std::uint64_t trials, std::uint64_t seed) {
    std::vector<TailBoundReport> reports;

    for (int cfg = 0; cfg < 20; ++cfg) {
        RngStream draw(seed, "mc-config-zero", static_cast<std::uint64_t>(cfg));
        std::size_t k = 1 + draw.below(40);
        std::vector<double> probs(k);
        double expectation = 0.0;
        for (auto& p : probs) {
            p = 0.1 + 0.8 * draw.next_double();
            expectation += p;
        }
        std::ostringstream params;
        params << "k=" << k << ";expectation=" << fmt(expectation);
        reports.push_back(monte_carlo_report(
            "chernoff-zero", params.str(), chernoff_zero_bound(expectation), trials, seed,
            "mc-zero-" + std::to_string(cfg),
            [&](RngStream& stream) { return bernoulli_sum(stream, probs) == 0; }));
    }

    for (int cfg = 0; cfg < 10; ++cfg) {
        RngStream draw(seed, "mc-config-mult", static_cast<std::uint64_t>(cfg));
        std::size_t k = 5 + draw.below(60);
        double p = 0.1 + 0.7 * draw.next_double();
        double expectation = static_cast<double>(k) * p;
        bool upper = cfg % 2 == 0;
        double delta = upper ? 0.2 + 1.3 * draw.next_double() : 0.2 + 0.7 * draw.next_double();
        std::vector<double> probs(k, p);
        double bound =
            multiplicative_chernoff(expectation, delta, upper ? TailSide::Upper : TailSide::Lower);
        std::ostringstream params;
        params << "k=" << k << ";p=" << fmt(p) << ";delta=" << fmt(delta)
               << ";side=" << (upper ? "upper" : "lower");
        reports.push_back(monte_carlo_report(
            upper ? "chernoff-mult-upper" : "chernoff-mult-lower", params.str(), bound, trials,
            seed, "mc-mult-" + std::to_string(cfg), [&](RngStream& stream) {
                auto x = static_cast<double>(bernoulli_sum(stream, probs));
                return upper ? x >= (1.0 + delta) * expectation
                             : x <= (1.0 - delta) * expectation;
            }));
    }

    {
        // Independent steps, empty goal: the plain lower-tail bound.
        GoalSimulator plain;
        plain.success_floors.assign(30, 0.4);
        plain.run = [](RngStream& stream) {
            SequenceRun run;
            for (int i = 0; i < 30; ++i)
                if (stream.next_double() < 0.4) ++run.successes;
            return run;
        };
        reports.push_back(validate_goal_chernoff(plain, 0.5, trials, seed));
    }
    {
        // Goal reached on the first success, so the conjunction needs an
        // all-failure run.
        GoalSimulator first_success;
        first_success.success_floors.assign(25, 0.15);
        first_success.run = [](RngStream& stream) {
            SequenceRun run;
            for (int i = 0; i < 25; ++i)
                if (stream.next_double() < 0.15) ++run.successes;
            run.in_goal = run.successes >= 1;
            return run;
        };
        reports.push_back(validate_goal_chernoff(first_success, 0.5, trials, seed + 1));
    }
    {
        // Success rate collapses once the goal is reached; the conjunction
        // with staying outside the goal is what keeps the bound valid.
        GoalSimulator collapsing;
        collapsing.success_floors.assign(40, 0.3);
        collapsing.run = [](RngStream& stream) {
            SequenceRun run;
            for (int i = 0; i < 40; ++i) {
                if (run.in_goal) {
                    stream.next_double();  // success chance dropped to zero
                    continue;
                }
                if (stream.next_double() < 0.3) ++run.successes;
                if (run.successes >= 5) run.in_goal = true;
            }
            return run;
        };
        reports.push_back(validate_goal_chernoff(collapsing, 0.5, trials, seed + 2));
    }

    return reports;
}

bool exp_linearization_holds(const Rat& p, std::uint64_t n) {
    if (!(p >= Rat(0)) || p > Rat(1))
        throw ParameterRange("exp_linearization_holds: p must lie in [0, 1]");
    if (n < 1 || n > 4096)
        throw ParameterRange("exp_linearization_holds: n must lie in [1, 4096]");
    Rat q = Rat(1) - p;
    Rat q_pow(boost::multiprecision::pow(q.numerator(), unsigned(n)),
              boost::multiprecision::pow(q.denominator(), unsigned(n)));
    return Rat(2) * (Rat(1) - q_pow) >= Rat(BigInt(n)) * p;
}

}  // namespace supplab
