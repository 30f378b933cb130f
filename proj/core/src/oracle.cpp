#include "supplab/oracle.hpp"
#include "supplab/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace supplab {

using nlohmann::json;

void QueryLog::record_sample(SampleId i) {
    events_.push_back({TranscriptEvent::Kind::Sample, i, 0, 0});
    ++samples_used_;
}

void QueryLog::record_query(SampleId i, std::uint32_t j, int answer) {
    events_.push_back({TranscriptEvent::Kind::Query, i, j, static_cast<std::uint8_t>(answer)});
    ++queries_used_;
}

void QueryLog::write_jsonl(std::ostream& out) const {
    for (const auto& ev : events_) {
        if (ev.kind == TranscriptEvent::Kind::Sample) {
            out << R"({"ev":"sample","i":)" << ev.i << "}\n";
        } else {
            out << R"({"ev":"query","i":)" << ev.i << R"(,"j":)" << ev.j << R"(,"a":)" << int(ev.answer)
                << "}\n";
        }
    }
}

std::string QueryLog::to_jsonl() const {
    std::ostringstream out;
    write_jsonl(out);
    return out.str();
}

QueryLog QueryLog::from_jsonl(std::istream& in) {
    QueryLog log;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json ev = json::parse(line);
        std::string kind = ev.at("ev").get<std::string>();
        if (kind == "sample") {
            log.record_sample(ev.at("i").get<SampleId>());
        } else if (kind == "query") {
            log.record_query(ev.at("i").get<SampleId>(), ev.at("j").get<std::uint32_t>(),
                             ev.at("a").get<int>());
        } else {
            throw ParameterRange("QueryLog: unknown event kind at line " + std::to_string(lineno));
        }
    }
    return log;
}

QueryLog QueryLog::from_jsonl_string(std::string_view text) {
    std::istringstream in{std::string(text)};
    return from_jsonl(in);
}

BitString replay_draw(const DistributionSpec& dist, std::uint64_t seed, SampleId i) {
    RngStream stream(seed, "sample", i);
    std::uint64_t roll = stream.next_u64();
    const auto& thresholds = dist.cdf_thresholds();
    auto it = std::upper_bound(thresholds.begin(), thresholds.end(), roll);
    if (it == thresholds.end()) --it; // roll == max threshold
    return dist.atoms()[static_cast<std::size_t>(it - thresholds.begin())].bits;
}

OracleSession::OracleSession(DistributionSpec dist, std::uint64_t seed, SessionBudgets budgets)
    : dist_(std::move(dist)), seed_(seed), budgets_(budgets), alg_rng_(seed, "alg", 0) {}

void OracleSession::check_sample_budget(std::uint64_t additional) const {
    if (budgets_.max_samples && log_.samples_used() + additional > *budgets_.max_samples)
        throw BudgetExceeded("OracleSession: sample budget exceeded");
}

void OracleSession::check_query_budget(std::uint64_t additional) const {
    if (budgets_.max_queries && log_.queries_used() + additional > *budgets_.max_queries)
        throw BudgetExceeded("OracleSession: query budget exceeded");
}

const BitString& OracleSession::ensure_drawn(SampleId ordinal) {
    auto it = drawn_.find(ordinal);
    if (it == drawn_.end()) {
        it = drawn_.emplace(ordinal, replay_draw(dist_, seed_, ordinal)).first;
        highest_ordinal_ = std::max(highest_ordinal_, ordinal);
        log_.record_sample(ordinal);
    }
    return it->second;
}

SampleId OracleSession::draw_sample() {
    check_sample_budget(1);
    SampleId ordinal = highest_ordinal_ + 1;
    ensure_drawn(ordinal);
    return ordinal;
}

int OracleSession::query(SampleId handle, std::uint32_t j) {
    if (handle == 0 || drawn_.find(handle) == drawn_.end())
        throw ParameterRange("OracleSession: unknown sample handle");
    if (j < 1 || j > dist_.n()) throw ParameterRange("OracleSession: index out of range");
    check_query_budget(1);
    int answer = drawn_.at(handle).bit(j - 1);
    log_.record_query(handle, j, answer);
    return answer;
}

std::map<std::pair<SampleId, std::uint32_t>, int>
OracleSession::run_nonadaptive(const std::vector<std::pair<SampleId, std::uint32_t>>& requests) {
    // Validate the whole batch before touching any state.
    std::uint64_t new_samples = 0;
    {
        std::vector<SampleId> referenced;
        referenced.reserve(requests.size());
        for (const auto& [i, j] : requests) {
            if (i == 0) throw ParameterRange("run_nonadaptive: sample ordinals are 1-based");
            if (j < 1 || j > dist_.n()) throw ParameterRange("run_nonadaptive: index out of range");
            referenced.push_back(i);
        }
        std::sort(referenced.begin(), referenced.end());
        referenced.erase(std::unique(referenced.begin(), referenced.end()), referenced.end());
        for (SampleId i : referenced)
            if (drawn_.find(i) == drawn_.end()) ++new_samples;
        check_sample_budget(new_samples);
        check_query_budget(requests.size());
    }

    std::vector<std::pair<SampleId, std::uint32_t>> ordered = requests;
    std::sort(ordered.begin(), ordered.end());

    std::size_t first_event = log_.events().size();
    std::map<std::pair<SampleId, std::uint32_t>, int> answers;
    for (const auto& [i, j] : ordered) {
        const BitString& value = ensure_drawn(i);
        int answer = value.bit(j - 1);
        log_.record_query(i, j, answer);
        answers[{i, j}] = answer;
    }
    log_.mark_bulk(first_event, log_.events().size() - first_event);
    return answers;
}

} // namespace supplab
