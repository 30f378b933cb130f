#pragma once

#include "supplab/bitstring.hpp"
#include "supplab/distribution.hpp"
#include "supplab/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace supplab {

/// 1-based ordinal of a drawn sample within a session.
using SampleId = std::uint32_t;

struct TranscriptEvent {
    enum class Kind : std::uint8_t { Sample, Query };
    Kind kind;
    SampleId i = 0;
    std::uint32_t j = 0; // 1-based coordinate, Query only
    std::uint8_t answer = 0;
};

/// Ordered record of everything a tester did to a session.
class QueryLog {
public:
    void record_sample(SampleId i);
    void record_query(SampleId i, std::uint32_t j, int answer);
    void mark_bulk(std::size_t first_event, std::size_t count) { bulk_marks_.push_back({first_event, count}); }

    const std::vector<TranscriptEvent>& events() const { return events_; }
    const std::vector<std::pair<std::size_t, std::size_t>>& bulk_marks() const { return bulk_marks_; }
    std::uint64_t samples_used() const { return samples_used_; }
    std::uint64_t queries_used() const { return queries_used_; }

    /// One JSON object per line, sample and query events only.
    void write_jsonl(std::ostream& out) const;
    std::string to_jsonl() const;
    static QueryLog from_jsonl(std::istream& in);
    static QueryLog from_jsonl_string(std::string_view text);

private:
    std::vector<TranscriptEvent> events_;
    std::vector<std::pair<std::size_t, std::size_t>> bulk_marks_;
    std::uint64_t samples_used_ = 0;
    std::uint64_t queries_used_ = 0;
};

struct SessionBudgets {
    std::optional<std::uint64_t> max_samples;
    std::optional<std::uint64_t> max_queries;
};

/// Replays the hidden draw for ordinal i under a seed, without a session.
/// The harness uses this to line transcripts up with ground truth.
BitString replay_draw(const DistributionSpec& dist, std::uint64_t seed, SampleId i);

/// Sample-then-query access to a hidden distribution. A tester can draw
/// samples (receiving opaque handles) and query single bits; everything else
/// about the draws stays hidden. Sample ordinal i always consumes the stream
/// (seed, "sample", i), so different testers sharing a seed see identical
/// draws; algorithmic randomness comes from the separate "alg" stream.
class OracleSession {
public:
    OracleSession(DistributionSpec dist, std::uint64_t seed, SessionBudgets budgets = {});

    SampleId draw_sample();
    int query(SampleId handle, std::uint32_t j);

    /// Answers a fixed batch of (ordinal, 1-based index) queries in one step:
    /// draws every referenced ordinal, then answers in (i, j) order. The
    /// batch is checked against the budgets up front and applied atomically.
    /// Duplicate pairs are answered consistently and each occurrence counts.
    std::map<std::pair<SampleId, std::uint32_t>, int>
    run_nonadaptive(const std::vector<std::pair<SampleId, std::uint32_t>>& requests);

    std::uint64_t samples_used() const { return log_.samples_used(); }
    std::uint64_t queries_used() const { return log_.queries_used(); }
    /// Largest sample ordinal drawn so far; fresh bulk requests reference
    /// ordinals above this.
    SampleId highest_ordinal() const { return highest_ordinal_; }
    const QueryLog& log() const { return log_; }
    std::uint32_t n() const { return dist_.n(); }
    std::uint64_t seed() const { return seed_; }

    /// Stream for the algorithm's own coin flips (index draws and the like).
    RngStream& alg_rng() { return alg_rng_; }

private:
    const BitString& ensure_drawn(SampleId ordinal);
    void check_sample_budget(std::uint64_t additional) const;
    void check_query_budget(std::uint64_t additional) const;

    DistributionSpec dist_;
    std::uint64_t seed_;
    SessionBudgets budgets_;
    RngStream alg_rng_;
    std::map<SampleId, BitString> drawn_;
    SampleId highest_ordinal_ = 0;
    QueryLog log_;
};

} // namespace supplab
