#include "supplab/testers.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <stdexcept>

#include <json.hpp>

#include "supplab/dense_graph.hpp"
#include "supplab/errors.hpp"
#include "supplab/fishing.hpp"

namespace supplab {

namespace {

void validate_tester_params(std::uint64_t m, const Rat& epsilon,
                            const char* who) {
  if (m < 2) {
    throw ParameterRange(std::string(who) + ": m must be at least 2");
  }
  if (epsilon <= Rat(0) || epsilon >= Rat(1)) {
    throw ParameterRange(std::string(who) + ": epsilon must be in (0, 1)");
  }
}

// ceil(log2 m) for m >= 2.
int ceil_log2(std::uint64_t m) { return int(std::bit_width(m - 1)); }

int paid_query(OracleSession& session, AnswerRecord& record, SampleId handle,
               std::uint32_t index) {
  int answer = session.query(handle, index);
  record.note(handle, index, answer);
  return answer;
}

// Smallest coordinate among the slots of `indices` at which the two samples'
// recorded answers differ.
std::optional<std::uint32_t> smallest_separating_slot(
    const AnswerRecord& record, SampleId a, SampleId b,
    const std::vector<std::uint32_t>& indices) {
  std::optional<std::uint32_t> best;
  for (std::uint32_t j : indices) {
    auto va = record.lookup(a, j);
    auto vb = record.lookup(b, j);
    if (!va || !vb) {
      throw std::logic_error("tester: unrecorded answer on a queried slot");
    }
    if (*va != *vb && (!best || j < *best)) best = j;
  }
  return best;
}

TesterVerdict accept_verdict(const OracleSession& session) {
  TesterVerdict v;
  v.reject = false;
  v.queries = session.queries_used();
  v.samples = session.samples_used();
  return v;
}

// Builds a rejection verdict: handles sorted, one certificate per pair. The
// callback returns the certifying coordinate and must succeed for every pair
// of a genuine witness.
TesterVerdict reject_verdict(
    const OracleSession& session, std::vector<SampleId> witness,
    const std::function<std::optional<std::uint32_t>(SampleId, SampleId)>&
        certify) {
  std::sort(witness.begin(), witness.end());
  TesterVerdict v;
  v.reject = true;
  v.witness = std::move(witness);
  for (std::size_t i = 0; i < v.witness.size(); ++i) {
    for (std::size_t j = i + 1; j < v.witness.size(); ++j) {
      auto cert = certify(v.witness[i], v.witness[j]);
      if (!cert) {
        throw std::logic_error("tester: rejection without a certified pair");
      }
      v.certificates.push_back(CertifiedPair{v.witness[i], v.witness[j], *cert});
    }
  }
  v.queries = session.queries_used();
  v.samples = session.samples_used();
  return v;
}

}  // namespace

std::string TesterVerdict::to_json_string(bool pretty) const {
  nlohmann::json root;
  root["verdict"] = reject ? "reject" : "accept";
  root["queries"] = queries;
  root["samples"] = samples;
  if (reject) {
    nlohmann::json w;
    w["clique"] = witness;
    nlohmann::json certs = nlohmann::json::array();
    for (const CertifiedPair& c : certificates) {
      certs.push_back({{"a", c.a}, {"b", c.b}, {"j", c.index}});
    }
    w["certificates"] = std::move(certs);
    root["witness"] = std::move(w);
  }
  return pretty ? root.dump(2) : root.dump();
}

NonadaptiveRun run_nonadaptive_detailed(OracleSession& session, std::uint64_t m,
                                        const Rat& epsilon) {
  validate_tester_params(m, epsilon, "nonadaptive tester");

  NonadaptiveRun run;
  LevelPlan& plan = run.plan;
  int top = ceil_log2_inverse(epsilon);
  plan.top_level = top;
  plan.epsilon_hat = Rat(BigInt(1), BigInt(1) << unsigned(top));

  for (int a = 0; a <= top; ++a) {
    plan.level_sizes.push_back(std::size_t(
        ceil_rat_mul_log2(Rat(BigInt(1) << unsigned(a + 2)), m + 1)));
  }
  std::size_t master_len = plan.level_sizes.back();
  plan.master.reserve(master_len);
  for (std::size_t p = 0; p < master_len; ++p) {
    plan.master.push_back(session.alg_rng().coordinate(session.n()));
  }

  // Sample ordinals are assigned up front; the bulk request below draws them,
  // so a short budget fails atomically before anything is spent.
  SampleId next = session.highest_ordinal();
  plan.anchor = ++next;
  plan.sample_levels[plan.anchor] = top;
  plan.blocks.assign(std::size_t(top) + 1, {});
  for (int a = 0; a <= top; ++a) {
    // ceil(2^(3-a) / epsilon_hat) = 2^(top+3-a) exactly.
    std::uint64_t block_len =
        ceil_to_u64(Rat(BigInt(1) << unsigned(top + 3 - a)));
    plan.blocks[std::size_t(a)].assign(2 * m, {});
    for (std::uint64_t k = 0; k < 2 * m; ++k) {
      auto& block = plan.blocks[std::size_t(a)][std::size_t(k)];
      block.reserve(block_len);
      for (std::uint64_t s = 0; s < block_len; ++s) {
        block.push_back(++next);
        plan.sample_levels[block.back()] = a;
      }
    }
  }

  std::vector<std::pair<SampleId, std::uint32_t>> requests;
  for (std::size_t p = 0; p < master_len; ++p) {
    requests.emplace_back(plan.anchor, plan.master[p]);
  }
  for (int a = 0; a <= top; ++a) {
    for (const auto& block : plan.blocks[std::size_t(a)]) {
      for (SampleId handle : block) {
        for (std::size_t p = 0; p < plan.level_sizes[std::size_t(a)]; ++p) {
          requests.emplace_back(handle, plan.master[p]);
        }
      }
    }
  }
  run.answers = session.run_nonadaptive(requests);

  run.composition = find_distinguishable_composition(plan, run.answers, m);
  if (!run.composition) {
    run.verdict = accept_verdict(session);
    return run;
  }

  std::vector<SampleId> witness;
  for (const CompositionEntry& e : run.composition->entries) {
    witness.push_back(e.handle);
  }
  run.verdict = reject_verdict(
      session, std::move(witness),
      [&](SampleId a, SampleId b) -> std::optional<std::uint32_t> {
        std::size_t shared =
            std::min(plan.level_size(plan.sample_levels.at(a)),
                     plan.level_size(plan.sample_levels.at(b)));
        std::optional<std::uint32_t> best;
        for (std::size_t p = 0; p < shared; ++p) {
          std::uint32_t j = plan.master[p];
          int va = run.answers.at({a, j});
          int vb = run.answers.at({b, j});
          if (va != vb && (!best || j < *best)) best = j;
        }
        return best;
      });
  return run;
}

TesterVerdict run_nonadaptive_test(OracleSession& session, std::uint64_t m,
                                   const Rat& epsilon) {
  return run_nonadaptive_detailed(session, m, epsilon).verdict;
}

std::optional<Composition> find_distinguishable_composition(
    const LevelPlan& plan, const AnswerMap& answers, std::uint64_t m) {
  if (m < 1) {
    throw ParameterRange("composition search: m must be at least 1");
  }
  auto anchor_entry = plan.sample_levels.find(plan.anchor);
  if (anchor_entry == plan.sample_levels.end() ||
      anchor_entry->second != plan.top_level) {
    throw ParameterRange(
        "composition search: anchor missing from the plan or not at the top "
        "level");
  }

  struct Participant {
    SampleId handle;
    int level;
    std::vector<std::uint8_t> bits;
  };
  std::vector<Participant> parts;
  std::size_t anchor_part = 0;
  for (const auto& [handle, level] : plan.sample_levels) {
    if (level < 0 || level > plan.top_level) {
      throw ParameterRange("composition search: level out of range");
    }
    std::size_t len = plan.level_size(level);
    std::vector<std::uint8_t> bits(len);
    for (std::size_t p = 0; p < len; ++p) {
      auto it = answers.find({handle, plan.master[p]});
      if (it == answers.end()) {
        throw ParameterRange(
            "composition search: answer map does not cover the plan");
      }
      bits[p] = std::uint8_t(it->second);
    }
    if (handle == plan.anchor) anchor_part = parts.size();
    parts.push_back(Participant{handle, level, std::move(bits)});
  }

  // Samples with the same level and the same answers are interchangeable:
  // never adjacent, identical neighbourhoods. One representative per class.
  std::map<std::pair<int, std::vector<std::uint8_t>>, std::size_t> seen;
  std::vector<std::size_t> rep;
  std::vector<std::size_t> cls_of(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto key = std::make_pair(parts[i].level, parts[i].bits);
    auto [it, inserted] = seen.emplace(std::move(key), rep.size());
    if (inserted) rep.push_back(i);
    cls_of[i] = it->second;
  }
  std::size_t anchor_class = cls_of[anchor_part];
  // The anchor itself represents its class, so the emitted composition
  // contains the anchor and not an interchangeable stand-in.
  rep[anchor_class] = anchor_part;

  DenseGraph graph(rep.size());
  for (std::size_t a = 0; a < rep.size(); ++a) {
    const Participant& pa = parts[rep[a]];
    for (std::size_t b = a + 1; b < rep.size(); ++b) {
      const Participant& pb = parts[rep[b]];
      std::size_t shared = std::min(pa.bits.size(), pb.bits.size());
      for (std::size_t p = 0; p < shared; ++p) {
        if (pa.bits[p] != pb.bits[p]) {
          graph.add_edge(a, b);
          break;
        }
      }
    }
  }

  auto clique = exact_clique_containing(graph, std::size_t(m) + 1, anchor_class);
  if (!clique) return std::nullopt;

  Composition comp;
  comp.entries.push_back(CompositionEntry{plan.anchor, plan.top_level});
  std::vector<CompositionEntry> rest;
  for (std::size_t c : *clique) {
    if (c == anchor_class) continue;
    rest.push_back(CompositionEntry{parts[rep[c]].handle, parts[rep[c]].level});
  }
  std::sort(rest.begin(), rest.end(),
            [](const CompositionEntry& x, const CompositionEntry& y) {
              if (x.level != y.level) return x.level > y.level;
              return x.handle < y.handle;
            });
  comp.entries.insert(comp.entries.end(), rest.begin(), rest.end());
  return comp;
}

BatchResult run_batch(OracleSession& session, DistinguishedSet& set, int level,
                      const Rat& epsilon, std::uint64_t m) {
  validate_tester_params(m, epsilon, "batch");
  if (set.members.empty()) {
    throw ParameterRange("batch: the distinguished set is empty");
  }
  if (set.members.size() > m) {
    throw ParameterRange("batch: the distinguished set already has more than m elements");
  }
  if (level < 0 || level > ceil_log2(m)) {
    throw ParameterRange("batch: level out of range");
  }

  BatchResult result;
  std::uint64_t j_len =
      ceil_rat_mul_log2(Rat(BigInt(1) << unsigned(level + 2)), m);
  result.indices.reserve(j_len);
  for (std::uint64_t p = 0; p < j_len; ++p) {
    result.indices.push_back(session.alg_rng().coordinate(session.n()));
  }

  const std::vector<SampleId> members = set.members;
  for (SampleId x : members) {
    for (std::uint32_t j : result.indices) {
      paid_query(session, set.record, x, j);
    }
  }

  Rat scale = level <= 2 ? Rat(BigInt(1) << unsigned(2 - level))
                         : Rat(BigInt(1), BigInt(1) << unsigned(level - 2));
  std::uint64_t fresh_count = ceil_rat_mul_log2(scale / epsilon, m);
  std::vector<SampleId> fresh;
  fresh.reserve(fresh_count);
  for (std::uint64_t s = 0; s < fresh_count; ++s) {
    SampleId y = session.draw_sample();
    fresh.push_back(y);
    for (std::uint32_t j : result.indices) {
      paid_query(session, set.record, y, j);
    }
  }

  for (SampleId y : fresh) {
    bool qualifies = true;
    for (SampleId x : members) {
      if (!smallest_separating_slot(set.record, y, x, result.indices)) {
        qualifies = false;
        break;
      }
    }
    if (qualifies) {
      set.members.push_back(y);
      result.success = true;
      result.fresh = y;
      return result;
    }
  }
  return result;
}

bool run_first_phase(OracleSession& session, DistinguishedSet& set,
                     const Rat& epsilon, std::uint64_t m) {
  validate_tester_params(m, epsilon, "first phase");
  if (set.members.empty()) {
    throw ParameterRange("first phase: seed the set with the first sample");
  }
  int top = ceil_log2(m);
  Rat confidence(BigInt(1), BigInt(4) * BigInt(top + 1));
  for (int a = 0; a <= top; ++a) {
    if (set.members.size() >= m + 1) return true;
    FishingParams params;
    params.goal = m + 1 - set.members.size();
    params.threshold = Rat(1, 3);
    params.confidence = confidence;
    FishingOutcome outcome = run_fishing(params, [&]() {
      return run_batch(session, set, a, epsilon, m).success ? 1 : 0;
    });
    if (outcome.stop_reason == StopReason::GoalReached) return true;
  }
  return set.members.size() >= m + 1;
}

bool run_second_phase_iteration(OracleSession& session, SampleId fresh,
                                DistinguishedSet& set,
                                IncrementalDecisionTree& tree,
                                std::uint64_t m) {
  if (m < 2) throw ParameterRange("second phase: m must be at least 2");
  std::vector<std::uint32_t> indices;
  indices.reserve(m);
  for (std::uint64_t p = 0; p < m; ++p) {
    indices.push_back(session.alg_rng().coordinate(session.n()));
  }

  SampleId colliding = tree.locate(session, set.record, fresh);
  for (std::uint32_t j : indices) {
    paid_query(session, set.record, colliding, j);
  }
  for (std::uint32_t j : indices) {
    paid_query(session, set.record, fresh, j);
  }

  auto cert = smallest_separating_slot(set.record, fresh, colliding, indices);
  if (!cert) return false;
  tree.insert(set.record, fresh, colliding, *cert);
  set.members.push_back(fresh);
  return true;
}

TesterVerdict run_adaptive_test(OracleSession& session, std::uint64_t m,
                                const Rat& epsilon) {
  validate_tester_params(m, epsilon, "adaptive tester");
  if (epsilon >= Rat(BigInt(1), BigInt(m) * BigInt(m))) {
    return run_nonadaptive_test(session, m, epsilon);
  }

  DistinguishedSet set;
  set.members.push_back(session.draw_sample());

  bool rejected = run_first_phase(session, set, epsilon, m);
  if (!rejected) {
    IncrementalDecisionTree tree = construct_tree(session, set.record, set.members);
    std::uint64_t iterations = ceil_to_u64(Rat(48) / epsilon);
    for (std::uint64_t it = 0; it < iterations; ++it) {
      SampleId fresh = session.draw_sample();
      run_second_phase_iteration(session, fresh, set, tree, m);
      if (set.members.size() >= m + 1) {
        rejected = true;
        break;
      }
    }
  }

  if (!rejected) return accept_verdict(session);
  return reject_verdict(session, set.members, [&](SampleId a, SampleId b) {
    return set.record.separating_index(a, b);
  });
}

TesterVerdict run_baseline_test(OracleSession& session, std::uint64_t m,
                                const Rat& epsilon) {
  validate_tester_params(m, epsilon, "baseline tester");
  std::uint64_t count = ceil_to_u64(Rat(BigInt(2) * BigInt(m)) / epsilon) + 1;
  if (count >= (std::uint64_t(1) << 32)) {
    throw ScaleExceeded("baseline tester: sample count exceeds handle range");
  }
  std::uint64_t j_len = ceil_rat_mul_ln(Rat(2) / epsilon, count * count);

  std::vector<std::uint32_t> indices;
  indices.reserve(j_len);
  for (std::uint64_t p = 0; p < j_len; ++p) {
    indices.push_back(session.alg_rng().coordinate(session.n()));
  }

  SampleId base = session.highest_ordinal();
  std::vector<std::pair<SampleId, std::uint32_t>> requests;
  for (std::uint64_t s = 1; s <= count; ++s) {
    for (std::uint32_t j : indices) {
      requests.emplace_back(SampleId(base + s), j);
    }
  }
  AnswerMap answers = session.run_nonadaptive(requests);

  // Distinct answer patterns over the J slots; representatives in draw order.
  std::map<std::vector<std::uint8_t>, SampleId> first_with;
  std::vector<SampleId> reps;
  for (std::uint64_t s = 1; s <= count && reps.size() <= m; ++s) {
    SampleId handle = SampleId(base + s);
    std::vector<std::uint8_t> pattern;
    pattern.reserve(indices.size());
    for (std::uint32_t j : indices) {
      pattern.push_back(std::uint8_t(answers.at({handle, j})));
    }
    auto [it, inserted] = first_with.emplace(std::move(pattern), handle);
    if (inserted) reps.push_back(handle);
  }

  if (reps.size() <= m) return accept_verdict(session);
  return reject_verdict(session, reps, [&](SampleId a, SampleId b) {
    std::optional<std::uint32_t> best;
    for (std::uint32_t j : indices) {
      if (answers.at({a, j}) != answers.at({b, j}) && (!best || j < *best)) {
        best = j;
      }
    }
    return best;
  });
}

}  // namespace supplab
