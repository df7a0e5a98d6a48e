#include "neuridx/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "neuridx/error.hpp"

namespace neuridx {

QueryPlan split_pairs(std::string_view phrase, const Dictionary& dict,
                      const std::set<std::string>& stopwords) {
  QueryPlan plan;
  plan.phrase = std::string(phrase);
  TokenSeq seq = tokenize(phrase, stopwords);
  for (const auto& token : seq.tokens) {
    if (auto kid = dict.id_of(token))
      plan.terms.push_back(*kid);
    else
      plan.dropped.push_back(token);
  }
  if (plan.terms.empty())
    fail(Errc::empty_query, "no query terms survive tokenization: " +
                                plan.phrase);
  if (plan.terms.size() == 1) {
    plan.pairs.push_back({plan.terms[0], plan.terms[0], true});
  } else {
    for (std::size_t i = 0; i + 1 < plan.terms.size(); ++i)
      plan.pairs.push_back({plan.terms[i], plan.terms[i + 1], false});
  }
  return plan;
}

std::vector<double> probe_vector(const QueryPlan& plan, const Dictionary& dict) {
  std::vector<double> probe(dict.size(), 0.0);
  for (KeywordId kid : plan.terms) probe[kid] = 1.0;
  return probe;
}

namespace {

struct TermOccurrences {
  std::vector<std::uint32_t> positions;
  std::uint32_t count = 0;
};

double pair_proximity(const TermOccurrences& a, const TermOccurrences& b) {
  if (a.positions.empty() || b.positions.empty()) return 0.0;
  double best = 0.0;
  for (std::uint32_t pa : a.positions) {
    for (std::uint32_t pb : b.positions) {
      double gap = std::fabs(static_cast<double>(pa) - static_cast<double>(pb));
      double w = pa < pb ? 1.0 : 0.5;
      best = std::max(best, w / (1.0 + gap));
    }
  }
  return best;
}

double score_with(const QueryPlan& plan,
                  const std::map<KeywordId, TermOccurrences>& occurrences,
                  std::uint32_t n_max) {
  double score = 0.0;
  for (const auto& pair : plan.pairs) {
    if (pair.singleton) {
      score += static_cast<double>(occurrences.at(pair.a).count) /
               static_cast<double>(n_max);
    } else {
      score += pair_proximity(occurrences.at(pair.a), occurrences.at(pair.b));
    }
  }
  return score;
}

std::map<KeywordId, TermOccurrences> neural_occurrences(const NeuroIndex& nidx,
                                                        const QueryPlan& plan) {
  std::map<KeywordId, TermOccurrences> occurrences;
  for (KeywordId kid : plan.terms) {
    if (occurrences.contains(kid)) continue;
    TermOccurrences& occ = occurrences[kid];
    QueryResult first = query_iann(nidx, {kid, 1, 0.0});
    occ.count = first.count;
    if (!first.position) continue;  // absent term
    occ.positions.push_back(*first.position);
    // The decoded count bounds the enumeration; stop early at a sentinel
    // so an unconverged index cannot send us into a long scan.
    for (std::uint32_t ordinal = 2; ordinal <= first.count; ++ordinal) {
      QueryResult r = query_iann(nidx, {kid, ordinal, 0.0});
      if (!r.position) break;
      occ.positions.push_back(*r.position);
    }
  }
  return occurrences;
}

std::map<KeywordId, TermOccurrences> classical_occurrences(
    const ClassicalIndex& cdx, const QueryPlan& plan) {
  std::map<KeywordId, TermOccurrences> occurrences;
  for (KeywordId kid : plan.terms) {
    if (occurrences.contains(kid)) continue;
    TermOccurrences& occ = occurrences[kid];
    occ.count = match_count(cdx, kid);
    auto it = cdx.postings.find(kid);
    if (it != cdx.postings.end()) occ.positions = it->second;
  }
  return occurrences;
}

void sort_ranked(std::vector<RankedEntry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.file < b.file;
            });
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

double score_file(const NeuroIndex& nidx, const QueryPlan& plan) {
  return score_with(plan, neural_occurrences(nidx, plan),
                    nidx.meta.max_occurrences);
}

double score_file_classical(const ClassicalIndex& cdx, const QueryPlan& plan) {
  return score_with(plan, classical_occurrences(cdx, plan),
                    cdx.max_occurrences);
}

std::vector<RankedEntry> classical_rank(const Engine& engine,
                                        const QueryPlan& plan) {
  std::vector<RankedEntry> entries;
  entries.reserve(engine.file_count());
  for (std::size_t i = 0; i < engine.file_count(); ++i)
    entries.push_back({engine.corpus.files[i].id,
                       score_file_classical(engine.classical[i], plan), true});
  sort_ranked(entries);
  return entries;
}

RankedResults search(const Engine& engine, std::string_view phrase,
                     std::size_t k) {
  if (k < 1) fail(Errc::invalid_params, "k must be >= 1");
  QueryPlan plan =
      split_pairs(phrase, engine.corpus.dictionary, engine.config.stopwords);
  std::vector<double> probe = probe_vector(plan, engine.corpus.dictionary);

  // k sizes the refinement rounds; retrieval itself walks every node so the
  // final snapshot ranks the whole labeled corpus.
  std::vector<FileId> all_ids = engine.all_file_ids();
  std::vector<FileId> cand =
      candidates(engine.som, probe, std::max(k, all_ids.size()), all_ids);

  // Snapshot 1: candidates ranked by signature-to-probe proximity.
  std::vector<RankedEntry> proximity_order;
  proximity_order.reserve(cand.size());
  for (FileId fid : cand)
    proximity_order.push_back(
        {fid, 1.0 / (1.0 + euclidean(engine.signatures[fid], probe)), false});
  sort_ranked(proximity_order);

  RankedResults results;
  results.snapshots.push_back({proximity_order, false});

  // Refinement rounds: exactly score k more candidates per round, keeping
  // scored files ahead of the signature-ranked remainder.
  std::vector<RankedEntry> scored;
  std::size_t cursor = 0;
  while (cursor < proximity_order.size()) {
    std::size_t stop = std::min(proximity_order.size(), cursor + k);
    for (; cursor < stop; ++cursor) {
      FileId fid = proximity_order[cursor].file;
      scored.push_back({fid, score_file(engine.neuro[fid], plan), true});
    }
    std::vector<RankedEntry> snapshot_entries = scored;
    sort_ranked(snapshot_entries);
    for (std::size_t i = cursor; i < proximity_order.size(); ++i)
      snapshot_entries.push_back(proximity_order[i]);
    bool is_final = cursor == proximity_order.size();
    results.snapshots.push_back({std::move(snapshot_entries), is_final});
  }
  return results;
}

}  // namespace neuridx
