#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "neuridx/engine.hpp"

namespace neuridx {

/// Query phrase reduced to dictionary ids and consecutive term pairs.
struct QueryPlan {
  std::string phrase;
  std::vector<KeywordId> terms;        // survivors, in phrase order
  std::vector<std::string> dropped;    // tokens not in the dictionary
  struct TermPair {
    KeywordId a = 0;
    KeywordId b = 0;
    bool singleton = false;  // single-term query; scored by frequency
  };
  std::vector<TermPair> pairs;
};

struct RankedEntry {
  FileId file = 0;
  double score = 0.0;
  bool exact = false;  // true once score_file has run for this file
};

struct Snapshot {
  std::vector<RankedEntry> entries;
  bool final = false;
};

/// Any-time result: a sequence of progressively refined rankings, the last
/// one exhaustive over the candidate set.
struct RankedResults {
  std::vector<Snapshot> snapshots;

  const Snapshot& final_snapshot() const { return snapshots.back(); }
};

/// Tokenizes the phrase, drops unknown terms and pairs consecutive
/// survivors. Throws empty_query when nothing survives.
QueryPlan split_pairs(std::string_view phrase, const Dictionary& dict,
                      const std::set<std::string>& stopwords);

/// Binary query-term indicator vector of dictionary dimension.
std::vector<double> probe_vector(const QueryPlan& plan, const Dictionary& dict);

/// Pair-proximity score through the neural index: max over occurrence pairs
/// of w/(1+gap), w=1 in direct order, 0.5 reversed; singletons score
/// count/n_max; the file score is the sum over pairs.
double score_file(const NeuroIndex& nidx, const QueryPlan& plan);

/// Same formula with positions read from the classical index; the
/// benchmark baseline and the oracle for converged neural indexes.
double score_file_classical(const ClassicalIndex& cdx, const QueryPlan& plan);

/// Exhaustive classical ranking over all engine files (score desc, id asc).
std::vector<RankedEntry> classical_rank(const Engine& engine,
                                        const QueryPlan& plan);

/// Any-time search: SOM candidate retrieval, signature-proximity snapshot,
/// then refinement rounds of k files each until all candidates are scored.
RankedResults search(const Engine& engine, std::string_view phrase,
                     std::size_t k);

}  // namespace neuridx
