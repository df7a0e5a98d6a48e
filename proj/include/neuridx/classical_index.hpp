#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "neuridx/corpus.hpp"

namespace neuridx {

/// Per-file positional inverted index: keyword id -> ascending token
/// positions. Training oracle for the neural index and the benchmark
/// baseline.
struct ClassicalIndex {
  FileId file_id = 0;
  std::uint32_t token_count = 0;     // L
  std::uint32_t max_occurrences = 1; // n_max, 1 for an empty file
  std::map<KeywordId, std::vector<std::uint32_t>> postings;

  std::uint64_t occurrence_count() const {
    std::uint64_t total = 0;
    for (const auto& [kid, positions] : postings) total += positions.size();
    return total;
  }
};

ClassicalIndex build_classical(const TokenSeq& seq, const Dictionary& dict,
                               FileId file_id);

/// Position of the ordinal-th occurrence (1-based), or nullopt when the
/// keyword is absent or has fewer occurrences.
std::optional<std::uint32_t> lookup(const ClassicalIndex& idx, KeywordId kid,
                                    std::uint32_t ordinal);

std::uint32_t match_count(const ClassicalIndex& idx, KeywordId kid);

void persist_classical(const ClassicalIndex& idx,
                       const std::filesystem::path& path);
ClassicalIndex load_classical(const std::filesystem::path& path);

}  // namespace neuridx
