#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "neuridx/engine.hpp"

namespace neuridx {

struct StorageRow {
  FileId file_id = 0;
  std::uint64_t token_count = 0;
  std::uint64_t occurrence_count = 0;
  std::uint64_t classical_bytes = 0;
  std::uint64_t neuro_bytes = 0;
};

struct StorageReport {
  std::vector<StorageRow> rows;
};

struct LatencyRow {
  std::string query;
  std::string engine;  // "classical" or "neuro"
  std::uint64_t median_ns = 0;
  std::uint64_t p90_ns = 0;
  std::uint32_t repetitions = 0;
};

struct LatencyReport {
  std::vector<LatencyRow> rows;
  // Outside the timed path: final top-1 file per query, for cross-checking.
  std::vector<FileId> classical_top1;
  std::vector<FileId> neuro_top1;
};

enum class ReportFormat { Csv, Json };

/// Deterministic corpus of num_files synthetic documents, each
/// tokens_per_file tokens drawn uniformly from a generated vocabulary.
Corpus synth_corpus(std::size_t num_files, std::size_t tokens_per_file,
                    std::size_t vocab_size, std::uint64_t seed);

/// Same generator with an explicit per-file size list (shared dictionary).
Corpus synth_corpus_sized(std::span<const std::size_t> tokens_per_file,
                          std::size_t vocab_size, std::uint64_t seed);

struct StorageOptions {
  std::filesystem::path dir;      // where index files are written
  std::size_t hidden_size = 32;   // fixed architecture across files
  std::uint32_t epoch_cap = 0;    // storage does not need convergence
  std::uint64_t seed = 42;
};

/// Builds and persists both index types per file; rows carry actual
/// serialized byte sizes.
StorageReport measure_storage(const Corpus& corpus,
                              const StorageOptions& opts);

/// Times the classical full-scan engine against the SOM+IANN engine on the
/// same queries. 3 warmup repetitions are discarded.
LatencyReport measure_latency(const Engine& engine,
                              std::span<const std::string> queries,
                              std::uint32_t reps);

void emit_report(const StorageReport& report, const std::filesystem::path& path,
                 ReportFormat format);
void emit_report(const LatencyReport& report, const std::filesystem::path& path,
                 ReportFormat format);

/// Deterministic two-word phrases drawn from corpus files; benchmark
/// default when no query file is given.
std::vector<std::string> default_bench_queries(const Corpus& corpus,
                                               std::size_t count);

}  // namespace neuridx
