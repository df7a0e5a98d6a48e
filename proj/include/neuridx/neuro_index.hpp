#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "neuridx/classical_index.hpp"
#include "neuridx/corpus.hpp"
#include "neuridx/neural.hpp"

namespace neuridx {

/// Per-file quantities needed to encode queries and decode network outputs.
struct IannMeta {
  FileId file_id = 0;
  std::uint32_t token_count = 0;     // L
  std::uint32_t max_occurrences = 1; // n_max
  std::uint32_t vocab_size = 0;      // V
  std::uint16_t encoding_version = 1;
};

/// A trained per-file index: the network weights are the index.
struct NeuroIndex {
  Network network;  // input dim V+2, output dim 2
  IannMeta meta;
  bool trained = false;
  std::uint32_t epochs_used = 0;
};

struct QuerySpec {
  KeywordId keyword = 0;
  std::uint32_t ordinal = 1;  // 1-based occurrence number
  double degree = 0.0;        // reserved input, fixed at 0
};

struct QueryResult {
  std::optional<std::uint32_t> position;  // nullopt == NOT_FOUND sentinel
  std::uint32_t count = 0;
};

// Per-sample SGD with heavy-ball momentum. Plain full-batch descent at any
// stable learning rate plateaus far above decode precision: samples of one
// keyword at adjacent ordinals differ by just 1/n_max in a single input
// coordinate, which conditions the regression badly.
struct TrainOptions {
  double learning_rate = 0.005;
  double momentum = 0.95;
  std::uint32_t epoch_cap = 30000;
  std::uint32_t check_interval = 50;
  std::size_t batch_size = 1;  // 0 = full batch
  // Convergence additionally requires the count channel within this absolute
  // tolerance, so signatures of converged indexes are sharp.
  double count_tolerance = 0.02;
  std::uint64_t seed = 0;  // mini-batch shuffling only
};

struct ValidationMismatch {
  KeywordId keyword = 0;
  std::uint32_t ordinal = 0;
  std::optional<std::uint32_t> expected_position;
  std::optional<std::uint32_t> actual_position;
  std::uint32_t expected_count = 0;
  std::uint32_t actual_count = 0;
};

struct ValidationReport {
  std::size_t total = 0;
  std::size_t exact = 0;
  std::vector<ValidationMismatch> mismatches;

  bool all_exact() const { return exact == total; }
};

/// One-hot keyword slot, then ordinal/n_max, then the degree input.
std::vector<double> encode_input(const QuerySpec& q, const IannMeta& meta);

/// Position channel: sentinel below -0.5, else round(clamp(y0,0,1)*(L-1)).
/// Count channel: round(clamp(y1,0,1)*n_max).
QueryResult decode_output(std::span<const double> y, const IannMeta& meta);

/// Every (keyword, ordinal) the classical index answers, plus one negative
/// sample per keyword just past its last occurrence.
std::vector<TrainSample> build_training_set(const ClassicalIndex& cdx,
                                            const Dictionary& dict);

/// [V+2, H, H/2, 2] with H = clamp(3*ceil(sqrt(sample_count)), 16, 96).
/// Two hidden layers: the first can rescale the narrow ordinal input so the
/// second sees well-separated values, which single-hidden-layer descent
/// fails to do within the epoch cap.
NetworkConfig default_iann_config(std::size_t vocab_size,
                                  std::size_t sample_count,
                                  std::uint64_t seed);

NeuroIndex train_iann(const ClassicalIndex& cdx, const Dictionary& dict,
                      const NetworkConfig& config,
                      const TrainOptions& opts = {},
                      const Network* warm_start = nullptr);

QueryResult query_iann(const NeuroIndex& nidx, const QuerySpec& q);

/// Replays the training enumeration through the network and compares with
/// the classical index.
ValidationReport validate_iann(const NeuroIndex& nidx,
                               const ClassicalIndex& cdx);

/// Term-presence profile: clamped count-channel output at ordinal 1 for
/// every dictionary keyword. The SOM observation.
std::vector<double> signature(const NeuroIndex& nidx, const Dictionary& dict);

/// Network trained on the all-negative set; warm start for per-file
/// training so only deviations from "absent" need to be learned.
Network pretrain_initial(const Dictionary& dict, const NetworkConfig& config,
                         const TrainOptions& opts = {},
                         std::uint32_t* epochs_used = nullptr);

void persist_neuro(const NeuroIndex& nidx, const std::filesystem::path& path);
NeuroIndex load_neuro(const std::filesystem::path& path);

}  // namespace neuridx
