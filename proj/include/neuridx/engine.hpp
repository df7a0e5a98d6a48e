#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "neuridx/classical_index.hpp"
#include "neuridx/corpus.hpp"
#include "neuridx/neuro_index.hpp"
#include "neuridx/som.hpp"

namespace neuridx {

/// Everything needed to build or load an engine directory. Mirrors the
/// JSON config file accepted by the CLI.
struct EngineConfig {
  std::set<std::string> stopwords = default_stopwords();

  // network
  std::size_t hidden_size = 0;  // 0 = heuristic from the largest training set
  Activation hidden_activation = Activation::Tanh;
  double learning_rate = 0.005;
  double momentum = 0.95;
  std::uint32_t epoch_cap = 30000;
  std::uint32_t check_interval = 50;
  std::size_t batch_size = 1;  // 0 = full batch
  double count_tolerance = 0.02;
  bool pretrain = true;

  // som
  std::size_t som_grid = 0;  // 0 = ceil(sqrt(file count))
  std::size_t som_epochs = 100;
  double som_alpha0 = 0.3;
  double som_radius0 = -1.0;  // < 0 = grid/2
  double lvq_beta = 0.05;

  std::uint64_t seed = 42;
  unsigned jobs = 1;
};

struct Engine {
  Corpus corpus;
  std::vector<ClassicalIndex> classical;
  std::vector<NeuroIndex> neuro;
  std::vector<std::vector<double>> signatures;  // parallel to corpus.files
  SomMap som;
  EngineConfig config;

  std::size_t file_count() const { return corpus.files.size(); }
  std::vector<FileId> all_file_ids() const;
};

struct FileBuildInfo {
  FileId file_id = 0;
  std::string path;
  std::uint32_t epochs = 0;
  bool trained = false;
};

using BuildProgress = std::function<void(const FileBuildInfo&)>;

/// Full indexing pipeline: classical indexes, optional warm-start
/// pretraining, per-file IANN training (parallel with config.jobs),
/// signatures, SOM training.
Engine build_engine(Corpus corpus, const EngineConfig& config,
                    const BuildProgress& progress = nullptr);

/// Writes corpus.json, one .cdx/.ndx pair per file, som.map and
/// stopwords.txt into dir (created if missing).
void save_engine(const Engine& engine, const std::filesystem::path& dir);

Engine load_engine(const std::filesystem::path& dir);

/// JSON config file; unknown keys are rejected.
EngineConfig parse_engine_config(const std::filesystem::path& path);
EngineConfig engine_config_from_json(const nlohmann::json& j);
nlohmann::json engine_config_to_json(const EngineConfig& config);

}  // namespace neuridx
