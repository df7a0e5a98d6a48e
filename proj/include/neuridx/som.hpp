#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "neuridx/corpus.hpp"

namespace neuridx {

struct SomConfig {
  std::size_t grid = 1;       // G; the map has G x G nodes
  std::size_t input_dim = 0;  // V
  std::size_t epochs = 100;   // T
  double alpha0 = 0.3;        // initial learning rate
  double radius0 = 0.0;       // initial neighborhood radius (Chebyshev)
  double lvq_beta = 0.05;     // supervised refinement rate
  std::uint64_t seed = 0;
};

struct NodeCoord {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const NodeCoord&) const = default;
};

/// Grid of codebook vectors with per-node file-id label sets.
struct SomMap {
  SomConfig config;
  std::vector<std::vector<double>> codebooks;  // row-major, G*G entries
  std::vector<std::set<FileId>> labels;        // parallel to codebooks
  std::vector<double> quantization_error_history;

  std::size_t node_count() const { return codebooks.size(); }
  std::size_t node_index(NodeCoord c) const { return c.row * config.grid + c.col; }
};

struct LabeledSample {
  std::vector<double> values;
  FileId file_id = 0;
};

SomConfig default_som_config(std::size_t num_files, std::size_t input_dim,
                             std::uint64_t seed);

/// Codebooks drawn (with replacement) from the samples; labels empty.
SomMap init_som(const SomConfig& config,
                std::span<const std::vector<double>> samples);

/// Best matching unit: Euclidean argmin, ties to the smallest (row, col).
NodeCoord bmu(const SomMap& map, std::span<const double> x);

/// One decaying-rate epoch over all samples in seeded shuffled order.
/// alpha(t) = alpha0*(1 - t/T), radius(t) = radius0*(1 - t/T), Gaussian
/// neighborhood in Chebyshev grid distance.
void som_epoch(SomMap& map, std::span<const std::vector<double>> samples,
               std::size_t t);

/// Mean Euclidean distance sample -> BMU; appended to the map's history.
double quantization_error(SomMap& map,
                          std::span<const std::vector<double>> samples);

/// LVQ1 pass: attract the BMU codebook when its label set contains the
/// sample's label, repel otherwise.
void lvq_refine(SomMap& map, std::span<const LabeledSample> labeled,
                double beta);

/// Full pipeline: init, T SOM epochs, label assignment, quantization error,
/// one LVQ pass, label re-assignment.
SomMap train_associative(std::span<const LabeledSample> signatures,
                         const SomConfig& config);

/// File ids of the nodes nearest to the probe, nearest node first, until at
/// least k ids are collected. Falls back to all_files when the map carries
/// no labels.
std::vector<FileId> candidates(const SomMap& map, std::span<const double> probe,
                               std::size_t k, std::span<const FileId> all_files);

void persist_som(const SomMap& map, const std::filesystem::path& path);
SomMap load_som(const std::filesystem::path& path);

}  // namespace neuridx
