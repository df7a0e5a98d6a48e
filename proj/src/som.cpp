#include "neuridx/som.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "neuridx/error.hpp"
#include "neuridx/io.hpp"
#include "neuridx/rng.hpp"

namespace neuridx {

namespace {

constexpr char kMagic[4] = {'S', 'O', 'M', '1'};
constexpr double kRadiusFloor = 1e-9;

void validate(const SomConfig& c) {
  if (c.grid < 1 || c.epochs < 1 || c.alpha0 <= 0.0 || c.alpha0 > 1.0 ||
      c.radius0 < 0.0 || c.lvq_beta <= 0.0 || c.lvq_beta > 1.0)
    fail(Errc::invalid_config, "invalid SOM configuration");
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void check_dim(const SomMap& map, std::span<const double> x) {
  if (x.size() != map.config.input_dim)
    fail(Errc::dimension_mismatch,
         "sample has dimension " + std::to_string(x.size()) + ", expected " +
             std::to_string(map.config.input_dim));
}

void assign_labels(SomMap& map, std::span<const LabeledSample> labeled) {
  for (auto& set : map.labels) set.clear();
  for (const auto& sample : labeled)
    map.labels[map.node_index(bmu(map, sample.values))].insert(sample.file_id);
}

}  // namespace

SomConfig default_som_config(std::size_t num_files, std::size_t input_dim,
                             std::uint64_t seed) {
  SomConfig config;
  config.grid = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(std::max<std::size_t>(num_files, 1)))));
  config.input_dim = input_dim;
  config.radius0 = static_cast<double>(config.grid) / 2.0;
  config.seed = seed;
  return config;
}

SomMap init_som(const SomConfig& config,
                std::span<const std::vector<double>> samples) {
  validate(config);
  if (samples.empty()) fail(Errc::empty_samples, "no samples to initialize from");
  for (const auto& s : samples)
    if (s.size() != config.input_dim)
      fail(Errc::dimension_mismatch, "sample dimension != configured input_dim");

  SomMap map;
  map.config = config;
  std::size_t nodes = config.grid * config.grid;
  map.codebooks.reserve(nodes);
  Rng rng(config.seed);
  for (std::size_t i = 0; i < nodes; ++i)
    map.codebooks.push_back(samples[rng.next_index(samples.size())]);
  map.labels.assign(nodes, {});
  return map;
}

NodeCoord bmu(const SomMap& map, std::span<const double> x) {
  check_dim(map, x);
  std::size_t best = 0;
  double best_dist = squared_distance(x, map.codebooks[0]);
  for (std::size_t i = 1; i < map.codebooks.size(); ++i) {
    double d = squared_distance(x, map.codebooks[i]);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return {best / map.config.grid, best % map.config.grid};
}

void som_epoch(SomMap& map, std::span<const std::vector<double>> samples,
               std::size_t t) {
  if (t >= map.config.epochs)
    fail(Errc::invalid_params, "epoch index out of range");
  const std::size_t grid = map.config.grid;
  const double progress =
      1.0 - static_cast<double>(t) / static_cast<double>(map.config.epochs);
  const double alpha = map.config.alpha0 * progress;
  const double radius = map.config.radius0 * progress;
  const double denom = 2.0 * std::max(radius, kRadiusFloor) *
                       std::max(radius, kRadiusFloor);

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(map.config.seed, t + 1));
  rng.shuffle(order);

  const auto reach = static_cast<std::ptrdiff_t>(std::floor(radius));
  for (std::size_t idx : order) {
    const auto& x = samples[idx];
    NodeCoord winner = bmu(map, x);
    auto row_lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(winner.row) - reach);
    auto row_hi = std::min<std::ptrdiff_t>(grid - 1, static_cast<std::ptrdiff_t>(winner.row) + reach);
    auto col_lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(winner.col) - reach);
    auto col_hi = std::min<std::ptrdiff_t>(grid - 1, static_cast<std::ptrdiff_t>(winner.col) + reach);
    for (auto row = row_lo; row <= row_hi; ++row) {
      for (auto col = col_lo; col <= col_hi; ++col) {
        auto d = std::max(std::abs(row - static_cast<std::ptrdiff_t>(winner.row)),
                          std::abs(col - static_cast<std::ptrdiff_t>(winner.col)));
        if (static_cast<double>(d) > radius) continue;
        double h = std::exp(-static_cast<double>(d * d) / denom);
        auto& code = map.codebooks[static_cast<std::size_t>(row) * grid +
                                   static_cast<std::size_t>(col)];
        double step = alpha * h;
        for (std::size_t i = 0; i < code.size(); ++i)
          code[i] += step * (x[i] - code[i]);
      }
    }
  }
}

double quantization_error(SomMap& map,
                          std::span<const std::vector<double>> samples) {
  if (samples.empty()) fail(Errc::empty_samples, "no samples");
  double total = 0.0;
  for (const auto& x : samples) {
    NodeCoord c = bmu(map, x);
    total += std::sqrt(squared_distance(x, map.codebooks[map.node_index(c)]));
  }
  double mean = total / static_cast<double>(samples.size());
  map.quantization_error_history.push_back(mean);
  return mean;
}

void lvq_refine(SomMap& map, std::span<const LabeledSample> labeled,
                double beta) {
  bool any_label = false;
  for (const auto& set : map.labels) any_label |= !set.empty();
  if (!any_label && !labeled.empty())
    fail(Errc::unassigned_labels, "labels must be assigned before LVQ");

  for (const auto& sample : labeled) {
    std::size_t node = map.node_index(bmu(map, sample.values));
    auto& code = map.codebooks[node];
    double sign = map.labels[node].contains(sample.file_id) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < code.size(); ++i)
      code[i] += sign * beta * (sample.values[i] - code[i]);
  }
}

SomMap train_associative(std::span<const LabeledSample> signatures,
                         const SomConfig& config) {
  if (signatures.empty()) fail(Errc::empty_samples, "no signatures");
  std::vector<std::vector<double>> samples;
  samples.reserve(signatures.size());
  for (const auto& s : signatures) samples.push_back(s.values);

  SomMap map = init_som(config, samples);
  quantization_error(map, samples);
  for (std::size_t t = 0; t < config.epochs; ++t) som_epoch(map, samples, t);
  assign_labels(map, signatures);
  quantization_error(map, samples);
  lvq_refine(map, signatures, config.lvq_beta);
  assign_labels(map, signatures);
  quantization_error(map, samples);
  return map;
}

std::vector<FileId> candidates(const SomMap& map, std::span<const double> probe,
                               std::size_t k,
                               std::span<const FileId> all_files) {
  check_dim(map, probe);
  if (k < 1) fail(Errc::invalid_params, "k must be >= 1");

  std::vector<std::size_t> nodes(map.node_count());
  std::iota(nodes.begin(), nodes.end(), 0);
  std::vector<double> dist(map.node_count());
  for (std::size_t i = 0; i < map.node_count(); ++i)
    dist[i] = squared_distance(probe, map.codebooks[i]);
  std::sort(nodes.begin(), nodes.end(), [&](std::size_t a, std::size_t b) {
    return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
  });

  std::vector<FileId> result;
  std::set<FileId> seen;
  for (std::size_t node : nodes) {
    for (FileId fid : map.labels[node])
      if (seen.insert(fid).second) result.push_back(fid);
    if (result.size() >= k) break;
  }
  if (result.empty()) return {all_files.begin(), all_files.end()};
  return result;
}

void persist_som(const SomMap& map, const std::filesystem::path& path) {
  auto out = io::open_out(path);
  io::write_magic(out, kMagic);
  nlohmann::json header{
      {"G", map.config.grid},
      {"V", map.config.input_dim},
      {"config",
       {{"epochs", map.config.epochs},
        {"alpha0", map.config.alpha0},
        {"radius0", map.config.radius0},
        {"lvq_beta", map.config.lvq_beta},
        {"seed", map.config.seed}}},
      {"qe_history", map.quantization_error_history}};
  io::write_json_block(out, header, 2 * io::kHeaderBlock);
  for (const auto& code : map.codebooks)
    for (double v : code) io::write_f64(out, v);
  io::write_u32(out, static_cast<std::uint32_t>(map.node_count()));
  for (std::size_t i = 0; i < map.node_count(); ++i) {
    io::write_u32(out, static_cast<std::uint32_t>(i));
    io::write_u32(out, static_cast<std::uint32_t>(map.labels[i].size()));
    for (FileId fid : map.labels[i]) io::write_u32(out, fid);
  }
}

SomMap load_som(const std::filesystem::path& path) {
  auto in = io::open_in(path);
  io::expect_magic(in, kMagic);
  nlohmann::json header = io::read_json_block(in);
  SomMap map;
  map.config.grid = header.at("G").get<std::size_t>();
  map.config.input_dim = header.at("V").get<std::size_t>();
  const auto& cfg = header.at("config");
  map.config.epochs = cfg.at("epochs").get<std::size_t>();
  map.config.alpha0 = cfg.at("alpha0").get<double>();
  map.config.radius0 = cfg.at("radius0").get<double>();
  map.config.lvq_beta = cfg.at("lvq_beta").get<double>();
  map.config.seed = cfg.at("seed").get<std::uint64_t>();
  map.quantization_error_history =
      header.at("qe_history").get<std::vector<double>>();

  std::size_t nodes = map.config.grid * map.config.grid;
  map.codebooks.assign(nodes, std::vector<double>(map.config.input_dim));
  for (auto& code : map.codebooks)
    for (double& v : code) v = io::read_f64(in);
  map.labels.assign(nodes, {});
  std::uint32_t entries = io::read_u32(in);
  if (entries != nodes) fail(Errc::format_error, "label table size mismatch");
  for (std::uint32_t e = 0; e < entries; ++e) {
    std::uint32_t node = io::read_u32(in);
    if (node >= nodes) fail(Errc::format_error, "label node out of range");
    std::uint32_t count = io::read_u32(in);
    for (std::uint32_t i = 0; i < count; ++i)
      map.labels[node].insert(io::read_u32(in));
  }
  return map;
}

}  // namespace neuridx
