#include "neuridx/neuro_index.hpp"

#include <algorithm>
#include <cmath>

#include "neuridx/error.hpp"
#include "neuridx/io.hpp"
#include "neuridx/rng.hpp"

namespace neuridx {

namespace {

constexpr char kMagic[4] = {'N', 'D', 'X', '1'};
constexpr double kSentinel = -1.0;
constexpr double kSentinelThreshold = -0.5;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double encode_position(std::uint32_t pos, std::uint32_t token_count) {
  if (token_count <= 1) return 0.0;
  return static_cast<double>(pos) / static_cast<double>(token_count - 1);
}

IannMeta meta_from(const ClassicalIndex& cdx, std::size_t vocab_size) {
  IannMeta meta;
  meta.file_id = cdx.file_id;
  meta.token_count = cdx.token_count;
  meta.max_occurrences = cdx.max_occurrences;
  meta.vocab_size = static_cast<std::uint32_t>(vocab_size);
  return meta;
}

}  // namespace

std::vector<double> encode_input(const QuerySpec& q, const IannMeta& meta) {
  if (q.keyword >= meta.vocab_size)
    fail(Errc::keyword_out_of_range,
         "keyword id " + std::to_string(q.keyword) + " >= vocabulary size " +
             std::to_string(meta.vocab_size));
  std::vector<double> x(meta.vocab_size + 2, 0.0);
  x[q.keyword] = 1.0;
  x[meta.vocab_size] = static_cast<double>(q.ordinal) /
                       static_cast<double>(meta.max_occurrences);
  x[meta.vocab_size + 1] = q.degree;
  return x;
}

QueryResult decode_output(std::span<const double> y, const IannMeta& meta) {
  QueryResult result;
  double span = meta.token_count >= 1
                    ? static_cast<double>(meta.token_count - 1)
                    : 0.0;
  if (y[0] >= kSentinelThreshold)
    result.position =
        static_cast<std::uint32_t>(std::llround(clamp01(y[0]) * span));
  result.count = static_cast<std::uint32_t>(
      std::llround(clamp01(y[1]) * meta.max_occurrences));
  return result;
}

std::vector<TrainSample> build_training_set(const ClassicalIndex& cdx,
                                            const Dictionary& dict) {
  IannMeta meta = meta_from(cdx, dict.size());
  std::vector<TrainSample> samples;
  double inv_nmax = 1.0 / static_cast<double>(meta.max_occurrences);
  for (KeywordId kid = 0; kid < dict.size(); ++kid) {
    std::uint32_t count = match_count(cdx, kid);
    double count_target = static_cast<double>(count) * inv_nmax;
    for (std::uint32_t ordinal = 1; ordinal <= count; ++ordinal) {
      std::uint32_t pos = *lookup(cdx, kid, ordinal);
      samples.push_back({encode_input({kid, ordinal, 0.0}, meta),
                         {encode_position(pos, meta.token_count), count_target}});
    }
    // One negative just past the last occurrence; for absent keywords this
    // is the only sample and its count target is 0.
    samples.push_back({encode_input({kid, count + 1, 0.0}, meta),
                       {kSentinel, count_target}});
  }
  return samples;
}

NetworkConfig default_iann_config(std::size_t vocab_size,
                                  std::size_t sample_count,
                                  std::uint64_t seed) {
  std::size_t hidden = 3 * static_cast<std::size_t>(std::ceil(
                               std::sqrt(static_cast<double>(sample_count))));
  hidden = std::clamp<std::size_t>(hidden, 16, 96);
  NetworkConfig config;
  config.layer_sizes = {vocab_size + 2, hidden, std::max<std::size_t>(hidden / 2, 8), 2};
  config.seed = seed;
  return config;
}

namespace {

struct ExpectedDecode {
  std::optional<std::uint32_t> position;
  std::uint32_t count = 0;
};

ExpectedDecode expected_from_target(const TrainSample& sample,
                                    const IannMeta& meta) {
  ExpectedDecode expected;
  // Decoding the exact targets recovers the classical answers.
  QueryResult r = decode_output(sample.target, meta);
  expected.position = r.position;
  expected.count = r.count;
  return expected;
}

bool network_converged(const Network& net,
                       std::span<const TrainSample> samples,
                       std::span<const ExpectedDecode> expected,
                       const IannMeta& meta, double count_tolerance) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<double> y = forward(net, samples[i].input);
    QueryResult got = decode_output(y, meta);
    if (got.position != expected[i].position || got.count != expected[i].count)
      return false;
    if (std::fabs(y[1] - samples[i].target[1]) > count_tolerance) return false;
  }
  return true;
}

}  // namespace

NeuroIndex train_iann(const ClassicalIndex& cdx, const Dictionary& dict,
                      const NetworkConfig& config, const TrainOptions& opts,
                      const Network* warm_start) {
  if (config.layer_sizes.empty() ||
      config.layer_sizes.front() != dict.size() + 2 ||
      config.layer_sizes.back() != 2)
    fail(Errc::invalid_config,
         "network must map V+2 inputs to 2 outputs for this dictionary");

  NeuroIndex nidx;
  nidx.meta = meta_from(cdx, dict.size());
  std::vector<TrainSample> samples = build_training_set(cdx, dict);
  std::vector<ExpectedDecode> expected;
  expected.reserve(samples.size());
  for (const auto& s : samples) expected.push_back(expected_from_target(s, nidx.meta));

  if (warm_start) {
    if (warm_start->input_dim() != dict.size() + 2 ||
        warm_start->output_dim() != 2)
      fail(Errc::invalid_config, "warm-start network has wrong dimensions");
    nidx.network = *warm_start;
  } else {
    nidx.network = init_network(config);
  }

  auto converged = [&] {
    return network_converged(nidx.network, samples, expected, nidx.meta,
                             opts.count_tolerance);
  };

  if (converged()) {
    nidx.trained = true;
    nidx.epochs_used = 0;
    return nidx;
  }

  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<TrainSample> batch;
  MomentumState velocity;

  auto step = [&](std::span<const TrainSample> b) {
    if (opts.momentum > 0.0)
      train_step_momentum(nidx.network, b, opts.learning_rate, opts.momentum,
                          velocity);
    else
      train_step(nidx.network, b, opts.learning_rate);
  };

  // A run that has not converged by half the budget is usually stuck, not
  // slow; one deterministic restart with a reseeded init and sample order
  // rescues it more often than the remaining epochs would.
  std::uint32_t restart_at =
      opts.epoch_cap >= 1000 ? opts.epoch_cap / 2 : opts.epoch_cap + 1;

  std::uint32_t epoch = 0;
  try {
    for (epoch = 1; epoch <= opts.epoch_cap; ++epoch) {
      std::uint64_t shuffle_salt =
          epoch > restart_at ? mix_seed(opts.seed, 2) : opts.seed;
      if (epoch == restart_at + 1) {
        velocity = MomentumState{};
        if (warm_start) {
          nidx.network = *warm_start;
        } else {
          NetworkConfig retry = config;
          retry.seed = mix_seed(config.seed, 2);
          nidx.network = init_network(retry);
        }
      }
      if (opts.batch_size == 0 || opts.batch_size >= samples.size()) {
        step(samples);
      } else {
        Rng rng(mix_seed(shuffle_salt, epoch));
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += opts.batch_size) {
          std::size_t stop = std::min(order.size(), start + opts.batch_size);
          batch.clear();
          for (std::size_t i = start; i < stop; ++i)
            batch.push_back(samples[order[i]]);
          step(batch);
        }
      }
      if (epoch % opts.check_interval == 0 || epoch == opts.epoch_cap) {
        if (converged()) {
          nidx.trained = true;
          break;
        }
      }
    }
  } catch (const Error& e) {
    if (e.code() == Errc::non_finite_loss)
      fail(Errc::training_diverged,
           "training diverged on file " + std::to_string(cdx.file_id));
    throw;
  }
  nidx.epochs_used = std::min(epoch, opts.epoch_cap);
  return nidx;
}

QueryResult query_iann(const NeuroIndex& nidx, const QuerySpec& q) {
  std::vector<double> x = encode_input(q, nidx.meta);
  std::vector<double> y = forward(nidx.network, x);
  return decode_output(y, nidx.meta);
}

ValidationReport validate_iann(const NeuroIndex& nidx,
                               const ClassicalIndex& cdx) {
  ValidationReport report;
  for (KeywordId kid = 0; kid < nidx.meta.vocab_size; ++kid) {
    std::uint32_t count = match_count(cdx, kid);
    for (std::uint32_t ordinal = 1; ordinal <= count + 1; ++ordinal) {
      ++report.total;
      QueryResult got = query_iann(nidx, {kid, ordinal, 0.0});
      std::optional<std::uint32_t> want_pos = lookup(cdx, kid, ordinal);
      std::uint32_t want_count = count;
      if (got.position == want_pos && got.count == want_count) {
        ++report.exact;
      } else {
        report.mismatches.push_back(
            {kid, ordinal, want_pos, got.position, want_count, got.count});
      }
    }
  }
  return report;
}

std::vector<double> signature(const NeuroIndex& nidx, const Dictionary& dict) {
  std::vector<double> sig(dict.size(), 0.0);
  for (KeywordId kid = 0; kid < dict.size(); ++kid) {
    std::vector<double> x = encode_input({kid, 1, 0.0}, nidx.meta);
    std::vector<double> y = forward(nidx.network, x);
    sig[kid] = clamp01(y[1]);
  }
  return sig;
}

Network pretrain_initial(const Dictionary& dict, const NetworkConfig& config,
                         const TrainOptions& opts,
                         std::uint32_t* epochs_used) {
  // The all-negative set is exactly the training set of an empty file.
  ClassicalIndex empty;
  empty.file_id = 0;
  empty.token_count = 0;
  empty.max_occurrences = 1;
  NeuroIndex nidx = train_iann(empty, dict, config, opts);
  if (epochs_used) *epochs_used = nidx.epochs_used;
  return nidx.network;
}

void persist_neuro(const NeuroIndex& nidx, const std::filesystem::path& path) {
  auto out = io::open_out(path);
  io::write_magic(out, kMagic);
  nlohmann::json activations = nlohmann::json::array();
  for (const auto& layer : nidx.network.layers)
    activations.push_back(activation_name(layer.activation));
  nlohmann::json header{{"file_id", nidx.meta.file_id},
                        {"L", nidx.meta.token_count},
                        {"n_max", nidx.meta.max_occurrences},
                        {"V", nidx.meta.vocab_size},
                        {"layer_sizes", nidx.network.config.layer_sizes},
                        {"activations", activations},
                        {"trained", nidx.trained},
                        {"epochs", nidx.epochs_used}};
  io::write_json_block(out, header, 2 * io::kHeaderBlock);
  for (const auto& layer : nidx.network.layers) {
    for (double w : layer.weights) io::write_f64(out, w);
    for (double b : layer.biases) io::write_f64(out, b);
  }
}

NeuroIndex load_neuro(const std::filesystem::path& path) {
  auto in = io::open_in(path);
  io::expect_magic(in, kMagic);
  nlohmann::json header = io::read_json_block(in);
  NeuroIndex nidx;
  nidx.meta.file_id = header.at("file_id").get<FileId>();
  nidx.meta.token_count = header.at("L").get<std::uint32_t>();
  nidx.meta.max_occurrences = header.at("n_max").get<std::uint32_t>();
  nidx.meta.vocab_size = header.at("V").get<std::uint32_t>();
  nidx.trained = header.at("trained").get<bool>();
  nidx.epochs_used = header.at("epochs").get<std::uint32_t>();

  auto layer_sizes = header.at("layer_sizes").get<std::vector<std::size_t>>();
  auto activations = header.at("activations").get<std::vector<std::string>>();
  if (layer_sizes.size() < 2 || activations.size() + 1 != layer_sizes.size())
    fail(Errc::format_error, "inconsistent layer metadata");

  NetworkConfig config;
  config.layer_sizes = layer_sizes;
  config.output_activation = activation_from_name(activations.back());
  config.hidden_activation = activations.size() > 1
                                 ? activation_from_name(activations.front())
                                 : Activation::Tanh;
  nidx.network.config = config;
  nidx.network.layers.resize(layer_sizes.size() - 1);
  for (std::size_t j = 0; j < nidx.network.layers.size(); ++j) {
    Layer& layer = nidx.network.layers[j];
    layer.in = layer_sizes[j];
    layer.out = layer_sizes[j + 1];
    layer.activation = activation_from_name(activations[j]);
    layer.weights.resize(layer.out * layer.in);
    for (double& w : layer.weights) w = io::read_f64(in);
    layer.biases.resize(layer.out);
    for (double& b : layer.biases) b = io::read_f64(in);
  }
  return nidx;
}

}  // namespace neuridx
