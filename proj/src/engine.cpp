#include "neuridx/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "neuridx/error.hpp"
#include "neuridx/io.hpp"
#include "neuridx/rng.hpp"

namespace neuridx {

namespace fs = std::filesystem;

std::vector<FileId> Engine::all_file_ids() const {
  std::vector<FileId> ids;
  ids.reserve(corpus.files.size());
  for (const auto& f : corpus.files) ids.push_back(f.id);
  return ids;
}

namespace {

std::string index_stem(FileId id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "file_%05u", id);
  return buf;
}

TrainOptions train_options(const EngineConfig& config, std::uint64_t seed) {
  TrainOptions opts;
  opts.learning_rate = config.learning_rate;
  opts.momentum = config.momentum;
  opts.epoch_cap = config.epoch_cap;
  opts.check_interval = config.check_interval;
  opts.batch_size = config.batch_size;
  opts.count_tolerance = config.count_tolerance;
  opts.seed = seed;
  return opts;
}

}  // namespace

Engine build_engine(Corpus corpus, const EngineConfig& config,
                    const BuildProgress& progress) {
  Engine engine;
  engine.config = config;
  engine.corpus = std::move(corpus);
  const std::size_t vocab = engine.corpus.dictionary.size();
  if (vocab == 0)
    fail(Errc::empty_corpus, "corpus has an empty dictionary; nothing to index");

  engine.classical.reserve(engine.file_count());
  std::size_t max_samples = 0;
  for (const auto& file : engine.corpus.files) {
    engine.classical.push_back(
        build_classical(file.tokens, engine.corpus.dictionary, file.id));
    // One sample per occurrence plus one negative per keyword.
    max_samples = std::max(max_samples,
                           static_cast<std::size_t>(
                               engine.classical.back().occurrence_count()) +
                               vocab);
  }

  NetworkConfig net_config =
      default_iann_config(vocab, max_samples, config.seed);
  if (config.hidden_size > 0)
    net_config.layer_sizes = {vocab + 2, config.hidden_size,
                              std::max<std::size_t>(config.hidden_size / 2, 8),
                              2};
  net_config.hidden_activation = config.hidden_activation;

  Network warm;
  bool have_warm = false;
  if (config.pretrain) {
    warm = pretrain_initial(engine.corpus.dictionary, net_config,
                            train_options(config, config.seed));
    have_warm = true;
  }

  engine.neuro.resize(engine.file_count());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= engine.file_count()) return;
      try {
        NetworkConfig file_config = net_config;
        file_config.seed = mix_seed(config.seed, engine.corpus.files[i].id + 1);
        engine.neuro[i] = train_iann(
            engine.classical[i], engine.corpus.dictionary, file_config,
            train_options(config, file_config.seed),
            have_warm ? &warm : nullptr);
        if (progress) {
          std::lock_guard<std::mutex> lock(progress_mutex);
          progress({engine.corpus.files[i].id, engine.corpus.files[i].path,
                    engine.neuro[i].epochs_used, engine.neuro[i].trained});
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  unsigned jobs = std::max(1u, config.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  engine.signatures.reserve(engine.file_count());
  std::vector<LabeledSample> labeled;
  labeled.reserve(engine.file_count());
  for (std::size_t i = 0; i < engine.file_count(); ++i) {
    engine.signatures.push_back(
        signature(engine.neuro[i], engine.corpus.dictionary));
    labeled.push_back({engine.signatures.back(), engine.corpus.files[i].id});
  }

  SomConfig som_config = default_som_config(
      engine.file_count(), vocab, mix_seed(config.seed, 0x50D));
  if (config.som_grid > 0) som_config.grid = config.som_grid;
  som_config.epochs = config.som_epochs;
  som_config.alpha0 = config.som_alpha0;
  som_config.radius0 = config.som_radius0 < 0.0
                           ? static_cast<double>(som_config.grid) / 2.0
                           : config.som_radius0;
  som_config.lvq_beta = config.lvq_beta;
  engine.som = train_associative(labeled, som_config);
  return engine;
}

void save_engine(const Engine& engine, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(Errc::io_error, "cannot create directory: " + dir.string());

  nlohmann::json files = nlohmann::json::array();
  for (std::size_t i = 0; i < engine.file_count(); ++i) {
    const auto& file = engine.corpus.files[i];
    std::string stem = index_stem(file.id);
    persist_classical(engine.classical[i], dir / (stem + ".cdx"));
    persist_neuro(engine.neuro[i], dir / (stem + ".ndx"));
    files.push_back({{"id", file.id},
                     {"path", file.path},
                     {"cdx", stem + ".cdx"},
                     {"ndx", stem + ".ndx"}});
  }
  persist_som(engine.som, dir / "som.map");

  nlohmann::json corpus_json{
      {"version", 1},
      {"dictionary", engine.corpus.dictionary.words()},
      {"files", files},
      {"config", engine_config_to_json(engine.config)}};
  std::ofstream out(dir / "corpus.json", std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write corpus.json");
  out << corpus_json.dump(2) << "\n";

  std::ofstream sw(dir / "stopwords.txt", std::ios::trunc);
  for (const auto& w : engine.config.stopwords) sw << w << "\n";
}

Engine load_engine(const fs::path& dir) {
  fs::path corpus_path = dir / "corpus.json";
  if (!fs::exists(corpus_path))
    fail(Errc::missing_root, "not an engine directory (no corpus.json): " +
                                 dir.string());
  std::ifstream in(corpus_path);
  if (!in) fail(Errc::io_error, "cannot read corpus.json");
  nlohmann::json corpus_json = nlohmann::json::parse(in, nullptr, false);
  if (corpus_json.is_discarded())
    fail(Errc::format_error, "corpus.json is not valid JSON");

  Engine engine;
  engine.config = engine_config_from_json(corpus_json.at("config"));
  for (const auto& word :
       corpus_json.at("dictionary").get<std::vector<std::string>>())
    engine.corpus.dictionary.add(word);

  for (const auto& entry : corpus_json.at("files")) {
    CorpusFile file;
    file.id = entry.at("id").get<FileId>();
    file.path = entry.at("path").get<std::string>();
    engine.corpus.files.push_back(file);
    engine.classical.push_back(
        load_classical(dir / entry.at("cdx").get<std::string>()));
    engine.neuro.push_back(
        load_neuro(dir / entry.at("ndx").get<std::string>()));
    engine.signatures.push_back(
        signature(engine.neuro.back(), engine.corpus.dictionary));
  }
  if (engine.corpus.files.empty())
    fail(Errc::empty_corpus, "engine directory lists no files");
  engine.som = load_som(dir / "som.map");
  return engine;
}

namespace {

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

EngineConfig engine_config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "stopwords",      "hidden_size",     "hidden_activation",
      "learning_rate",  "momentum",        "epoch_cap",
      "check_interval", "batch_size",      "count_tolerance",
      "pretrain",       "som_grid",        "som_epochs",
      "som_alpha0",     "som_radius0",     "lvq_beta",
      "seed",           "jobs"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key))
      fail(Errc::invalid_config, "unknown config key: " + key);

  EngineConfig config;
  if (j.contains("stopwords")) {
    auto words = j.at("stopwords").get<std::vector<std::string>>();
    config.stopwords = {words.begin(), words.end()};
  }
  read_key(j, "hidden_size", config.hidden_size);
  if (j.contains("hidden_activation"))
    config.hidden_activation =
        activation_from_name(j.at("hidden_activation").get<std::string>());
  read_key(j, "learning_rate", config.learning_rate);
  read_key(j, "momentum", config.momentum);
  read_key(j, "epoch_cap", config.epoch_cap);
  read_key(j, "check_interval", config.check_interval);
  read_key(j, "batch_size", config.batch_size);
  read_key(j, "count_tolerance", config.count_tolerance);
  read_key(j, "pretrain", config.pretrain);
  read_key(j, "som_grid", config.som_grid);
  read_key(j, "som_epochs", config.som_epochs);
  read_key(j, "som_alpha0", config.som_alpha0);
  read_key(j, "som_radius0", config.som_radius0);
  read_key(j, "lvq_beta", config.lvq_beta);
  read_key(j, "seed", config.seed);
  read_key(j, "jobs", config.jobs);
  return config;
}

nlohmann::json engine_config_to_json(const EngineConfig& config) {
  return nlohmann::json{
      {"stopwords",
       std::vector<std::string>(config.stopwords.begin(),
                                config.stopwords.end())},
      {"hidden_size", config.hidden_size},
      {"hidden_activation", activation_name(config.hidden_activation)},
      {"learning_rate", config.learning_rate},
      {"momentum", config.momentum},
      {"epoch_cap", config.epoch_cap},
      {"check_interval", config.check_interval},
      {"batch_size", config.batch_size},
      {"count_tolerance", config.count_tolerance},
      {"pretrain", config.pretrain},
      {"som_grid", config.som_grid},
      {"som_epochs", config.som_epochs},
      {"som_alpha0", config.som_alpha0},
      {"som_radius0", config.som_radius0},
      {"lvq_beta", config.lvq_beta},
      {"seed", config.seed},
      {"jobs", config.jobs}};
}

EngineConfig parse_engine_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot read config file: " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded())
    fail(Errc::invalid_config, "config file is not valid JSON");
  return engine_config_from_json(j);
}

}  // namespace neuridx
