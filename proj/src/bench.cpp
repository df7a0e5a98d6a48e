#include "neuridx/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "neuridx/error.hpp"
#include "neuridx/rng.hpp"
#include "neuridx/search.hpp"

namespace neuridx {

namespace fs = std::filesystem;

Corpus synth_corpus_sized(std::span<const std::size_t> tokens_per_file,
                          std::size_t vocab_size, std::uint64_t seed) {
  if (tokens_per_file.empty() || vocab_size < 1)
    fail(Errc::invalid_params, "synthetic corpus needs >=1 file and vocab >= 1");
  for (std::size_t n : tokens_per_file)
    if (n < 1) fail(Errc::invalid_params, "files need >= 1 token");

  std::vector<std::string> vocab(vocab_size);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "kw%03zu", i);
    vocab[i] = buf;
  }

  Corpus corpus;
  Rng rng(seed);
  for (FileId id = 0; id < tokens_per_file.size(); ++id) {
    CorpusFile file;
    file.id = id;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "synth_%04u.txt", id);
    file.path = buf;
    file.tokens.tokens.reserve(tokens_per_file[id]);
    for (std::size_t t = 0; t < tokens_per_file[id]; ++t)
      file.tokens.tokens.push_back(vocab[rng.next_index(vocab_size)]);
    corpus.files.push_back(std::move(file));
  }
  std::vector<TokenSeq> seqs;
  for (const auto& f : corpus.files) seqs.push_back(f.tokens);
  corpus.dictionary = build_dictionary(seqs);
  return corpus;
}

Corpus synth_corpus(std::size_t num_files, std::size_t tokens_per_file,
                    std::size_t vocab_size, std::uint64_t seed) {
  if (num_files < 1 || tokens_per_file < 1 || vocab_size < 1)
    fail(Errc::invalid_params, "synthetic corpus parameters must be >= 1");
  std::vector<std::size_t> sizes(num_files, tokens_per_file);
  return synth_corpus_sized(sizes, vocab_size, seed);
}

StorageReport measure_storage(const Corpus& corpus,
                              const StorageOptions& opts) {
  std::error_code ec;
  fs::create_directories(opts.dir, ec);
  if (ec) fail(Errc::io_error, "cannot create directory: " + opts.dir.string());

  NetworkConfig net_config;
  net_config.layer_sizes = {corpus.dictionary.size() + 2, opts.hidden_size, 2};
  TrainOptions train_opts;
  train_opts.epoch_cap = opts.epoch_cap;

  StorageReport report;
  for (const auto& file : corpus.files) {
    ClassicalIndex cdx = build_classical(file.tokens, corpus.dictionary, file.id);
    NetworkConfig file_config = net_config;
    file_config.seed = mix_seed(opts.seed, file.id + 1);
    NeuroIndex nidx = train_iann(cdx, corpus.dictionary, file_config, train_opts);

    char stem[32];
    std::snprintf(stem, sizeof(stem), "file_%05u", file.id);
    fs::path cdx_path = opts.dir / (std::string(stem) + ".cdx");
    fs::path ndx_path = opts.dir / (std::string(stem) + ".ndx");
    persist_classical(cdx, cdx_path);
    persist_neuro(nidx, ndx_path);

    report.rows.push_back({file.id, cdx.token_count, cdx.occurrence_count(),
                           fs::file_size(cdx_path), fs::file_size(ndx_path)});
  }
  return report;
}

namespace {

std::uint64_t percentile_ns(std::vector<std::uint64_t>& samples, double q) {
  std::sort(samples.begin(), samples.end());
  std::size_t n = samples.size();
  std::size_t rank = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(n) - 1.0,
                       std::ceil(q * static_cast<double>(n)) - 1.0));
  return samples[rank];
}

template <typename F>
std::uint64_t time_ns(F&& fn) {
  auto start = std::chrono::steady_clock::now();
  fn();
  auto stop = std::chrono::steady_clock::now();
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)
          .count());
}

}  // namespace

LatencyReport measure_latency(const Engine& engine,
                              std::span<const std::string> queries,
                              std::uint32_t reps) {
  if (reps < 3) fail(Errc::invalid_params, "need at least 3 repetitions");
  constexpr std::uint32_t kWarmup = 3;

  LatencyReport report;
  volatile double sink = 0.0;
  for (const auto& query : queries) {
    auto run_classical = [&] {
      QueryPlan plan = split_pairs(query, engine.corpus.dictionary,
                                   engine.config.stopwords);
      auto ranked = classical_rank(engine, plan);
      sink = sink + ranked.front().score;
    };
    auto run_neuro = [&] {
      RankedResults r = search(engine, query, engine.file_count());
      sink = sink + r.final_snapshot().entries.front().score;
    };

    std::vector<std::uint64_t> classical_ns, neuro_ns;
    for (std::uint32_t i = 0; i < kWarmup; ++i) run_classical();
    for (std::uint32_t i = 0; i < reps; ++i)
      classical_ns.push_back(time_ns(run_classical));
    for (std::uint32_t i = 0; i < kWarmup; ++i) run_neuro();
    for (std::uint32_t i = 0; i < reps; ++i)
      neuro_ns.push_back(time_ns(run_neuro));

    report.rows.push_back({query, "classical",
                           percentile_ns(classical_ns, 0.5),
                           percentile_ns(classical_ns, 0.9), reps});
    report.rows.push_back({query, "neuro", percentile_ns(neuro_ns, 0.5),
                           percentile_ns(neuro_ns, 0.9), reps});

    QueryPlan plan = split_pairs(query, engine.corpus.dictionary,
                                 engine.config.stopwords);
    report.classical_top1.push_back(classical_rank(engine, plan).front().file);
    report.neuro_top1.push_back(search(engine, query, engine.file_count())
                                    .final_snapshot()
                                    .entries.front()
                                    .file);
  }
  return report;
}

namespace {

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    quoted.push_back(c);
    if (c == '"') quoted.push_back('"');
  }
  quoted.push_back('"');
  return quoted;
}

std::ofstream open_report(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write report: " + path.string());
  return out;
}

}  // namespace

void emit_report(const StorageReport& report, const fs::path& path,
                 ReportFormat format) {
  auto out = open_report(path);
  if (format == ReportFormat::Csv) {
    out << "file_id,token_count,occurrence_count,classical_bytes,neuro_bytes\n";
    for (const auto& r : report.rows)
      out << r.file_id << ',' << r.token_count << ',' << r.occurrence_count
          << ',' << r.classical_bytes << ',' << r.neuro_bytes << '\n';
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows)
      rows.push_back({{"file_id", r.file_id},
                      {"token_count", r.token_count},
                      {"occurrence_count", r.occurrence_count},
                      {"classical_bytes", r.classical_bytes},
                      {"neuro_bytes", r.neuro_bytes}});
    out << rows.dump(2) << "\n";
  }
}

void emit_report(const LatencyReport& report, const fs::path& path,
                 ReportFormat format) {
  auto out = open_report(path);
  if (format == ReportFormat::Csv) {
    out << "query,engine,median_ns,p90_ns,repetitions\n";
    for (const auto& r : report.rows)
      out << csv_quote(r.query) << ',' << r.engine << ',' << r.median_ns << ','
          << r.p90_ns << ',' << r.repetitions << '\n';
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows)
      rows.push_back({{"query", r.query},
                      {"engine", r.engine},
                      {"median_ns", r.median_ns},
                      {"p90_ns", r.p90_ns},
                      {"repetitions", r.repetitions}});
    out << rows.dump(2) << "\n";
  }
}

std::vector<std::string> default_bench_queries(const Corpus& corpus,
                                               std::size_t count) {
  std::vector<std::string> queries;
  for (const auto& file : corpus.files) {
    if (queries.size() >= count) break;
    if (file.tokens.size() >= 2) {
      queries.push_back(file.tokens.tokens[0] + " " + file.tokens.tokens[1]);
    } else if (file.tokens.size() == 1) {
      queries.push_back(file.tokens.tokens[0]);
    }
  }
  if (queries.empty() && corpus.dictionary.size() > 0)
    queries.push_back(corpus.dictionary.word(0));
  return queries;
}

}  // namespace neuridx
