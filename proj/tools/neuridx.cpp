// neuridx CLI: index a directory of text files into per-file neural
// indexes, query them, benchmark against the classical inverted index,
// and inspect engine artifacts.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "neuridx/bench.hpp"
#include "neuridx/engine.hpp"
#include "neuridx/error.hpp"
#include "neuridx/search.hpp"

namespace {

using namespace neuridx;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTraining = 3;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::invalid_config:
    case Errc::invalid_params:
    case Errc::empty_query:
    case Errc::keyword_out_of_range:
      return kExitUsage;
    case Errc::training_diverged:
    case Errc::non_finite_loss:
      return kExitTraining;
    default:
      return kExitData;
  }
}

struct IndexArgs {
  std::string src_dir;
  std::string out_dir;
  std::string config_path;
  std::string stopwords_path;
  std::uint64_t seed = 42;
  bool seed_set = false;
  unsigned jobs = 1;
};

int run_index(const IndexArgs& args) {
  EngineConfig config;
  if (!args.config_path.empty()) config = parse_engine_config(args.config_path);
  if (!args.stopwords_path.empty())
    config.stopwords = load_stopwords(args.stopwords_path);
  if (args.seed_set || args.config_path.empty()) config.seed = args.seed;
  config.jobs = args.jobs;

  Corpus corpus = load_corpus(args.src_dir, config.stopwords);
  std::printf("indexing %zu files, %zu keywords\n", corpus.files.size(),
              corpus.dictionary.size());
  std::size_t converged = 0;
  Engine engine = build_engine(std::move(corpus), config,
                               [&](const FileBuildInfo& info) {
                                 converged += info.trained ? 1 : 0;
                                 std::printf("  [%u] %s: epochs=%u %s\n",
                                             info.file_id, info.path.c_str(),
                                             info.epochs,
                                             info.trained ? "converged"
                                                          : "NOT converged");
                               });
  save_engine(engine, args.out_dir);
  std::printf("engine written to %s (%zu/%zu files converged)\n",
              args.out_dir.c_str(), converged, engine.file_count());
  return kExitOk;
}

void print_snapshot(const Engine& engine, const Snapshot& snapshot,
                    std::size_t number, bool as_json) {
  if (as_json) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : snapshot.entries)
      entries.push_back({{"file", e.file},
                         {"path", engine.corpus.files[e.file].path},
                         {"score", e.score},
                         {"exact", e.exact}});
    nlohmann::json line{{"snapshot", number},
                        {"final", snapshot.final},
                        {"results", entries}};
    std::cout << line.dump() << "\n";
  } else {
    std::printf("snapshot %zu%s\n", number, snapshot.final ? " (final)" : "");
    for (std::size_t i = 0; i < snapshot.entries.size(); ++i) {
      const auto& e = snapshot.entries[i];
      std::printf("  %2zu. %-40s %8.4f%s\n", i + 1,
                  engine.corpus.files[e.file].path.c_str(), e.score,
                  e.exact ? "" : " (estimate)");
    }
  }
}

int run_query(const std::string& engine_dir, const std::string& phrase,
              std::size_t k, bool anytime, bool as_json) {
  Engine engine = load_engine(engine_dir);
  RankedResults results = search(engine, phrase, k);
  if (anytime) {
    for (std::size_t i = 0; i < results.snapshots.size(); ++i)
      print_snapshot(engine, results.snapshots[i], i + 1, as_json);
  } else {
    print_snapshot(engine, results.final_snapshot(),
                   results.snapshots.size(), as_json);
  }
  return kExitOk;
}

struct BenchArgs {
  std::string engine_dir;
  std::string synth_spec;
  std::string out_path = "report.csv";
  std::string queries_path;
  std::uint32_t reps = 9;
};

std::vector<std::string> load_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot read query file: " + path);
  std::vector<std::string> queries;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) queries.push_back(line);
  if (queries.empty()) fail(Errc::invalid_params, "query file is empty");
  return queries;
}

int run_bench(const BenchArgs& args) {
  Engine engine;
  std::filesystem::path storage_dir;
  if (!args.synth_spec.empty()) {
    std::size_t files = 0, tokens = 0, vocab = 0;
    char extra = 0;
    std::istringstream spec(args.synth_spec);
    char c1 = 0, c2 = 0;
    if (!(spec >> files >> c1 >> tokens >> c2 >> vocab) || c1 != ',' ||
        c2 != ',' || (spec >> extra))
      fail(Errc::invalid_params, "--synth expects F,T,V");
    Corpus corpus = synth_corpus(files, tokens, vocab, 42);
    EngineConfig config;
    engine = build_engine(std::move(corpus), config);
    storage_dir = std::filesystem::temp_directory_path() / "neuridx_bench";
    save_engine(engine, storage_dir);
  } else {
    engine = load_engine(args.engine_dir);
    storage_dir = args.engine_dir;
  }

  // Storage rows from the on-disk artifacts.
  StorageReport storage;
  for (std::size_t i = 0; i < engine.file_count(); ++i) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "file_%05u", engine.corpus.files[i].id);
    auto cdx_path = storage_dir / (std::string(stem) + ".cdx");
    auto ndx_path = storage_dir / (std::string(stem) + ".ndx");
    storage.rows.push_back({engine.corpus.files[i].id,
                            engine.classical[i].token_count,
                            engine.classical[i].occurrence_count(),
                            std::filesystem::file_size(cdx_path),
                            std::filesystem::file_size(ndx_path)});
  }

  std::vector<std::string> queries =
      args.queries_path.empty() ? default_bench_queries(engine.corpus, 5)
                                : load_queries(args.queries_path);
  LatencyReport latency = measure_latency(engine, queries, args.reps);

  std::filesystem::path base(args.out_path);
  ReportFormat format = base.extension() == ".json" ? ReportFormat::Json
                                                    : ReportFormat::Csv;
  std::string ext = format == ReportFormat::Json ? ".json" : ".csv";
  auto with_suffix = [&](const char* kind) {
    std::filesystem::path p = base;
    p.replace_extension();
    return p.string() + "." + kind + ext;
  };
  emit_report(storage, with_suffix("storage"), format);
  emit_report(latency, with_suffix("latency"), format);
  std::printf("storage report: %s\n", with_suffix("storage").c_str());
  std::printf("latency report: %s\n", with_suffix("latency").c_str());

  std::size_t agree = 0;
  for (std::size_t i = 0; i < latency.classical_top1.size(); ++i)
    agree += latency.classical_top1[i] == latency.neuro_top1[i] ? 1 : 0;
  std::printf("top-1 agreement: %zu/%zu queries\n", agree,
              latency.classical_top1.size());
  return kExitOk;
}

int run_inspect(const std::string& engine_dir, int file_filter) {
  Engine engine = load_engine(engine_dir);
  std::printf("engine: %zu files, %zu keywords, SOM grid %zux%zu\n",
              engine.file_count(), engine.corpus.dictionary.size(),
              engine.som.config.grid, engine.som.config.grid);
  for (std::size_t i = 0; i < engine.file_count(); ++i) {
    const auto& file = engine.corpus.files[i];
    if (file_filter >= 0 && static_cast<FileId>(file_filter) != file.id)
      continue;
    const auto& nidx = engine.neuro[i];
    ValidationReport report = validate_iann(nidx, engine.classical[i]);
    std::printf(
        "  [%u] %s: L=%u n_max=%u epochs=%u trained=%s validation=%zu/%zu\n",
        file.id, file.path.c_str(), nidx.meta.token_count,
        nidx.meta.max_occurrences, nidx.epochs_used,
        nidx.trained ? "yes" : "no", report.exact, report.total);
  }
  std::printf("SOM quantization error history:");
  for (double qe : engine.som.quantization_error_history)
    std::printf(" %.6f", qe);
  std::printf("\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"neuro-index text search engine"};
  app.require_subcommand(1);

  IndexArgs index_args;
  auto* index_cmd =
      app.add_subcommand("index", "build an engine from a directory of text");
  index_cmd->add_option("src-dir", index_args.src_dir, "source directory")
      ->required();
  index_cmd->add_option("--out", index_args.out_dir, "engine directory")
      ->required();
  index_cmd->add_option("--config", index_args.config_path, "JSON config file");
  index_cmd->add_option("--stopwords", index_args.stopwords_path,
                        "newline-delimited stopword file");
  auto* seed_opt =
      index_cmd->add_option("--seed", index_args.seed, "build seed");
  index_cmd->add_option("--jobs", index_args.jobs, "parallel training jobs");

  std::string query_dir, phrase;
  std::size_t k = 8;
  bool anytime = false, as_json = false;
  auto* query_cmd = app.add_subcommand("query", "run a search phrase");
  query_cmd->add_option("engine-dir", query_dir, "engine directory")->required();
  query_cmd->add_option("phrase", phrase, "search phrase")->required();
  query_cmd->add_option("--k", k, "candidates per refinement round");
  query_cmd->add_flag("--anytime", anytime, "print every snapshot");
  query_cmd->add_flag("--json", as_json, "JSON lines output");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "storage and latency reports");
  bench_cmd->add_option("engine-dir", bench_args.engine_dir,
                        "existing engine directory");
  bench_cmd->add_option("--synth", bench_args.synth_spec,
                        "build a synthetic corpus: F,T,V");
  bench_cmd->add_option("--out", bench_args.out_path, "report base path");
  bench_cmd->add_option("--queries", bench_args.queries_path,
                        "newline-delimited query file");
  bench_cmd->add_option("--reps", bench_args.reps, "timed repetitions");

  std::string inspect_dir;
  int file_filter = -1;
  auto* inspect_cmd = app.add_subcommand("inspect", "dump engine metadata");
  inspect_cmd->add_option("engine-dir", inspect_dir, "engine directory")
      ->required();
  inspect_cmd->add_option("--file", file_filter, "restrict to one file id");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (index_cmd->parsed()) {
      index_args.seed_set = seed_opt->count() > 0;
      return run_index(index_args);
    }
    if (query_cmd->parsed()) return run_query(query_dir, phrase, k, anytime, as_json);
    if (bench_cmd->parsed()) {
      if (bench_args.engine_dir.empty() && bench_args.synth_spec.empty()) {
        std::fprintf(stderr, "bench needs an engine directory or --synth\n");
        return kExitUsage;
      }
      return run_bench(bench_args);
    }
    if (inspect_cmd->parsed()) return run_inspect(inspect_dir, file_filter);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
