#include <doctest.h>

#include "neuridx/engine.hpp"
#include "neuridx/error.hpp"
#include "neuridx/search.hpp"
#include "test_helpers.hpp"

using namespace neuridx;

namespace {

Corpus demo_corpus() {
  return testutil::make_corpus({"buy gifts holiday", "holiday sales",
                                "weather report"},
                               default_stopwords());
}

}  // namespace

TEST_CASE("build_engine trains every file and the map") {
  EngineConfig config;
  config.seed = 42;
  std::vector<FileBuildInfo> progress;
  Engine engine = build_engine(demo_corpus(), config,
                               [&](const FileBuildInfo& info) {
                                 progress.push_back(info);
                               });
  CHECK(engine.file_count() == 3);
  CHECK(progress.size() == 3);
  CHECK(engine.signatures.size() == 3);
  CHECK(engine.som.node_count() >= 3);
  for (const auto& nidx : engine.neuro) CHECK(nidx.trained);
}

TEST_CASE("an engine directory round-trips queries") {
  testutil::TempDir dir("engine_rt");
  EngineConfig config;
  config.seed = 42;
  Engine built = build_engine(demo_corpus(), config);
  save_engine(built, dir.path() / "eng");
  Engine loaded = load_engine(dir.path() / "eng");

  CHECK(loaded.file_count() == built.file_count());
  CHECK(loaded.corpus.dictionary.size() == built.corpus.dictionary.size());
  CHECK(loaded.config.seed == built.config.seed);

  RankedResults a = search(built, "buy holiday", 8);
  RankedResults b = search(loaded, "buy holiday", 8);
  REQUIRE(a.final_snapshot().entries.size() ==
          b.final_snapshot().entries.size());
  for (std::size_t i = 0; i < a.final_snapshot().entries.size(); ++i) {
    CHECK(a.final_snapshot().entries[i].file ==
          b.final_snapshot().entries[i].file);
    CHECK(a.final_snapshot().entries[i].score ==
          doctest::Approx(b.final_snapshot().entries[i].score).epsilon(1e-12));
  }
}

TEST_CASE("loading a non-engine directory is a data error") {
  testutil::TempDir dir("engine_missing");
  try {
    load_engine(dir.path());
    FAIL("expected missing_root");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::missing_root);
  }
}

TEST_CASE("parallel training jobs do not change the result") {
  EngineConfig serial;
  serial.seed = 13;
  EngineConfig parallel = serial;
  parallel.jobs = 2;
  Engine a = build_engine(demo_corpus(), serial);
  Engine b = build_engine(demo_corpus(), parallel);
  REQUIRE(a.file_count() == b.file_count());
  for (std::size_t i = 0; i < a.file_count(); ++i) {
    CHECK(a.neuro[i].epochs_used == b.neuro[i].epochs_used);
    for (std::size_t j = 0; j < a.neuro[i].network.layers.size(); ++j)
      CHECK(a.neuro[i].network.layers[j].weights ==
            b.neuro[i].network.layers[j].weights);
  }
  CHECK(a.som.codebooks == b.som.codebooks);
}

TEST_CASE("engine config JSON round-trips and rejects unknown keys") {
  EngineConfig config;
  config.learning_rate = 0.003;
  config.som_epochs = 55;
  config.stopwords = {"x", "y"};
  nlohmann::json j = engine_config_to_json(config);
  EngineConfig back = engine_config_from_json(j);
  CHECK(back.learning_rate == config.learning_rate);
  CHECK(back.som_epochs == config.som_epochs);
  CHECK(back.stopwords == config.stopwords);
  CHECK(back.momentum == config.momentum);

  nlohmann::json bad = j;
  bad["mystery"] = 1;
  try {
    engine_config_from_json(bad);
    FAIL("expected invalid_config");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_config);
  }
}

TEST_CASE("build_engine rejects corpora with an empty dictionary") {
  Corpus corpus = testutil::make_corpus({""}, {});
  try {
    build_engine(std::move(corpus), EngineConfig{});
    FAIL("expected empty_corpus");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_corpus);
  }
}
