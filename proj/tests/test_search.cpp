#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "neuridx/error.hpp"
#include "neuridx/rng.hpp"
#include "neuridx/search.hpp"
#include "test_helpers.hpp"

using namespace neuridx;

namespace {

Engine engine_of(const std::vector<std::string>& docs,
                 std::uint64_t seed = 42) {
  EngineConfig config;
  config.seed = seed;
  return build_engine(testutil::make_corpus(docs, config.stopwords), config);
}

}  // namespace

TEST_CASE("split_pairs reproduces the canonical example") {
  auto corpus =
      testutil::make_corpus({"what buy holiday shopping"}, default_stopwords());
  QueryPlan plan = split_pairs("what to buy for a holiday",
                               corpus.dictionary, default_stopwords());
  REQUIRE(plan.terms.size() == 3);
  CHECK(corpus.dictionary.word(plan.terms[0]) == "what");
  CHECK(corpus.dictionary.word(plan.terms[1]) == "buy");
  CHECK(corpus.dictionary.word(plan.terms[2]) == "holiday");
  REQUIRE(plan.pairs.size() == 2);
  CHECK(corpus.dictionary.word(plan.pairs[0].a) == "what");
  CHECK(corpus.dictionary.word(plan.pairs[0].b) == "buy");
  CHECK(corpus.dictionary.word(plan.pairs[1].a) == "buy");
  CHECK(corpus.dictionary.word(plan.pairs[1].b) == "holiday");
  CHECK_FALSE(plan.pairs[0].singleton);
}

TEST_CASE("a single surviving term yields one singleton pair") {
  auto corpus = testutil::make_corpus({"holiday plans"}, {});
  QueryPlan plan = split_pairs("holiday", corpus.dictionary, {});
  REQUIRE(plan.pairs.size() == 1);
  CHECK(plan.pairs[0].singleton);
  CHECK(plan.pairs[0].a == *corpus.dictionary.id_of("holiday"));
}

TEST_CASE("unknown terms are dropped and an empty query throws") {
  auto corpus = testutil::make_corpus({"alpha beta"}, {});
  QueryPlan plan = split_pairs("alpha zzz beta", corpus.dictionary, {});
  CHECK(plan.terms.size() == 2);
  CHECK(plan.dropped == std::vector<std::string>{"zzz"});

  try {
    split_pairs("zzz qqq", corpus.dictionary, {});
    FAIL("expected empty_query");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_query);
  }
}

TEST_CASE("probe_vector marks query terms binary") {
  auto corpus = testutil::make_corpus({"buy holiday what"}, {});
  QueryPlan plan = split_pairs("buy holiday", corpus.dictionary, {});
  auto probe = probe_vector(plan, corpus.dictionary);
  REQUIRE(probe.size() == 3);
  CHECK(probe[*corpus.dictionary.id_of("buy")] == 1.0);
  CHECK(probe[*corpus.dictionary.id_of("holiday")] == 1.0);
  CHECK(probe[*corpus.dictionary.id_of("what")] == 0.0);

  QueryPlan rep = split_pairs("buy buy buy", corpus.dictionary, {});
  auto probe2 = probe_vector(rep, corpus.dictionary);
  CHECK(probe2[*corpus.dictionary.id_of("buy")] == 1.0);
}

TEST_CASE("score_file applies the proximity kernel through the network") {
  Engine engine = engine_of({"buy gifts holiday"});
  REQUIRE(engine.neuro[0].trained);
  QueryPlan plan =
      split_pairs("buy holiday", engine.corpus.dictionary, engine.config.stopwords);
  // positions 0 and 2, direct order: 1/(1+2)
  CHECK(score_file(engine.neuro[0], plan) == doctest::Approx(1.0 / 3.0));
  CHECK(score_file_classical(engine.classical[0], plan) ==
        doctest::Approx(1.0 / 3.0));
}

TEST_CASE("a pair with a missing term scores zero") {
  Engine engine = engine_of({"buy gifts now", "holiday gifts today"});
  QueryPlan plan = split_pairs("buy holiday", engine.corpus.dictionary,
                               engine.config.stopwords);
  CHECK(score_file(engine.neuro[0], plan) == 0.0);
  CHECK(score_file(engine.neuro[1], plan) == 0.0);
}

TEST_CASE("reverse order scores at half weight") {
  Engine engine = engine_of({"holiday buy"});
  REQUIRE(engine.neuro[0].trained);
  QueryPlan plan = split_pairs("buy holiday", engine.corpus.dictionary,
                               engine.config.stopwords);
  // buy at 1, holiday at 0: gap 1, reversed -> 0.5/2
  CHECK(score_file(engine.neuro[0], plan) == doctest::Approx(0.25));
}

TEST_CASE("singleton pairs score count over n_max") {
  Engine engine = engine_of({"ant bee ant cow"});
  REQUIRE(engine.neuro[0].trained);
  QueryPlan ant = split_pairs("ant", engine.corpus.dictionary, {});
  QueryPlan bee = split_pairs("bee", engine.corpus.dictionary, {});
  CHECK(score_file(engine.neuro[0], ant) == doctest::Approx(1.0));   // 2/2
  CHECK(score_file(engine.neuro[0], bee) == doctest::Approx(0.5));   // 1/2
}

TEST_CASE("search ranks the file containing both terms first") {
  Engine engine = engine_of({"buy gifts for the holiday",
                             "holiday sales",
                             "weather report"});
  RankedResults results = search(engine, "buy holiday", 8);
  const Snapshot& final = results.final_snapshot();
  REQUIRE(final.final);
  REQUIRE_FALSE(final.entries.empty());
  CHECK(final.entries.front().file == 0);
  CHECK(final.entries.front().score > final.entries[1].score);
  for (const auto& e : final.entries) CHECK(e.exact);
}

TEST_CASE("the only file containing the term leads every snapshot") {
  Engine engine = engine_of({"unique alpha beta",
                             "gamma delta epsilon",
                             "zeta eta theta"});
  RankedResults results = search(engine, "unique", 1);
  for (const auto& snapshot : results.snapshots) {
    REQUIRE_FALSE(snapshot.entries.empty());
    CHECK(snapshot.entries.front().file == 0);
  }
}

TEST_CASE("k covering the corpus gives exactly two snapshots") {
  Engine engine = engine_of({"one two", "three four", "five six"});
  RankedResults results = search(engine, "two", 10);
  CHECK(results.snapshots.size() == 2);
  CHECK_FALSE(results.snapshots[0].final);
  CHECK(results.snapshots[1].final);
}

TEST_CASE("refinement scores k files per round in proximity order") {
  Engine engine = engine_of({"apple pie", "banana split", "cherry cake",
                             "damson jam"});
  RankedResults results = search(engine, "apple banana", 1);
  REQUIRE(results.snapshots.size() == 5);  // 1 proximity + 4 rounds
  for (std::size_t i = 0; i < results.snapshots.size(); ++i) {
    std::size_t scored = 0;
    for (const auto& e : results.snapshots[i].entries) scored += e.exact;
    CHECK(scored == i);
    // scored entries always precede unscored ones
    bool seen_unscored = false;
    for (const auto& e : results.snapshots[i].entries) {
      if (!e.exact) seen_unscored = true;
      if (seen_unscored) CHECK_FALSE(e.exact);
    }
  }
  CHECK(results.snapshots.back().final);
}

TEST_CASE("scored sets grow monotonically across snapshots") {
  Engine engine = engine_of({"red green", "green blue", "blue red",
                             "yellow pink", "pink yellow"});
  for (const char* phrase : {"red green", "blue", "green blue red"}) {
    RankedResults results = search(engine, phrase, 2);
    std::set<FileId> previous;
    for (const auto& snapshot : results.snapshots) {
      std::set<FileId> scored;
      for (const auto& e : snapshot.entries)
        if (e.exact) scored.insert(e.file);
      CHECK(std::includes(scored.begin(), scored.end(), previous.begin(),
                          previous.end()));
      previous = scored;
    }
    CHECK(results.snapshots.back().final);
  }
}

TEST_CASE("final snapshot equals the exhaustive scoring reference") {
  Engine engine = engine_of({"sun moon stars", "moon dust", "sun flare burst",
                             "stars align tonight"});
  for (const char* phrase : {"sun moon", "stars", "moon sun stars"}) {
    RankedResults results = search(engine, phrase, 2);
    QueryPlan plan = split_pairs(phrase, engine.corpus.dictionary,
                                 engine.config.stopwords);

    std::vector<RankedEntry> reference;
    for (std::size_t i = 0; i < engine.file_count(); ++i)
      reference.push_back({engine.corpus.files[i].id,
                           score_file(engine.neuro[i], plan), true});
    std::sort(reference.begin(), reference.end(),
              [](const RankedEntry& a, const RankedEntry& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.file < b.file;
              });

    const Snapshot& final = results.final_snapshot();
    REQUIRE(final.entries.size() == reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i) {
      CHECK(final.entries[i].file == reference[i].file);
      CHECK(final.entries[i].score == doctest::Approx(reference[i].score));
    }
  }
}

TEST_CASE("converged neural scoring matches classical positions") {
  Engine engine = engine_of({"alpha beta gamma beta", "gamma beta",
                             "delta alpha"});
  for (std::size_t i = 0; i < engine.file_count(); ++i)
    REQUIRE(engine.neuro[i].trained);
  for (const char* phrase : {"alpha beta", "gamma beta", "beta", "delta alpha"}) {
    QueryPlan plan = split_pairs(phrase, engine.corpus.dictionary,
                                 engine.config.stopwords);
    for (std::size_t i = 0; i < engine.file_count(); ++i)
      CHECK(score_file(engine.neuro[i], plan) ==
            doctest::Approx(score_file_classical(engine.classical[i], plan))
                .epsilon(1e-12));
  }
}

TEST_CASE("files without query terms do not disturb the relative order") {
  std::vector<std::string> base{"buy gifts holiday", "holiday buy",
                                "gifts galore here"};
  Engine small = engine_of(base);
  std::vector<std::string> extended = base;
  extended.push_back("totally unrelated prose");
  Engine big = engine_of(extended);

  RankedResults a = search(small, "buy holiday", 10);
  RankedResults b = search(big, "buy holiday", 10);

  std::vector<FileId> order_a, order_b;
  for (const auto& e : a.final_snapshot().entries) order_a.push_back(e.file);
  for (const auto& e : b.final_snapshot().entries)
    if (e.file < base.size()) order_b.push_back(e.file);
  CHECK(order_a == order_b);
}

TEST_CASE("search propagates empty queries as errors") {
  Engine engine = engine_of({"alpha beta"});
  CHECK_THROWS_AS(search(engine, "zzz qqq", 4), Error);
}

TEST_CASE("classical_rank orders by score then file id") {
  Engine engine = engine_of({"tick tock", "tock tick", "drum roll"});
  QueryPlan plan = split_pairs("tick tock", engine.corpus.dictionary,
                               engine.config.stopwords);
  auto ranked = classical_rank(engine, plan);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].file == 0);   // direct adjacent: 0.5
  CHECK(ranked[1].file == 1);   // reversed adjacent: 0.25
  CHECK(ranked[2].score == 0.0);
}
