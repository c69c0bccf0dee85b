#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "glosskit/error.hpp"
#include "glosskit/lexicon.hpp"
#include "glosskit/rng.hpp"
#include "testutil.hpp"

using namespace glosskit;
using testutil::fresh_dir;
using testutil::read_file;
using testutil::write_file;

namespace {

EmbeddingMatrix random_embeddings(int n, int dim, uint64_t seed,
                                  const std::string& prefix) {
  EmbeddingMatrix m;
  SplitMix64 rng(seed);
  m.vectors.resize(n, dim);
  for (int r = 0; r < n; ++r) {
    m.tokens.push_back(prefix + std::to_string(r));
    for (int c = 0; c < dim; ++c) m.vectors(r, c) = rng.next_gaussian();
  }
  m.finalize();
  return m;
}

LinearMap identity_map(int dim) {
  LinearMap map;
  map.matrix = Eigen::MatrixXd::Identity(dim, dim);
  map.orthogonal = true;
  return map;
}

}  // namespace

TEST_CASE("metric names round trip") {
  CHECK(std::string(to_string(Metric::kCosine)) == "cosine");
  CHECK(std::string(to_string(Metric::kCsls)) == "csls");
  CHECK(metric_from_string("cosine") == Metric::kCosine);
  CHECK(metric_from_string("csls") == Metric::kCsls);
  CHECK_THROWS_AS(metric_from_string("euclidean"), Error);
}

TEST_CASE("build_lexicon under the identity map retrieves the word itself") {
  const int dim = 6;
  EmbeddingMatrix tgt = random_embeddings(20, dim, 1, "w");
  EmbeddingMatrix src = tgt;  // same vectors, same tokens

  auto lex = build_lexicon(identity_map(dim), src, tgt, 3);
  CHECK(lex.size() == 20);
  CHECK(lex.k() == 3);
  CHECK(lex.metric() == Metric::kCosine);
  for (const auto& entry : lex.entries()) {
    REQUIRE(entry.options.size() == 3);
    CHECK(entry.options[0].target == entry.source);
    CHECK(entry.options[0].similarity == doctest::Approx(1.0));
    CHECK(entry.options[1].similarity <= entry.options[0].similarity);
  }
  CHECK(lex.contains("w0"));
  CHECK_FALSE(lex.contains("nope"));
  CHECK(lex.options("nope") == nullptr);
  REQUIRE(lex.options("w5") != nullptr);
  CHECK((*lex.options("w5"))[0].target == "w5");
}

TEST_CASE("build_lexicon csls also reports plain cosine similarities") {
  const int dim = 5;
  EmbeddingMatrix tgt = random_embeddings(15, dim, 3, "w");
  EmbeddingMatrix src = tgt;

  auto lex = build_lexicon(identity_map(dim), src, tgt, 2, Metric::kCsls);
  CHECK(lex.metric() == Metric::kCsls);
  for (const auto& entry : lex.entries()) {
    // Under an exact copy the top CSLS candidate is still the word itself,
    // and the stored similarity is its cosine.
    CHECK(entry.options[0].target == entry.source);
    CHECK(entry.options[0].similarity == doctest::Approx(1.0));
  }
}

TEST_CASE("build_lexicon determinism across worker counts") {
  const int dim = 4;
  EmbeddingMatrix tgt = random_embeddings(30, dim, 5, "t");
  EmbeddingMatrix src = random_embeddings(25, dim, 6, "s");

  auto a = build_lexicon(identity_map(dim), src, tgt, 4, Metric::kCsls, 1);
  auto b = build_lexicon(identity_map(dim), src, tgt, 4, Metric::kCsls, 3);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a.entries()[i].source == b.entries()[i].source);
    for (size_t o = 0; o < a.entries()[i].options.size(); ++o) {
      CHECK(a.entries()[i].options[o].target == b.entries()[i].options[o].target);
      CHECK(a.entries()[i].options[o].similarity ==
            b.entries()[i].options[o].similarity);
    }
  }
}

TEST_CASE("build_lexicon validates k") {
  const int dim = 3;
  EmbeddingMatrix tgt = random_embeddings(4, dim, 7, "t");
  EmbeddingMatrix src = random_embeddings(4, dim, 8, "s");
  CHECK_THROWS_AS(build_lexicon(identity_map(dim), src, tgt, 0), Error);
  CHECK_THROWS_AS(build_lexicon(identity_map(dim), src, tgt, 5), Error);
}

TEST_CASE("export and import round trip a lexicon") {
  auto dir = fresh_dir("glosskit_test_lexicon");
  const int dim = 5;
  EmbeddingMatrix tgt = random_embeddings(12, dim, 9, "w");
  EmbeddingMatrix src = tgt;
  auto lex = build_lexicon(identity_map(dim), src, tgt, 3, Metric::kCsls);

  auto path = (dir / "lex.tsv").string();
  export_lexicon(lex, path);
  auto back = import_lexicon(path);
  CHECK(back.k() == 3);
  CHECK(back.metric() == Metric::kCsls);
  REQUIRE(back.size() == lex.size());
  for (size_t i = 0; i < lex.size(); ++i) {
    CHECK(back.entries()[i].source == lex.entries()[i].source);
    REQUIRE(back.entries()[i].options.size() == lex.entries()[i].options.size());
    for (size_t o = 0; o < lex.entries()[i].options.size(); ++o) {
      CHECK(back.entries()[i].options[o].target ==
            lex.entries()[i].options[o].target);
      CHECK(back.entries()[i].options[o].similarity ==
            doctest::Approx(lex.entries()[i].options[o].similarity)
                .epsilon(1e-5));
    }
  }

  // Exports are deterministic.
  auto path2 = (dir / "lex2.tsv").string();
  export_lexicon(lex, path2);
  CHECK(read_file(path) == read_file(path2));
}

TEST_CASE("import_lexicon accepts hand-written files and rejects junk") {
  auto dir = fresh_dir("glosskit_test_lexicon");
  auto path = (dir / "hand.tsv").string();
  write_file(path,
             "# glosskit lexicon k=2 metric=cosine\n"
             "dog\thund\t0.9\n"
             "dog\tkoeter\t0.5\n"
             "cat\tkat\t0.8\n");
  auto lex = import_lexicon(path);
  CHECK(lex.k() == 2);
  CHECK(lex.size() == 2);
  REQUIRE(lex.options("dog") != nullptr);
  CHECK(lex.options("dog")->size() == 2);
  CHECK((*lex.options("dog"))[1].target == "koeter");
  CHECK((*lex.options("cat"))[0].similarity == doctest::Approx(0.8));

  auto bad = (dir / "bad.tsv").string();
  write_file(bad, "no_tabs_here\n");
  CHECK_THROWS_AS(import_lexicon(bad), Error);

  auto bad2 = (dir / "bad2.tsv").string();
  write_file(bad2, "a\tb\tnot_a_number\n");
  CHECK_THROWS_AS(import_lexicon(bad2), Error);

  auto bad3 = (dir / "bad3.tsv").string();
  write_file(bad3, "\tb\t0.5\n");
  CHECK_THROWS_AS(import_lexicon(bad3), Error);

  CHECK_THROWS_AS(import_lexicon((dir / "ghost.tsv").string()), Error);
}

TEST_CASE("load_word_pairs skips comments and validates shape") {
  auto dir = fresh_dir("glosskit_test_lexicon");
  auto path = (dir / "pairs.tsv").string();
  write_file(path,
             "# gold pairs\n"
             "\n"
             "dog\thund\n"
             "cat\tkat\n");
  auto pairs = load_word_pairs(path);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0] == std::pair<std::string, std::string>{"dog", "hund"});

  auto bad = (dir / "bad_pairs.tsv").string();
  write_file(bad, "dog hund\n");
  CHECK_THROWS_AS(load_word_pairs(bad), Error);
}

TEST_CASE("evaluate_precision scores hits, misses and coverage") {
  BilingualLexicon lex(5, Metric::kCosine);
  lex.add({"a", {{"x", 0.9}, {"y", 0.8}, {"z", 0.7}}});
  lex.add({"b", {{"p", 0.9}, {"q", 0.8}}});
  lex.add({"c", {{"r", 0.9}}});

  std::vector<std::pair<std::string, std::string>> gold = {
      {"a", "x"},        // top-1 hit
      {"b", "q"},        // top-5 hit only
      {"c", "missing"},  // covered, no hit
      {"d", "w"},        // not covered
  };
  auto report = evaluate_precision(lex, gold);
  CHECK(report.total == 4);
  CHECK(report.evaluated == 3);
  CHECK(report.coverage == doctest::Approx(3.0 / 4.0));
  CHECK(report.p_at_1 == doctest::Approx(1.0 / 3.0));
  CHECK(report.p_at_5 == doctest::Approx(2.0 / 3.0));

  // Multiple references for one source: any of them counts, once.
  std::vector<std::pair<std::string, std::string>> multi = {
      {"a", "zzz"},
      {"a", "x"},
  };
  auto r2 = evaluate_precision(lex, multi);
  CHECK(r2.total == 1);
  CHECK(r2.p_at_1 == doctest::Approx(1.0));
}
