#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "glosskit/error.hpp"
#include "glosskit/gloss.hpp"
#include "glosskit/lexicon.hpp"
#include "glosskit/ngram_lm.hpp"
#include "glosskit/pipeline.hpp"
#include "glosskit/rng.hpp"
#include "glosskit/text.hpp"
#include "testutil.hpp"

using namespace glosskit;
using testutil::fresh_dir;
using testutil::read_file;
using testutil::write_file;

namespace {

ErrorCategory category_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.category();
  }
  FAIL("expected a glosskit::Error");
  return ErrorCategory::kIo;
}

}  // namespace

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar", 6) == 0x85944171f73967e8ULL);
  CHECK(fnv1a64("hello world\n", 12) == 0x782e1488cd5a68b7ULL);
}

TEST_CASE("digest_hex renders 16 zero-padded lowercase digits") {
  CHECK(digest_hex(0) == "0000000000000000");
  CHECK(digest_hex(0xabcULL) == "0000000000000abc");
  CHECK(digest_hex(0xcbf29ce484222325ULL) == "cbf29ce484222325");
}

TEST_CASE("fnv1a64_file hashes across chunk boundaries") {
  auto dir = fresh_dir("glosskit_test_pipeline_fnv");
  // 70000 bytes so the 64 KiB read loop wraps, NULs included.
  std::string data(70000, '\0');
  for (size_t i = 0; i < data.size(); ++i)
    data[i] = static_cast<char>((i * 7 + 3) % 251);
  auto path = dir / "blob.bin";
  write_file(path, data);

  CHECK(fnv1a64_file(path.string()) == fnv1a64(data.data(), data.size()));
  CHECK(fnv1a64_file(path.string()) == 0x4f73cb431c1bb381ULL);
  CHECK(category_of([&] { fnv1a64_file((dir / "nope").string()); }) ==
        ErrorCategory::kIo);
}

TEST_CASE("manifest writes sorted key=value lines next to the artifact") {
  auto dir = fresh_dir("glosskit_test_pipeline_manifest");
  auto input = dir / "input.txt";
  write_file(input, "hello world\n");

  Manifest m;
  m.set("beta", 0.5);
  m.set("alpha", 0.01);
  m.set("add_k", 0.05);
  m.set("stack_size", 100L);
  m.set("cmd", std::string("gloss"));
  m.add_file("input", input.string());
  auto artifact = dir / "out.txt";
  m.write(artifact.string());

  std::string expected =
      "add_k=0.050000000000000003\n"
      "alpha=0.01\n"
      "beta=0.5\n"
      "cmd=gloss\n"
      "input.fnv1a64=782e1488cd5a68b7\n"
      "input.path=" + input.string() + "\n"
      "stack_size=100\n";
  CHECK(read_file(artifact.string() + ".manifest") == expected);

  // Same entries, same bytes.
  m.write((dir / "again").string());
  CHECK(read_file((dir / "again").string() + ".manifest") == expected);

  Manifest bad;
  CHECK(category_of([&] { bad.add_file("x", (dir / "nope").string()); }) ==
        ErrorCategory::kIo);
}

TEST_CASE("load_parallel_corpus keeps lines aligned and named") {
  auto dir = fresh_dir("glosskit_test_pipeline_corpus");
  write_file(dir / "s.txt", "ein haus\n\nzwei\n");
  write_file(dir / "t.txt", "a house\n\ntwo\n");

  auto corpus = load_parallel_corpus("de", (dir / "s.txt").string(),
                                     (dir / "t.txt").string());
  CHECK(corpus.language == "de");
  CHECK(corpus.source == std::vector<std::string>{"ein haus", "", "zwei"});
  CHECK(corpus.target == std::vector<std::string>{"a house", "", "two"});

  write_file(dir / "short.txt", "a house\ntwo\n");
  try {
    load_parallel_corpus("de", (dir / "s.txt").string(),
                         (dir / "short.txt").string());
    FAIL("misaligned corpus accepted");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::kData);
    CHECK(std::string(e.what()).find("parallel corpus de") !=
          std::string::npos);
  }
  CHECK(category_of([&] {
          load_parallel_corpus("de", (dir / "nope").string(),
                               (dir / "t.txt").string());
        }) == ErrorCategory::kIo);
}

namespace {

NGramModel tiny_lm() {
  return load_arpa(std::string(TEST_DATA_DIR) + "/tiny.arpa");
}

BilingualLexicon lexicon_ab() {
  BilingualLexicon lex(1, Metric::kCosine);
  lex.add({"A", {{"hello", 0.9}}});
  lex.add({"B", {{"world", 0.8}}});
  return lex;
}

}  // namespace

TEST_CASE("prepare_training_data glosses, filters, shuffles and splits") {
  auto dir = fresh_dir("glosskit_test_pipeline_prepare");
  NGramModel lm = tiny_lm();
  BilingualLexicon lex_a = lexicon_ab();
  BilingualLexicon lex_b(1, Metric::kCosine);
  lex_b.add({"A", {{"world", 0.5}}});

  ParallelCorpus ca;
  ca.language = "de";
  ca.source = {"A B", "A A A A", "Q", "B"};
  ca.target = {"t0", "t1", "t2", "t3 t3 t3 t3"};
  ParallelCorpus cb;
  cb.language = "fr";
  cb.source = {"A", ""};
  cb.target = {"u0", "u1"};

  PrepareConfig cfg;
  cfg.max_len = 3;
  cfg.dev_size = 1;
  cfg.shuffle_seed = 9;
  PrepareOutputs outs{(dir / "train.src").string(), (dir / "train.tgt").string(),
                      (dir / "dev.src").string(), (dir / "dev.tgt").string()};

  auto report =
      prepare_training_data({ca, cb}, {&lex_a, &lex_b}, lm, cfg, outs);
  CHECK(report.read_pairs == 6);
  CHECK(report.dropped_overlong == 2);
  CHECK(report.train_pairs == 3);
  CHECK(report.dev_pairs == 1);
  CHECK(report.tokens == 4);
  CHECK(report.oov_tokens == 1);

  // Kept pairs in corpus order, glossed with each corpus's own lexicon ("A"
  // goes to "world" in the second corpus), then shuffled with the same
  // seeded Fisher-Yates the implementation pins.
  std::vector<std::pair<std::string, std::string>> pairs = {
      {"hello world", "t0"}, {"Q", "t2"}, {"world", "u0"}, {"", "u1"}};
  fisher_yates_shuffle(pairs, cfg.shuffle_seed);

  CHECK(read_file(outs.dev_src) == pairs[0].first + "\n");
  CHECK(read_file(outs.dev_tgt) == pairs[0].second + "\n");
  std::string train_src, train_tgt;
  for (size_t i = 1; i < pairs.size(); ++i) {
    train_src += pairs[i].first + "\n";
    train_tgt += pairs[i].second + "\n";
  }
  CHECK(read_file(outs.train_src) == train_src);
  CHECK(read_file(outs.train_tgt) == train_tgt);

  // Reruns and worker counts change nothing, byte for byte.
  auto dir2 = fresh_dir("glosskit_test_pipeline_prepare2");
  PrepareConfig cfg2 = cfg;
  cfg2.gloss.workers = 3;
  PrepareOutputs outs2{(dir2 / "train.src").string(),
                       (dir2 / "train.tgt").string(),
                       (dir2 / "dev.src").string(),
                       (dir2 / "dev.tgt").string()};
  prepare_training_data({ca, cb}, {&lex_a, &lex_b}, lm, cfg2, outs2);
  CHECK(read_file(outs2.train_src) == read_file(outs.train_src));
  CHECK(read_file(outs2.train_tgt) == read_file(outs.train_tgt));
  CHECK(read_file(outs2.dev_src) == read_file(outs.dev_src));
  CHECK(read_file(outs2.dev_tgt) == read_file(outs.dev_tgt));
}

TEST_CASE("prepare_training_data rejects bad shapes and sizes") {
  auto dir = fresh_dir("glosskit_test_pipeline_prepare_bad");
  NGramModel lm = tiny_lm();
  BilingualLexicon lex = lexicon_ab();
  ParallelCorpus ok;
  ok.language = "de";
  ok.source = {"A", "B"};
  ok.target = {"t0", "t1"};
  PrepareConfig cfg;
  cfg.dev_size = 1;
  PrepareOutputs outs{(dir / "a").string(), (dir / "b").string(),
                      (dir / "c").string(), (dir / "d").string()};

  CHECK(category_of([&] { prepare_training_data({}, {}, lm, cfg, outs); }) ==
        ErrorCategory::kConfig);
  CHECK(category_of([&] {
          prepare_training_data({ok}, {&lex, &lex}, lm, cfg, outs);
        }) == ErrorCategory::kConfig);

  PrepareConfig zero_len = cfg;
  zero_len.max_len = 0;
  CHECK(category_of([&] {
          prepare_training_data({ok}, {&lex}, lm, zero_len, outs);
        }) == ErrorCategory::kConfig);
  PrepareConfig neg_dev = cfg;
  neg_dev.dev_size = -1;
  CHECK(category_of([&] {
          prepare_training_data({ok}, {&lex}, lm, neg_dev, outs);
        }) == ErrorCategory::kConfig);

  ParallelCorpus skewed = ok;
  skewed.target.pop_back();
  CHECK(category_of([&] {
          prepare_training_data({skewed}, {&lex}, lm, cfg, outs);
        }) == ErrorCategory::kData);

  PrepareConfig greedy = cfg;
  greedy.dev_size = 2;  // nothing left to train on
  CHECK(category_of([&] {
          prepare_training_data({ok}, {&lex}, lm, greedy, outs);
        }) == ErrorCategory::kData);
}

TEST_CASE("build_cipher leaves non-alphabetic tokens alone") {
  auto cipher = build_cipher({"1", "a1", ".", "x,y", "42"}, 7);
  CHECK(cipher.size() == 5);
  for (const auto& [token, label] : cipher) CHECK(label == token);
}

TEST_CASE("build_cipher relabels letters bijectively") {
  std::vector<std::string> vocab;
  for (char c = 'a'; c <= 'z'; ++c) vocab.emplace_back(1, c);
  auto cipher = build_cipher(vocab, 11);
  REQUIRE(cipher.size() == 26);

  std::vector<char> letters(26);
  std::iota(letters.begin(), letters.end(), 'a');
  fisher_yates_shuffle(letters, 11);

  // Every single-letter label collides with the vocabulary, so each gets
  // exactly one '_' and the first characters form the letter permutation.
  std::set<char> firsts;
  for (char c = 'a'; c <= 'z'; ++c) {
    const std::string& label = cipher.at(std::string(1, c));
    REQUIRE(label.size() == 2);
    CHECK(label[0] == letters[c - 'a']);
    CHECK(label[1] == '_');
    firsts.insert(label[0]);
  }
  CHECK(firsts.size() == 26);
  CHECK(cipher.at("a") == "b_");
  CHECK(cipher.at("z") == "f_");
}

TEST_CASE("build_cipher preserves case and avoids every collision") {
  std::vector<std::string> vocab = {"ab", "AB", "aB", "cd"};
  auto cipher = build_cipher(vocab, 3);

  auto stripped = [](std::string s) {
    while (!s.empty() && s.back() == '_') s.pop_back();
    return s;
  };
  std::string lower = stripped(cipher.at("ab"));
  std::string upper = stripped(cipher.at("AB"));
  std::string mixed = stripped(cipher.at("aB"));
  REQUIRE(lower.size() == 2);
  REQUIRE(upper.size() == 2);
  REQUIRE(mixed.size() == 2);
  for (size_t i = 0; i < 2; ++i) {
    CHECK(upper[i] == static_cast<char>(lower[i] - 'a' + 'A'));
    CHECK(std::islower(static_cast<unsigned char>(lower[i])));
  }
  CHECK(mixed[0] == lower[0]);
  CHECK(mixed[1] == upper[1]);

  std::unordered_set<std::string> labels;
  std::unordered_set<std::string> words(vocab.begin(), vocab.end());
  for (const auto& t : vocab) {
    const std::string& label = cipher.at(t);
    CHECK(!words.count(label));
    CHECK(labels.insert(label).second);
  }
}

TEST_CASE("build_cipher is seed-deterministic") {
  std::vector<std::string> vocab = {"abcdefghijklmnopqrstuvwxyz"};
  auto c1 = build_cipher(vocab, 1);
  auto c1b = build_cipher(vocab, 1);
  auto c2 = build_cipher(vocab, 2);
  CHECK(c1.at(vocab[0]) == "ndivjmpxwyoelrkqbsafchugzt");
  CHECK(c1b.at(vocab[0]) == c1.at(vocab[0]));
  CHECK(c2.at(vocab[0]) == "ruzyaxlqmewnshkftdgcjvopbi");
}

namespace {

// 32 alphabetic types plus 18 numeric anchors; the anchors outnumber the
// embedding dimension so the noiseless map is pinned to the identity.
std::vector<std::string> cipher_vocab() {
  std::vector<std::string> vocab;
  for (int i = 0; i < 32; ++i) {
    std::string t(1, static_cast<char>(i < 26 ? 'x' : 'y'));
    t += static_cast<char>('a' + i % 26);
    vocab.push_back(t);
  }
  for (int i = 0; i < 18; ++i) vocab.push_back(std::to_string(i));
  return vocab;
}

void write_cipher_fixture(const std::filesystem::path& dir) {
  auto vocab = cipher_vocab();
  std::ostringstream emb;
  emb << vocab.size() << " 16\n";
  SplitMix64 rng(123);
  for (const auto& t : vocab) {
    emb << t;
    for (int d = 0; d < 16; ++d) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), " %.6f", rng.next_gaussian());
      emb << buf;
    }
    emb << '\n';
  }
  write_file(dir / "emb.txt", emb.str());

  std::ostringstream corpus;
  for (int line = 0; line < 1300; ++line) {
    for (int j = 0; j < 8; ++j) {
      if (j) corpus << ' ';
      corpus << vocab[(line * 8 + j) % vocab.size()];
    }
    corpus << '\n';
  }
  write_file(dir / "corpus.txt", corpus.str());
}

}  // namespace

TEST_CASE("run_cipher_test recovers a noiseless cipher exactly") {
  auto dir = fresh_dir("glosskit_test_pipeline_cipher");
  write_cipher_fixture(dir);

  CipherConfig cfg;
  cfg.seed = 5;
  cfg.heldout = 200;
  auto report = run_cipher_test((dir / "corpus.txt").string(),
                                (dir / "emb.txt").string(), cfg);

  CHECK(report.corpus_tokens == 10400);
  CHECK(report.corpus_sentences == 1300);
  CHECK(report.vocabulary == 50);
  CHECK(report.ciphered_types == 32);
  CHECK(report.seed_pairs == 18);
  CHECK(report.p_at_1 == 1.0);
  CHECK(report.top_evaluated == 32);
  CHECK(report.p_at_1_top == 1.0);
  CHECK(report.bleu == doctest::Approx(100.0));
  CHECK(report.heldout_sentences == 200);
  CHECK(report.heldout_oov_rate == 0.0);
  CHECK(report.seconds >= 0.0);

  // Worker count must not change any result; top_n trims the frequent set.
  CipherConfig cfg2 = cfg;
  cfg2.workers = 3;
  cfg2.top_n = 5;
  auto r2 = run_cipher_test((dir / "corpus.txt").string(),
                            (dir / "emb.txt").string(), cfg2);
  CHECK(r2.p_at_1 == report.p_at_1);
  CHECK(r2.bleu == report.bleu);
  CHECK(r2.heldout_oov_rate == report.heldout_oov_rate);
  CHECK(r2.seed_pairs == report.seed_pairs);
  CHECK(r2.top_evaluated == 5);
  CHECK(r2.p_at_1_top == 1.0);
}

TEST_CASE("run_cipher_test rejects thin corpora and bad heldout sizes") {
  auto dir = fresh_dir("glosskit_test_pipeline_cipher_bad");
  write_cipher_fixture(dir);

  std::ostringstream small;
  for (int line = 0; line < 10; ++line) small << "xa xb xc xd\n";
  write_file(dir / "small.txt", small.str());
  CipherConfig cfg;
  try {
    run_cipher_test((dir / "small.txt").string(), (dir / "emb.txt").string(),
                    cfg);
    FAIL("thin corpus accepted");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::kData);
    CHECK(std::string(e.what()).find("10000") != std::string::npos);
  }

  CipherConfig wide = cfg;
  wide.heldout = 2000;  // more than the corpus has
  CHECK(category_of([&] {
          run_cipher_test((dir / "corpus.txt").string(),
                          (dir / "emb.txt").string(), wide);
        }) == ErrorCategory::kConfig);
  CipherConfig none = cfg;
  none.heldout = 0;
  CHECK(category_of([&] {
          run_cipher_test((dir / "corpus.txt").string(),
                          (dir / "emb.txt").string(), none);
        }) == ErrorCategory::kConfig);
}
