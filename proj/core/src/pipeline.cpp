#include "glosskit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_set>
#include <utility>

#include "glosskit/bleu.hpp"
#include "glosskit/error.hpp"
#include "glosskit/parallel.hpp"
#include "glosskit/rng.hpp"
#include "glosskit/text.hpp"

namespace glosskit {

uint64_t fnv1a64(const void* data, size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  uint64_t h = 14695981039346656037ULL;
  for (size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open for digest: " + path);
  uint64_t h = 14695981039346656037ULL;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::string digest_hex(uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(digest));
  return buf;
}

void Manifest::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

void Manifest::set(const std::string& key, long value) {
  entries_[key] = std::to_string(value);
}

void Manifest::set(const std::string& key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  entries_[key] = buf;
}

void Manifest::add_file(const std::string& role, const std::string& path) {
  entries_[role + ".path"] = path;
  entries_[role + ".fnv1a64"] = digest_hex(fnv1a64_file(path));
}

void Manifest::write(const std::string& artifact_path) const {
  std::string path = artifact_path + ".manifest";
  std::ofstream out(path);
  if (!out) throw_io("cannot write manifest: " + path);
  for (const auto& [key, value] : entries_) out << key << '=' << value << '\n';
  if (!out) throw_io("write failed: " + path);
}

ParallelCorpus load_parallel_corpus(const std::string& language,
                                    const std::string& source_path,
                                    const std::string& target_path) {
  ParallelCorpus corpus;
  corpus.language = language;
  std::ifstream src(source_path);
  if (!src) throw_io("cannot open corpus: " + source_path);
  std::ifstream tgt(target_path);
  if (!tgt) throw_io("cannot open corpus: " + target_path);
  std::string line;
  while (std::getline(src, line)) corpus.source.push_back(line);
  while (std::getline(tgt, line)) corpus.target.push_back(line);
  if (corpus.source.size() != corpus.target.size())
    throw_data("parallel corpus " + language + ": " + source_path + " has " +
               std::to_string(corpus.source.size()) + " lines, " +
               target_path + " has " + std::to_string(corpus.target.size()));
  return corpus;
}

PrepareReport prepare_training_data(
    const std::vector<ParallelCorpus>& corpora,
    const std::vector<const BilingualLexicon*>& lexicons, const NGramModel& lm,
    const PrepareConfig& config, const PrepareOutputs& outputs) {
  if (corpora.empty()) throw_config("prepare: no corpora given");
  if (corpora.size() != lexicons.size())
    throw_config("prepare: " + std::to_string(corpora.size()) +
                 " corpora but " + std::to_string(lexicons.size()) +
                 " lexicons");
  if (config.max_len < 1) throw_config("max_len must be >= 1");
  if (config.dev_size < 0) throw_config("dev_size must be >= 0");

  PrepareReport report;
  std::vector<std::vector<std::string>> src_tokens;
  std::vector<const std::string*> tgt_lines;
  std::vector<const BilingualLexicon*> pair_lexicon;
  for (size_t c = 0; c < corpora.size(); ++c) {
    const ParallelCorpus& corpus = corpora[c];
    if (corpus.source.size() != corpus.target.size())
      throw_data("parallel corpus " + corpus.language + ": " +
                 std::to_string(corpus.source.size()) + " source lines vs " +
                 std::to_string(corpus.target.size()) + " target lines");
    for (size_t i = 0; i < corpus.source.size(); ++i) {
      ++report.read_pairs;
      auto st = tokenize_ws(corpus.source[i]);
      auto tt = tokenize_ws(corpus.target[i]);
      if (st.size() > static_cast<size_t>(config.max_len) ||
          tt.size() > static_cast<size_t>(config.max_len)) {
        ++report.dropped_overlong;
        continue;
      }
      src_tokens.push_back(std::move(st));
      tgt_lines.push_back(&corpus.target[i]);
      pair_lexicon.push_back(lexicons[c]);
    }
  }

  const long total = static_cast<long>(src_tokens.size());
  if (config.dev_size >= total)
    throw_data("dev_size " + std::to_string(config.dev_size) +
               " leaves no training data (" + std::to_string(total) +
               " pairs after length filtering)");

  std::vector<GlossedSentence> glossed(src_tokens.size());
  parallel_for(src_tokens.size(), config.gloss.workers,
               [&](size_t lo, size_t hi) {
                 for (size_t i = lo; i < hi; ++i)
                   glossed[i] = gloss_sentence(lm, *pair_lexicon[i],
                                               src_tokens[i], config.gloss);
               });
  for (const auto& g : glossed) {
    report.tokens += static_cast<long>(g.tokens.size());
    report.oov_tokens += g.oov;
  }

  std::vector<std::pair<std::string, std::string>> pairs(src_tokens.size());
  for (size_t i = 0; i < glossed.size(); ++i)
    pairs[i] = {join_ws(glossed[i].tokens), *tgt_lines[i]};
  fisher_yates_shuffle(pairs, config.shuffle_seed);

  auto write_lines = [&](const std::string& path, size_t lo, size_t hi,
                         bool source_side) {
    std::ofstream out(path);
    if (!out) throw_io("cannot write: " + path);
    for (size_t i = lo; i < hi; ++i)
      out << (source_side ? pairs[i].first : pairs[i].second) << '\n';
    if (!out) throw_io("write failed: " + path);
  };
  const size_t dev = static_cast<size_t>(config.dev_size);
  write_lines(outputs.dev_src, 0, dev, true);
  write_lines(outputs.dev_tgt, 0, dev, false);
  write_lines(outputs.train_src, dev, pairs.size(), true);
  write_lines(outputs.train_tgt, dev, pairs.size(), false);

  report.dev_pairs = config.dev_size;
  report.train_pairs = total - config.dev_size;
  return report;
}

std::unordered_map<std::string, std::string> build_cipher(
    const std::vector<std::string>& vocabulary, uint64_t seed) {
  std::vector<char> letters(26);
  std::iota(letters.begin(), letters.end(), 'a');
  fisher_yates_shuffle(letters, seed);

  auto alphabetic = [](const std::string& token) {
    if (token.empty()) return false;
    for (unsigned char c : token)
      if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))) return false;
    return true;
  };

  std::unordered_set<std::string> taken(vocabulary.begin(), vocabulary.end());
  std::unordered_map<std::string, std::string> cipher;
  cipher.reserve(vocabulary.size());
  for (const auto& token : vocabulary)
    if (!alphabetic(token)) cipher.emplace(token, token);
  for (const auto& token : vocabulary) {
    if (!alphabetic(token) || cipher.count(token)) continue;
    std::string label;
    label.reserve(token.size());
    for (char c : token) {
      if (c >= 'a' && c <= 'z')
        label += letters[c - 'a'];
      else
        label += static_cast<char>(letters[c - 'A'] - 'a' + 'A');
    }
    while (taken.count(label)) label += '_';
    taken.insert(label);
    cipher.emplace(token, label);
  }
  return cipher;
}

CipherReport run_cipher_test(const std::string& corpus_path,
                             const std::string& embeddings_path,
                             const CipherConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  CipherReport report;

  std::ifstream in(corpus_path);
  if (!in) throw_io("cannot open corpus: " + corpus_path);
  std::vector<std::vector<std::string>> sentences;
  std::unordered_map<std::string, long> freq;
  std::vector<std::string> corpus_order;  // first-appearance order
  std::string line;
  while (std::getline(in, line)) {
    auto toks = tokenize_ws(line);
    if (toks.empty()) continue;
    for (const auto& t : toks) {
      auto [it, inserted] = freq.emplace(t, 0);
      if (inserted) corpus_order.push_back(t);
      ++it->second;
      ++report.corpus_tokens;
    }
    sentences.push_back(std::move(toks));
  }
  report.corpus_sentences = static_cast<long>(sentences.size());
  if (report.corpus_tokens < 10000)
    throw_data("cipher test needs >= 10000 corpus tokens, got " +
               std::to_string(report.corpus_tokens));
  if (config.heldout < 1 ||
      config.heldout > static_cast<long>(sentences.size()))
    throw_config("heldout must be in [1, " +
                 std::to_string(sentences.size()) + "]");

  EmbeddingMatrix tgt =
      load_embeddings(embeddings_path, static_cast<int>(config.vocab_limit));
  report.vocabulary = tgt.size();

  // Cipher domain: embedding vocabulary first (its order fixes the label
  // assignment), then corpus-only tokens.
  std::vector<std::string> vocab = tgt.tokens;
  for (const auto& t : corpus_order)
    if (!tgt.contains(t)) vocab.push_back(t);
  auto cipher = build_cipher(vocab, config.seed);

  EmbeddingMatrix src;
  src.vectors = tgt.vectors;
  src.tokens.reserve(tgt.tokens.size());
  for (const auto& t : tgt.tokens) src.tokens.push_back(cipher.at(t));
  if (config.noise_sigma > 0.0) {
    SplitMix64 rng(config.seed + 1);
    for (int r = 0; r < src.vectors.rows(); ++r)
      for (int c = 0; c < src.vectors.cols(); ++c)
        src.vectors(r, c) += config.noise_sigma * rng.next_gaussian();
  }
  src.finalize();

  SeedLexicon seed = seed_identical_strings(src, tgt);
  report.seed_pairs = static_cast<long>(seed.pairs.size());

  LinearMap map = procrustes(src, tgt, seed);
  RefineConfig refine_cfg = config.refine;
  refine_cfg.workers = config.workers;
  map = refine(map, src, tgt, refine_cfg);

  BilingualLexicon lexicon = build_lexicon(map, src, tgt, config.k,
                                           config.metric, config.workers);

  std::vector<std::pair<std::string, std::string>> gold;
  for (const auto& t : tgt.tokens) {
    const std::string& label = cipher.at(t);
    if (label != t) gold.emplace_back(label, t);
  }
  report.ciphered_types = static_cast<long>(gold.size());
  if (!gold.empty()) report.p_at_1 = evaluate_precision(lexicon, gold).p_at_1;

  // The same restricted to the most frequent ciphered types.
  std::vector<std::pair<std::string, std::string>> top_gold;
  {
    std::vector<const std::string*> by_freq;
    for (const auto& t : tgt.tokens)
      if (cipher.at(t) != t && freq.count(t)) by_freq.push_back(&t);
    std::sort(by_freq.begin(), by_freq.end(),
              [&](const std::string* a, const std::string* b) {
                long fa = freq.at(*a), fb = freq.at(*b);
                if (fa != fb) return fa > fb;
                return *a < *b;
              });
    if (static_cast<long>(by_freq.size()) > config.top_n)
      by_freq.resize(config.top_n);
    for (const auto* t : by_freq) top_gold.emplace_back(cipher.at(*t), *t);
  }
  report.top_evaluated = static_cast<long>(top_gold.size());
  if (!top_gold.empty())
    report.p_at_1_top = evaluate_precision(lexicon, top_gold).p_at_1;

  NGramModel lm =
      train_lm_file(corpus_path, config.lm_order, Smoothing::kKneserNey);

  std::vector<size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), size_t{0});
  fisher_yates_shuffle(order, config.seed + 2);
  order.resize(static_cast<size_t>(config.heldout));
  std::sort(order.begin(), order.end());

  GlossConfig gloss_cfg = config.gloss;
  gloss_cfg.workers = config.workers;
  std::vector<GlossedSentence> glossed(order.size());
  std::vector<std::vector<std::string>> ciphered(order.size());
  for (size_t i = 0; i < order.size(); ++i) {
    ciphered[i].reserve(sentences[order[i]].size());
    for (const auto& t : sentences[order[i]])
      ciphered[i].push_back(cipher.at(t));
  }
  parallel_for(order.size(), config.workers, [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i)
      glossed[i] = gloss_sentence(lm, lexicon, ciphered[i], gloss_cfg);
  });

  std::vector<std::vector<std::string>> hyps(order.size()), refs(order.size());
  long heldout_tokens = 0, heldout_oov = 0;
  for (size_t i = 0; i < order.size(); ++i) {
    hyps[i] = glossed[i].tokens;
    refs[i] = sentences[order[i]];
    heldout_tokens += static_cast<long>(glossed[i].tokens.size());
    heldout_oov += glossed[i].oov;
  }
  report.bleu = corpus_bleu(hyps, refs).score;
  report.heldout_sentences = static_cast<long>(order.size());
  report.heldout_oov_rate =
      heldout_tokens > 0 ? static_cast<double>(heldout_oov) / heldout_tokens
                         : 0.0;

  auto t1 = std::chrono::steady_clock::now();
  report.seconds = std::chrono::duration<double>(t1 - t0).count();
  return report;
}

}  // namespace glosskit
