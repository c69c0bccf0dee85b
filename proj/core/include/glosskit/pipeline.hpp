#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "glosskit/crosslingual.hpp"
#include "glosskit/gloss.hpp"
#include "glosskit/lexicon.hpp"
#include "glosskit/ngram_lm.hpp"

namespace glosskit {

uint64_t fnv1a64(const void* data, size_t size);
uint64_t fnv1a64_file(const std::string& path);
std::string digest_hex(uint64_t digest);

// Run record written next to an artifact as "<artifact>.manifest": sorted
// "key=value" lines, with an fnv1a64 content digest per input and output
// file. Reruns with equal inputs and flags must produce equal manifests.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, long value);
  void set(const std::string& key, double value);
  void add_file(const std::string& role, const std::string& path);
  void write(const std::string& artifact_path) const;

 private:
  std::map<std::string, std::string> entries_;
};

struct ParallelCorpus {
  std::string language;
  std::vector<std::string> source;  // raw lines, index-aligned with target
  std::vector<std::string> target;
};

ParallelCorpus load_parallel_corpus(const std::string& language,
                                    const std::string& source_path,
                                    const std::string& target_path);

struct PrepareConfig {
  int max_len = 100;      // pairs with a longer side are dropped
  long dev_size = 3000;   // pairs split off for the dev set
  uint64_t shuffle_seed = 1;
  GlossConfig gloss;
};

struct PrepareOutputs {
  std::string train_src;  // Translationese
  std::string train_tgt;
  std::string dev_src;
  std::string dev_tgt;
};

struct PrepareReport {
  long read_pairs = 0;
  long dropped_overlong = 0;
  long train_pairs = 0;
  long dev_pairs = 0;
  long tokens = 0;      // source tokens glossed
  long oov_tokens = 0;  // copied through
};

// Per corpus: drop overlong pairs, gloss the source side into
// Translationese with that corpus's lexicon; then concatenate everything,
// shuffle (Fisher-Yates over SplitMix64), and split off the first dev_size
// pairs as the dev set. lexicons[i] belongs to corpora[i].
PrepareReport prepare_training_data(
    const std::vector<ParallelCorpus>& corpora,
    const std::vector<const BilingualLexicon*>& lexicons, const NGramModel& lm,
    const PrepareConfig& config, const PrepareOutputs& outputs);

// Deterministic bijective relabeling: alphabetic tokens (ASCII letters
// only) get a seeded letter-substitution label, suffixed with '_' until it
// matches no vocabulary token and no earlier label; every other token maps
// to itself. The self-mapped tokens are the identical-string seed.
std::unordered_map<std::string, std::string> build_cipher(
    const std::vector<std::string>& vocabulary, uint64_t seed);

struct CipherConfig {
  uint64_t seed = 1;
  double noise_sigma = 0.0;  // per-component Gaussian noise, renormalized
  long heldout = 200;        // sentences scored with BLEU
  long top_n = 1000;         // frequency cutoff for p_at_1_top
  int lm_order = 5;
  int k = 20;
  Metric metric = Metric::kCsls;
  long vocab_limit = 100000;
  RefineConfig refine;
  GlossConfig gloss;
  int workers = 1;
};

struct CipherReport {
  long corpus_tokens = 0;
  long corpus_sentences = 0;
  long vocabulary = 0;      // embedding types in play
  long ciphered_types = 0;  // alphabetic types relabeled
  long seed_pairs = 0;      // identical-string seed size
  double p_at_1 = 0.0;      // over the whole ciphered vocabulary
  double p_at_1_top = 0.0;  // over the top_n most frequent ciphered types
  long top_evaluated = 0;
  double bleu = 0.0;
  long heldout_sentences = 0;
  double heldout_oov_rate = 0.0;
  double seconds = 0.0;
};

// End-to-end surrogate on a single language: relabels the corpus with a
// seeded cipher, copies the embeddings under the new labels (plus optional
// noise), then runs map, refinement, lexicon induction, and glossing of
// held-out sentences back against the original text.
CipherReport run_cipher_test(const std::string& corpus_path,
                             const std::string& embeddings_path,
                             const CipherConfig& config);

}  // namespace glosskit
