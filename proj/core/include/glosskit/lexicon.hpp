#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "glosskit/crosslingual.hpp"
#include "glosskit/embedding.hpp"

namespace glosskit {

enum class Metric { kCosine, kCsls };

const char* to_string(Metric metric);
Metric metric_from_string(const std::string& name);

// One translation option. similarity is always the cosine between the
// mapped source vector and the target vector, even when the ranking metric
// is CSLS: the decoder's distance term is defined on cosines.
struct TranslationOption {
  std::string target;
  double similarity;
};

struct LexiconEntry {
  std::string source;
  std::vector<TranslationOption> options;  // rank order, best first
};

// Word-to-word translation table. Entry order is the source row order when
// built, file order when imported; exports are bitwise-deterministic.
class BilingualLexicon {
 public:
  BilingualLexicon() = default;
  BilingualLexicon(int k, Metric metric) : k_(k), metric_(metric) {}

  void add(LexiconEntry entry);
  bool contains(const std::string& source) const;
  // nullptr when the source token has no entry.
  const std::vector<TranslationOption>* options(
      const std::string& source) const;

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  int k() const { return k_; }
  Metric metric() const { return metric_; }
  size_t size() const { return entries_.size(); }

 private:
  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, size_t> by_source_;
  int k_ = 0;
  Metric metric_ = Metric::kCosine;
};

// For every source token, the top-k target neighbors of its mapped vector.
// CSLS ranking uses penalties computed over the full vocabularies.
BilingualLexicon build_lexicon(const LinearMap& map, const EmbeddingMatrix& src,
                               const EmbeddingMatrix& tgt, int k,
                               Metric metric = Metric::kCosine,
                               int workers = 1);

// TSV "source<TAB>target<TAB>similarity" with similarity at 6 decimals,
// grouped by source in rank order; '#' lines are comments.
void export_lexicon(const BilingualLexicon& lex, const std::string& path);
BilingualLexicon import_lexicon(const std::string& path);

// "source<TAB>target" pairs, '#' comments and blank lines skipped.
std::vector<std::pair<std::string, std::string>> load_word_pairs(
    const std::string& path);

struct PrecisionReport {
  double p_at_1 = 0.0;
  double p_at_5 = 0.0;
  double coverage = 0.0;
  long evaluated = 0;  // gold source words found in the lexicon
  long total = 0;      // distinct gold source words
};

// p@n = fraction of covered gold source words whose top-n options contain
// any gold target; words absent from the lexicon lower coverage only.
PrecisionReport evaluate_precision(
    const BilingualLexicon& lex,
    const std::vector<std::pair<std::string, std::string>>& gold);

}  // namespace glosskit
