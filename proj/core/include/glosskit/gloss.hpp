#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "glosskit/lexicon.hpp"
#include "glosskit/ngram_lm.hpp"

namespace glosskit {

// Word-by-word glossing: each source token is replaced by one of its
// lexicon translations (or copied through when the lexicon has none),
// chosen jointly over the sentence by beam search maximizing
//   sum_i  alpha * log10 P_lm(t_i | t_1..t_{i-1})  +  beta * sim(s_i, t_i)
// Output always has exactly one token per input token.
enum class OovPolicy { kCopyThrough };

struct GlossConfig {
  double alpha = 0.01;  // language model weight
  double beta = 0.5;    // lexicon similarity weight
  int stack_size = 100;
  OovPolicy oov_policy = OovPolicy::kCopyThrough;
  bool recombine = true;         // merge hypotheses with equal LM state
  bool score_end_marker = true;  // add alpha * log10 P(</s> | ...) at the end
  int workers = 1;               // gloss_corpus only
};

// Output token i glosses input token i (strictly monotone, no reordering).
struct GlossedSentence {
  std::vector<std::string> tokens;
  double score = 0.0;  // decoder objective, includes end marker when enabled
  std::vector<bool> oov_flags;  // per position: copied through
  int oov = 0;                  // count of set flags
};

GlossedSentence gloss_sentence(const NGramModel& lm,
                               const BilingualLexicon& lexicon,
                               const std::vector<std::string>& source,
                               const GlossConfig& config);

struct GlossReport {
  long sentences = 0;
  long tokens = 0;
  long oov_tokens = 0;
  double oov_rate = 0.0;
  double seconds = 0.0;
  double sentences_per_second = 0.0;
};

// Glosses every line of in (one sentence per line, whitespace tokens) and
// writes one output line per input line, blank lines included. Sentences
// are independent, so worker count never changes the output.
void gloss_corpus(const NGramModel& lm, const BilingualLexicon& lexicon,
                  std::istream& in, std::ostream& out,
                  const GlossConfig& config, GlossReport* report = nullptr);
void gloss_corpus_file(const NGramModel& lm, const BilingualLexicon& lexicon,
                       const std::string& in_path,
                       const std::string& out_path,
                       const GlossConfig& config,
                       GlossReport* report = nullptr);

}  // namespace glosskit
