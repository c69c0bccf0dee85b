#pragma once

#include <string>
#include <vector>

namespace glosskit {

struct BleuResult {
  double score = 0.0;  // 0..100
  std::vector<double> precisions;  // modified n-gram precision per order
  double brevity_penalty = 1.0;
  long hyp_length = 0;
  long ref_length = 0;
};

// Corpus-level BLEU with a single reference: geometric mean of the modified
// n-gram precisions for n = 1..max_order times the brevity penalty. Orders
// with an empty denominator (every sentence shorter than n) are dropped
// from the mean; a zero numerator at any remaining order gives score 0.
BleuResult corpus_bleu(const std::vector<std::vector<std::string>>& hyps,
                       const std::vector<std::vector<std::string>>& refs,
                       int max_order = 4);
BleuResult corpus_bleu_files(const std::string& hyp_path,
                             const std::string& ref_path, int max_order = 4);

// multi-bleu style one-liner, score at 2 decimals.
std::string format_bleu(const BleuResult& result);

}  // namespace glosskit
