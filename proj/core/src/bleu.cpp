#include "glosskit/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "glosskit/error.hpp"
#include "glosskit/text.hpp"

namespace glosskit {

namespace {

void count_ngrams(const std::vector<std::string>& tokens, int n,
                  std::unordered_map<std::string, long>& out) {
  out.clear();
  if (static_cast<int>(tokens.size()) < n) return;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int j = 1; j < n; ++j) {
      key += ' ';
      key += tokens[i + j];
    }
    ++out[key];
  }
}

}  // namespace

BleuResult corpus_bleu(const std::vector<std::vector<std::string>>& hyps,
                       const std::vector<std::vector<std::string>>& refs,
                       int max_order) {
  if (max_order < 1) throw_config("bleu max_order must be >= 1");
  if (hyps.size() != refs.size())
    throw_data("bleu: " + std::to_string(hyps.size()) + " hypotheses vs " +
               std::to_string(refs.size()) + " references");

  std::vector<long> matches(max_order, 0), totals(max_order, 0);
  BleuResult result;
  std::unordered_map<std::string, long> hyp_counts, ref_counts;
  for (size_t s = 0; s < hyps.size(); ++s) {
    result.hyp_length += static_cast<long>(hyps[s].size());
    result.ref_length += static_cast<long>(refs[s].size());
    for (int n = 1; n <= max_order; ++n) {
      count_ngrams(hyps[s], n, hyp_counts);
      count_ngrams(refs[s], n, ref_counts);
      for (const auto& [gram, count] : hyp_counts) {
        totals[n - 1] += count;
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end())
          matches[n - 1] += std::min(count, it->second);
      }
    }
  }

  result.precisions.assign(max_order, 0.0);
  double log_sum = 0.0;
  int used_orders = 0;
  bool zero_match = false;
  for (int n = 0; n < max_order; ++n) {
    if (totals[n] == 0) continue;
    result.precisions[n] =
        static_cast<double>(matches[n]) / static_cast<double>(totals[n]);
    ++used_orders;
    if (matches[n] == 0)
      zero_match = true;
    else
      log_sum += std::log(result.precisions[n]);
  }

  if (result.hyp_length > 0 && result.hyp_length < result.ref_length)
    result.brevity_penalty =
        std::exp(1.0 - static_cast<double>(result.ref_length) /
                           static_cast<double>(result.hyp_length));

  if (used_orders == 0 || zero_match || result.hyp_length == 0) {
    result.score = 0.0;
  } else {
    result.score =
        100.0 * result.brevity_penalty * std::exp(log_sum / used_orders);
  }
  return result;
}

BleuResult corpus_bleu_files(const std::string& hyp_path,
                             const std::string& ref_path, int max_order) {
  std::ifstream hin(hyp_path);
  if (!hin) throw_io("cannot open hypotheses: " + hyp_path);
  std::ifstream rin(ref_path);
  if (!rin) throw_io("cannot open references: " + ref_path);
  std::vector<std::vector<std::string>> hyps, refs;
  std::string line;
  while (std::getline(hin, line)) hyps.push_back(tokenize_ws(line));
  while (std::getline(rin, line)) refs.push_back(tokenize_ws(line));
  if (hyps.size() != refs.size())
    throw_data("bleu: " + hyp_path + " has " + std::to_string(hyps.size()) +
               " lines, " + ref_path + " has " + std::to_string(refs.size()));
  return corpus_bleu(hyps, refs, max_order);
}

std::string format_bleu(const BleuResult& result) {
  char buf[256];
  std::string precs;
  for (size_t n = 0; n < result.precisions.size(); ++n) {
    std::snprintf(buf, sizeof(buf), "%s%.1f", n ? "/" : "",
                  100.0 * result.precisions[n]);
    precs += buf;
  }
  double ratio = result.ref_length > 0
                     ? static_cast<double>(result.hyp_length) /
                           static_cast<double>(result.ref_length)
                     : 0.0;
  std::snprintf(buf, sizeof(buf),
                "BLEU = %.2f, %s (BP=%.3f, ratio=%.3f, hyp_len=%ld, "
                "ref_len=%ld)",
                result.score, precs.c_str(), result.brevity_penalty, ratio,
                result.hyp_length, result.ref_length);
  return buf;
}

}  // namespace glosskit
