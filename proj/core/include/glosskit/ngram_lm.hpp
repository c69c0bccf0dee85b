#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace glosskit {

enum class Smoothing { kKneserNey, kAddK };

struct LmEntry {
  double logprob = 0.0;   // log10 P(w | context)
  double backoff = 0.0;   // log10 backoff weight, valid iff has_backoff
  bool has_backoff = false;
};

struct TrainReport {
  Smoothing requested = Smoothing::kKneserNey;
  Smoothing used = Smoothing::kKneserNey;
  bool kn_fallback = false;  // Kneser-Ney degenerate, trained add-k instead
  std::vector<long> gram_counts;  // entries per order, 1-based order - 1
  std::vector<double> discounts;  // Kneser-Ney D_n per order (when used)
};

// Backoff n-gram model over log10 probabilities, ARPA-compatible.
//
// Training uses interpolated Kneser-Ney with one discount per order,
// D_n = n1/(n1 + 2*n2) from the counts-of-counts of that order's adjusted
// counts: raw counts at the highest order, continuation counts below
// (n-grams starting with <s> keep raw counts, since nothing can precede
// them). The mass discounted at the unigram level goes to <unk>, making the
// model open-vocabulary. Sentences are padded with order-1 leading <s> and
// one trailing </s>; <s> itself is never predicted and carries a -99
// placeholder log-probability, exactly as conventional ARPA files do.
//
// For every context u the stored backoff weight is the interpolation weight
// gamma(u), so backoff queries reproduce the interpolated distribution and
// sum(P(w|u)) over the vocabulary is 1 up to the 1e-99 <s> placeholder.
class NGramModel {
 public:
  static constexpr const char* kBos = "<s>";
  static constexpr const char* kEos = "</s>";
  static constexpr const char* kUnk = "<unk>";
  static constexpr double kPlaceholderLog10 = -99.0;

  int order() const { return order_; }
  const std::vector<std::string>& vocabulary() const { return vocab_; }
  long entry_count(int order_n) const;

  int bos_id() const { return 0; }
  int eos_id() const { return 1; }
  int unk_id() const { return 2; }
  // Maps out-of-vocabulary tokens to <unk>.
  int id_or_unk(const std::string& token) const;

  // log10 P(token | context); context longer than order-1 is truncated to
  // its tail, unknown tokens are mapped to <unk>. Total function.
  double logprob(const std::string& token,
                 const std::vector<std::string>& context) const;
  double logprob_ids(std::span<const int> context, int word) const;

  // Stored entry for an exact n-gram, nullptr if absent. Test hook.
  const LmEntry* find(const std::vector<std::string>& gram) const;

  friend NGramModel train_lm(std::istream&, int, Smoothing, double,
                             TrainReport*);
  friend NGramModel load_arpa(const std::string&);
  friend void save_arpa(const NGramModel&, const std::string&);

 private:
  int lookup_id(const std::string& token) const;  // -1 when absent
  int intern(const std::string& token);

  int order_ = 0;
  std::vector<std::string> vocab_;  // id -> token; 0,1,2 are <s>,</s>,<unk>
  std::unordered_map<std::string, int> ids_;
  // tables_[m] holds (m+1)-grams keyed by packed int32 id sequences.
  std::vector<std::unordered_map<std::string, LmEntry>> tables_;
};

// Trains on one pre-tokenized sentence per line. add_k is the pseudo-count
// for Smoothing::kAddK (and for the Kneser-Ney degenerate fallback).
NGramModel train_lm(std::istream& corpus, int order,
                    Smoothing smoothing = Smoothing::kKneserNey,
                    double add_k = 0.1, TrainReport* report = nullptr);
NGramModel train_lm_file(const std::string& path, int order,
                         Smoothing smoothing = Smoothing::kKneserNey,
                         double add_k = 0.1, TrainReport* report = nullptr);

void save_arpa(const NGramModel& model, const std::string& path);
NGramModel load_arpa(const std::string& path);

// 10^(-sum(log10 P)/N) over all tokens including </s>.
double perplexity(const NGramModel& model, std::istream& corpus);
double perplexity_file(const NGramModel& model, const std::string& path);

}  // namespace glosskit
