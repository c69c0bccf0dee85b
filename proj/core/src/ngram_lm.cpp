#include "glosskit/ngram_lm.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>

#include "glosskit/error.hpp"
#include "glosskit/text.hpp"

namespace glosskit {

namespace {

std::string pack(const int32_t* ids, size_t n) {
  return std::string(reinterpret_cast<const char*>(ids),
                     n * sizeof(int32_t));
}

std::string pack1(int32_t id) { return pack(&id, 1); }

std::vector<int32_t> unpack(const std::string& key) {
  std::vector<int32_t> ids(key.size() / sizeof(int32_t));
  std::memcpy(ids.data(), key.data(), key.size());
  return ids;
}

int32_t first_id(const std::string& key) {
  int32_t id;
  std::memcpy(&id, key.data(), sizeof(id));
  return id;
}

std::string drop_first(const std::string& key) {
  return key.substr(sizeof(int32_t));
}

std::string drop_last(const std::string& key) {
  return key.substr(0, key.size() - sizeof(int32_t));
}

struct CtxStat {
  double total = 0.0;  // sum of adjusted continuation counts
  long types = 0;      // distinct continuations
};

}  // namespace

int NGramModel::lookup_id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? -1 : it->second;
}

int NGramModel::intern(const std::string& token) {
  auto [it, inserted] = ids_.emplace(token, static_cast<int>(vocab_.size()));
  if (inserted) vocab_.push_back(token);
  return it->second;
}

int NGramModel::id_or_unk(const std::string& token) const {
  int id = lookup_id(token);
  return id < 0 ? unk_id() : id;
}

long NGramModel::entry_count(int order_n) const {
  if (order_n < 1 || order_n > order_) return 0;
  return static_cast<long>(tables_[order_n - 1].size());
}

const LmEntry* NGramModel::find(const std::vector<std::string>& gram) const {
  if (gram.empty() || gram.size() > static_cast<size_t>(order_))
    return nullptr;
  std::vector<int32_t> ids;
  ids.reserve(gram.size());
  for (const auto& t : gram) {
    int id = lookup_id(t);
    if (id < 0) return nullptr;
    ids.push_back(id);
  }
  const auto& table = tables_[gram.size() - 1];
  auto it = table.find(pack(ids.data(), ids.size()));
  return it == table.end() ? nullptr : &it->second;
}

double NGramModel::logprob_ids(std::span<const int> context, int word) const {
  size_t window = std::min(context.size(), static_cast<size_t>(order_ - 1));
  const int* ctx = context.data() + (context.size() - window);

  double alpha = 0.0;
  std::vector<int32_t> gram(window + 1);
  for (size_t m = window;; --m) {
    // gram = last m context ids + word
    for (size_t j = 0; j < m; ++j) gram[j] = ctx[window - m + j];
    gram[m] = word;
    const auto& table = tables_[m];
    auto it = table.find(pack(gram.data(), m + 1));
    if (it != table.end()) return alpha + it->second.logprob;
    if (m == 0) break;
    // accumulate the backoff weight of the m-token context before shrinking
    const auto& ctx_table = tables_[m - 1];
    auto cit = ctx_table.find(pack(gram.data(), m));
    if (cit != ctx_table.end() && cit->second.has_backoff)
      alpha += cit->second.backoff;
  }
  // Unreachable once <unk> mapping is applied; be total anyway.
  auto it = tables_[0].find(pack1(unk_id()));
  return it != tables_[0].end() ? alpha + it->second.logprob
                                : kPlaceholderLog10;
}

double NGramModel::logprob(const std::string& token,
                           const std::vector<std::string>& context) const {
  std::vector<int> ids;
  ids.reserve(context.size());
  for (const auto& t : context) ids.push_back(id_or_unk(t));
  return logprob_ids(ids, id_or_unk(token));
}

NGramModel train_lm(std::istream& corpus, int order, Smoothing smoothing,
                    double add_k, TrainReport* report) {
  if (order < 1) throw_config("language model order must be >= 1");
  if (add_k <= 0.0) throw_config("add_k must be positive");

  NGramModel model;
  model.order_ = order;
  model.intern(NGramModel::kBos);
  model.intern(NGramModel::kEos);
  model.intern(NGramModel::kUnk);
  const int32_t bos = model.bos_id(), eos = model.eos_id();

  // Raw n-gram counts for every order, windows ending at a real token or
  // </s> (never inside the <s> padding).
  std::vector<std::unordered_map<std::string, long>> raw(order);
  std::string line;
  long total_tokens = 0;
  std::vector<int32_t> padded;
  while (std::getline(corpus, line)) {
    auto toks = tokenize_ws(line);
    if (toks.empty()) continue;
    padded.assign(order - 1, bos);
    for (const auto& t : toks) {
      if (t == NGramModel::kBos || t == NGramModel::kEos ||
          t == NGramModel::kUnk)
        throw_data("training corpus contains reserved token " + t);
      padded.push_back(model.intern(t));
      ++total_tokens;
    }
    padded.push_back(eos);
    for (size_t p = static_cast<size_t>(order - 1); p < padded.size(); ++p)
      for (int n = 1; n <= order; ++n)
        ++raw[n - 1][pack(&padded[p + 1 - n], n)];
  }
  if (total_tokens == 0) throw_data("training corpus is empty");

  // Adjusted counts: raw at the highest order; continuation counts below,
  // except <s>-initial n-grams which keep raw counts (they can never be a
  // continuation of anything).
  auto as_double = [](const std::unordered_map<std::string, long>& src) {
    std::unordered_map<std::string, double> out;
    out.reserve(src.size());
    for (const auto& [k, v] : src) out.emplace(k, static_cast<double>(v));
    return out;
  };
  std::vector<std::unordered_map<std::string, double>> adj(order);
  adj[order - 1] = as_double(raw[order - 1]);
  for (int n = order - 1; n >= 1; --n) {
    auto& table = adj[n - 1];
    for (const auto& [key, cnt] : raw[n]) {
      std::string g = drop_first(key);
      if (first_id(g) == bos) continue;
      table[g] += 1.0;
    }
    for (const auto& [key, cnt] : raw[n - 1])
      if (first_id(key) == bos) table[key] = static_cast<double>(cnt);
  }

  // Kneser-Ney discounts from counts-of-counts of the adjusted counts.
  // The unigram level must discount strictly inside (0,1): D=0 starves
  // <unk> and D=1 zeroes singleton types, so either degenerate case falls
  // back to add-k smoothing. Higher orders tolerate D=1 (singletons then
  // live on the interpolated mass) and only D=0 is nudged.
  std::vector<double> discount(order + 1, 0.0);
  bool kn_ok = true;
  if (smoothing == Smoothing::kKneserNey) {
    for (int n = 1; n <= order && kn_ok; ++n) {
      long n1 = 0, n2 = 0;
      for (const auto& [k, c] : adj[n - 1]) {
        if (c == 1.0) ++n1;
        else if (c == 2.0) ++n2;
      }
      if (n == 1 && (n1 == 0 || n2 == 0)) {
        kn_ok = false;
        break;
      }
      if (n1 == 0)
        discount[n] = 0.5;
      else
        discount[n] =
            static_cast<double>(n1) / (static_cast<double>(n1) + 2.0 * n2);
    }
  }
  Smoothing used = smoothing;
  if (smoothing == Smoothing::kKneserNey && !kn_ok) {
    used = Smoothing::kAddK;
    std::cerr << "warning: Kneser-Ney discount undefined on this corpus "
                 "(degenerate unigram counts-of-counts); using add-k\n";
  }
  if (used == Smoothing::kAddK)
    for (int n = 0; n < order; ++n) adj[n] = as_double(raw[n]);

  // Linear-domain probabilities and interpolation weights, converted to
  // log10 at the end. A stored probability of 0 marks a placeholder entry
  // (grams ending in <s>, which exist only to carry backoff weights).
  std::vector<std::unordered_map<std::string, double>> probs(order);
  std::vector<std::unordered_map<std::string, double>> gammas(order);

  double z = 0.0;
  for (const auto& [k, c] : adj[0]) z += c;
  const long vocab_types = static_cast<long>(adj[0].size()) + 1;  // + <unk>
  const double a = add_k * static_cast<double>(vocab_types);

  auto& uni = probs[0];
  uni.reserve(adj[0].size() + 2);
  if (used == Smoothing::kKneserNey) {
    const double d1 = discount[1];
    long t1 = static_cast<long>(adj[0].size());
    for (const auto& [key, c] : adj[0])
      uni[key] = std::max(c - d1, 0.0) / z;
    uni[pack1(model.unk_id())] = d1 * static_cast<double>(t1) / z;
  } else {
    double c_total = 0.0;
    for (const auto& [key, c] : adj[0]) c_total += c;
    double denom = c_total + add_k * static_cast<double>(vocab_types);
    for (const auto& [key, c] : adj[0]) uni[key] = (c + add_k) / denom;
    uni[pack1(model.unk_id())] = add_k / denom;
  }
  uni[pack1(bos)] = 0.0;  // placeholder, never predicted

  for (int n = 2; n <= order; ++n) {
    std::unordered_map<std::string, CtxStat> cstats;
    cstats.reserve(adj[n - 2].size());
    for (const auto& [key, c] : adj[n - 1]) {
      auto& st = cstats[drop_last(key)];
      st.total += c;
      st.types += 1;
    }
    auto& lower_probs = probs[n - 2];
    auto& lower_gammas = gammas[n - 2];
    for (const auto& [ctx, st] : cstats) {
      double gamma = used == Smoothing::kKneserNey
                         ? discount[n] * static_cast<double>(st.types) /
                               st.total
                         : a / (st.total + a);
      lower_gammas[ctx] = gamma;
      lower_probs.try_emplace(ctx, 0.0);  // materialize <s>-final contexts
    }
    auto& cur = probs[n - 1];
    cur.reserve(adj[n - 1].size());
    for (const auto& [key, c] : adj[n - 1]) {
      const CtxStat& st = cstats[drop_last(key)];
      auto low = lower_probs.find(drop_first(key));
      assert(low != lower_probs.end());
      double p_lower = low->second;
      double p;
      if (used == Smoothing::kKneserNey) {
        double gamma =
            discount[n] * static_cast<double>(st.types) / st.total;
        p = std::max(c - discount[n], 0.0) / st.total + gamma * p_lower;
      } else {
        p = (c + a * p_lower) / (st.total + a);
      }
      cur[key] = p;
    }
  }

  model.tables_.resize(order);
  for (int m = 0; m < order; ++m) {
    auto& table = model.tables_[m];
    table.reserve(probs[m].size());
    for (const auto& [key, p] : probs[m]) {
      LmEntry e;
      e.logprob = p > 0.0 ? std::log10(p) : NGramModel::kPlaceholderLog10;
      table.emplace(key, e);
    }
    for (const auto& [key, g] : gammas[m]) {
      auto& e = table[key];
      e.backoff = std::log10(g);
      e.has_backoff = true;
    }
  }

  if (report) {
    report->requested = smoothing;
    report->used = used;
    report->kn_fallback = (smoothing == Smoothing::kKneserNey && !kn_ok);
    report->gram_counts.clear();
    for (int m = 0; m < order; ++m)
      report->gram_counts.push_back(
          static_cast<long>(model.tables_[m].size()));
    report->discounts.assign(discount.begin() + 1, discount.end());
  }
  return model;
}

NGramModel train_lm_file(const std::string& path, int order,
                         Smoothing smoothing, double add_k,
                         TrainReport* report) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open corpus: " + path);
  return train_lm(in, order, smoothing, add_k, report);
}

void save_arpa(const NGramModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_io("cannot write ARPA file: " + path);
  out << "\\data\\\n";
  for (int n = 1; n <= model.order_; ++n)
    out << "ngram " << n << '=' << model.tables_[n - 1].size() << '\n';
  char buf[32];
  for (int n = 1; n <= model.order_; ++n) {
    out << "\n\\" << n << "-grams:\n";
    std::vector<const std::string*> keys;
    keys.reserve(model.tables_[n - 1].size());
    for (const auto& [key, e] : model.tables_[n - 1]) keys.push_back(&key);
    std::sort(keys.begin(), keys.end(),
              [](const std::string* x, const std::string* y) {
                auto a = unpack(*x), b = unpack(*y);
                return a < b;
              });
    for (const auto* key : keys) {
      const LmEntry& e = model.tables_[n - 1].at(*key);
      std::snprintf(buf, sizeof(buf), "%.7f", e.logprob);
      out << buf << '\t';
      auto ids = unpack(*key);
      for (size_t i = 0; i < ids.size(); ++i) {
        if (i) out << ' ';
        out << model.vocab_[ids[i]];
      }
      if (e.has_backoff) {
        std::snprintf(buf, sizeof(buf), "%.7f", e.backoff);
        out << '\t' << buf;
      }
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
  if (!out) throw_io("write failed: " + path);
}

NGramModel load_arpa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open ARPA file: " + path);
  auto fail = [&path](long lineno, const std::string& msg) {
    throw_format(path + ":" + std::to_string(lineno) + ": " + msg);
  };

  std::string line;
  long lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  };

  // Header.
  bool saw_data = false;
  while (next_line()) {
    if (line == "\\data\\") {
      saw_data = true;
      break;
    }
    if (!line.empty()) fail(lineno, "expected \\data\\ header");
  }
  if (!saw_data) fail(lineno, "missing \\data\\ header");

  std::vector<long> declared;
  while (next_line()) {
    if (line.empty()) break;
    long n = 0, count = 0;
    if (std::sscanf(line.c_str(), "ngram %ld=%ld", &n, &count) != 2)
      fail(lineno, "bad ngram count line: " + line);
    if (n != static_cast<long>(declared.size()) + 1)
      fail(lineno, "ngram orders must be consecutive from 1");
    declared.push_back(count);
  }
  if (declared.empty()) fail(lineno, "no ngram counts declared");

  NGramModel model;
  model.order_ = static_cast<int>(declared.size());
  model.intern(NGramModel::kBos);
  model.intern(NGramModel::kEos);
  model.intern(NGramModel::kUnk);
  model.tables_.resize(model.order_);

  int section = 0;  // current order being read, 0 = none
  long read_in_section = 0;
  std::vector<int32_t> ids;
  while (next_line()) {
    if (line.empty()) continue;
    if (line == "\\end\\") {
      if (section != model.order_)
        fail(lineno, "\\end\\ before all sections were read");
      if (read_in_section != declared[section - 1])
        fail(lineno, "section " + std::to_string(section) + " has " +
                         std::to_string(read_in_section) + " entries, header says " +
                         std::to_string(declared[section - 1]));
      for (const char* t :
           {NGramModel::kBos, NGramModel::kEos, NGramModel::kUnk}) {
        int id = model.lookup_id(t);
        std::string key = pack1(id);
        if (!model.tables_[0].count(key))
          model.tables_[0].emplace(
              key, LmEntry{NGramModel::kPlaceholderLog10, 0.0, false});
      }
      return model;
    }
    if (line[0] == '\\') {
      long n = 0;
      if (std::sscanf(line.c_str(), "\\%ld-grams:", &n) != 1)
        fail(lineno, "unexpected section marker: " + line);
      if (section > 0 && read_in_section != declared[section - 1])
        fail(lineno, "section " + std::to_string(section) + " has " +
                         std::to_string(read_in_section) +
                         " entries, header says " +
                         std::to_string(declared[section - 1]));
      if (n != section + 1)
        fail(lineno, "sections must appear in order; got " + line);
      if (n > model.order_) fail(lineno, "section order exceeds header");
      section = static_cast<int>(n);
      read_in_section = 0;
      continue;
    }
    if (section == 0) fail(lineno, "entry before any section: " + line);

    // logprob<TAB>w1 ... wn[<TAB>backoff]
    size_t t1 = line.find('\t');
    if (t1 == std::string::npos) fail(lineno, "missing tab after logprob");
    size_t t2 = line.find('\t', t1 + 1);
    char* endp = nullptr;
    double logprob = std::strtod(line.c_str(), &endp);
    if (endp == line.c_str()) fail(lineno, "unparsable logprob");
    std::string words = t2 == std::string::npos
                            ? line.substr(t1 + 1)
                            : line.substr(t1 + 1, t2 - t1 - 1);
    LmEntry entry;
    entry.logprob = logprob;
    if (t2 != std::string::npos) {
      const char* bstr = line.c_str() + t2 + 1;
      entry.backoff = std::strtod(bstr, &endp);
      if (endp == bstr) fail(lineno, "unparsable backoff");
      entry.has_backoff = true;
      if (section == model.order_)
        fail(lineno, "backoff weight on a highest-order entry");
    }
    auto tokens = tokenize_ws(words);
    if (static_cast<int>(tokens.size()) != section)
      fail(lineno, "expected " + std::to_string(section) + " tokens, got " +
                       std::to_string(tokens.size()));
    ids.clear();
    for (const auto& t : tokens) ids.push_back(model.intern(t));
    bool inserted =
        model.tables_[section - 1]
            .emplace(pack(ids.data(), ids.size()), entry)
            .second;
    if (!inserted) fail(lineno, "duplicate n-gram entry");
    ++read_in_section;
  }
  fail(lineno, "missing \\end\\ marker");
  return model;  // unreachable
}

double perplexity(const NGramModel& model, std::istream& corpus) {
  std::string line;
  double total_log10 = 0.0;
  long scored = 0;
  std::vector<int> context;
  while (std::getline(corpus, line)) {
    auto toks = tokenize_ws(line);
    if (toks.empty()) continue;
    context.assign(model.order() - 1, model.bos_id());
    for (const auto& t : toks) {
      int id = model.id_or_unk(t);
      total_log10 += model.logprob_ids(context, id);
      context.push_back(id);
      ++scored;
    }
    total_log10 += model.logprob_ids(context, model.eos_id());
    ++scored;
  }
  if (scored == 0) throw_data("perplexity: empty corpus");
  return std::pow(10.0, -total_log10 / static_cast<double>(scored));
}

double perplexity_file(const NGramModel& model, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open corpus: " + path);
  return perplexity(model, in);
}

}  // namespace glosskit
