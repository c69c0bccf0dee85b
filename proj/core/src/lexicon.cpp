#include "glosskit/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include "glosskit/error.hpp"
#include "glosskit/parallel.hpp"

namespace glosskit {

const char* to_string(Metric metric) {
  return metric == Metric::kCosine ? "cosine" : "csls";
}

Metric metric_from_string(const std::string& name) {
  if (name == "cosine") return Metric::kCosine;
  if (name == "csls") return Metric::kCsls;
  throw_config("unknown metric: " + name + " (want cosine or csls)");
}

void BilingualLexicon::add(LexiconEntry entry) {
  auto [it, inserted] = by_source_.emplace(entry.source, entries_.size());
  if (!inserted) throw_data("duplicate lexicon source token: " + entry.source);
  entries_.push_back(std::move(entry));
}

bool BilingualLexicon::contains(const std::string& source) const {
  return by_source_.count(source) != 0;
}

const std::vector<TranslationOption>* BilingualLexicon::options(
    const std::string& source) const {
  auto it = by_source_.find(source);
  return it == by_source_.end() ? nullptr : &entries_[it->second].options;
}

BilingualLexicon build_lexicon(const LinearMap& map, const EmbeddingMatrix& src,
                               const EmbeddingMatrix& tgt, int k, Metric metric,
                               int workers) {
  if (k < 1) throw_config("build_lexicon: k must be >= 1");
  if (k > tgt.size())
    throw_config("build_lexicon: k=" + std::to_string(k) +
                 " exceeds target vocabulary size " +
                 std::to_string(tgt.size()));
  EmbeddingMatrix mapped = apply_map(map, src);

  Eigen::VectorXd penalties;
  if (metric == Metric::kCsls) {
    int ck = std::min(10, std::min(tgt.size(), mapped.size()));
    penalties = csls_penalties(tgt.vectors, mapped.vectors, ck, workers);
  }

  const int n = mapped.size();
  std::vector<std::vector<Neighbor>> hits(n);
  constexpr int kBlock = 256;
  int blocks = (n + kBlock - 1) / kBlock;
  parallel_for(static_cast<size_t>(blocks), workers, [&](size_t b0, size_t b1) {
    for (size_t b = b0; b < b1; ++b) {
      int r0 = static_cast<int>(b) * kBlock;
      int rows = std::min(kBlock, n - r0);
      Eigen::MatrixXd cos_block =
          mapped.vectors.middleRows(r0, rows) * tgt.vectors.transpose();
      for (int i = 0; i < rows; ++i) {
        Eigen::VectorXd cos_row = cos_block.row(i);
        if (metric == Metric::kCosine) {
          hits[r0 + i] = top_k_of_scores(cos_row, k);
        } else {
          // Rank by CSLS (the query-side penalty is constant per row and
          // cannot change the order), but report cosine similarities.
          Eigen::VectorXd csls_row = 2.0 * cos_row - penalties;
          hits[r0 + i] = top_k_of_scores(csls_row, k);
          for (auto& nb : hits[r0 + i]) nb.score = cos_row[nb.row];
        }
      }
    }
  });

  BilingualLexicon lex(k, metric);
  for (int i = 0; i < n; ++i) {
    LexiconEntry entry;
    entry.source = src.tokens[i];
    entry.options.reserve(hits[i].size());
    for (const auto& nb : hits[i])
      entry.options.push_back({tgt.tokens[nb.row], nb.score});
    lex.add(std::move(entry));
  }
  return lex;
}

void export_lexicon(const BilingualLexicon& lex, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_io("cannot write lexicon: " + path);
  out << "# glosskit lexicon k=" << lex.k() << " metric=" << to_string(lex.metric())
      << '\n';
  char buf[32];
  for (const auto& entry : lex.entries()) {
    for (const auto& opt : entry.options) {
      std::snprintf(buf, sizeof(buf), "%.6f", opt.similarity);
      out << entry.source << '\t' << opt.target << '\t' << buf << '\n';
    }
  }
  if (!out) throw_io("write failed: " + path);
}

BilingualLexicon import_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open lexicon: " + path);
  int k = 0;
  Metric metric = Metric::kCosine;
  std::vector<LexiconEntry> entries;
  std::string line;
  long lineno = 0;
  LexiconEntry current;
  auto flush = [&] {
    if (!current.source.empty()) {
      entries.push_back(std::move(current));
      current = LexiconEntry{};
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      // Header comment may carry k and metric; both optional.
      size_t kp = line.find("k=");
      if (kp != std::string::npos) k = std::atoi(line.c_str() + kp + 2);
      size_t mp = line.find("metric=");
      if (mp != std::string::npos) {
        std::string name = line.substr(mp + 7);
        size_t sp = name.find_first_of(" \t");
        if (sp != std::string::npos) name.resize(sp);
        metric = metric_from_string(name);
      }
      continue;
    }
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? std::string::npos
                                        : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw_format(path + ":" + std::to_string(lineno) +
                   ": expected \"source<TAB>target<TAB>similarity\"");
    std::string source = line.substr(0, t1);
    std::string target = line.substr(t1 + 1, t2 - t1 - 1);
    if (source.empty() || target.empty())
      throw_format(path + ":" + std::to_string(lineno) +
                   ": empty source or target token");
    char* endp = nullptr;
    const char* simstr = line.c_str() + t2 + 1;
    double sim = std::strtod(simstr, &endp);
    if (endp == simstr || !std::isfinite(sim))
      throw_format(path + ":" + std::to_string(lineno) +
                   ": unparsable similarity");
    if (source != current.source) {
      flush();
      current.source = source;
    }
    current.options.push_back({std::move(target), sim});
  }
  flush();
  if (k == 0)
    for (const auto& e : entries)
      k = std::max(k, static_cast<int>(e.options.size()));
  BilingualLexicon out(k, metric);
  for (auto& e : entries) out.add(std::move(e));
  return out;
}

std::vector<std::pair<std::string, std::string>> load_word_pairs(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open word pairs: " + path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw_format(path + ":" + std::to_string(lineno) +
                   ": expected \"source<TAB>target\"");
    pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return pairs;
}

PrecisionReport evaluate_precision(
    const BilingualLexicon& lex,
    const std::vector<std::pair<std::string, std::string>>& gold) {
  if (gold.empty()) throw_data("evaluate_precision: empty gold set");
  // Group gold targets per source word.
  std::unordered_map<std::string, std::set<std::string>> by_source;
  for (const auto& [s, t] : gold) by_source[s].insert(t);

  PrecisionReport report;
  report.total = static_cast<long>(by_source.size());
  long hit1 = 0, hit5 = 0;
  for (const auto& [source, targets] : by_source) {
    const auto* opts = lex.options(source);
    if (!opts) continue;
    ++report.evaluated;
    for (size_t i = 0; i < opts->size() && i < 5; ++i) {
      if (targets.count((*opts)[i].target)) {
        ++hit5;
        if (i == 0) ++hit1;
        break;
      }
    }
  }
  if (report.evaluated > 0) {
    report.p_at_1 = static_cast<double>(hit1) / report.evaluated;
    report.p_at_5 = static_cast<double>(hit5) / report.evaluated;
  }
  report.coverage = static_cast<double>(report.evaluated) / report.total;
  return report;
}

}  // namespace glosskit
