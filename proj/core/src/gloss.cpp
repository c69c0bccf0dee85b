#include "glosskit/gloss.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <fstream>
#include <ostream>
#include <unordered_map>

#include "glosskit/error.hpp"
#include "glosskit/parallel.hpp"
#include "glosskit/text.hpp"

namespace glosskit {

namespace {

struct Option {
  const std::string* target;
  double similarity;
  int lm_id;
};

struct Hyp {
  std::vector<int> context;  // last order-1 token ids
  double score = 0.0;
  int parent = -1;  // index into the previous stack
  int option = -1;  // option picked at this position
  long seq = 0;     // generation order, breaks score ties
};

std::string context_key(const std::vector<int>& ctx) {
  return std::string(reinterpret_cast<const char*>(ctx.data()),
                     ctx.size() * sizeof(int));
}

}  // namespace

GlossedSentence gloss_sentence(const NGramModel& lm,
                               const BilingualLexicon& lexicon,
                               const std::vector<std::string>& source,
                               const GlossConfig& config) {
  if (config.stack_size < 1) throw_config("stack_size must be >= 1");
  GlossedSentence result;
  if (source.empty()) return result;

  const size_t ctx_len = static_cast<size_t>(lm.order() - 1);

  // Candidate translations per position. A source token missing from the
  // lexicon is copied through; the LM sees it as <unk> unless the target
  // vocabulary happens to contain the same string (numbers, names).
  std::vector<std::vector<Option>> options(source.size());
  result.oov_flags.assign(source.size(), false);
  for (size_t i = 0; i < source.size(); ++i) {
    const auto* entry = lexicon.options(source[i]);
    if (entry && !entry->empty()) {
      for (const auto& t : *entry)
        options[i].push_back({&t.target, t.similarity, lm.id_or_unk(t.target)});
    } else {
      options[i].push_back({&source[i], 0.0, lm.id_or_unk(source[i])});
      result.oov_flags[i] = true;
      ++result.oov;
    }
  }

  std::vector<std::vector<Hyp>> stacks(source.size() + 1);
  Hyp start;
  start.context.assign(ctx_len, lm.bos_id());
  stacks[0].push_back(std::move(start));

  std::vector<Hyp> cand;
  std::unordered_map<std::string, size_t> by_context;
  for (size_t pos = 0; pos < source.size(); ++pos) {
    cand.clear();
    by_context.clear();
    long seq = 0;
    for (size_t h = 0; h < stacks[pos].size(); ++h) {
      const Hyp& prev = stacks[pos][h];
      for (size_t o = 0; o < options[pos].size(); ++o) {
        const Option& opt = options[pos][o];
        Hyp next;
        next.score = prev.score +
                     config.alpha * lm.logprob_ids(prev.context, opt.lm_id) +
                     config.beta * opt.similarity;
        next.context = prev.context;
        if (ctx_len > 0) {
          next.context.push_back(opt.lm_id);
          next.context.erase(next.context.begin());
        }
        next.parent = static_cast<int>(h);
        next.option = static_cast<int>(o);
        next.seq = seq++;
        if (config.recombine) {
          auto [it, inserted] =
              by_context.try_emplace(context_key(next.context), cand.size());
          if (inserted) {
            cand.push_back(std::move(next));
          } else if (next.score > cand[it->second].score) {
            cand[it->second] = std::move(next);
          }
        } else {
          cand.push_back(std::move(next));
        }
      }
    }
    std::sort(cand.begin(), cand.end(), [](const Hyp& a, const Hyp& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.seq < b.seq;
    });
    if (cand.size() > static_cast<size_t>(config.stack_size))
      cand.resize(config.stack_size);
    stacks[pos + 1] = cand;
  }

  auto& final_stack = stacks.back();
  if (config.score_end_marker)
    for (auto& hyp : final_stack)
      hyp.score += config.alpha * lm.logprob_ids(hyp.context, lm.eos_id());

  size_t best = 0;
  for (size_t i = 1; i < final_stack.size(); ++i) {
    const Hyp& a = final_stack[i];
    const Hyp& b = final_stack[best];
    if (a.score > b.score || (a.score == b.score && a.seq < b.seq)) best = i;
  }

  result.score = final_stack[best].score;
  result.tokens.resize(source.size());
  int at = static_cast<int>(best);
  for (size_t pos = source.size(); pos-- > 0;) {
    const Hyp& hyp = stacks[pos + 1][at];
    result.tokens[pos] = *options[pos][hyp.option].target;
    at = hyp.parent;
  }
  return result;
}

void gloss_corpus(const NGramModel& lm, const BilingualLexicon& lexicon,
                  std::istream& in, std::ostream& out,
                  const GlossConfig& config, GlossReport* report) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<std::string>> sentences;
  std::string line;
  while (std::getline(in, line)) sentences.push_back(tokenize_ws(line));

  std::vector<GlossedSentence> glossed(sentences.size());
  parallel_for(sentences.size(), config.workers, [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i)
      glossed[i] = gloss_sentence(lm, lexicon, sentences[i], config);
  });

  long tokens = 0, oov = 0;
  for (size_t i = 0; i < glossed.size(); ++i) {
    out << join_ws(glossed[i].tokens) << '\n';
    tokens += static_cast<long>(glossed[i].tokens.size());
    oov += glossed[i].oov;
  }
  if (!out) throw_io("write failed while glossing corpus");

  if (report) {
    auto t1 = std::chrono::steady_clock::now();
    report->sentences = static_cast<long>(sentences.size());
    report->tokens = tokens;
    report->oov_tokens = oov;
    report->oov_rate = tokens > 0 ? static_cast<double>(oov) / tokens : 0.0;
    report->seconds = std::chrono::duration<double>(t1 - t0).count();
    report->sentences_per_second =
        report->seconds > 0.0 ? sentences.size() / report->seconds : 0.0;
  }
}

void gloss_corpus_file(const NGramModel& lm, const BilingualLexicon& lexicon,
                       const std::string& in_path,
                       const std::string& out_path,
                       const GlossConfig& config, GlossReport* report) {
  std::ifstream in(in_path);
  if (!in) throw_io("cannot open corpus: " + in_path);
  std::ofstream out(out_path);
  if (!out) throw_io("cannot write glossed corpus: " + out_path);
  gloss_corpus(lm, lexicon, in, out, config, report);
}

}  // namespace glosskit
