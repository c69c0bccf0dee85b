// glosskit command line. One subcommand per pipeline stage; every artifact
// is written together with a <artifact>.manifest recording the effective
// parameters and fnv1a64 digests of inputs and outputs, so a run can be
// reproduced (and checked) from the manifest alone.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include "glosskit/bleu.hpp"
#include "glosskit/crosslingual.hpp"
#include "glosskit/embedding.hpp"
#include "glosskit/error.hpp"
#include "glosskit/gloss.hpp"
#include "glosskit/lexicon.hpp"
#include "glosskit/ngram_lm.hpp"
#include "glosskit/pipeline.hpp"

using namespace glosskit;

namespace {

Smoothing smoothing_from_string(const std::string& name) {
  if (name == "kneser-ney" || name == "kn") return Smoothing::kKneserNey;
  if (name == "add-k") return Smoothing::kAddK;
  throw_config("unknown smoothing '" + name + "' (kneser-ney, add-k)");
}

const char* to_string(Smoothing s) {
  return s == Smoothing::kKneserNey ? "kneser-ney" : "add-k";
}

std::string out_in_dir(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void add_config_flag(CLI::App* cmd, std::string& sink) {
  cmd->add_option("--config", sink,
                  "flat key=value file standing in for flags; explicit "
                  "flags override it")
      ->type_name("FILE");
}

// Expands --config into flags placed right after the subcommand. CLI11 only
// reads config files on the root app, so the subcommand files are spliced
// into the argument list here instead; keys whose flag is also given
// explicitly are dropped, which is what lets the command line win.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  std::vector<std::string> rest;
  std::unordered_set<std::string> given;
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config" && i + 1 < args.size()) {
      path = args[++i];
      continue;
    }
    if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
      continue;
    }
    if (a.rfind("--", 0) == 0) given.insert(a.substr(0, a.find('=')));
    rest.push_back(a);
  }
  if (path.empty() || rest.empty()) return rest;

  std::ifstream in(path);
  if (!in) throw_io("cannot open config: " + path);
  std::vector<std::string> expanded = {rest.front()};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw_format(path + ":" + std::to_string(lineno) +
                   ": expected key=value");
    std::string flag = "--" + trim(line.substr(0, eq));
    if (flag == "--")
      throw_format(path + ":" + std::to_string(lineno) + ": empty key");
    if (given.count(flag)) continue;
    expanded.push_back(flag + "=" + trim(line.substr(eq + 1)));
  }
  expanded.insert(expanded.end(), rest.begin() + 1, rest.end());
  return expanded;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"word-by-word glossing toolkit"};
  app.require_subcommand(1);
  // Sink for the per-subcommand --config flags; the files themselves are
  // consumed by expand_config_args before CLI11 ever parses.
  std::string config_sink;

  // ---- map: align source embeddings with target embeddings
  auto* map_cmd = app.add_subcommand(
      "map", "solve the orthogonal map from a seed lexicon, then refine it");
  std::string map_src, map_tgt, map_seed_lex, map_out;
  long map_vocab = 100000;
  RefineConfig refine_defaults;
  int map_iters = refine_defaults.iterations;
  int map_csls_k = refine_defaults.csls_k;
  int map_pool = refine_defaults.dict_pool;
  bool map_no_mutual = false;
  int map_workers = 1;
  map_cmd->add_option("--src-emb", map_src, "source embeddings, text format")
      ->required();
  map_cmd->add_option("--tgt-emb", map_tgt, "target embeddings, text format")
      ->required();
  map_cmd->add_option("--seed-lex", map_seed_lex,
                      "seed lexicon TSV; identical strings when omitted");
  map_cmd->add_option("--vocab-limit", map_vocab, "rows kept per embedding")
      ->capture_default_str();
  map_cmd->add_option("--refine-iters", map_iters, "refinement iterations")
      ->capture_default_str();
  map_cmd->add_option("--csls-k", map_csls_k, "CSLS neighborhood size")
      ->capture_default_str();
  map_cmd->add_option("--dict-pool", map_pool,
                      "most frequent source words paired during refinement")
      ->capture_default_str();
  map_cmd->add_flag("--no-mutual", map_no_mutual,
                    "keep non-mutual nearest neighbor pairs when refining");
  map_cmd->add_option("--workers", map_workers, "worker threads")
      ->capture_default_str();
  map_cmd->add_option("--out", map_out, "output map file")->required();
  add_config_flag(map_cmd, config_sink);
  map_cmd->callback([&] {
    EmbeddingMatrix src = load_embeddings(map_src, map_vocab);
    EmbeddingMatrix tgt = load_embeddings(map_tgt, map_vocab);
    SeedLexicon seed;
    long dropped = 0;
    if (map_seed_lex.empty())
      seed = seed_identical_strings(src, tgt);
    else
      seed = load_seed_lexicon(map_seed_lex, src, tgt, &dropped);
    LinearMap map = procrustes(src, tgt, seed);
    RefineConfig rc;
    rc.iterations = map_iters;
    rc.csls_k = map_csls_k;
    rc.dict_pool = map_pool;
    rc.mutual_only = !map_no_mutual;
    rc.workers = map_workers;
    RefineReport rr;
    if (map_iters > 0) map = refine(map, src, tgt, rc, &rr);
    save_map(map, map_out);

    Manifest m;
    m.set("cmd", std::string("map"));
    m.set("vocab_limit", map_vocab);
    m.set("refine_iters", static_cast<long>(map_iters));
    m.set("csls_k", static_cast<long>(map_csls_k));
    m.set("dict_pool", static_cast<long>(map_pool));
    m.set("mutual_only", std::string(map_no_mutual ? "false" : "true"));
    m.set("seed_source",
          std::string(map_seed_lex.empty() ? "identical-strings" : "file"));
    m.set("seed_pairs", static_cast<long>(seed.pairs.size()));
    m.add_file("input.src_emb", map_src);
    m.add_file("input.tgt_emb", map_tgt);
    if (!map_seed_lex.empty()) m.add_file("input.seed_lex", map_seed_lex);
    m.add_file("output.map", map_out);
    m.write(map_out);

    std::cout << "seed_pairs=" << seed.pairs.size() << "\n";
    if (!map_seed_lex.empty()) std::cout << "seed_dropped=" << dropped << "\n";
    for (size_t i = 0; i < rr.pairs_per_iteration.size(); ++i)
      std::cout << "refine_pairs_" << i + 1 << "="
                << rr.pairs_per_iteration[i] << "\n";
  });

  // ---- dict: induce the k-nearest-neighbor lexicon through a map
  auto* dict_cmd = app.add_subcommand(
      "dict", "extract top-k translation options for every source word");
  std::string dict_src, dict_tgt, dict_map, dict_out;
  std::string dict_metric = "cosine";
  long dict_vocab = 100000;
  int dict_k = 20;
  int dict_workers = 1;
  dict_cmd->add_option("--src-emb", dict_src, "source embeddings")->required();
  dict_cmd->add_option("--tgt-emb", dict_tgt, "target embeddings")->required();
  dict_cmd->add_option("--map", dict_map, "linear map file")->required();
  dict_cmd->add_option("--k", dict_k, "translation options per word")
      ->capture_default_str();
  dict_cmd->add_option("--metric", dict_metric, "ranking metric: cosine, csls")
      ->capture_default_str();
  dict_cmd->add_option("--vocab-limit", dict_vocab, "rows kept per embedding")
      ->capture_default_str();
  dict_cmd->add_option("--workers", dict_workers, "worker threads")
      ->capture_default_str();
  dict_cmd->add_option("--out", dict_out, "output lexicon TSV")->required();
  add_config_flag(dict_cmd, config_sink);
  dict_cmd->callback([&] {
    EmbeddingMatrix src = load_embeddings(dict_src, dict_vocab);
    EmbeddingMatrix tgt = load_embeddings(dict_tgt, dict_vocab);
    LinearMap map = load_map(dict_map);
    BilingualLexicon lex = build_lexicon(
        map, src, tgt, dict_k, metric_from_string(dict_metric), dict_workers);
    export_lexicon(lex, dict_out);

    Manifest m;
    m.set("cmd", std::string("dict"));
    m.set("k", static_cast<long>(dict_k));
    m.set("metric", dict_metric);
    m.set("vocab_limit", dict_vocab);
    m.add_file("input.src_emb", dict_src);
    m.add_file("input.tgt_emb", dict_tgt);
    m.add_file("input.map", dict_map);
    m.add_file("output.lexicon", dict_out);
    m.write(dict_out);

    std::cout << "entries=" << lex.size() << "\n";
  });

  // ---- lm-train: n-gram model -> ARPA
  auto* lm_cmd =
      app.add_subcommand("lm-train", "train a backoff n-gram language model");
  std::string lm_corpus, lm_out;
  std::string lm_smoothing = "kneser-ney";
  int lm_order = 5;
  double lm_add_k = 0.1;
  lm_cmd->add_option("--corpus", lm_corpus, "training text, one sentence/line")
      ->required();
  lm_cmd->add_option("--order", lm_order, "n-gram order")
      ->capture_default_str();
  lm_cmd->add_option("--smoothing", lm_smoothing, "kneser-ney or add-k")
      ->capture_default_str();
  lm_cmd->add_option("--add-k", lm_add_k, "additive constant for add-k")
      ->capture_default_str();
  lm_cmd->add_option("--out", lm_out, "output ARPA file")->required();
  add_config_flag(lm_cmd, config_sink);
  lm_cmd->callback([&] {
    TrainReport tr;
    NGramModel model = train_lm_file(
        lm_corpus, lm_order, smoothing_from_string(lm_smoothing), lm_add_k,
        &tr);
    save_arpa(model, lm_out);

    Manifest m;
    m.set("cmd", std::string("lm-train"));
    m.set("order", static_cast<long>(lm_order));
    m.set("smoothing", std::string(to_string(tr.requested)));
    m.set("smoothing_used", std::string(to_string(tr.used)));
    m.set("add_k", lm_add_k);
    m.add_file("input.corpus", lm_corpus);
    m.add_file("output.lm", lm_out);
    m.write(lm_out);

    for (size_t n = 0; n < tr.gram_counts.size(); ++n)
      std::cout << "ngram_" << n + 1 << "=" << tr.gram_counts[n] << "\n";
    if (tr.kn_fallback) std::cout << "kn_fallback=true\n";
  });

  // ---- gloss: corpus -> Translationese
  auto* gloss_cmd = app.add_subcommand(
      "gloss", "replace each token by its best lexicon option in context");
  std::string gl_input, gl_lexicon, gl_lm, gl_out;
  GlossConfig gloss_defaults;
  double gl_alpha = gloss_defaults.alpha;
  double gl_beta = gloss_defaults.beta;
  int gl_stack = gloss_defaults.stack_size;
  bool gl_no_recombine = false, gl_no_end = false;
  int gl_workers = 1;
  gloss_cmd->add_option("--input", gl_input, "source text, one sentence/line")
      ->required();
  gloss_cmd->add_option("--lexicon", gl_lexicon, "lexicon TSV")->required();
  gloss_cmd->add_option("--lm", gl_lm, "target language model, ARPA")
      ->required();
  gloss_cmd->add_option("--alpha", gl_alpha, "language model weight")
      ->capture_default_str();
  gloss_cmd->add_option("--beta", gl_beta, "similarity weight")
      ->capture_default_str();
  gloss_cmd->add_option("--stack-size", gl_stack, "beam width per position")
      ->capture_default_str();
  gloss_cmd->add_flag("--no-recombine", gl_no_recombine,
                      "keep hypotheses with equal LM state separate");
  gloss_cmd->add_flag("--no-end-marker", gl_no_end,
                      "skip the end-of-sentence LM term");
  gloss_cmd->add_option("--workers", gl_workers, "worker threads")
      ->capture_default_str();
  gloss_cmd->add_option("--out", gl_out, "output text file")->required();
  add_config_flag(gloss_cmd, config_sink);
  gloss_cmd->callback([&] {
    BilingualLexicon lex = import_lexicon(gl_lexicon);
    NGramModel lm = load_arpa(gl_lm);
    GlossConfig gc;
    gc.alpha = gl_alpha;
    gc.beta = gl_beta;
    gc.stack_size = gl_stack;
    gc.recombine = !gl_no_recombine;
    gc.score_end_marker = !gl_no_end;
    gc.workers = gl_workers;
    GlossReport gr;
    gloss_corpus_file(lm, lex, gl_input, gl_out, gc, &gr);

    Manifest m;
    m.set("cmd", std::string("gloss"));
    m.set("alpha", gc.alpha);
    m.set("beta", gc.beta);
    m.set("stack_size", static_cast<long>(gc.stack_size));
    m.set("recombine", std::string(gc.recombine ? "true" : "false"));
    m.set("score_end_marker",
          std::string(gc.score_end_marker ? "true" : "false"));
    m.add_file("input.corpus", gl_input);
    m.add_file("input.lexicon", gl_lexicon);
    m.add_file("input.lm", gl_lm);
    m.add_file("output.corpus", gl_out);
    m.write(gl_out);

    char buf[64];
    std::cout << "sentences=" << gr.sentences << "\n"
              << "tokens=" << gr.tokens << "\n";
    std::snprintf(buf, sizeof(buf), "%.4f", gr.oov_rate);
    std::cout << "oov_rate=" << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.1f", gr.sentences_per_second);
    std::cout << "sentences_per_second=" << buf << "\n";
  });

  // ---- prepare: gloss + combine + shuffle + dev split
  auto* prep_cmd = app.add_subcommand(
      "prepare", "build Translationese/target training and dev files");
  std::vector<std::string> prep_corpora;  // triples src tgt lexicon
  std::string prep_lm, prep_dir = ".";
  PrepareConfig prep_defaults;
  int prep_max_len = prep_defaults.max_len;
  long prep_dev = prep_defaults.dev_size;
  uint64_t prep_seed = prep_defaults.shuffle_seed;
  double prep_alpha = gloss_defaults.alpha;
  double prep_beta = gloss_defaults.beta;
  int prep_stack = gloss_defaults.stack_size;
  int prep_workers = 1;
  prep_cmd
      ->add_option("--corpus", prep_corpora,
                   "SRC TGT LEXICON, one triple per language; repeatable")
      ->required()
      ->type_size(3);
  prep_cmd->add_option("--lm", prep_lm, "target language model, ARPA")
      ->required();
  prep_cmd->add_option("--max-len", prep_max_len,
                       "drop pairs with a side longer than this")
      ->capture_default_str();
  prep_cmd->add_option("--dev-size", prep_dev, "pairs held out as dev set")
      ->capture_default_str();
  prep_cmd->add_option("--seed", prep_seed, "shuffle seed")
      ->capture_default_str();
  prep_cmd->add_option("--alpha", prep_alpha, "language model weight")
      ->capture_default_str();
  prep_cmd->add_option("--beta", prep_beta, "similarity weight")
      ->capture_default_str();
  prep_cmd->add_option("--stack-size", prep_stack, "beam width per position")
      ->capture_default_str();
  prep_cmd->add_option("--workers", prep_workers, "worker threads")
      ->capture_default_str();
  prep_cmd->add_option("--out", prep_dir, "output directory")
      ->capture_default_str();
  add_config_flag(prep_cmd, config_sink);
  prep_cmd->callback([&] {
    std::vector<ParallelCorpus> corpora;
    std::vector<BilingualLexicon> lexicons;
    for (size_t i = 0; i + 3 <= prep_corpora.size(); i += 3) {
      corpora.push_back(load_parallel_corpus(
          prep_corpora[i], prep_corpora[i], prep_corpora[i + 1]));
      lexicons.push_back(import_lexicon(prep_corpora[i + 2]));
    }
    std::vector<const BilingualLexicon*> lex_ptr;
    for (const auto& l : lexicons) lex_ptr.push_back(&l);
    NGramModel lm = load_arpa(prep_lm);

    PrepareConfig pc;
    pc.max_len = prep_max_len;
    pc.dev_size = prep_dev;
    pc.shuffle_seed = prep_seed;
    pc.gloss.alpha = prep_alpha;
    pc.gloss.beta = prep_beta;
    pc.gloss.stack_size = prep_stack;
    pc.gloss.workers = prep_workers;

    std::filesystem::create_directories(prep_dir);
    PrepareOutputs po;
    po.train_src = out_in_dir(prep_dir, "train.src");
    po.train_tgt = out_in_dir(prep_dir, "train.tgt");
    po.dev_src = out_in_dir(prep_dir, "dev.src");
    po.dev_tgt = out_in_dir(prep_dir, "dev.tgt");
    PrepareReport pr = prepare_training_data(corpora, lex_ptr, lm, pc, po);

    Manifest m;
    m.set("cmd", std::string("prepare"));
    m.set("max_len", static_cast<long>(pc.max_len));
    m.set("dev_size", pc.dev_size);
    m.set("shuffle_seed", std::to_string(pc.shuffle_seed));
    m.set("alpha", pc.gloss.alpha);
    m.set("beta", pc.gloss.beta);
    m.set("stack_size", static_cast<long>(pc.gloss.stack_size));
    for (size_t i = 0; i + 3 <= prep_corpora.size(); i += 3) {
      std::string tag = std::to_string(i / 3 + 1);
      m.add_file("input.corpus" + tag + ".src", prep_corpora[i]);
      m.add_file("input.corpus" + tag + ".tgt", prep_corpora[i + 1]);
      m.add_file("input.corpus" + tag + ".lexicon", prep_corpora[i + 2]);
    }
    m.add_file("input.lm", prep_lm);
    m.add_file("output.train_src", po.train_src);
    m.add_file("output.train_tgt", po.train_tgt);
    m.add_file("output.dev_src", po.dev_src);
    m.add_file("output.dev_tgt", po.dev_tgt);
    m.write(out_in_dir(prep_dir, "prepare"));

    char buf[64];
    std::cout << "read_pairs=" << pr.read_pairs << "\n"
              << "dropped_overlong=" << pr.dropped_overlong << "\n"
              << "train_pairs=" << pr.train_pairs << "\n"
              << "dev_pairs=" << pr.dev_pairs << "\n";
    double rate = pr.tokens > 0
                      ? static_cast<double>(pr.oov_tokens) / pr.tokens
                      : 0.0;
    std::snprintf(buf, sizeof(buf), "%.4f", rate);
    std::cout << "oov_rate=" << buf << "\n";
  });

  // ---- bleu
  auto* bleu_cmd =
      app.add_subcommand("bleu", "corpus BLEU of hypotheses vs references");
  std::string bleu_hyp, bleu_ref, bleu_out;
  int bleu_order = 4;
  bleu_cmd->add_option("--hyp", bleu_hyp, "hypotheses, one per line")
      ->required();
  bleu_cmd->add_option("--ref", bleu_ref, "references, one per line")
      ->required();
  bleu_cmd->add_option("--max-order", bleu_order, "highest n-gram order")
      ->capture_default_str();
  bleu_cmd->add_option("--out", bleu_out, "also write the report here");
  add_config_flag(bleu_cmd, config_sink);
  bleu_cmd->callback([&] {
    BleuResult res = corpus_bleu_files(bleu_hyp, bleu_ref, bleu_order);
    std::string line = format_bleu(res);
    std::cout << line << "\n";
    if (!bleu_out.empty()) {
      std::ofstream out(bleu_out);
      if (!out) throw_io("cannot write: " + bleu_out);
      out << line << "\n";
      out.close();
      if (!out) throw_io("write failed: " + bleu_out);
      Manifest m;
      m.set("cmd", std::string("bleu"));
      m.set("max_order", static_cast<long>(bleu_order));
      m.add_file("input.hyp", bleu_hyp);
      m.add_file("input.ref", bleu_ref);
      m.add_file("output.report", bleu_out);
      m.write(bleu_out);
    }
  });

  // ---- dict-eval
  auto* de_cmd = app.add_subcommand(
      "dict-eval", "precision of a lexicon against gold word pairs");
  std::string de_lexicon, de_gold, de_out;
  de_cmd->add_option("--lexicon", de_lexicon, "lexicon TSV")->required();
  de_cmd->add_option("--gold", de_gold, "gold pairs, source<TAB>target")
      ->required();
  de_cmd->add_option("--out", de_out, "also write the report here");
  add_config_flag(de_cmd, config_sink);
  de_cmd->callback([&] {
    BilingualLexicon lex = import_lexicon(de_lexicon);
    auto gold = load_word_pairs(de_gold);
    if (gold.empty()) throw_data("gold file has no pairs: " + de_gold);
    PrecisionReport pr = evaluate_precision(lex, gold);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "p_at_1=%.4f\np_at_5=%.4f\ncoverage=%.4f\nevaluated=%ld\n"
                  "total=%ld\n",
                  pr.p_at_1, pr.p_at_5, pr.coverage, pr.evaluated, pr.total);
    std::cout << buf;
    if (!de_out.empty()) {
      std::ofstream out(de_out);
      if (!out) throw_io("cannot write: " + de_out);
      out << buf;
      out.close();
      if (!out) throw_io("write failed: " + de_out);
      Manifest m;
      m.set("cmd", std::string("dict-eval"));
      m.add_file("input.lexicon", de_lexicon);
      m.add_file("input.gold", de_gold);
      m.add_file("output.report", de_out);
      m.write(de_out);
    }
  });

  // ---- cipher-test
  auto* ct_cmd = app.add_subcommand(
      "cipher-test", "end-to-end check on a seeded substitution cipher");
  std::string ct_corpus, ct_emb, ct_out;
  CipherConfig ct_defaults;
  uint64_t ct_seed = ct_defaults.seed;
  double ct_sigma = ct_defaults.noise_sigma;
  long ct_heldout = ct_defaults.heldout;
  long ct_top = ct_defaults.top_n;
  int ct_order = ct_defaults.lm_order;
  int ct_k = ct_defaults.k;
  std::string ct_metric = to_string(ct_defaults.metric);
  long ct_vocab = ct_defaults.vocab_limit;
  int ct_iters = ct_defaults.refine.iterations;
  int ct_workers = 1;
  ct_cmd->add_option("--corpus", ct_corpus, "target-language text")
      ->required();
  ct_cmd->add_option("--embeddings", ct_emb, "target embeddings")->required();
  ct_cmd->add_option("--seed", ct_seed, "cipher/noise/heldout seed")
      ->capture_default_str();
  ct_cmd->add_option("--noise-sigma", ct_sigma,
                     "Gaussian noise on the copied vectors")
      ->capture_default_str();
  ct_cmd->add_option("--heldout", ct_heldout, "sentences scored with BLEU")
      ->capture_default_str();
  ct_cmd->add_option("--top-n", ct_top, "frequent-word cutoff for P@1")
      ->capture_default_str();
  ct_cmd->add_option("--order", ct_order, "language model order")
      ->capture_default_str();
  ct_cmd->add_option("--k", ct_k, "translation options per word")
      ->capture_default_str();
  ct_cmd->add_option("--metric", ct_metric, "ranking metric: cosine, csls")
      ->capture_default_str();
  ct_cmd->add_option("--vocab-limit", ct_vocab, "rows kept per embedding")
      ->capture_default_str();
  ct_cmd->add_option("--refine-iters", ct_iters, "refinement iterations")
      ->capture_default_str();
  ct_cmd->add_option("--workers", ct_workers, "worker threads")
      ->capture_default_str();
  ct_cmd->add_option("--out", ct_out, "also write the report here");
  add_config_flag(ct_cmd, config_sink);
  ct_cmd->callback([&] {
    CipherConfig cc;
    cc.seed = ct_seed;
    cc.noise_sigma = ct_sigma;
    cc.heldout = ct_heldout;
    cc.top_n = ct_top;
    cc.lm_order = ct_order;
    cc.k = ct_k;
    cc.metric = metric_from_string(ct_metric);
    cc.vocab_limit = ct_vocab;
    cc.refine.iterations = ct_iters;
    cc.workers = ct_workers;
    CipherReport cr = run_cipher_test(ct_corpus, ct_emb, cc);
    // The timing goes to stdout only; the report file must be reproducible.
    char buf[512];
    std::snprintf(
        buf, sizeof(buf),
        "corpus_tokens=%ld\ncorpus_sentences=%ld\nvocabulary=%ld\n"
        "ciphered_types=%ld\nseed_pairs=%ld\np_at_1=%.4f\np_at_1_top=%.4f\n"
        "top_evaluated=%ld\nbleu=%.2f\nheldout=%ld\noov_rate=%.4f\n",
        cr.corpus_tokens, cr.corpus_sentences, cr.vocabulary,
        cr.ciphered_types, cr.seed_pairs, cr.p_at_1, cr.p_at_1_top,
        cr.top_evaluated, cr.bleu, cr.heldout_sentences, cr.heldout_oov_rate);
    char timing[64];
    std::snprintf(timing, sizeof(timing), "seconds=%.1f\n", cr.seconds);
    std::cout << buf << timing;
    if (!ct_out.empty()) {
      std::ofstream out(ct_out);
      if (!out) throw_io("cannot write: " + ct_out);
      out << buf;
      out.close();
      if (!out) throw_io("write failed: " + ct_out);
      Manifest m;
      m.set("cmd", std::string("cipher-test"));
      m.set("seed", std::to_string(cc.seed));
      m.set("noise_sigma", cc.noise_sigma);
      m.set("heldout", cc.heldout);
      m.set("top_n", cc.top_n);
      m.set("order", static_cast<long>(cc.lm_order));
      m.set("k", static_cast<long>(cc.k));
      m.set("metric", ct_metric);
      m.set("vocab_limit", cc.vocab_limit);
      m.set("refine_iters", static_cast<long>(cc.refine.iterations));
      m.add_file("input.corpus", ct_corpus);
      m.add_file("input.embeddings", ct_emb);
      m.add_file("output.report", ct_out);
      m.write(ct_out);
    }
  });

  try {
    std::vector<std::string> args = expand_config_args(argc, argv);
    // CLI11's vector overload wants the arguments reversed.
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.category()) << ": " << e.what()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
