#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "glosskit/embedding.hpp"

namespace glosskit {

// The d x d matrix W mapping source embedding rows into target space
// (mapped = x * W, for row vectors x).
struct LinearMap {
  Eigen::MatrixXd matrix;
  bool orthogonal = false;
  bool degenerate = false;  // rank-deficient seed; solution non-unique

  int dim() const { return static_cast<int>(matrix.rows()); }
};

enum class SeedProvenance { kIdenticalStrings, kFile, kSynthetic };

struct SeedLexicon {
  std::vector<std::pair<std::string, std::string>> pairs;
  SeedProvenance provenance = SeedProvenance::kIdenticalStrings;
};

struct RefineConfig {
  int iterations = 5;
  int csls_k = 10;
  int dict_pool = 10000;  // clamped to the smaller vocabulary when larger
  bool mutual_only = true;
  int workers = 1;
};

struct RefineReport {
  std::vector<int> pairs_per_iteration;
  bool stopped_early = false;
};

// Pairs every token string appearing verbatim in both vocabularies with
// itself, ordered by source row index. This is the unsupervised anchor:
// digits, punctuation and names overlap across most language pairs.
SeedLexicon seed_identical_strings(const EmbeddingMatrix& src,
                                   const EmbeddingMatrix& tgt);

// Reads a "source<TAB>target" TSV. Pairs whose tokens are missing from
// either vocabulary are dropped (count reported through *dropped).
SeedLexicon load_seed_lexicon(const std::string& path,
                              const EmbeddingMatrix& src,
                              const EmbeddingMatrix& tgt,
                              long* dropped = nullptr);

// Orthogonal Procrustes: with X, Y the stacked seed vectors (rows), returns
// W = U V^T from the SVD of X^T Y, the orthogonal minimizer of |XW - Y|_F.
LinearMap procrustes(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                     const SeedLexicon& seed);

// Source matrix pushed through W, rows renormalized, tokens preserved.
EmbeddingMatrix apply_map(const LinearMap& map, const EmbeddingMatrix& src);

// Mean cosine between each row of `queries` and its k nearest rows of
// `reference`; the r_T / r_S terms of CSLS. Deterministic for any worker
// count (per-row results are independent).
Eigen::VectorXd csls_penalties(const Eigen::MatrixXd& queries,
                               const Eigen::MatrixXd& reference, int k,
                               int workers = 1);

// CSLS(x, y) = 2 cos(x, y) - r_T(x) - r_S(y) where r_T averages the query's
// csls_k nearest target cosines and r_S the candidate's csls_k nearest
// mapped-source cosines. Scales hubs down without changing cos itself.
double csls_score(const Eigen::VectorXd& mapped_query,
                  const EmbeddingMatrix& tgt,
                  const EmbeddingMatrix& src_mapped,
                  const std::string& candidate, int csls_k);

// Iterative refinement: map the dict_pool most frequent source rows, pair
// them with target rows by CSLS (mutual top-1 by default), and re-solve
// Procrustes on those synthetic pairs. Stops early when fewer than two
// pairs survive. Deterministic: re-running yields a bitwise-equal matrix.
LinearMap refine(const LinearMap& map, const EmbeddingMatrix& src,
                 const EmbeddingMatrix& tgt, const RefineConfig& cfg,
                 RefineReport* report = nullptr);

// Text form: "<d> <d>" header, then d rows of d floats (9 significant
// digits, row-major).
void save_map(const LinearMap& map, const std::string& path);
LinearMap load_map(const std::string& path);

}  // namespace glosskit
