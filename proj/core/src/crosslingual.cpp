#include "glosskit/crosslingual.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "glosskit/error.hpp"
#include "glosskit/parallel.hpp"

namespace glosskit {

SeedLexicon seed_identical_strings(const EmbeddingMatrix& src,
                                   const EmbeddingMatrix& tgt) {
  SeedLexicon seed;
  seed.provenance = SeedProvenance::kIdenticalStrings;
  for (const auto& token : src.tokens) {
    if (tgt.contains(token)) seed.pairs.emplace_back(token, token);
  }
  if (seed.pairs.empty())
    throw_data(
        "no token string is shared between the two vocabularies; "
        "supply a seed lexicon file instead");
  return seed;
}

SeedLexicon load_seed_lexicon(const std::string& path,
                              const EmbeddingMatrix& src,
                              const EmbeddingMatrix& tgt, long* dropped) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open seed lexicon: " + path);
  SeedLexicon seed;
  seed.provenance = SeedProvenance::kFile;
  long missing = 0;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw_format(path + ":" + std::to_string(lineno) +
                   ": expected \"source<TAB>target\"");
    std::string s = line.substr(0, tab);
    std::string t = line.substr(tab + 1);
    if (!src.contains(s) || !tgt.contains(t)) {
      ++missing;
      continue;
    }
    seed.pairs.emplace_back(std::move(s), std::move(t));
  }
  if (dropped) *dropped = missing;
  if (seed.pairs.empty())
    throw_data("seed lexicon has no pair covered by both vocabularies: " +
               path);
  return seed;
}

namespace {

LinearMap procrustes_rows(const EmbeddingMatrix& src,
                          const EmbeddingMatrix& tgt,
                          const std::vector<std::pair<int, int>>& rows) {
  if (rows.size() < 2) throw_data("procrustes needs at least 2 seed pairs");
  const int d = src.dim();
  if (tgt.dim() != d) throw_config("procrustes: dimension mismatch");
  if (static_cast<int>(rows.size()) < d)
    std::cerr << "warning: only " << rows.size() << " seed pairs for dim " << d
              << "; the mapping may be poorly constrained\n";

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);  // X^T Y
  for (auto [si, ti] : rows)
    m.noalias() += src.vectors.row(si).transpose() * tgt.vectors.row(ti);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  LinearMap out;
  out.matrix = svd.matrixU() * svd.matrixV().transpose();
  out.orthogonal = true;
  const auto& sv = svd.singularValues();
  out.degenerate = sv[d - 1] <= 1e-12 * std::max(1.0, sv[0]);
  if (out.degenerate)
    std::cerr << "warning: rank-deficient seed matrix; "
                 "the Procrustes solution is not unique\n";
  return out;
}

std::vector<std::pair<int, int>> seed_rows(const EmbeddingMatrix& src,
                                           const EmbeddingMatrix& tgt,
                                           const SeedLexicon& seed) {
  std::vector<std::pair<int, int>> rows;
  rows.reserve(seed.pairs.size());
  for (const auto& [s, t] : seed.pairs) {
    int si = src.row_of(s), ti = tgt.row_of(t);
    if (si < 0 || ti < 0)
      throw_data("seed pair not covered by vocabularies: " + s + " / " + t);
    rows.emplace_back(si, ti);
  }
  return rows;
}

}  // namespace

LinearMap procrustes(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                     const SeedLexicon& seed) {
  return procrustes_rows(src, tgt, seed_rows(src, tgt, seed));
}

EmbeddingMatrix apply_map(const LinearMap& map, const EmbeddingMatrix& src) {
  if (map.dim() != src.dim()) throw_config("apply_map: dimension mismatch");
  EmbeddingMatrix out;
  out.tokens = src.tokens;
  out.vectors.noalias() = src.vectors * map.matrix;
  out.finalize();
  return out;
}

Eigen::VectorXd csls_penalties(const Eigen::MatrixXd& queries,
                               const Eigen::MatrixXd& reference, int k,
                               int workers) {
  const Eigen::Index n = queries.rows();
  const Eigen::Index nref = reference.rows();
  if (k < 1 || k > nref) throw_config("csls_penalties: bad k");
  Eigen::VectorXd out(n);
  // Row blocks keep the score buffer small at large vocabulary sizes.
  constexpr Eigen::Index kBlock = 512;
  parallel_for(static_cast<size_t>((n + kBlock - 1) / kBlock), workers,
               [&](size_t bbegin, size_t bend) {
                 std::vector<double> scores(nref);
                 for (size_t b = bbegin; b < bend; ++b) {
                   Eigen::Index r0 = static_cast<Eigen::Index>(b) * kBlock;
                   Eigen::Index rows = std::min<Eigen::Index>(kBlock, n - r0);
                   Eigen::MatrixXd block =
                       queries.middleRows(r0, rows) * reference.transpose();
                   for (Eigen::Index i = 0; i < rows; ++i) {
                     for (Eigen::Index j = 0; j < nref; ++j)
                       scores[j] = block(i, j);
                     std::nth_element(scores.begin(), scores.begin() + (k - 1),
                                      scores.end(), std::greater<double>());
                     double sum = 0.0;
                     for (int j = 0; j < k; ++j) sum += scores[j];
                     out[r0 + i] = sum / k;
                   }
                 }
               });
  return out;
}

double csls_score(const Eigen::VectorXd& mapped_query,
                  const EmbeddingMatrix& tgt,
                  const EmbeddingMatrix& src_mapped,
                  const std::string& candidate, int csls_k) {
  int ti = tgt.row_of(candidate);
  if (ti < 0) throw_data("csls_score: candidate not in target vocabulary");
  if (csls_k < 1 || csls_k > tgt.size() || csls_k > src_mapped.size())
    throw_config("csls_score: csls_k exceeds a vocabulary");
  Eigen::VectorXd q = mapped_query / mapped_query.norm();

  auto rt = top_k_neighbors(q, tgt, csls_k);
  double r_t = 0.0;
  for (const auto& nb : rt) r_t += nb.score;
  r_t /= csls_k;

  auto rs = top_k_neighbors(tgt.vectors.row(ti), src_mapped, csls_k);
  double r_s = 0.0;
  for (const auto& nb : rs) r_s += nb.score;
  r_s /= csls_k;

  return 2.0 * q.dot(tgt.vectors.row(ti)) - r_t - r_s;
}

namespace {

// Per-row CSLS argmax of queries against candidates, ties to lower index.
// query_penalty shifts scores uniformly per row, so it cannot change the
// argmax and is omitted.
std::vector<int> csls_argmax(const Eigen::MatrixXd& queries,
                             const Eigen::MatrixXd& candidates,
                             const Eigen::VectorXd& candidate_penalties,
                             int workers) {
  const Eigen::Index n = queries.rows();
  std::vector<int> best(n);
  constexpr Eigen::Index kBlock = 512;
  parallel_for(static_cast<size_t>((n + kBlock - 1) / kBlock), workers,
               [&](size_t bbegin, size_t bend) {
                 for (size_t b = bbegin; b < bend; ++b) {
                   Eigen::Index r0 = static_cast<Eigen::Index>(b) * kBlock;
                   Eigen::Index rows = std::min<Eigen::Index>(kBlock, n - r0);
                   Eigen::MatrixXd block =
                       2.0 * (queries.middleRows(r0, rows) *
                              candidates.transpose());
                   block.rowwise() -= candidate_penalties.transpose();
                   for (Eigen::Index i = 0; i < rows; ++i) {
                     int arg = 0;
                     double top = block(i, 0);
                     for (Eigen::Index j = 1; j < block.cols(); ++j) {
                       if (block(i, j) > top) {
                         top = block(i, j);
                         arg = static_cast<int>(j);
                       }
                     }
                     best[r0 + i] = arg;
                   }
                 }
               });
  return best;
}

}  // namespace

LinearMap refine(const LinearMap& map, const EmbeddingMatrix& src,
                 const EmbeddingMatrix& tgt, const RefineConfig& cfg,
                 RefineReport* report) {
  if (map.dim() != src.dim() || src.dim() != tgt.dim())
    throw_config("refine: dimension mismatch");
  if (cfg.csls_k < 1) throw_config("refine: csls_k must be >= 1");
  RefineReport local;
  LinearMap current = map;

  const int pool =
      std::min({cfg.dict_pool, src.size(), tgt.size()});
  if (pool < 2) throw_config("refine: dict_pool too small");
  const Eigen::MatrixXd tgt_pool = tgt.vectors.topRows(pool);

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    // Mapped rows of an orthogonal map are unit up to rounding; renormalize
    // anyway so CSLS sees exact cosines.
    Eigen::MatrixXd mapped = src.vectors.topRows(pool) * current.matrix;
    for (Eigen::Index r = 0; r < mapped.rows(); ++r)
      mapped.row(r) /= mapped.row(r).norm();

    int k = std::min(cfg.csls_k, pool);
    Eigen::VectorXd r_src = csls_penalties(mapped, tgt_pool, k, cfg.workers);
    Eigen::VectorXd r_tgt = csls_penalties(tgt_pool, mapped, k, cfg.workers);

    std::vector<int> fwd = csls_argmax(mapped, tgt_pool, r_tgt, cfg.workers);
    std::vector<std::pair<int, int>> pairs;
    if (cfg.mutual_only) {
      std::vector<int> bwd = csls_argmax(tgt_pool, mapped, r_src, cfg.workers);
      for (int i = 0; i < pool; ++i)
        if (bwd[fwd[i]] == i) pairs.emplace_back(i, fwd[i]);
    } else {
      for (int i = 0; i < pool; ++i) pairs.emplace_back(i, fwd[i]);
    }
    local.pairs_per_iteration.push_back(static_cast<int>(pairs.size()));
    if (pairs.size() < 2) {
      local.stopped_early = true;
      std::cerr << "warning: refinement iteration " << (iter + 1)
                << " produced " << pairs.size()
                << " pairs; keeping the previous map\n";
      break;
    }
    current = procrustes_rows(src, tgt, pairs);
  }
  if (report) *report = local;
  return current;
}

void save_map(const LinearMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_io("cannot write map file: " + path);
  const int d = map.dim();
  out << d << ' ' << d << '\n';
  char buf[40];
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.9g", map.matrix(i, j));
      out << buf << (j + 1 == d ? '\n' : ' ');
    }
  }
  if (!out) throw_io("write failed: " + path);
}

LinearMap load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open map file: " + path);
  int rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || rows != cols)
    throw_format("bad map header (want \"<d> <d>\"): " + path);
  LinearMap map;
  map.matrix.resize(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (!(in >> map.matrix(i, j)))
        throw_format("truncated map file: " + path);
  map.orthogonal =
      (map.matrix.transpose() * map.matrix -
       Eigen::MatrixXd::Identity(rows, rows))
          .norm() < 1e-4;
  return map;
}

}  // namespace glosskit
