#pragma once

#include <Eigen/Core>
#include <string>
#include <unordered_map>
#include <vector>

namespace glosskit {

// Monolingual embedding table. Rows are unit-normalized at load, so every
// downstream cosine reduces to a dot product. Row order follows the input
// file, which for frequency-sorted files makes row index a frequency rank.
// Immutable after load; safe to share across threads.
struct EmbeddingMatrix {
  std::vector<std::string> tokens;
  Eigen::MatrixXd vectors;  // size() x dim(), rows unit-normalized
  std::unordered_map<std::string, int> index;

  int size() const { return static_cast<int>(tokens.size()); }
  int dim() const { return static_cast<int>(vectors.cols()); }

  bool contains(const std::string& token) const {
    return index.find(token) != index.end();
  }
  // -1 when absent.
  int row_of(const std::string& token) const {
    auto it = index.find(token);
    return it == index.end() ? -1 : it->second;
  }

  // Rebuilds index from tokens and normalizes all rows. Zero rows are left
  // untouched (callers filter them beforehand).
  void finalize();
};

struct LoadStats {
  long kept = 0;
  long skipped_malformed = 0;  // wrong field count or unparsable number
  long skipped_duplicate = 0;
  long skipped_zero_norm = 0;
};

// Reads a text embedding file: header "<count> <dim>", then one
// "<token> <c1> ... <c_dim>" line per word. Keeps at most vocab_limit rows
// in file order, skipping (and counting) malformed lines, repeated tokens
// and zero-norm vectors. Rows come out unit-normalized.
EmbeddingMatrix load_embeddings(const std::string& path, int vocab_limit,
                                LoadStats* stats = nullptr);

// Writes the same format back (components with 8 decimals).
void save_embeddings(const EmbeddingMatrix& m, const std::string& path);

double cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

struct Neighbor {
  int row;
  double score;
};

// Exact top-k scan by cosine, descending, ties broken by lower row index.
// query need not be normalized.
std::vector<Neighbor> top_k_neighbors(const Eigen::VectorXd& query,
                                      const EmbeddingMatrix& m, int k);

// Top-k under CSLS given precomputed penalty terms:
//   score(row) = 2*cos(query, m[row]) - query_penalty - candidate_penalties[row]
// where the penalties are mean-top-k cosines (see crosslingual.hpp).
std::vector<Neighbor> top_k_csls(const Eigen::VectorXd& query,
                                 const EmbeddingMatrix& m, int k,
                                 double query_penalty,
                                 const Eigen::VectorXd& candidate_penalties);

// Shared helper: top-k entries of a dense score vector, ties by lower index.
std::vector<Neighbor> top_k_of_scores(const Eigen::VectorXd& scores, int k);

}  // namespace glosskit
