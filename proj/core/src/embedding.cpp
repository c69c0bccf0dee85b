#include "glosskit/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "glosskit/error.hpp"

namespace glosskit {

namespace {

// Splits on runs of spaces/tabs. fastText lines are space-separated but
// real files occasionally carry stray tabs.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view s, double* out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end && std::isfinite(*out);
}

bool parse_int(std::string_view s, long* out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

void EmbeddingMatrix::finalize() {
  index.clear();
  index.reserve(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i)
    index.emplace(tokens[i], static_cast<int>(i));
  for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
    double norm = vectors.row(r).norm();
    if (norm > 0.0) vectors.row(r) /= norm;
  }
}

EmbeddingMatrix load_embeddings(const std::string& path, int vocab_limit,
                                LoadStats* stats) {
  if (vocab_limit < 1) throw_config("vocab_limit must be positive");
  std::ifstream in(path);
  if (!in) throw_io("cannot open embedding file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw_format("embedding file is empty: " + path);
  auto header = split_fields(line);
  long count = 0, dim = 0;
  if (header.size() != 2 || !parse_int(header[0], &count) ||
      !parse_int(header[1], &dim) || count < 0 || dim < 1)
    throw_format("bad embedding header (want \"<count> <dim>\"): " + path);

  EmbeddingMatrix m;
  LoadStats local;
  long capacity = std::min<long>(count, vocab_limit);
  m.tokens.reserve(capacity);
  m.vectors.resize(capacity, dim);

  std::vector<double> row(dim);
  while (m.size() < vocab_limit && std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (static_cast<long>(fields.size()) != dim + 1) {
      ++local.skipped_malformed;
      continue;
    }
    bool ok = true;
    for (long j = 0; j < dim; ++j) {
      if (!parse_double(fields[j + 1], &row[j])) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      ++local.skipped_malformed;
      continue;
    }
    std::string token(fields[0]);
    if (m.index.count(token)) {
      ++local.skipped_duplicate;
      continue;
    }
    double sq = 0.0;
    for (double x : row) sq += x * x;
    if (sq == 0.0) {
      ++local.skipped_zero_norm;
      continue;
    }
    int r = m.size();
    if (r >= m.vectors.rows())
      m.vectors.conservativeResize(m.vectors.rows() + 1024, Eigen::NoChange);
    for (long j = 0; j < dim; ++j) m.vectors(r, j) = row[j];
    m.index.emplace(token, r);
    m.tokens.push_back(std::move(token));
  }
  m.vectors.conservativeResize(m.size(), dim);
  local.kept = m.size();
  m.finalize();
  if (stats) *stats = local;
  return m;
}

void save_embeddings(const EmbeddingMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_io("cannot write embedding file: " + path);
  out << m.size() << ' ' << m.dim() << '\n';
  char buf[32];
  for (int r = 0; r < m.size(); ++r) {
    out << m.tokens[r];
    for (int j = 0; j < m.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), " %.8f", m.vectors(r, j));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw_io("write failed: " + path);
}

double cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size())
    throw_config("cosine: dimension mismatch (" + std::to_string(u.size()) +
                 " vs " + std::to_string(v.size()) + ")");
  double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw_config("cosine: zero vector");
  return u.dot(v) / (nu * nv);
}

std::vector<Neighbor> top_k_of_scores(const Eigen::VectorXd& scores, int k) {
  auto better = [&scores](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::vector<int> idx(scores.size());
  for (int i = 0; i < scores.size(); ++i) idx[i] = i;
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), better);
  std::vector<Neighbor> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) out.push_back({idx[i], scores[idx[i]]});
  return out;
}

std::vector<Neighbor> top_k_neighbors(const Eigen::VectorXd& query,
                                      const EmbeddingMatrix& m, int k) {
  if (k < 1) throw_config("top_k_neighbors: k must be positive");
  if (k > m.size())
    throw_config("top_k_neighbors: k=" + std::to_string(k) +
                 " exceeds vocabulary size " + std::to_string(m.size()));
  if (query.size() != m.dim())
    throw_config("top_k_neighbors: query dimension mismatch");
  double norm = query.norm();
  if (norm == 0.0) throw_config("top_k_neighbors: zero query");
  Eigen::VectorXd scores = (m.vectors * query) / norm;
  return top_k_of_scores(scores, k);
}

std::vector<Neighbor> top_k_csls(const Eigen::VectorXd& query,
                                 const EmbeddingMatrix& m, int k,
                                 double query_penalty,
                                 const Eigen::VectorXd& candidate_penalties) {
  if (k < 1 || k > m.size()) throw_config("top_k_csls: bad k");
  if (candidate_penalties.size() != m.size())
    throw_config("top_k_csls: penalty vector size mismatch");
  double norm = query.norm();
  if (norm == 0.0) throw_config("top_k_csls: zero query");
  Eigen::VectorXd scores =
      2.0 * (m.vectors * query) / norm - candidate_penalties;
  scores.array() -= query_penalty;
  return top_k_of_scores(scores, k);
}

}  // namespace glosskit
