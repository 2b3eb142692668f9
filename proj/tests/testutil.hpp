// Shared fixtures and independent oracles for the test suites. Oracle code
// deliberately avoids the library's own decoding/ranking helpers so the two
// sides of every equivalence check stay independent.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "xlingevent/bio.hpp"
#include "xlingevent/embedding.hpp"
#include "xlingevent/rng.hpp"

namespace testutil {

// ---------------------------------------------------------------------------
// Scratch directories

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0; i < 10000; ++i) {
      auto candidate = base / ("xle_" + tag + "_" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create scratch dir");
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------
// Random spaces and matrices

// Standard normal via Box-Muller on the deterministic Rng.
inline double gaussian(xlingevent::Rng& rng) {
  double u1 = rng.next_double();
  while (u1 <= 0.0) u1 = rng.next_double();
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline xlingevent::EmbeddingSpace make_space(
    const std::vector<std::string>& words,
    const std::vector<std::vector<float>>& rows) {
  xlingevent::EmbeddingSpace space;
  space.dim = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    space.index.emplace(words[i], static_cast<std::int32_t>(i));
    space.words.push_back(words[i]);
    space.matrix.insert(space.matrix.end(), rows[i].begin(), rows[i].end());
  }
  return space;
}

inline xlingevent::EmbeddingSpace random_unit_space(std::size_t n, int d,
                                                    xlingevent::Rng& rng,
                                                    const std::string& prefix) {
  std::vector<std::string> words;
  std::vector<std::vector<float>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    words.push_back(prefix + std::to_string(i));
    std::vector<float> row(d);
    for (int j = 0; j < d; ++j) row[j] = static_cast<float>(gaussian(rng));
    rows.push_back(std::move(row));
  }
  return normalize_rows(make_space(words, rows));
}

// Random orthogonal matrix via modified Gram-Schmidt on a Gaussian matrix
// (row-major d x d). Independent of the library's Jacobi SVD.
inline std::vector<double> random_orthogonal(int d, xlingevent::Rng& rng) {
  std::vector<std::vector<double>> cols(d, std::vector<double>(d));
  for (auto& col : cols)
    for (double& v : col) v = gaussian(rng);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < j; ++k) {
      double proj = 0.0;
      for (int i = 0; i < d; ++i) proj += cols[j][i] * cols[k][i];
      for (int i = 0; i < d; ++i) cols[j][i] -= proj * cols[k][i];
    }
    double norm = 0.0;
    for (int i = 0; i < d; ++i) norm += cols[j][i] * cols[j][i];
    norm = std::sqrt(norm);
    for (int i = 0; i < d; ++i) cols[j][i] /= norm;
  }
  std::vector<double> q(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) q[static_cast<std::size_t>(i) * d + j] = cols[j][i];
  return q;
}

/// rows(space) transformed by q: out_row = q * row (column convention).
inline xlingevent::EmbeddingSpace rotate_space(
    const xlingevent::EmbeddingSpace& space, const std::vector<double>& q,
    const std::string& prefix) {
  std::vector<std::string> words;
  std::vector<std::vector<float>> rows;
  const int d = space.dim;
  for (std::size_t r = 0; r < space.size(); ++r) {
    words.push_back(prefix + space.words[r]);
    const auto x = space.row(r);
    std::vector<float> y(d);
    for (int i = 0; i < d; ++i) {
      double acc = 0.0;
      for (int j = 0; j < d; ++j)
        acc += q[static_cast<std::size_t>(i) * d + j] * x[j];
      y[i] = static_cast<float>(acc);
    }
    rows.push_back(std::move(y));
  }
  auto out = normalize_rows(make_space(words, rows));
  return out;
}

inline double frobenius_distance(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Viterbi oracle: exhaustive search over valid sequences with its own BIO
// validity rule, scored in the decoder's summation order (back to front).

inline bool oracle_bio_valid(const std::vector<std::string>& tags) {
  for (std::size_t t = 0; t < tags.size(); ++t) {
    if (tags[t].rfind("I-", 0) != 0) continue;
    if (t == 0) return false;
    const std::string type = tags[t].substr(2);
    const std::string& prev = tags[t - 1];
    if (prev != "B-" + type && prev != "I-" + type) return false;
  }
  return true;
}

struct OracleViterbi {
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<int> best_path;  // lexicographically smallest among maxima
};

// Enumerates label sequences in lexicographic order (DFS, ascending label
// index), pruning prefixes its own validity rule forbids.
inline OracleViterbi oracle_viterbi(const xlingevent::EmissionMatrix& em,
                                    const std::vector<std::string>& labels,
                                    const std::vector<double>* trans = nullptr) {
  const int T = em.length;
  const int L = em.num_labels;
  OracleViterbi result;
  std::vector<int> path(T);

  auto backward_score = [&](const std::vector<int>& p) {
    double acc = em.at(T - 1, p[T - 1]);
    for (int t = T - 2; t >= 0; --t) {
      const double step =
          trans ? (*trans)[static_cast<std::size_t>(p[t]) * L + p[t + 1]] : 0.0;
      acc = em.at(t, p[t]) + (step + acc);
    }
    return acc;
  };

  auto prefix_ok = [&](int upto) {
    std::vector<std::string> tags;
    tags.reserve(upto + 1);
    for (int t = 0; t <= upto; ++t) tags.push_back(labels[path[t]]);
    return oracle_bio_valid(tags);
  };

  std::function<void(int)> dfs = [&](int t) {
    if (t == T) {
      const double score = backward_score(path);
      if (score > result.best_score) {
        result.best_score = score;
        result.best_path = path;
      }
      return;
    }
    for (int l = 0; l < L; ++l) {
      path[t] = l;
      if (prefix_ok(t)) dfs(t + 1);
    }
  };
  dfs(0);
  return result;
}

// ---------------------------------------------------------------------------
// CSLS oracle: direct transcription of 2*cos - r_T - r_S with full sorts.

inline double oracle_matvec_dot(const std::vector<double>& w, int d,
                                std::span<const float> x, int out_row) {
  double acc = 0.0;
  for (int j = 0; j < d; ++j)
    acc += w[static_cast<std::size_t>(out_row) * d + j] *
           static_cast<double>(x[j]);
  return acc;
}

inline std::vector<double> oracle_map(const std::vector<double>& w, int d,
                                      std::span<const float> x) {
  std::vector<double> y(d);
  for (int i = 0; i < d; ++i) y[i] = oracle_matvec_dot(w, d, x, i);
  return y;
}

inline double oracle_mean_topk(std::vector<std::pair<double, int>> scored,
                               int k) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  const std::size_t kk =
      std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
  if (kk == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < kk; ++i) acc += scored[i].first;
  return acc / static_cast<double>(kk);
}

struct OracleCsls {
  std::vector<std::vector<double>> score;  // [src][tgt]
  std::vector<double> r_src, r_tgt;
};

inline OracleCsls oracle_csls_matrix(const xlingevent::EmbeddingSpace& src,
                                     const xlingevent::EmbeddingSpace& tgt,
                                     const std::vector<double>& w, int k) {
  const int d = src.dim;
  const std::size_t ns = src.size();
  const std::size_t nt = tgt.size();
  std::vector<std::vector<double>> mapped(ns);
  for (std::size_t s = 0; s < ns; ++s) mapped[s] = oracle_map(w, d, src.row(s));

  std::vector<std::vector<double>> cos(ns, std::vector<double>(nt));
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t t = 0; t < nt; ++t) {
      double acc = 0.0;
      const auto y = tgt.row(t);
      for (int i = 0; i < d; ++i) acc += mapped[s][i] * static_cast<double>(y[i]);
      cos[s][t] = acc;
    }

  OracleCsls out;
  out.r_src.resize(ns);
  out.r_tgt.resize(nt);
  for (std::size_t s = 0; s < ns; ++s) {
    std::vector<std::pair<double, int>> scored;
    for (std::size_t t = 0; t < nt; ++t)
      scored.emplace_back(cos[s][t], static_cast<int>(t));
    out.r_src[s] = oracle_mean_topk(std::move(scored), k);
  }
  for (std::size_t t = 0; t < nt; ++t) {
    std::vector<std::pair<double, int>> scored;
    for (std::size_t s = 0; s < ns; ++s)
      scored.emplace_back(cos[s][t], static_cast<int>(s));
    out.r_tgt[t] = oracle_mean_topk(std::move(scored), k);
  }
  out.score.assign(ns, std::vector<double>(nt));
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t t = 0; t < nt; ++t)
      out.score[s][t] = 2.0 * cos[s][t] - out.r_src[s] - out.r_tgt[t];
  return out;
}

// ---------------------------------------------------------------------------
// Matching oracle: factorial enumeration of one-to-one assignments.

inline double oracle_max_matching(const std::vector<double>& weights, int rows,
                                  int cols) {
  const int n = std::max(rows, cols);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < rows; ++i)
      if (perm[i] < cols)
        total += weights[static_cast<std::size_t>(i) * cols + perm[i]];
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// ---------------------------------------------------------------------------
// Clustering oracle: connected components of the above-threshold pair graph.

inline std::vector<std::vector<int>> oracle_components(
    const std::vector<std::tuple<int, int, double>>& pairs, double threshold) {
  std::vector<int> nodes;
  for (const auto& [i, j, s] : pairs) {
    nodes.push_back(i);
    nodes.push_back(j);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  std::map<int, std::vector<int>> adj;
  for (const auto& [i, j, s] : pairs)
    if (s > threshold) {
      adj[i].push_back(j);
      adj[j].push_back(i);
    }

  std::set<int> seen;
  std::vector<std::vector<int>> components;
  for (int start : nodes) {
    if (seen.count(start)) continue;
    std::vector<int> component, stack{start};
    seen.insert(start);
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      component.push_back(cur);
      for (int next : adj[cur])
        if (seen.insert(next).second) stack.push_back(next);
    }
    std::sort(component.begin(), component.end());
    components.push_back(std::move(component));
  }
  std::sort(components.begin(), components.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return components;
}

}  // namespace testutil
