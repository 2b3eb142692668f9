#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace xlingevent {

// Vocabulary plus an n x d row matrix of word vectors. Queries assume
// normalized rows (cosine == dot product); loaders leave rows as found.
struct EmbeddingSpace {
  std::vector<std::string> words;
  std::vector<float> matrix;  // row-major n x dim
  int dim = 0;
  bool normalized = false;
  std::unordered_map<std::string, std::int32_t> index;

  std::size_t size() const { return words.size(); }

  std::span<const float> row(std::size_t i) const {
    return {matrix.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }

  /// Row index of a word, or absent. Never substitutes a zero vector.
  std::optional<std::int32_t> find(const std::string& word) const {
    auto it = index.find(word);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

struct Neighbor {
  std::string word;
  double score = 0.0;
};

struct NeighborList {
  std::vector<Neighbor> entries;  // descending score
};

/// Text interchange format: header `n d`, then `word v1 ... vd` per line.
/// Keeps at most max_vocab rows in file order. Duplicate words keep the
/// first occurrence (with a warning); dimension mismatches raise DataError
/// naming the line.
EmbeddingSpace load_text_embeddings(
    const std::string& path,
    std::optional<std::size_t> max_vocab = std::nullopt);

/// Scales every row to unit L2 norm; idempotent. Zero rows raise DataError
/// naming the word.
EmbeddingSpace normalize_rows(EmbeddingSpace space);

/// Exact top-k by cosine (full scan). Ties break by ascending row index;
/// k past the vocabulary size just returns the whole vocabulary ranked.
NeighborList knn_cosine(const EmbeddingSpace& space,
                        std::span<const float> query, int k);

/// Index-level variant for double-precision queries (mapped vectors).
std::vector<std::pair<int, double>> knn_cosine_indices(
    const EmbeddingSpace& space, std::span<const double> query, int k);

/// Words appearing verbatim in both vocabularies, as (w, w) pairs sorted
/// lexicographically. lowercase_fold matches on ASCII-lowercased forms
/// instead and pairs the original surface forms.
std::vector<std::pair<std::string, std::string>> identical_string_pairs(
    const EmbeddingSpace& src, const EmbeddingSpace& tgt,
    bool lowercase_fold = false);

/// Cosine with double accumulation. Rows must be same length.
double dot_f(std::span<const float> a, std::span<const float> b);
double dot_df(std::span<const double> a, std::span<const float> b);

}  // namespace xlingevent
