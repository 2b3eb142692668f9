#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xlingevent/embedding.hpp"

namespace xlingevent {

struct MappingMatrix;

struct CslsParams {
  int k = 10;  // neighborhood size for the r_T / r_S means
};

// CSLS(Wx, y) = 2 cos(Wx, y) - r_T(Wx) - r_S(y), where r_.(v) is the mean
// cosine of v to its k nearest neighbors in the opposite space. The r terms
// penalize hub vectors that are near-neighbors of many queries.
//
// One-off scoring; recomputes both r terms per call. Batch work should go
// through CslsIndex, whose caches are bit-identical to this computation.
double csls_score(std::span<const double> x_mapped, const std::string& y,
                  const EmbeddingSpace& src, const EmbeddingSpace& tgt,
                  const MappingMatrix& w, const CslsParams& params);

// Precomputed CSLS state for one (src, tgt, W) triple: the mapped source
// matrix and the r_T / r_S caches. Construction is the dominant cost
// (O(n_src * n_tgt * d)); queries after that are dot products.
class CslsIndex {
 public:
  CslsIndex(const EmbeddingSpace& src, const EmbeddingSpace& tgt,
            const MappingMatrix& w, const CslsParams& params);

  double score(int src_idx, int tgt_idx) const;

  /// argmax_t CSLS(src_idx, t), ties by ascending target index.
  int best_target(int src_idx) const;

  /// (s, t) pairs that are each other's CSLS argmax, ascending source index.
  std::vector<std::pair<int, int>> mutual_nn_pairs() const;

  std::span<const double> mapped_row(int src_idx) const {
    return {mapped_.data() + static_cast<std::size_t>(src_idx) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& r_src() const { return r_src_; }  // r_T per source word
  const std::vector<double>& r_tgt() const { return r_tgt_; }  // r_S per target word

  const EmbeddingSpace& src() const { return src_; }
  const EmbeddingSpace& tgt() const { return tgt_; }
  int k() const { return k_; }

 private:
  const EmbeddingSpace& src_;
  const EmbeddingSpace& tgt_;
  int dim_ = 0;
  int k_ = 10;
  std::vector<double> mapped_;  // n_src x dim, W applied to every source row
  std::vector<double> r_src_;
  std::vector<double> r_tgt_;
};

/// Mean of the top-k cosines of `query` against all `rows` (row-major,
/// dim-wide), summed in rank order. k is capped at the row count.
double mean_topk_cosine(std::span<const double> query,
                        std::span<const float> rows, int dim, int k);
double mean_topk_cosine_vs_mapped(std::span<const float> query,
                                  std::span<const double> mapped_rows, int dim,
                                  int k);

}  // namespace xlingevent
