#include "xlingevent/csls.hpp"

#include <algorithm>
#include <cmath>

#include "xlingevent/align.hpp"
#include "xlingevent/error.hpp"
#include "xlingevent/parallel.hpp"

namespace xlingevent {

namespace {

// Total order for ranking: higher score first, then lower index. Top-k means
// sum in this rank order so cached and fresh computations agree bitwise.
struct Hit {
  double score;
  int idx;

  bool outranks(const Hit& o) const {
    if (score != o.score) return score > o.score;
    return idx < o.idx;
  }
};

template <typename ScoreFn>
double mean_topk(std::size_t n, int k, const ScoreFn& score_of) {
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  if (kk == 0) return 0.0;
  std::vector<Hit> heap;
  heap.reserve(kk + 1);
  auto worse = [](const Hit& a, const Hit& b) { return a.outranks(b); };
  for (std::size_t i = 0; i < n; ++i) {
    Hit hit{score_of(i), static_cast<int>(i)};
    if (heap.size() < kk) {
      heap.push_back(hit);
      std::push_heap(heap.begin(), heap.end(), worse);
    } else if (hit.outranks(heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), worse);
      heap.back() = hit;
      std::push_heap(heap.begin(), heap.end(), worse);
    }
  }
  std::sort(heap.begin(), heap.end(),
            [](const Hit& a, const Hit& b) { return a.outranks(b); });
  double acc = 0.0;
  for (const auto& h : heap) acc += h.score;
  return acc / static_cast<double>(kk);
}

void check_spaces(const EmbeddingSpace& src, const EmbeddingSpace& tgt,
                  const MappingMatrix& w, const CslsParams& params) {
  if (!src.normalized || !tgt.normalized)
    throw UsageError("CSLS requires normalized spaces");
  if (src.dim != tgt.dim || w.dim != src.dim)
    throw UsageError("CSLS: space/mapping dimension mismatch");
  if (params.k < 1) throw UsageError("CSLS: k must be >= 1");
}

}  // namespace

double mean_topk_cosine(std::span<const double> query,
                        std::span<const float> rows, int dim, int k) {
  const std::size_t n = rows.size() / static_cast<std::size_t>(dim);
  return mean_topk(n, k, [&](std::size_t i) {
    return dot_df(query, rows.subspan(i * static_cast<std::size_t>(dim),
                                      static_cast<std::size_t>(dim)));
  });
}

double mean_topk_cosine_vs_mapped(std::span<const float> query,
                                  std::span<const double> mapped_rows, int dim,
                                  int k) {
  const std::size_t n = mapped_rows.size() / static_cast<std::size_t>(dim);
  return mean_topk(n, k, [&](std::size_t i) {
    return dot_df(mapped_rows.subspan(i * static_cast<std::size_t>(dim),
                                      static_cast<std::size_t>(dim)),
                  query);
  });
}

double csls_score(std::span<const double> x_mapped, const std::string& y,
                  const EmbeddingSpace& src, const EmbeddingSpace& tgt,
                  const MappingMatrix& w, const CslsParams& params) {
  check_spaces(src, tgt, w, params);
  const auto ti = tgt.find(y);
  if (!ti) throw DataError("csls_score: word not in target vocabulary: " + y);

  const double cos = dot_df(x_mapped, tgt.row(static_cast<std::size_t>(*ti)));
  const double r_t = mean_topk_cosine(x_mapped, tgt.matrix, tgt.dim, params.k);

  std::vector<double> mapped(src.size() * static_cast<std::size_t>(src.dim));
  for (std::size_t s = 0; s < src.size(); ++s) {
    const auto row = apply_mapping(w, src.row(s));
    std::copy(row.begin(), row.end(),
              mapped.begin() + s * static_cast<std::size_t>(src.dim));
  }
  const double r_s = mean_topk_cosine_vs_mapped(
      tgt.row(static_cast<std::size_t>(*ti)), mapped, src.dim, params.k);

  return 2.0 * cos - r_t - r_s;
}

CslsIndex::CslsIndex(const EmbeddingSpace& src, const EmbeddingSpace& tgt,
                     const MappingMatrix& w, const CslsParams& params)
    : src_(src), tgt_(tgt), dim_(src.dim), k_(params.k) {
  check_spaces(src, tgt, w, params);
  if (src.size() == 0 || tgt.size() == 0)
    throw UsageError("CslsIndex: empty vocabulary");

  mapped_.resize(src.size() * static_cast<std::size_t>(dim_));
  parallel_for(src.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const auto row = apply_mapping(w, src.row(s));
      std::copy(row.begin(), row.end(),
                mapped_.begin() + s * static_cast<std::size_t>(dim_));
    }
  });

  r_src_.resize(src.size());
  parallel_for(src.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s)
      r_src_[s] = mean_topk_cosine(mapped_row(static_cast<int>(s)), tgt.matrix,
                                   dim_, k_);
  });

  r_tgt_.resize(tgt.size());
  parallel_for(tgt.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t)
      r_tgt_[t] = mean_topk_cosine_vs_mapped(tgt.row(t), mapped_, dim_, k_);
  });
}

double CslsIndex::score(int src_idx, int tgt_idx) const {
  const double cos =
      dot_df(mapped_row(src_idx), tgt_.row(static_cast<std::size_t>(tgt_idx)));
  return 2.0 * cos - r_src_[src_idx] - r_tgt_[tgt_idx];
}

int CslsIndex::best_target(int src_idx) const {
  int best = 0;
  double best_score = score(src_idx, 0);
  const int nt = static_cast<int>(tgt_.size());
  for (int t = 1; t < nt; ++t) {
    const double s = score(src_idx, t);
    if (s > best_score) {
      best_score = s;
      best = t;
    }
  }
  return best;
}

std::vector<std::pair<int, int>> CslsIndex::mutual_nn_pairs() const {
  const std::size_t ns = src_.size();
  const std::size_t nt = tgt_.size();

  std::vector<int> fwd(ns);
  parallel_for(ns, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s)
      fwd[s] = best_target(static_cast<int>(s));
  });

  // argmax_s score(s, t); the r_tgt term is constant per column, and the
  // reverse-direction CSLS through W^T produces this very transpose, so one
  // matrix serves both directions.
  std::vector<int> bwd(nt);
  parallel_for(nt, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      int best = 0;
      double best_score = score(0, static_cast<int>(t));
      for (std::size_t s = 1; s < ns; ++s) {
        const double sc = score(static_cast<int>(s), static_cast<int>(t));
        if (sc > best_score) {
          best_score = sc;
          best = static_cast<int>(s);
        }
      }
      bwd[t] = best;
    }
  });

  std::vector<std::pair<int, int>> pairs;
  for (std::size_t s = 0; s < ns; ++s)
    if (bwd[fwd[s]] == static_cast<int>(s))
      pairs.emplace_back(static_cast<int>(s), fwd[s]);
  return pairs;
}

}  // namespace xlingevent
