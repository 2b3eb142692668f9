#pragma once

#include <span>
#include <vector>

#include "xlingevent/coref.hpp"

namespace xlingevent {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  double beta = 1.0;
};

/// P = tp/(tp+fp), R = tp/(tp+fn) (0 on empty denominators),
/// F = (1+b^2) P R / (b^2 P + R), 0 when P+R = 0.
PRF prf_from_counts(double tp, double fp, double fn, double beta);
double f_beta(double precision, double recall, double beta);

// Micro-aggregable numerator/denominator form of one coreference metric on
// one document. PRF comes out after summing across documents.
struct PrCounts {
  double p_num = 0.0, p_den = 0.0;
  double r_num = 0.0, r_den = 0.0;

  PrCounts& operator+=(const PrCounts& o);
  PRF to_prf(double beta = 1.0) const;
};

// The three CoNLL-2012 components. Gold and pred must partition the same
// mention universe (mentions are sentence ids here); a mismatch raises.
// Degenerate 0/0 denominators score 0.
PrCounts muc_counts(const Clustering& gold, const Clustering& pred);
PrCounts b_cubed_counts(const Clustering& gold, const Clustering& pred);
PrCounts ceaf_e_counts(const Clustering& gold, const Clustering& pred);

PRF muc_score(const Clustering& gold, const Clustering& pred);
PRF b_cubed_score(const Clustering& gold, const Clustering& pred);
PRF ceaf_e_score(const Clustering& gold, const Clustering& pred);

struct CorefScore {
  PRF muc;
  PRF b3;
  PRF ceaf_e;
  double conll_avg = 0.0;  // (muc.f + b3.f + ceaf_e.f) / 3
};

CorefScore conll_average(const Clustering& gold, const Clustering& pred);

enum class Aggregate { Micro, Macro };

/// Corpus-level score. Micro sums metric numerators/denominators across
/// documents before dividing (reference-scorer behavior); macro averages
/// the per-document P/R/F instead. Documents are matched by doc_id.
CorefScore conll_average_corpus(std::span<const Clustering> gold,
                                std::span<const Clustering> pred,
                                Aggregate aggregate = Aggregate::Micro);

/// Unweighted mean of per-class F scores.
double macro_f1(std::span<const PRF> per_class);

/// Binary P/R/F_beta with class 1 as positive. Vectors must align.
PRF binary_f1(std::span<const int> gold, std::span<const int> pred,
              double beta = 1.0);

std::vector<PRF> per_class_prf(std::span<const int> gold,
                               std::span<const int> pred, int num_classes,
                               double beta = 1.0);

/// Maximum-weight one-to-one assignment value for a rectangular weight
/// matrix (rows x cols, row-major). Exact Hungarian algorithm.
double max_weight_matching(const std::vector<double>& weights, int rows,
                           int cols);

}  // namespace xlingevent
