#include "xlingevent/metrics.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <set>

#include "xlingevent/error.hpp"

namespace xlingevent {

namespace {

// mention id -> cluster ordinal, plus cluster sizes.
struct MentionMap {
  std::map<int, int> cluster_of;
  std::vector<int> sizes;
};

MentionMap index_clusters(const Clustering& c) {
  MentionMap m;
  for (std::size_t k = 0; k < c.clusters.size(); ++k) {
    m.sizes.push_back(static_cast<int>(c.clusters[k].size()));
    for (int id : c.clusters[k]) {
      if (!m.cluster_of.emplace(id, static_cast<int>(k)).second)
        throw DataError("clustering for doc " + c.doc_id +
                        " repeats mention " + std::to_string(id));
    }
  }
  return m;
}

void check_same_universe(const Clustering& gold, const Clustering& pred,
                         const MentionMap& gm, const MentionMap& pm) {
  if (gm.cluster_of.size() != pm.cluster_of.size() ||
      !std::equal(gm.cluster_of.begin(), gm.cluster_of.end(),
                  pm.cluster_of.begin(),
                  [](const auto& a, const auto& b) { return a.first == b.first; }))
    throw DataError("gold and predicted clusterings for doc " + gold.doc_id +
                    " cover different mention sets");
  (void)pred;
}

// MUC recall numerator contribution of one key cluster K: |K| - p(K),
// where p(K) is the number of response clusters K intersects.
double muc_partition_links(const std::vector<int>& key_cluster,
                           const MentionMap& response) {
  std::set<int> pieces;
  for (int id : key_cluster) pieces.insert(response.cluster_of.at(id));
  return static_cast<double>(key_cluster.size()) -
         static_cast<double>(pieces.size());
}

}  // namespace

double f_beta(double precision, double recall, double beta) {
  if (beta <= 0.0) throw UsageError("f_beta: beta must be positive");
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  if (denom <= 0.0) return 0.0;
  return (1.0 + b2) * precision * recall / denom;
}

PRF prf_from_counts(double tp, double fp, double fn, double beta) {
  if (tp < 0 || fp < 0 || fn < 0)
    throw UsageError("prf_from_counts: negative counts");
  PRF out;
  out.beta = beta;
  out.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  out.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  out.f = f_beta(out.precision, out.recall, beta);
  return out;
}

PrCounts& PrCounts::operator+=(const PrCounts& o) {
  p_num += o.p_num;
  p_den += o.p_den;
  r_num += o.r_num;
  r_den += o.r_den;
  return *this;
}

PRF PrCounts::to_prf(double beta) const {
  PRF out;
  out.beta = beta;
  out.precision = p_den > 0 ? p_num / p_den : 0.0;
  out.recall = r_den > 0 ? r_num / r_den : 0.0;
  out.f = f_beta(out.precision, out.recall, beta);
  return out;
}

PrCounts muc_counts(const Clustering& gold, const Clustering& pred) {
  const MentionMap gm = index_clusters(gold);
  const MentionMap pm = index_clusters(pred);
  check_same_universe(gold, pred, gm, pm);
  PrCounts c;
  // Singletons contribute |K| - 1 = 0 to both sides of each ratio.
  for (const auto& key : gold.clusters) {
    c.r_num += muc_partition_links(key, pm);
    c.r_den += static_cast<double>(key.size()) - 1.0;
  }
  for (const auto& response : pred.clusters) {
    c.p_num += muc_partition_links(response, gm);
    c.p_den += static_cast<double>(response.size()) - 1.0;
  }
  return c;
}

PrCounts b_cubed_counts(const Clustering& gold, const Clustering& pred) {
  const MentionMap gm = index_clusters(gold);
  const MentionMap pm = index_clusters(pred);
  check_same_universe(gold, pred, gm, pm);

  // |gold(m) ∩ pred(m)| per (gold cluster, pred cluster) pair.
  std::map<std::pair<int, int>, int> intersection;
  for (const auto& [id, gc] : gm.cluster_of)
    ++intersection[{gc, pm.cluster_of.at(id)}];

  PrCounts c;
  for (const auto& [id, gc] : gm.cluster_of) {
    const int pc = pm.cluster_of.at(id);
    const double inter = intersection.at({gc, pc});
    c.p_num += inter / static_cast<double>(pm.sizes[pc]);
    c.r_num += inter / static_cast<double>(gm.sizes[gc]);
  }
  c.p_den = static_cast<double>(pm.cluster_of.size());
  c.r_den = static_cast<double>(gm.cluster_of.size());
  return c;
}

PrCounts ceaf_e_counts(const Clustering& gold, const Clustering& pred) {
  const MentionMap gm = index_clusters(gold);
  const MentionMap pm = index_clusters(pred);
  check_same_universe(gold, pred, gm, pm);

  const int ng = static_cast<int>(gold.clusters.size());
  const int np = static_cast<int>(pred.clusters.size());
  std::vector<double> phi(static_cast<std::size_t>(ng) * np, 0.0);
  for (int g = 0; g < ng; ++g) {
    const std::set<int> key(gold.clusters[g].begin(), gold.clusters[g].end());
    for (int p = 0; p < np; ++p) {
      int inter = 0;
      for (int id : pred.clusters[p]) inter += key.count(id) ? 1 : 0;
      // phi4(K, S) = 2 |K ∩ S| / (|K| + |S|)
      phi[static_cast<std::size_t>(g) * np + p] =
          2.0 * inter /
          (static_cast<double>(key.size()) + pred.clusters[p].size());
    }
  }

  PrCounts c;
  const double total = max_weight_matching(phi, ng, np);
  c.p_num = total;
  c.p_den = static_cast<double>(np);
  c.r_num = total;
  c.r_den = static_cast<double>(ng);
  return c;
}

namespace {

PRF counts_to_prf_warned(const char* metric, const PrCounts& c) {
  if (c.p_den <= 0 || c.r_den <= 0)
    std::cerr << "warning: " << metric
              << " has an empty denominator; scoring 0 by convention\n";
  return c.to_prf();
}

}  // namespace

PRF muc_score(const Clustering& gold, const Clustering& pred) {
  return counts_to_prf_warned("MUC", muc_counts(gold, pred));
}

PRF b_cubed_score(const Clustering& gold, const Clustering& pred) {
  return b_cubed_counts(gold, pred).to_prf();
}

PRF ceaf_e_score(const Clustering& gold, const Clustering& pred) {
  return ceaf_e_counts(gold, pred).to_prf();
}

CorefScore conll_average(const Clustering& gold, const Clustering& pred) {
  CorefScore score;
  score.muc = muc_score(gold, pred);
  score.b3 = b_cubed_score(gold, pred);
  score.ceaf_e = ceaf_e_score(gold, pred);
  score.conll_avg = (score.muc.f + score.b3.f + score.ceaf_e.f) / 3.0;
  return score;
}

CorefScore conll_average_corpus(std::span<const Clustering> gold,
                                std::span<const Clustering> pred,
                                Aggregate aggregate) {
  std::map<std::string, const Clustering*> pred_by_id;
  for (const auto& p : pred) {
    if (!pred_by_id.emplace(p.doc_id, &p).second)
      throw DataError("duplicate predicted clustering for doc " + p.doc_id);
  }
  std::set<std::string> gold_ids;
  for (const auto& g : gold) {
    if (!gold_ids.insert(g.doc_id).second)
      throw DataError("duplicate gold clustering for doc " + g.doc_id);
    if (!pred_by_id.count(g.doc_id))
      throw DataError("no predicted clustering for doc " + g.doc_id);
  }
  for (const auto& p : pred)
    if (!gold_ids.count(p.doc_id))
      throw DataError("predicted clustering for unknown doc " + p.doc_id);

  CorefScore score;
  if (aggregate == Aggregate::Micro) {
    PrCounts muc, b3, ceaf;
    for (const auto& g : gold) {
      const Clustering& p = *pred_by_id.at(g.doc_id);
      muc += muc_counts(g, p);
      b3 += b_cubed_counts(g, p);
      ceaf += ceaf_e_counts(g, p);
    }
    score.muc = muc.to_prf();
    score.b3 = b3.to_prf();
    score.ceaf_e = ceaf.to_prf();
  } else {
    const double n = static_cast<double>(gold.size());
    for (const auto& g : gold) {
      const CorefScore doc = conll_average(g, *pred_by_id.at(g.doc_id));
      score.muc.precision += doc.muc.precision / n;
      score.muc.recall += doc.muc.recall / n;
      score.muc.f += doc.muc.f / n;
      score.b3.precision += doc.b3.precision / n;
      score.b3.recall += doc.b3.recall / n;
      score.b3.f += doc.b3.f / n;
      score.ceaf_e.precision += doc.ceaf_e.precision / n;
      score.ceaf_e.recall += doc.ceaf_e.recall / n;
      score.ceaf_e.f += doc.ceaf_e.f / n;
    }
  }
  score.conll_avg = (score.muc.f + score.b3.f + score.ceaf_e.f) / 3.0;
  return score;
}

double macro_f1(std::span<const PRF> per_class) {
  if (per_class.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& prf : per_class) acc += prf.f;
  return acc / static_cast<double>(per_class.size());
}

std::vector<PRF> per_class_prf(std::span<const int> gold,
                               std::span<const int> pred, int num_classes,
                               double beta) {
  if (gold.size() != pred.size())
    throw UsageError("per_class_prf: label vectors differ in length");
  if (num_classes < 1) throw UsageError("per_class_prf: need >= 1 class");
  std::vector<double> tp(num_classes, 0), fp(num_classes, 0),
      fn(num_classes, 0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int g = gold[i];
    const int p = pred[i];
    if (g < 0 || g >= num_classes || p < 0 || p >= num_classes)
      throw UsageError("per_class_prf: label out of range");
    if (g == p) {
      tp[g] += 1;
    } else {
      fn[g] += 1;
      fp[p] += 1;
    }
  }
  std::vector<PRF> out;
  out.reserve(num_classes);
  for (int c = 0; c < num_classes; ++c)
    out.push_back(prf_from_counts(tp[c], fp[c], fn[c], beta));
  return out;
}

PRF binary_f1(std::span<const int> gold, std::span<const int> pred,
              double beta) {
  if (gold.size() != pred.size())
    throw UsageError("binary_f1: label vectors differ in length");
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if ((gold[i] != 0 && gold[i] != 1) || (pred[i] != 0 && pred[i] != 1))
      throw UsageError("binary_f1: labels must be 0 or 1");
    if (pred[i] == 1 && gold[i] == 1) tp += 1;
    if (pred[i] == 1 && gold[i] == 0) fp += 1;
    if (pred[i] == 0 && gold[i] == 1) fn += 1;
  }
  return prf_from_counts(tp, fp, fn, beta);
}

}  // namespace xlingevent
