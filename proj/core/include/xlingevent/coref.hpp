#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xlingevent/corpus.hpp"
#include "xlingevent/embedding.hpp"

namespace xlingevent {

struct MlpModel;

struct SentencePair {
  std::string doc_id;
  int i = 0;  // sentence ids, i < j
  int j = 0;
  std::optional<bool> coreferential;  // gold label, when known
  std::optional<double> score;        // confidence in [0,1]
};

// Partition of one document's event sentences. Clusters are sorted
// ascending and ordered by smallest member, so equal partitions serialize
// identically.
struct Clustering {
  std::string doc_id;
  std::vector<std::vector<int>> clusters;

  bool operator==(const Clustering&) const = default;
};

struct ClusterParams {
  double threshold = 0.5;  // merge on score strictly above this
};

/// All C(n,2) pairs over each document's event sentences (the union of its
/// event_clusters), labeled coreferential iff both ids share a cluster.
/// Documents without event_clusters raise DataError.
std::vector<SentencePair> make_pair_dataset(const Corpus& corpus);

/// Fills pair scores from a JSONL score file
/// `{"id": <doc>, "pairs": [[i, j, score]...]}`. Missing pairs raise.
void score_pairs_from_file(std::vector<SentencePair>& pairs,
                           const std::string& score_jsonl_path);

/// Stand-in pair scorer: classify_head probability over pair features from
/// per-sentence embeddings keyed "<doc_id>:<sentence_id>".
void score_pairs_with_model(std::vector<SentencePair>& pairs,
                            const MlpModel& model,
                            const EmbeddingSpace& sentence_embeddings);

/// concat(|e_i - e_j|, e_i * e_j, cos(e_i, e_j)) — 2d+1 features.
std::vector<double> pair_features(std::span<const float> ei,
                                  std::span<const float> ej);

// Single-link greedy clustering: pairs sorted by descending score (ties by
// ascending (i, j)), union-find merge for every pair scoring strictly above
// the threshold. Unmerged sentences stay singletons. The sentence universe
// is the set of ids occurring in the pairs, so the input order never
// matters. All pairs must belong to one document and be scored.
Clustering greedy_cluster(std::span<const SentencePair> pairs,
                          const ClusterParams& params);

/// Per-document greedy_cluster over a mixed pair set; documents keep their
/// first-seen order.
std::vector<Clustering> cluster_all(std::span<const SentencePair> pairs,
                                    const ClusterParams& params);

/// The document's gold event_clusters as a Clustering.
Clustering gold_clustering(const Document& doc);

/// Reads clusterings from JSONL under the given array field
/// ("event_clusters" for gold files, "pred_clusters" for predictions).
std::vector<Clustering> load_clusters_jsonl(const std::string& path,
                                            const std::string& field);
void write_predictions_jsonl(std::span<const Clustering> clusterings,
                             const std::string& path);

std::vector<SentencePair> load_pair_scores_jsonl(const std::string& path);
void write_pair_scores_jsonl(std::span<const SentencePair> pairs,
                             const std::string& path);

}  // namespace xlingevent
