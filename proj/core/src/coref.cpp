#include "xlingevent/coref.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_map>

#include <json.hpp>

#include "xlingevent/error.hpp"
#include "xlingevent/mlp.hpp"

namespace xlingevent {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::size_t find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      std::size_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

[[noreturn]] void line_error(const std::string& path, std::size_t line,
                             const std::string& what) {
  throw DataError(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::vector<int>> canonical_clusters(
    std::vector<std::vector<int>> clusters) {
  for (auto& c : clusters) std::sort(c.begin(), c.end());
  clusters.erase(std::remove_if(clusters.begin(), clusters.end(),
                                [](const auto& c) { return c.empty(); }),
                 clusters.end());
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return clusters;
}

}  // namespace

std::vector<SentencePair> make_pair_dataset(const Corpus& corpus) {
  std::vector<SentencePair> pairs;
  for (const auto& doc : corpus.documents) {
    if (!doc.event_clusters)
      throw DataError("make_pair_dataset: document " + doc.doc_id +
                      " has no event_clusters");
    std::map<int, int> cluster_of;
    for (std::size_t c = 0; c < doc.event_clusters->size(); ++c)
      for (int id : (*doc.event_clusters)[c])
        cluster_of[id] = static_cast<int>(c);
    std::vector<int> universe;
    universe.reserve(cluster_of.size());
    for (const auto& [id, _] : cluster_of) universe.push_back(id);
    for (std::size_t a = 0; a < universe.size(); ++a)
      for (std::size_t b = a + 1; b < universe.size(); ++b) {
        SentencePair p;
        p.doc_id = doc.doc_id;
        p.i = universe[a];
        p.j = universe[b];
        p.coreferential = cluster_of[p.i] == cluster_of[p.j];
        pairs.push_back(std::move(p));
      }
  }
  return pairs;
}

void score_pairs_from_file(std::vector<SentencePair>& pairs,
                           const std::string& score_jsonl_path) {
  const auto scored = load_pair_scores_jsonl(score_jsonl_path);
  std::map<std::tuple<std::string, int, int>, double> lookup;
  for (const auto& p : scored)
    lookup[{p.doc_id, p.i, p.j}] = *p.score;
  for (auto& p : pairs) {
    auto it = lookup.find({p.doc_id, p.i, p.j});
    if (it == lookup.end())
      throw DataError("missing score for pair (" + p.doc_id + ", " +
                      std::to_string(p.i) + ", " + std::to_string(p.j) + ")");
    p.score = it->second;
  }
}

std::vector<double> pair_features(std::span<const float> ei,
                                  std::span<const float> ej) {
  if (ei.size() != ej.size())
    throw UsageError("pair_features: dimension mismatch");
  std::vector<double> feats;
  feats.reserve(2 * ei.size() + 1);
  for (std::size_t d = 0; d < ei.size(); ++d)
    feats.push_back(std::abs(static_cast<double>(ei[d]) - ej[d]));
  for (std::size_t d = 0; d < ei.size(); ++d)
    feats.push_back(static_cast<double>(ei[d]) * ej[d]);
  const double ni = std::sqrt(dot_f(ei, ei));
  const double nj = std::sqrt(dot_f(ej, ej));
  feats.push_back(ni > 0.0 && nj > 0.0 ? dot_f(ei, ej) / (ni * nj) : 0.0);
  return feats;
}

void score_pairs_with_model(std::vector<SentencePair>& pairs,
                            const MlpModel& model,
                            const EmbeddingSpace& sentence_embeddings) {
  auto embedding_of = [&](const std::string& doc_id, int sid) {
    const std::string key = doc_id + ":" + std::to_string(sid);
    const auto idx = sentence_embeddings.find(key);
    if (!idx)
      throw DataError("missing sentence embedding for \"" + key + "\"");
    return sentence_embeddings.row(static_cast<std::size_t>(*idx));
  };
  for (auto& p : pairs) {
    const auto feats =
        pair_features(embedding_of(p.doc_id, p.i), embedding_of(p.doc_id, p.j));
    const auto probs = forward(model, feats);
    p.score = probs[1];  // P(coreferential)
  }
}

Clustering greedy_cluster(std::span<const SentencePair> pairs,
                          const ClusterParams& params) {
  Clustering result;
  if (pairs.empty()) return result;
  result.doc_id = pairs.front().doc_id;

  std::vector<int> universe;
  for (const auto& p : pairs) {
    if (p.doc_id != result.doc_id)
      throw UsageError("greedy_cluster: pairs span multiple documents");
    if (p.i >= p.j)
      throw UsageError("greedy_cluster: pair ids must satisfy i < j");
    if (!p.score)
      throw DataError("greedy_cluster: unscored pair (" + p.doc_id + ", " +
                      std::to_string(p.i) + ", " + std::to_string(p.j) + ")");
    universe.push_back(p.i);
    universe.push_back(p.j);
  }
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  std::unordered_map<int, std::size_t> slot;
  for (std::size_t i = 0; i < universe.size(); ++i) slot[universe[i]] = i;

  // Descending confidence, ties by ascending (i, j): a total order, so the
  // input pair order never matters.
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = pairs[a];
    const auto& pb = pairs[b];
    if (*pa.score != *pb.score) return *pa.score > *pb.score;
    if (pa.i != pb.i) return pa.i < pb.i;
    return pa.j < pb.j;
  });

  UnionFind uf(universe.size());
  for (std::size_t idx : order) {
    const auto& p = pairs[idx];
    if (*p.score > params.threshold) uf.unite(slot[p.i], slot[p.j]);
  }

  std::unordered_map<std::size_t, std::size_t> cluster_slot;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    const std::size_t root = uf.find(i);
    auto [it, inserted] = cluster_slot.emplace(root, result.clusters.size());
    if (inserted) result.clusters.emplace_back();
    result.clusters[it->second].push_back(universe[i]);
  }
  return result;
}

std::vector<Clustering> cluster_all(std::span<const SentencePair> pairs,
                                    const ClusterParams& params) {
  std::vector<std::string> doc_order;
  std::map<std::string, std::vector<SentencePair>> by_doc;
  for (const auto& p : pairs) {
    if (!by_doc.count(p.doc_id)) doc_order.push_back(p.doc_id);
    by_doc[p.doc_id].push_back(p);
  }
  std::vector<Clustering> out;
  out.reserve(doc_order.size());
  for (const auto& id : doc_order)
    out.push_back(greedy_cluster(by_doc[id], params));
  return out;
}

Clustering gold_clustering(const Document& doc) {
  if (!doc.event_clusters)
    throw DataError("gold_clustering: document " + doc.doc_id +
                    " has no event_clusters");
  Clustering c;
  c.doc_id = doc.doc_id;
  c.clusters = canonical_clusters(*doc.event_clusters);
  return c;
}

std::vector<Clustering> load_clusters_jsonl(const std::string& path,
                                            const std::string& field) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<Clustering> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      line_error(path, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.at("id").is_string())
      line_error(path, line_no, "missing string field \"id\"");
    if (!j.contains(field) || !j.at(field).is_array())
      line_error(path, line_no, "missing array field \"" + field + "\"");
    Clustering c;
    c.doc_id = j.at("id").get<std::string>();
    std::set<int> seen;
    for (const auto& cluster : j.at(field)) {
      if (!cluster.is_array())
        line_error(path, line_no, field + " must be an array of arrays");
      std::vector<int> ids;
      for (const auto& e : cluster) {
        if (!e.is_number_integer())
          line_error(path, line_no, "cluster entries must be integers");
        const int id = e.get<int>();
        if (!seen.insert(id).second)
          line_error(path, line_no,
                     "sentence id " + std::to_string(id) +
                         " appears in more than one cluster");
        ids.push_back(id);
      }
      c.clusters.push_back(std::move(ids));
    }
    c.clusters = canonical_clusters(std::move(c.clusters));
    out.push_back(std::move(c));
  }
  return out;
}

void write_predictions_jsonl(std::span<const Clustering> clusterings,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot create file: " + path);
  for (const auto& c : clusterings) {
    ordered_json j;
    j["id"] = c.doc_id;
    j["pred_clusters"] = c.clusters;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

std::vector<SentencePair> load_pair_scores_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<SentencePair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      line_error(path, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.at("id").is_string())
      line_error(path, line_no, "missing string field \"id\"");
    if (!j.contains("pairs") || !j.at("pairs").is_array())
      line_error(path, line_no, "missing array field \"pairs\"");
    const std::string doc_id = j.at("id").get<std::string>();
    std::set<std::pair<int, int>> seen;
    for (const auto& entry : j.at("pairs")) {
      if (!entry.is_array() || entry.size() != 3 ||
          !entry[0].is_number_integer() || !entry[1].is_number_integer() ||
          !entry[2].is_number())
        line_error(path, line_no, "pair entries must be [i, j, score]");
      SentencePair p;
      p.doc_id = doc_id;
      p.i = entry[0].get<int>();
      p.j = entry[1].get<int>();
      if (p.i > p.j) std::swap(p.i, p.j);
      if (p.i == p.j)
        line_error(path, line_no, "pair references the same sentence twice");
      const double score = entry[2].get<double>();
      if (!(score >= 0.0 && score <= 1.0))
        line_error(path, line_no, "score must be in [0, 1]");
      if (!seen.insert({p.i, p.j}).second)
        line_error(path, line_no,
                   "duplicate pair (" + std::to_string(p.i) + ", " +
                       std::to_string(p.j) + ")");
      p.score = score;
      out.push_back(std::move(p));
    }
  }
  return out;
}

void write_pair_scores_jsonl(std::span<const SentencePair> pairs,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot create file: " + path);
  std::vector<std::string> doc_order;
  std::map<std::string, std::vector<const SentencePair*>> by_doc;
  for (const auto& p : pairs) {
    if (!p.score)
      throw DataError("write_pair_scores_jsonl: unscored pair (" + p.doc_id +
                      ", " + std::to_string(p.i) + ", " + std::to_string(p.j) +
                      ")");
    if (!by_doc.count(p.doc_id)) doc_order.push_back(p.doc_id);
    by_doc[p.doc_id].push_back(&p);
  }
  for (const auto& id : doc_order) {
    ordered_json j;
    j["id"] = id;
    auto pairs_json = ordered_json::array();
    for (const auto* p : by_doc[id])
      pairs_json.push_back({p->i, p->j, *p->score});
    j["pairs"] = pairs_json;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace xlingevent
