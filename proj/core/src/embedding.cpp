#include "xlingevent/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>

#include "xlingevent/error.hpp"

namespace xlingevent {

namespace {

[[noreturn]] void line_error(const std::string& path, std::size_t line,
                             const std::string& what) {
  throw DataError(path + ":" + std::to_string(line) + ": " + what);
}

// Whitespace-splitting float parser; the embedding files are large enough
// that iostream extraction is a real cost.
struct FieldCursor {
  const char* p;
  const char* end;

  bool next_field(std::string_view& out) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p >= end) return false;
    const char* start = p;
    while (p < end && *p != ' ' && *p != '\t') ++p;
    out = {start, static_cast<std::size_t>(p - start)};
    return true;
  }
};

std::string ascii_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Total order for neighbor ranking: higher score first, then lower index.
struct RankedHit {
  double score;
  int idx;

  bool outranks(const RankedHit& o) const {
    if (score != o.score) return score > o.score;
    return idx < o.idx;
  }
};

template <typename DotFn>
std::vector<std::pair<int, double>> topk_scan(std::size_t n, int k,
                                              const DotFn& score_of) {
  const std::size_t kk = std::min<std::size_t>(k, n);
  // Min-heap on the ranking order: the weakest kept hit sits on top.
  std::vector<RankedHit> heap;
  heap.reserve(kk + 1);
  auto worse = [](const RankedHit& a, const RankedHit& b) {
    return a.outranks(b);
  };
  for (std::size_t i = 0; i < n; ++i) {
    RankedHit hit{score_of(i), static_cast<int>(i)};
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
            [](const RankedHit& a, const RankedHit& b) { return a.outranks(b); });
  std::vector<std::pair<int, double>> out;
  out.reserve(heap.size());
  for (const auto& h : heap) out.emplace_back(h.idx, h.score);
  return out;
}

}  // namespace

double dot_f(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

double dot_df(std::span<const double> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += a[i] * static_cast<double>(b[i]);
  return acc;
}

EmbeddingSpace load_text_embeddings(const std::string& path,
                                    std::optional<std::size_t> max_vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  ++line_no;

  std::size_t n_header = 0;
  int dim = 0;
  {
    FieldCursor cur{line.data(), line.data() + line.size()};
    std::string_view f1, f2, extra;
    if (!cur.next_field(f1) || !cur.next_field(f2) || cur.next_field(extra))
      line_error(path, line_no, "expected header line `n d`");
    auto r1 = std::from_chars(f1.data(), f1.data() + f1.size(), n_header);
    auto r2 = std::from_chars(f2.data(), f2.data() + f2.size(), dim);
    if (r1.ec != std::errc{} || r2.ec != std::errc{} || dim <= 0)
      line_error(path, line_no, "expected header line `n d`");
  }

  EmbeddingSpace space;
  space.dim = dim;
  const std::size_t cap = max_vocab ? std::min(*max_vocab, n_header) : n_header;
  space.words.reserve(cap);
  space.matrix.reserve(cap * static_cast<std::size_t>(dim));

  while (space.words.size() < cap && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    FieldCursor cur{line.data(), line.data() + line.size()};
    std::string_view word;
    if (!cur.next_field(word)) continue;

    std::vector<float> row(dim);
    for (int d = 0; d < dim; ++d) {
      std::string_view f;
      if (!cur.next_field(f))
        line_error(path, line_no,
                   "expected " + std::to_string(dim) + " values, got " +
                       std::to_string(d));
      float v = 0.0f;
      auto r = std::from_chars(f.data(), f.data() + f.size(), v);
      if (r.ec != std::errc{} || r.ptr != f.data() + f.size())
        line_error(path, line_no, "bad float value \"" + std::string(f) + "\"");
      row[d] = v;
    }
    std::string_view trailing;
    if (cur.next_field(trailing))
      line_error(path, line_no,
                 "expected " + std::to_string(dim) + " values, got more");

    std::string w(word);
    if (space.index.count(w)) {
      std::cerr << "warning: " << path << ":" << line_no << ": duplicate word \""
                << w << "\" ignored (first occurrence wins)\n";
      continue;
    }
    space.index.emplace(w, static_cast<std::int32_t>(space.words.size()));
    space.words.push_back(std::move(w));
    space.matrix.insert(space.matrix.end(), row.begin(), row.end());
  }

  if (!max_vocab && space.words.size() != n_header)
    std::cerr << "warning: " << path << ": header promised " << n_header
              << " rows, found " << space.words.size() << "\n";
  return space;
}

EmbeddingSpace normalize_rows(EmbeddingSpace space) {
  const std::size_t n = space.size();
  for (std::size_t i = 0; i < n; ++i) {
    float* row = space.matrix.data() + i * static_cast<std::size_t>(space.dim);
    double norm_sq = 0.0;
    for (int d = 0; d < space.dim; ++d)
      norm_sq += static_cast<double>(row[d]) * static_cast<double>(row[d]);
    if (norm_sq == 0.0)
      throw DataError("zero embedding row for word \"" + space.words[i] + "\"");
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (int d = 0; d < space.dim; ++d)
      row[d] = static_cast<float>(static_cast<double>(row[d]) * inv);
  }
  space.normalized = true;
  return space;
}

NeighborList knn_cosine(const EmbeddingSpace& space,
                        std::span<const float> query, int k) {
  if (!space.normalized)
    throw UsageError("knn_cosine requires a normalized space");
  if (k < 1) throw UsageError("k must be >= 1");
  if (query.size() != static_cast<std::size_t>(space.dim))
    throw UsageError("query dimension mismatch");

  auto hits = topk_scan(space.size(), k, [&](std::size_t i) {
    return dot_f(query, space.row(i));
  });
  NeighborList out;
  out.entries.reserve(hits.size());
  for (const auto& [idx, score] : hits)
    out.entries.push_back({space.words[idx], score});
  return out;
}

std::vector<std::pair<int, double>> knn_cosine_indices(
    const EmbeddingSpace& space, std::span<const double> query, int k) {
  if (!space.normalized)
    throw UsageError("knn_cosine requires a normalized space");
  if (k < 1) throw UsageError("k must be >= 1");
  return topk_scan(space.size(), k, [&](std::size_t i) {
    return dot_df(query, space.row(i));
  });
}

std::vector<std::pair<std::string, std::string>> identical_string_pairs(
    const EmbeddingSpace& src, const EmbeddingSpace& tgt,
    bool lowercase_fold) {
  std::vector<std::pair<std::string, std::string>> pairs;
  if (!lowercase_fold) {
    for (const auto& w : src.words)
      if (tgt.index.count(w)) pairs.emplace_back(w, w);
  } else {
    std::unordered_map<std::string, const std::string*> folded_tgt;
    for (const auto& w : tgt.words)
      folded_tgt.emplace(ascii_lower(w), &w);  // first occurrence wins
    for (const auto& w : src.words) {
      auto it = folded_tgt.find(ascii_lower(w));
      if (it != folded_tgt.end()) pairs.emplace_back(w, *it->second);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace xlingevent
