#include "xlingevent/align.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include "svd.hpp"
#include "xlingevent/error.hpp"
#include "xlingevent/parallel.hpp"

namespace xlingevent {

double orthogonality_error(const MappingMatrix& m) {
  const int d = m.dim;
  double err_sq = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += m.at(k, i) * m.at(k, j);  // (W^T W)_ij
      const double target = i == j ? 1.0 : 0.0;
      const double diff = acc - target;
      err_sq += diff * diff;
    }
  }
  return std::sqrt(err_sq);
}

std::vector<double> apply_mapping(const MappingMatrix& m,
                                  std::span<const float> x) {
  if (x.size() != static_cast<std::size_t>(m.dim))
    throw UsageError("apply_mapping: dimension mismatch");
  std::vector<double> y(m.dim);
  for (int i = 0; i < m.dim; ++i) {
    double acc = 0.0;
    const double* row = m.w.data() + static_cast<std::size_t>(i) * m.dim;
    for (int j = 0; j < m.dim; ++j) acc += row[j] * static_cast<double>(x[j]);
    y[i] = acc;
  }
  return y;
}

SeedDictionary identical_seed(const EmbeddingSpace& src,
                              const EmbeddingSpace& tgt, bool lowercase_fold) {
  SeedDictionary dict;
  dict.pairs = identical_string_pairs(src, tgt, lowercase_fold);
  dict.source = SeedDictionary::Source::IdenticalStrings;
  return dict;
}

SeedDictionary load_seed_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  SeedDictionary dict;
  dict.source = SeedDictionary::Source::File;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected `src<TAB>tgt`");
    std::pair<std::string, std::string> pair{line.substr(0, tab),
                                             line.substr(tab + 1)};
    if (seen.insert(pair).second) dict.pairs.push_back(std::move(pair));
  }
  return dict;
}

SeedDictionary restrict_to_vocab(const SeedDictionary& dict,
                                 const EmbeddingSpace& src,
                                 const EmbeddingSpace& tgt,
                                 std::size_t* dropped) {
  SeedDictionary out;
  out.source = dict.source;
  std::size_t missing = 0;
  for (const auto& pair : dict.pairs) {
    if (src.find(pair.first) && tgt.find(pair.second))
      out.pairs.push_back(pair);
    else
      ++missing;
  }
  if (dropped) *dropped = missing;
  return out;
}

MappingMatrix procrustes_solve(const EmbeddingSpace& src,
                               const EmbeddingSpace& tgt,
                               const SeedDictionary& dict) {
  if (!src.normalized || !tgt.normalized)
    throw UsageError("procrustes_solve requires normalized spaces");
  if (src.dim != tgt.dim)
    throw UsageError("procrustes_solve: spaces differ in dimension");
  if (dict.pairs.empty())
    throw DataError("procrustes_solve: empty seed dictionary");
  const int d = src.dim;
  if (dict.pairs.size() < static_cast<std::size_t>(d))
    std::cerr << "warning: seed dictionary has " << dict.pairs.size()
              << " pairs, fewer than the embedding dimension " << d << "\n";

  // M = Y X^T accumulated over the dictionary pairs (column vectors).
  std::vector<double> m(static_cast<std::size_t>(d) * d, 0.0);
  for (const auto& [sw, tw] : dict.pairs) {
    const auto si = src.find(sw);
    const auto ti = tgt.find(tw);
    if (!si || !ti)
      throw DataError("procrustes_solve: dictionary word missing from space: " +
                      sw + " / " + tw);
    const auto x = src.row(static_cast<std::size_t>(*si));
    const auto y = tgt.row(static_cast<std::size_t>(*ti));
    for (int i = 0; i < d; ++i) {
      const double yi = static_cast<double>(y[i]);
      double* row = m.data() + static_cast<std::size_t>(i) * d;
      for (int j = 0; j < d; ++j) row[j] += yi * static_cast<double>(x[j]);
    }
  }

  const auto svd = detail::svd_square_jacobi(m, d);

  MappingMatrix mapping;
  mapping.dim = d;
  mapping.w.assign(static_cast<std::size_t>(d) * d, 0.0);
  // W = U V^T
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k)
        acc += svd.u[static_cast<std::size_t>(i) * d + k] *
               svd.v[static_cast<std::size_t>(j) * d + k];
      mapping.w[static_cast<std::size_t>(i) * d + j] = acc;
    }
  return mapping;
}

SeedDictionary induce_dictionary_csls(const EmbeddingSpace& src,
                                      const EmbeddingSpace& tgt,
                                      const MappingMatrix& w,
                                      const CslsParams& params) {
  SeedDictionary dict;
  dict.source = SeedDictionary::Source::Induced;
  if (src.size() == 0 || tgt.size() == 0) return dict;
  CslsIndex index(src, tgt, w, params);
  for (const auto& [s, t] : index.mutual_nn_pairs())
    dict.pairs.emplace_back(src.words[s], tgt.words[t]);
  return dict;
}

MappingMatrix refine_mapping(const EmbeddingSpace& src,
                             const EmbeddingSpace& tgt,
                             const SeedDictionary& seed, int iterations,
                             const CslsParams& params,
                             const RefineObserver& observer) {
  if (iterations < 0) throw UsageError("refine_mapping: iterations must be >= 0");
  MappingMatrix w = procrustes_solve(src, tgt, seed);
  if (observer) observer(0, w);
  for (int it = 1; it <= iterations; ++it) {
    SeedDictionary induced = induce_dictionary_csls(src, tgt, w, params);
    if (induced.pairs.empty()) {
      std::cerr << "warning: refinement iteration " << it
                << " induced an empty dictionary; stopping early\n";
      break;
    }
    w = procrustes_solve(src, tgt, induced);
    if (observer) observer(it, w);
  }
  return w;
}

void save_mapping(const MappingMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot create file: " + path);
  out << m.dim << '\n';
  char buf[64];
  for (int i = 0; i < m.dim; ++i) {
    for (int j = 0; j < m.dim; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m.at(i, j));
      out << (j == 0 ? "" : " ") << buf;
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

MappingMatrix load_mapping(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  MappingMatrix m;
  if (!(in >> m.dim) || m.dim <= 0)
    throw DataError(path + ": expected header line `d`");
  m.w.resize(static_cast<std::size_t>(m.dim) * m.dim);
  for (double& v : m.w)
    if (!(in >> v)) throw DataError(path + ": truncated mapping matrix");
  const double err = orthogonality_error(m);
  if (err >= 1e-4)
    throw DataError(path + ": mapping is not orthogonal (||W^T W - I||_F = " +
                    std::to_string(err) + ")");
  return m;
}

}  // namespace xlingevent
