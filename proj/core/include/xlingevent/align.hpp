#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xlingevent/csls.hpp"
#include "xlingevent/embedding.hpp"

namespace xlingevent {

// Orthogonal linear map from source to target embedding space, stored
// row-major; y = W x maps a source vector into target coordinates.
struct MappingMatrix {
  std::vector<double> w;
  int dim = 0;
  std::string src_lang;
  std::string tgt_lang;

  double at(int i, int j) const {
    return w[static_cast<std::size_t>(i) * dim + j];
  }
};

struct SeedDictionary {
  enum class Source { IdenticalStrings, File, Induced };
  std::vector<std::pair<std::string, std::string>> pairs;  // (src, tgt)
  Source source = Source::File;
};

/// ||W^T W - I||_F, the orthogonality defect. Valid mappings keep it < 1e-4.
double orthogonality_error(const MappingMatrix& m);

/// y = W x in double precision.
std::vector<double> apply_mapping(const MappingMatrix& m,
                                  std::span<const float> x);

/// Identical-strings seed dictionary (case-sensitive by default).
SeedDictionary identical_seed(const EmbeddingSpace& src,
                              const EmbeddingSpace& tgt,
                              bool lowercase_fold = false);

/// `src<TAB>tgt` pairs, one per line. Duplicates are dropped.
SeedDictionary load_seed_tsv(const std::string& path);

/// Drops pairs whose words are missing from either vocabulary; the dropped
/// count is reported through *dropped when given.
SeedDictionary restrict_to_vocab(const SeedDictionary& dict,
                                 const EmbeddingSpace& src,
                                 const EmbeddingSpace& tgt,
                                 std::size_t* dropped = nullptr);

// Least-squares optimal orthogonal map over the dictionary pairs:
// W = U V^T from the SVD of Y X^T. Both spaces must be normalized. Raises
// on an empty dictionary; warns when |dict| < dim.
MappingMatrix procrustes_solve(const EmbeddingSpace& src,
                               const EmbeddingSpace& tgt,
                               const SeedDictionary& dict);

/// Mutual CSLS nearest-neighbor pairs under the current mapping (the
/// refinement dictionary). May be empty only for empty vocabularies.
SeedDictionary induce_dictionary_csls(const EmbeddingSpace& src,
                                      const EmbeddingSpace& tgt,
                                      const MappingMatrix& w,
                                      const CslsParams& params);

/// Observer called after every Procrustes solve during refinement
/// (iteration 0 is the seed solve).
using RefineObserver = std::function<void(int iteration, const MappingMatrix&)>;

// Alternates induce_dictionary_csls and procrustes_solve `iterations` times
// starting from the seed solve. Stops early (with a warning) if an induced
// dictionary comes back empty. iterations = 0 is a plain seed solve.
MappingMatrix refine_mapping(const EmbeddingSpace& src,
                             const EmbeddingSpace& tgt,
                             const SeedDictionary& seed, int iterations,
                             const CslsParams& params,
                             const RefineObserver& observer = nullptr);

/// Mapping file: header `d`, then d rows of d floats (full precision).
void save_mapping(const MappingMatrix& m, const std::string& path);
MappingMatrix load_mapping(const std::string& path);

}  // namespace xlingevent
