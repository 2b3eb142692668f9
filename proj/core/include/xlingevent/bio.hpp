#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "xlingevent/corpus.hpp"

namespace xlingevent {

// Label inventory for one BIO tagging task. Label order is fixed: O first,
// then B-<type>, I-<type> for each entity type in declaration order. Score
// file columns follow this order.
struct BioScheme {
  std::vector<std::string> entity_types;
  std::vector<std::string> labels;
  std::unordered_map<std::string, int> label_index;

  static BioScheme from_types(std::vector<std::string> types);

  /// Scheme config file: one entity type per line, '#' starts a comment.
  static BioScheme load(const std::string& path);

  /// Event-argument types used when no scheme file is given.
  static BioScheme default_scheme();

  int num_labels() const { return static_cast<int>(labels.size()); }
  std::optional<int> index_of(const std::string& label) const;

  // Label structure helpers. type_index is -1 for "O".
  bool is_begin(int label) const { return label > 0 && (label - 1) % 2 == 0; }
  bool is_inside(int label) const { return label > 0 && (label - 1) % 2 == 1; }
  int type_index(int label) const { return label == 0 ? -1 : (label - 1) / 2; }
};

struct TransitionMask {
  int num_labels = 0;
  std::vector<std::uint8_t> allowed;       // num_labels x num_labels
  std::vector<std::uint8_t> start_allowed;  // num_labels

  bool transition_allowed(int prev, int next) const {
    return allowed[static_cast<std::size_t>(prev) * num_labels + next] != 0;
  }
};

// Per-token label log-scores, row-major T x L. All entries must be finite;
// forbidden transitions are the mask's job, not the emissions'.
struct EmissionMatrix {
  int length = 0;      // T
  int num_labels = 0;  // L
  std::vector<double> scores;

  double at(int t, int l) const {
    return scores[static_cast<std::size_t>(t) * num_labels + l];
  }
  double& at(int t, int l) {
    return scores[static_cast<std::size_t>(t) * num_labels + l];
  }
};

struct BioViolation {
  int position = 0;
  std::string rule;
};

/// Mask encoding the BIO structural constraints: I-t is reachable only from
/// B-t or I-t and never starts a sequence; O and B-t are always reachable.
TransitionMask build_transition_mask(const BioScheme& scheme);

/// Empty result iff the tag sequence is BIO-valid. Unknown labels raise.
std::vector<BioViolation> validate_bio(std::span<const std::string> tags,
                                       const BioScheme& scheme);

// Highest-scoring BIO-valid label path. Allowed transitions score 0 unless
// transition_scores is given; forbidden ones -inf. Ties resolve to the
// lexicographically smallest label-index sequence.
std::vector<int> viterbi_decode(
    const EmissionMatrix& emissions, const TransitionMask& mask,
    const std::vector<double>* transition_scores = nullptr);

std::vector<std::string> labels_of(const BioScheme& scheme,
                                   std::span<const int> path);

/// Score file: one line of L floats per token, blank line between sentences.
std::vector<EmissionMatrix> load_score_file(const std::string& path,
                                            int num_labels);

/// Tags every sentence of the corpus with the Viterbi decode of its scores.
/// Sentence/score row counts must match 1:1.
Corpus decode_corpus(const Corpus& corpus,
                     const std::vector<EmissionMatrix>& scores,
                     const BioScheme& scheme);

}  // namespace xlingevent
