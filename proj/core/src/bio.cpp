#include "xlingevent/bio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "xlingevent/error.hpp"
#include "xlingevent/parallel.hpp"

namespace xlingevent {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

[[noreturn]] void line_error(const std::string& path, std::size_t line,
                             const std::string& what) {
  throw DataError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

BioScheme BioScheme::from_types(std::vector<std::string> types) {
  std::set<std::string> seen;
  for (const auto& t : types) {
    if (t.empty())
      throw UsageError("BioScheme: empty entity type name");
    if (t.find_first_of(" \t") != std::string::npos)
      throw UsageError("BioScheme: entity type contains whitespace: " + t);
    if (!seen.insert(t).second)
      throw UsageError("BioScheme: duplicate entity type: " + t);
  }
  BioScheme scheme;
  scheme.entity_types = std::move(types);
  scheme.labels.push_back("O");
  for (const auto& t : scheme.entity_types) {
    scheme.labels.push_back("B-" + t);
    scheme.labels.push_back("I-" + t);
  }
  for (std::size_t i = 0; i < scheme.labels.size(); ++i)
    scheme.label_index.emplace(scheme.labels[i], static_cast<int>(i));
  return scheme;
}

BioScheme BioScheme::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<std::string> types;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    types.push_back(line.substr(first, last - first + 1));
  }
  return from_types(std::move(types));
}

BioScheme BioScheme::default_scheme() {
  return from_types({"trigger", "participant", "organizer", "place", "etime",
                     "target", "fname"});
}

std::optional<int> BioScheme::index_of(const std::string& label) const {
  auto it = label_index.find(label);
  if (it == label_index.end()) return std::nullopt;
  return it->second;
}

TransitionMask build_transition_mask(const BioScheme& scheme) {
  const int n = scheme.num_labels();
  TransitionMask mask;
  mask.num_labels = n;
  mask.allowed.assign(static_cast<std::size_t>(n) * n, 1);
  mask.start_allowed.assign(n, 1);
  for (int next = 0; next < n; ++next) {
    if (!scheme.is_inside(next)) continue;
    mask.start_allowed[next] = 0;
    const int type = scheme.type_index(next);
    for (int prev = 0; prev < n; ++prev) {
      const bool same_entity = (scheme.is_begin(prev) || scheme.is_inside(prev)) &&
                               scheme.type_index(prev) == type;
      if (!same_entity)
        mask.allowed[static_cast<std::size_t>(prev) * n + next] = 0;
    }
  }
  return mask;
}

std::vector<BioViolation> validate_bio(std::span<const std::string> tags,
                                       const BioScheme& scheme) {
  std::vector<BioViolation> violations;
  int prev = -1;
  for (std::size_t pos = 0; pos < tags.size(); ++pos) {
    const auto idx = scheme.index_of(tags[pos]);
    if (!idx)
      throw DataError("validate_bio: unknown label \"" + tags[pos] +
                      "\" at position " + std::to_string(pos));
    if (scheme.is_inside(*idx)) {
      if (pos == 0) {
        violations.push_back(
            {static_cast<int>(pos), tags[pos] + " at sequence start"});
      } else {
        const bool same_entity =
            (scheme.is_begin(prev) || scheme.is_inside(prev)) &&
            scheme.type_index(prev) == scheme.type_index(*idx);
        if (!same_entity)
          violations.push_back({static_cast<int>(pos),
                                tags[pos] + " after " + tags[pos - 1]});
      }
    }
    prev = *idx;
  }
  return violations;
}

std::vector<int> viterbi_decode(const EmissionMatrix& emissions,
                                const TransitionMask& mask,
                                const std::vector<double>* transition_scores) {
  const int T = emissions.length;
  const int L = emissions.num_labels;
  if (T < 1) throw UsageError("viterbi_decode: empty sequence");
  if (L != mask.num_labels)
    throw UsageError("viterbi_decode: emission/mask label count mismatch");
  if (transition_scores &&
      transition_scores->size() != static_cast<std::size_t>(L) * L)
    throw UsageError("viterbi_decode: transition score matrix must be LxL");

  auto trans = [&](int prev, int next) -> double {
    if (!mask.transition_allowed(prev, next)) return kNegInf;
    return transition_scores
               ? (*transition_scores)[static_cast<std::size_t>(prev) * L + next]
               : 0.0;
  };

  // Backward best-tail scores: tail[t][l] is the best score of a valid
  // suffix starting at position t with label l. Scoring front-to-back
  // decisions against precomputed tails yields the lexicographically
  // smallest optimal path.
  std::vector<double> tail(static_cast<std::size_t>(T) * L);
  for (int l = 0; l < L; ++l)
    tail[static_cast<std::size_t>(T - 1) * L + l] = emissions.at(T - 1, l);
  for (int t = T - 2; t >= 0; --t) {
    for (int l = 0; l < L; ++l) {
      double best = kNegInf;
      for (int n = 0; n < L; ++n) {
        const double step = trans(l, n);
        if (step == kNegInf) continue;
        const double cand = step + tail[static_cast<std::size_t>(t + 1) * L + n];
        if (cand > best) best = cand;
      }
      tail[static_cast<std::size_t>(t) * L + l] = emissions.at(t, l) + best;
    }
  }

  // Start: smallest label index among the maximizing valid starts.
  int current = -1;
  double best_total = kNegInf;
  for (int l = 0; l < L; ++l) {
    if (!mask.start_allowed[l]) continue;
    const double cand = tail[l];
    if (cand > best_total) {
      best_total = cand;
      current = l;
    }
  }

  std::vector<int> path;
  path.reserve(T);
  path.push_back(current);
  for (int t = 1; t < T; ++t) {
    const double needed = tail[static_cast<std::size_t>(t - 1) * L + current];
    int next = -1;
    for (int n = 0; n < L; ++n) {
      const double step = trans(current, n);
      if (step == kNegInf) continue;
      const double cand = emissions.at(t - 1, current) +
                          (step + tail[static_cast<std::size_t>(t) * L + n]);
      if (cand == needed) {
        next = n;
        break;
      }
    }
    if (next < 0)
      throw DataError("viterbi_decode: path reconstruction failed");
    current = next;
    path.push_back(current);
  }
  return path;
}

std::vector<std::string> labels_of(const BioScheme& scheme,
                                   std::span<const int> path) {
  std::vector<std::string> out;
  out.reserve(path.size());
  for (int idx : path) {
    if (idx < 0 || idx >= scheme.num_labels())
      throw UsageError("labels_of: label index out of range");
    out.push_back(scheme.labels[static_cast<std::size_t>(idx)]);
  }
  return out;
}

std::vector<EmissionMatrix> load_score_file(const std::string& path,
                                            int num_labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<EmissionMatrix> matrices;
  std::vector<double> rows;
  int row_count = 0;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (row_count == 0) return;
    EmissionMatrix em;
    em.length = row_count;
    em.num_labels = num_labels;
    em.scores = std::move(rows);
    matrices.push_back(std::move(em));
    rows = {};
    row_count = 0;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    const char* p = line.data();
    const char* end = line.data() + line.size();
    int parsed = 0;
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p >= end) break;
      const char* start = p;
      while (p < end && *p != ' ' && *p != '\t') ++p;
      double v = 0.0;
      auto r = std::from_chars(start, p, v);
      if (r.ec != std::errc{} || r.ptr != p)
        line_error(path, line_no,
                   "bad score value \"" + std::string(start, p) + "\"");
      if (!std::isfinite(v))
        line_error(path, line_no, "non-finite score value");
      if (parsed >= num_labels)
        line_error(path, line_no,
                   "expected " + std::to_string(num_labels) + " scores, got more");
      rows.push_back(v);
      ++parsed;
    }
    if (parsed != num_labels)
      line_error(path, line_no,
                 "expected " + std::to_string(num_labels) + " scores, got " +
                     std::to_string(parsed));
    ++row_count;
  }
  flush();
  return matrices;
}

Corpus decode_corpus(const Corpus& corpus,
                     const std::vector<EmissionMatrix>& scores,
                     const BioScheme& scheme) {
  std::size_t total_sentences = 0;
  for (const auto& doc : corpus.documents) total_sentences += doc.sentences.size();
  if (total_sentences != scores.size())
    throw DataError("decode_corpus: corpus has " +
                    std::to_string(total_sentences) + " sentences but " +
                    std::to_string(scores.size()) + " score blocks");

  const TransitionMask mask = build_transition_mask(scheme);

  // Collect sentence slots so decoding can run in parallel.
  Corpus out = corpus;
  std::vector<Sentence*> slots;
  slots.reserve(total_sentences);
  for (auto& doc : out.documents)
    for (auto& sentence : doc.sentences) slots.push_back(&sentence);

  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (scores[i].num_labels != scheme.num_labels())
      throw DataError("decode_corpus: score block " + std::to_string(i) +
                      " has " + std::to_string(scores[i].num_labels) +
                      " columns, scheme has " +
                      std::to_string(scheme.num_labels()));
    if (static_cast<std::size_t>(scores[i].length) != slots[i]->tokens.size())
      throw DataError("decode_corpus: sentence " +
                      std::to_string(slots[i]->sentence_id) + " has " +
                      std::to_string(slots[i]->tokens.size()) +
                      " tokens but score block has " +
                      std::to_string(scores[i].length) + " rows");
  }

  parallel_for(slots.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto path = viterbi_decode(scores[i], mask);
      for (std::size_t t = 0; t < slots[i]->tokens.size(); ++t)
        slots[i]->tokens[t].tag = scheme.labels[static_cast<std::size_t>(path[t])];
    }
  });
  return out;
}

}  // namespace xlingevent
