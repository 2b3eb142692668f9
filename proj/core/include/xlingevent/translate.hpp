#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "xlingevent/align.hpp"
#include "xlingevent/corpus.hpp"
#include "xlingevent/csls.hpp"
#include "xlingevent/embedding.hpp"

namespace xlingevent {

enum class OovAction { CopyThrough, Drop, Mark };

struct TranslationPolicy {
  OovAction oov_action = OovAction::CopyThrough;
  bool punct_passthrough = true;
  bool numeral_passthrough = true;
};

enum class Provenance { Csls, Passthrough, Oov };

struct TranslationResult {
  std::string word;  // empty only under OovAction::Drop
  Provenance provenance = Provenance::Csls;
};

/// Entirely punctuation codepoints (ASCII + common Unicode punct blocks).
bool is_punctuation_token(const std::string& token);
/// All ASCII digits.
bool is_numeral_token(const std::string& token);

// Word-by-word translator: CSLS argmax retrieval in the mapped space, with
// passthrough for punctuation/numerals and a configurable OOV policy.
// Builds the CSLS caches once at construction.
class WordTranslator {
 public:
  WordTranslator(const EmbeddingSpace& src, const EmbeddingSpace& tgt,
                 const MappingMatrix& w, const CslsParams& params,
                 const TranslationPolicy& policy);

  TranslationResult translate_word(const std::string& word) const;

  // Token i of every output sentence carries the source token's tag
  // verbatim. Length is preserved except under OovAction::Drop, which
  // removes OOV tokens together with their tags.
  Corpus translate_corpus(const Corpus& corpus) const;

  const CslsIndex& index() const { return index_; }

 private:
  CslsIndex index_;
  TranslationPolicy policy_;
  std::string src_lang_;
  std::string tgt_lang_;
};

}  // namespace xlingevent
