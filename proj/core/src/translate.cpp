#include "xlingevent/translate.hpp"

#include <cstdint>
#include <unordered_map>

#include "xlingevent/error.hpp"
#include "xlingevent/parallel.hpp"

namespace xlingevent {

namespace {

constexpr const char* kOovMarker = "<unk>";

// Decodes one UTF-8 codepoint; returns false on malformed input.
bool next_codepoint(const std::string& s, std::size_t& pos, char32_t& cp) {
  if (pos >= s.size()) return false;
  const auto byte = static_cast<unsigned char>(s[pos]);
  std::size_t len = 0;
  if (byte < 0x80) {
    cp = byte;
    len = 1;
  } else if ((byte & 0xE0) == 0xC0) {
    cp = byte & 0x1F;
    len = 2;
  } else if ((byte & 0xF0) == 0xE0) {
    cp = byte & 0x0F;
    len = 3;
  } else if ((byte & 0xF8) == 0xF0) {
    cp = byte & 0x07;
    len = 4;
  } else {
    return false;
  }
  if (pos + len > s.size()) return false;
  for (std::size_t i = 1; i < len; ++i) {
    const auto cont = static_cast<unsigned char>(s[pos + i]);
    if ((cont & 0xC0) != 0x80) return false;
    cp = (cp << 6) | (cont & 0x3F);
  }
  pos += len;
  return true;
}

// Punctuation codepoints: ASCII category-P plus the common Latin-1, general,
// CJK and fullwidth punctuation blocks. Not the full Unicode table.
bool is_punct_codepoint(char32_t cp) {
  if (cp < 0x80) {
    switch (cp) {
      case '!': case '"': case '#': case '%': case '&': case '\'':
      case '(': case ')': case '*': case ',': case '-': case '.':
      case '/': case ':': case ';': case '?': case '@': case '[':
      case '\\': case ']': case '_': case '{': case '}':
        return true;
      default:
        return false;
    }
  }
  if (cp == 0xA1 || cp == 0xA7 || cp == 0xAB || cp == 0xB6 || cp == 0xB7 ||
      cp == 0xBB || cp == 0xBF)
    return true;
  if (cp >= 0x2010 && cp <= 0x2027) return true;
  if (cp >= 0x2030 && cp <= 0x205E) return true;
  if ((cp >= 0x3001 && cp <= 0x3003) || (cp >= 0x3008 && cp <= 0x3011) ||
      (cp >= 0x3014 && cp <= 0x301F) || cp == 0x30FB)
    return true;
  if ((cp >= 0xFF01 && cp <= 0xFF03) || (cp >= 0xFF05 && cp <= 0xFF0A) ||
      (cp >= 0xFF0C && cp <= 0xFF0F) || cp == 0xFF1A || cp == 0xFF1B ||
      cp == 0xFF1F || cp == 0xFF20 || (cp >= 0xFF3B && cp <= 0xFF3D) ||
      cp == 0xFF3F || cp == 0xFF5B || cp == 0xFF5D)
    return true;
  return false;
}

}  // namespace

bool is_punctuation_token(const std::string& token) {
  if (token.empty()) return false;
  std::size_t pos = 0;
  char32_t cp = 0;
  while (pos < token.size()) {
    if (!next_codepoint(token, pos, cp)) return false;
    if (!is_punct_codepoint(cp)) return false;
  }
  return true;
}

bool is_numeral_token(const std::string& token) {
  if (token.empty()) return false;
  for (char c : token)
    if (c < '0' || c > '9') return false;
  return true;
}

WordTranslator::WordTranslator(const EmbeddingSpace& src,
                               const EmbeddingSpace& tgt,
                               const MappingMatrix& w,
                               const CslsParams& params,
                               const TranslationPolicy& policy)
    : index_(src, tgt, w, params),
      policy_(policy),
      src_lang_(w.src_lang),
      tgt_lang_(w.tgt_lang) {}

TranslationResult WordTranslator::translate_word(
    const std::string& word) const {
  if (policy_.punct_passthrough && is_punctuation_token(word))
    return {word, Provenance::Passthrough};
  if (policy_.numeral_passthrough && is_numeral_token(word))
    return {word, Provenance::Passthrough};

  const auto src_idx = index_.src().find(word);
  if (!src_idx) {
    switch (policy_.oov_action) {
      case OovAction::Mark:
        return {kOovMarker, Provenance::Oov};
      case OovAction::Drop:
        return {std::string{}, Provenance::Oov};
      case OovAction::CopyThrough:
      default:
        return {word, Provenance::Oov};
    }
  }
  const int best = index_.best_target(*src_idx);
  return {index_.tgt().words[static_cast<std::size_t>(best)],
          Provenance::Csls};
}

Corpus WordTranslator::translate_corpus(const Corpus& corpus) const {
  // One CSLS retrieval per distinct surface; sentence assembly reuses it.
  std::vector<std::string> unique_words;
  std::unordered_map<std::string, std::size_t> word_slot;
  for (const auto& doc : corpus.documents) {
    if (!doc.language.empty() && !src_lang_.empty() &&
        doc.language != src_lang_)
      throw DataError("translate_corpus: document " + doc.doc_id +
                      " has language '" + doc.language +
                      "' but the mapping source is '" + src_lang_ + "'");
    for (const auto& sentence : doc.sentences)
      for (const auto& tok : sentence.tokens) {
        if (!tok.tag)
          throw DataError("translate_corpus: untagged token \"" + tok.surface +
                          "\" in doc " + doc.doc_id + ", sentence " +
                          std::to_string(sentence.sentence_id));
        if (word_slot.emplace(tok.surface, unique_words.size()).second)
          unique_words.push_back(tok.surface);
      }
  }

  std::vector<TranslationResult> translations(unique_words.size());
  parallel_for(unique_words.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      translations[i] = translate_word(unique_words[i]);
  });

  Corpus out;
  out.languages = corpus.languages;
  for (const auto& doc : corpus.documents) {
    Document new_doc;
    new_doc.doc_id = doc.doc_id;
    new_doc.label = doc.label;
    new_doc.event_clusters = doc.event_clusters;
    new_doc.language = tgt_lang_.empty() ? doc.language : tgt_lang_;
    for (const auto& sentence : doc.sentences) {
      Sentence new_sentence;
      new_sentence.sentence_id = sentence.sentence_id;
      for (const auto& tok : sentence.tokens) {
        const auto& tr = translations[word_slot.at(tok.surface)];
        if (tr.word.empty() && policy_.oov_action == OovAction::Drop)
          continue;  // dropped together with its tag
        new_sentence.tokens.push_back(Token{tr.word, tok.tag});
      }
      new_doc.sentences.push_back(std::move(new_sentence));
    }
    out.documents.push_back(std::move(new_doc));
  }
  if (!tgt_lang_.empty()) {
    out.languages.clear();
    for (const auto& doc : out.documents)
      if (!doc.language.empty()) out.languages.insert(doc.language);
  }
  return out;
}

}  // namespace xlingevent
