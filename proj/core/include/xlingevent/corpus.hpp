#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace xlingevent {

struct BioScheme;

struct Token {
  std::string surface;
  std::optional<std::string> tag;  // "O", "B-<type>" or "I-<type>"

  bool operator==(const Token&) const = default;
};

struct Sentence {
  int sentence_id = 0;
  std::vector<Token> tokens;
  std::optional<std::string> text;

  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::string doc_id;
  std::vector<Sentence> sentences;
  std::optional<int> label;  // binary {0,1}
  std::optional<std::vector<std::vector<int>>> event_clusters;
  std::string language;  // ISO 639-1, empty when unknown

  bool operator==(const Document&) const = default;
};

struct Corpus {
  std::vector<Document> documents;
  std::set<std::string> languages;

  bool operator==(const Corpus&) const = default;
};

enum class RecordKind { DocLabel, SentLabel, Coref };

/// File formats handled by the generic load/write helpers below.
enum class CorpusFormat { DocLabel, SentLabel, Coref, Bio };

struct SplitConfig {
  double train_fraction = 0.8;  // 0.9 for token-level tasks
  std::uint64_t seed = 0;
};

/// One JSON object per line. kind=Coref populates event_clusters,
/// DocLabel/SentLabel populate the binary label. Malformed lines raise
/// DataError naming the line number.
Corpus load_jsonl_docs(const std::string& path, RecordKind kind);

void write_jsonl_docs(const Corpus& corpus, const std::string& path,
                      RecordKind kind);

/// Two-column `token<TAB>tag` lines, blank line between sentences. Tags are
/// checked for membership in the scheme's label set only; BIO transition
/// validity belongs to validate_bio.
Corpus load_conll_bio(const std::string& path, const BioScheme& scheme);

/// Inverse of load_conll_bio. Every token must be tagged.
void write_conll_bio(const Corpus& corpus, const std::string& path);

/// Lenient token reader for decode inputs: 1-column (token) or 2-column
/// (token<TAB>tag) lines; tags are kept verbatim but not validated.
Corpus load_token_file(const std::string& path);

/// Deterministic document-level split. Train size is round(n * fraction),
/// clamped so both sides are non-empty. Throws on corpora with < 2 documents.
std::pair<Corpus, Corpus> split_train_valid(const Corpus& corpus,
                                            const SplitConfig& cfg);

/// Concatenates corpora, prefixing each doc_id with its document's language
/// code ("und" when unknown) to keep ids unique and provenance recoverable.
Corpus combine_corpora(const std::vector<Corpus>& corpora);

/// Sniffs the on-disk format from the first non-blank line.
CorpusFormat detect_format(const std::string& path);

Corpus load_corpus(const std::string& path, CorpusFormat format,
                   const BioScheme* scheme = nullptr);
void write_corpus(const Corpus& corpus, const std::string& path,
                  CorpusFormat format);

/// Token/tag content equality, ignoring document boundaries and ids. This is
/// the round-trip identity notion for the BIO format, which stores neither.
bool same_token_content(const Corpus& a, const Corpus& b);

}  // namespace xlingevent
