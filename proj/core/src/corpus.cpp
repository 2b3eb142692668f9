#include "xlingevent/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "xlingevent/bio.hpp"
#include "xlingevent/error.hpp"
#include "xlingevent/rng.hpp"

namespace xlingevent {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  return in;
}

std::ofstream create_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot create file: " + path);
  return out;
}

[[noreturn]] void line_error(const std::string& path, std::size_t line,
                             const std::string& what) {
  throw DataError(path + ":" + std::to_string(line) + ": " + what);
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

int require_binary_label(const json& j, const std::string& path,
                         std::size_t line) {
  if (!j.is_number_integer()) line_error(path, line, "label must be 0 or 1");
  int v = j.get<int>();
  if (v != 0 && v != 1) line_error(path, line, "label must be 0 or 1");
  return v;
}

void validate_event_clusters(const Document& doc, const std::string& path,
                             std::size_t line) {
  if (!doc.event_clusters) return;
  std::set<int> known;
  for (const auto& s : doc.sentences) known.insert(s.sentence_id);
  std::set<int> seen;
  for (const auto& cluster : *doc.event_clusters) {
    for (int id : cluster) {
      if (!known.count(id))
        line_error(path, line,
                   "event cluster references unknown sentence id " +
                       std::to_string(id));
      if (!seen.insert(id).second)
        line_error(path, line,
                   "sentence id " + std::to_string(id) +
                       " appears in more than one event cluster");
    }
  }
}

Document parse_record(const json& j, RecordKind kind, const std::string& path,
                      std::size_t line) {
  if (!j.is_object()) line_error(path, line, "record is not a JSON object");
  if (!j.contains("id") || !j.at("id").is_string())
    line_error(path, line, "missing string field \"id\"");

  Document doc;
  doc.doc_id = j.at("id").get<std::string>();
  if (j.contains("lang") && j.at("lang").is_string())
    doc.language = j.at("lang").get<std::string>();

  switch (kind) {
    case RecordKind::DocLabel:
    case RecordKind::SentLabel: {
      const char* text_field =
          kind == RecordKind::SentLabel ? "sentence" : "text";
      std::string text;
      if (j.contains(text_field)) {
        if (!j.at(text_field).is_string())
          line_error(path, line, std::string("field \"") + text_field +
                                     "\" must be a string");
        text = j.at(text_field).get<std::string>();
      } else if (j.contains("text") && j.at("text").is_string()) {
        text = j.at("text").get<std::string>();
      }
      if (!text.empty()) {
        Sentence s;
        s.sentence_id = 0;
        s.text = text;
        doc.sentences.push_back(std::move(s));
      }
      if (j.contains("label"))
        doc.label = require_binary_label(j.at("label"), path, line);
      break;
    }
    case RecordKind::Coref: {
      if (!j.contains("sentence_no") || !j.at("sentence_no").is_array())
        line_error(path, line, "missing array field \"sentence_no\"");
      if (!j.contains("sentences") || !j.at("sentences").is_array())
        line_error(path, line, "missing array field \"sentences\"");
      const auto& nos = j.at("sentence_no");
      const auto& texts = j.at("sentences");
      if (nos.size() != texts.size())
        line_error(path, line, "sentence_no and sentences differ in length");
      std::set<int> seen_ids;
      for (std::size_t i = 0; i < nos.size(); ++i) {
        if (!nos[i].is_number_integer())
          line_error(path, line, "sentence_no entries must be integers");
        Sentence s;
        s.sentence_id = nos[i].get<int>();
        if (s.sentence_id < 0)
          line_error(path, line, "sentence ids must be >= 0");
        if (!seen_ids.insert(s.sentence_id).second)
          line_error(path, line, "duplicate sentence id " +
                                     std::to_string(s.sentence_id));
        if (!texts[i].is_string())
          line_error(path, line, "sentences entries must be strings");
        s.text = texts[i].get<std::string>();
        doc.sentences.push_back(std::move(s));
      }
      if (j.contains("event_clusters")) {
        if (!j.at("event_clusters").is_array())
          line_error(path, line, "event_clusters must be an array of arrays");
        std::vector<std::vector<int>> clusters;
        for (const auto& c : j.at("event_clusters")) {
          if (!c.is_array())
            line_error(path, line, "event_clusters must be an array of arrays");
          std::vector<int> ids;
          for (const auto& e : c) {
            if (!e.is_number_integer())
              line_error(path, line, "cluster entries must be integers");
            ids.push_back(e.get<int>());
          }
          clusters.push_back(std::move(ids));
        }
        doc.event_clusters = std::move(clusters);
        validate_event_clusters(doc, path, line);
      }
      if (j.contains("label"))
        doc.label = require_binary_label(j.at("label"), path, line);
      break;
    }
  }
  return doc;
}

void finalize_corpus(Corpus& corpus, const std::string& path) {
  std::set<std::string> ids;
  for (const auto& doc : corpus.documents) {
    if (!ids.insert(doc.doc_id).second)
      throw DataError(path + ": duplicate doc id \"" + doc.doc_id + "\"");
    if (!doc.language.empty()) corpus.languages.insert(doc.language);
  }
}

}  // namespace

Corpus load_jsonl_docs(const std::string& path, RecordKind kind) {
  std::ifstream in = open_or_throw(path);
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      line_error(path, line_no, std::string("malformed JSON: ") + e.what());
    }
    corpus.documents.push_back(parse_record(j, kind, path, line_no));
  }
  finalize_corpus(corpus, path);
  return corpus;
}

void write_jsonl_docs(const Corpus& corpus, const std::string& path,
                      RecordKind kind) {
  std::ofstream out = create_or_throw(path);
  for (const auto& doc : corpus.documents) {
    ordered_json j;
    j["id"] = doc.doc_id;
    switch (kind) {
      case RecordKind::DocLabel:
      case RecordKind::SentLabel: {
        const char* text_field =
            kind == RecordKind::SentLabel ? "sentence" : "text";
        if (!doc.sentences.empty() && doc.sentences.front().text)
          j[text_field] = *doc.sentences.front().text;
        if (doc.label) j["label"] = *doc.label;
        break;
      }
      case RecordKind::Coref: {
        std::vector<int> nos;
        std::vector<std::string> texts;
        for (const auto& s : doc.sentences) {
          nos.push_back(s.sentence_id);
          texts.push_back(s.text.value_or(""));
        }
        j["sentence_no"] = nos;
        j["sentences"] = texts;
        if (doc.event_clusters) j["event_clusters"] = *doc.event_clusters;
        if (doc.label) j["label"] = *doc.label;
        break;
      }
    }
    if (!doc.language.empty()) j["lang"] = doc.language;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

Corpus load_conll_bio(const std::string& path, const BioScheme& scheme) {
  std::ifstream in = open_or_throw(path);
  Corpus corpus;
  Document doc;
  doc.doc_id = std::filesystem::path(path).stem().string();
  Sentence current;
  std::string line;
  std::size_t line_no = 0;
  auto flush_sentence = [&] {
    if (current.tokens.empty()) return;
    current.sentence_id = static_cast<int>(doc.sentences.size());
    doc.sentences.push_back(std::move(current));
    current = Sentence{};
  };
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) {
      flush_sentence();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      line_error(path, line_no, "expected exactly 2 tab-separated columns");
    Token tok;
    tok.surface = line.substr(0, tab);
    std::string tag = line.substr(tab + 1);
    if (tok.surface.empty()) line_error(path, line_no, "empty token surface");
    if (tag.empty()) line_error(path, line_no, "empty tag");
    if (!scheme.index_of(tag))
      line_error(path, line_no,
                 "tag \"" + tag + "\" outside scheme (sentence " +
                     std::to_string(doc.sentences.size()) + ", token " +
                     std::to_string(current.tokens.size()) + ")");
    tok.tag = std::move(tag);
    current.tokens.push_back(std::move(tok));
  }
  flush_sentence();
  if (!doc.sentences.empty()) corpus.documents.push_back(std::move(doc));
  return corpus;
}

void write_conll_bio(const Corpus& corpus, const std::string& path) {
  std::ofstream out = create_or_throw(path);
  bool first = true;
  for (const auto& doc : corpus.documents) {
    for (const auto& sentence : doc.sentences) {
      if (!first) out << '\n';
      first = false;
      for (const auto& tok : sentence.tokens) {
        if (!tok.tag)
          throw DataError("untagged token \"" + tok.surface + "\" in doc " +
                          doc.doc_id + ", sentence " +
                          std::to_string(sentence.sentence_id));
        out << tok.surface << '\t' << *tok.tag << '\n';
      }
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

Corpus load_token_file(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  Corpus corpus;
  Document doc;
  doc.doc_id = std::filesystem::path(path).stem().string();
  Sentence current;
  std::string line;
  std::size_t line_no = 0;
  auto flush_sentence = [&] {
    if (current.tokens.empty()) return;
    current.sentence_id = static_cast<int>(doc.sentences.size());
    doc.sentences.push_back(std::move(current));
    current = Sentence{};
  };
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) {
      flush_sentence();
      continue;
    }
    Token tok;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      tok.surface = line;
    } else {
      tok.surface = line.substr(0, tab);
      std::string tag = line.substr(tab + 1);
      if (!tag.empty()) tok.tag = std::move(tag);
    }
    if (tok.surface.empty()) line_error(path, line_no, "empty token surface");
    current.tokens.push_back(std::move(tok));
  }
  flush_sentence();
  if (!doc.sentences.empty()) corpus.documents.push_back(std::move(doc));
  return corpus;
}

std::pair<Corpus, Corpus> split_train_valid(const Corpus& corpus,
                                            const SplitConfig& cfg) {
  if (cfg.train_fraction <= 0.0 || cfg.train_fraction >= 1.0)
    throw UsageError("train_fraction must be in (0, 1)");
  const std::size_t n = corpus.documents.size();
  if (n < 2) throw DataError("cannot split a corpus with fewer than 2 documents");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(cfg.seed);
  rng.shuffle(order);

  auto n_train = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * cfg.train_fraction));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  std::vector<bool> in_train(n, false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;

  Corpus train, valid;
  for (std::size_t i = 0; i < n; ++i) {
    const Document& doc = corpus.documents[i];
    Corpus& side = in_train[i] ? train : valid;
    side.documents.push_back(doc);
    if (!doc.language.empty()) side.languages.insert(doc.language);
  }
  return {std::move(train), std::move(valid)};
}

Corpus combine_corpora(const std::vector<Corpus>& corpora) {
  Corpus combined;
  std::set<std::string> used_ids;
  for (const auto& corpus : corpora) {
    combined.languages.insert(corpus.languages.begin(), corpus.languages.end());
    for (Document doc : corpus.documents) {
      const std::string lang = doc.language.empty() ? "und" : doc.language;
      std::string id = lang + ":" + doc.doc_id;
      if (used_ids.count(id)) {
        int suffix = 2;
        while (used_ids.count(id + "#" + std::to_string(suffix))) ++suffix;
        id += "#" + std::to_string(suffix);
      }
      used_ids.insert(id);
      doc.doc_id = std::move(id);
      if (!doc.language.empty()) combined.languages.insert(doc.language);
      combined.documents.push_back(std::move(doc));
    }
  }
  return combined;
}

CorpusFormat detect_format(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (is_blank(line)) continue;
    if (line.front() != '{') return CorpusFormat::Bio;
    try {
      json j = json::parse(line);
      if (j.contains("sentence_no") || j.contains("event_clusters"))
        return CorpusFormat::Coref;
      if (j.contains("sentence")) return CorpusFormat::SentLabel;
      return CorpusFormat::DocLabel;
    } catch (const json::parse_error&) {
      throw DataError(path + ":1: cannot detect format (malformed JSON)");
    }
  }
  return CorpusFormat::Bio;  // empty file: treat as an empty BIO corpus
}

Corpus load_corpus(const std::string& path, CorpusFormat format,
                   const BioScheme* scheme) {
  switch (format) {
    case CorpusFormat::DocLabel:
      return load_jsonl_docs(path, RecordKind::DocLabel);
    case CorpusFormat::SentLabel:
      return load_jsonl_docs(path, RecordKind::SentLabel);
    case CorpusFormat::Coref:
      return load_jsonl_docs(path, RecordKind::Coref);
    case CorpusFormat::Bio: {
      BioScheme fallback;
      if (!scheme) fallback = BioScheme::default_scheme();
      return load_conll_bio(path, scheme ? *scheme : fallback);
    }
  }
  throw UsageError("unknown corpus format");
}

void write_corpus(const Corpus& corpus, const std::string& path,
                  CorpusFormat format) {
  switch (format) {
    case CorpusFormat::DocLabel:
      write_jsonl_docs(corpus, path, RecordKind::DocLabel);
      return;
    case CorpusFormat::SentLabel:
      write_jsonl_docs(corpus, path, RecordKind::SentLabel);
      return;
    case CorpusFormat::Coref:
      write_jsonl_docs(corpus, path, RecordKind::Coref);
      return;
    case CorpusFormat::Bio:
      write_conll_bio(corpus, path);
      return;
  }
  throw UsageError("unknown corpus format");
}

bool same_token_content(const Corpus& a, const Corpus& b) {
  auto flatten = [](const Corpus& c) {
    std::vector<const Sentence*> out;
    for (const auto& doc : c.documents)
      for (const auto& s : doc.sentences) out.push_back(&s);
    return out;
  };
  const auto sa = flatten(a);
  const auto sb = flatten(b);
  if (sa.size() != sb.size()) return false;
  for (std::size_t i = 0; i < sa.size(); ++i)
    if (sa[i]->tokens != sb[i]->tokens) return false;
  return true;
}

}  // namespace xlingevent
