#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "clear/error.hpp"
#include "clear/textproc.hpp"
#include "clear/unicode.hpp"

namespace clear {

enum class Side { original, improved };

inline std::string_view to_string(Side s) { return s == Side::original ? "original" : "improved"; }

inline Side parse_side(std::string_view s) {
  if (s == "original") return Side::original;
  if (s == "improved") return Side::improved;
  throw ParseError("unknown side '" + std::string(s) + "'");
}

struct DocumentPair {
  std::string id;
  Language language = Language::en;
  std::string topic;
  std::string original;
  std::string improved;  // empty means the whole text was deleted

  const std::string& text(Side s) const { return s == Side::original ? original : improved; }
};

using Corpus = std::vector<DocumentPair>;

// ---------------------------------------------------------------------------
// Pairs file: one JSON object per line.

inline nlohmann::ordered_json pair_to_json(const DocumentPair& p) {
  return {{"id", p.id},
          {"language", to_string(p.language)},
          {"topic", p.topic},
          {"original", p.original},
          {"improved", p.improved}};
}

inline Corpus parse_pairs(std::istream& in, const std::string& source = "<stream>") {
  Corpus corpus;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where() + "malformed JSON: " + e.what());
    }
    if (!j.is_object()) throw ParseError(where() + "record is not a JSON object");
    auto get_string = [&](const char* key, bool required) -> std::string {
      auto it = j.find(key);
      if (it == j.end() || it->is_null()) {
        if (required) throw ParseError(where() + "missing field '" + key + "'");
        return {};
      }
      if (!it->is_string()) throw ParseError(where() + "field '" + key + "' must be a string");
      return it->get<std::string>();
    };
    DocumentPair p;
    p.id = get_string("id", true);
    if (p.id.empty()) throw ParseError(where() + "empty id");
    try {
      p.language = parse_language(get_string("language", true));
    } catch (const ParseError& e) {
      throw ParseError(where() + e.what());
    }
    p.topic = get_string("topic", false);
    p.original = get_string("original", true);
    if (p.original.empty()) throw ParseError(where() + "empty original text");
    p.improved = get_string("improved", true);
    if (!seen.insert(p.id).second) throw ValidationError(where() + "duplicate pair id '" + p.id + "'");
    corpus.push_back(std::move(p));
  }
  return corpus;
}

inline Corpus load_pairs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pairs file: " + path.string());
  return parse_pairs(in, path.string());
}

inline std::string serialize_pairs(const Corpus& corpus) {
  std::string out;
  for (const auto& p : corpus) {
    out += pair_to_json(p).dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annotation bundles

struct DepToken {
  std::string surface;
  std::string dep;  // lowercase label, empty when the parse is missing
  int head = -1;    // index within the sentence, -1 for root
  std::string pos;
  std::string lemma;  // optional
};

struct EnglishSentiment {
  double polarity = 0.0;
  double subjectivity = 0.0;
};

struct GermanSentiment {
  double p_pos = 0.0;
  double p_neg = 0.0;
  double p_neu = 0.0;
};

struct AnnotationBundle {
  std::string pair_id;
  Side side = Side::original;
  std::vector<Span> sentences;  // code point offsets, as stored on disk
  std::vector<std::vector<DepToken>> tokens;
  std::optional<std::vector<std::vector<double>>> embeddings;
  std::optional<EnglishSentiment> sentiment_en;
  std::optional<GermanSentiment> sentiment_de;
  std::optional<std::string> rst;
  std::optional<std::vector<std::string>> components;
  std::map<std::string, double> external_scores;

  bool has_dependencies() const {
    for (const auto& sent : tokens)
      for (const auto& t : sent)
        if (!t.dep.empty()) return true;
    return false;
  }

  // Sentence spans as byte offsets into `text`.
  std::vector<Span> byte_spans(std::string_view text) const {
    std::vector<Span> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences)
      out.push_back({unicode::byte_offset_of(text, s.start), unicode::byte_offset_of(text, s.end)});
    return out;
  }
};

// Returns the list of violated invariants; empty when the bundle is valid.
// `text_length` (code points) enables the span bounds check.
inline std::vector<std::string> validate_bundle(const AnnotationBundle& b,
                                                std::optional<std::size_t> text_length = std::nullopt) {
  std::vector<std::string> problems;
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < b.sentences.size(); ++i) {
    const auto& s = b.sentences[i];
    if (s.start >= s.end) problems.push_back("sentence " + std::to_string(i) + ": empty or inverted span");
    if (i > 0 && s.start < prev_end)
      problems.push_back("sentence " + std::to_string(i) + ": span overlaps or precedes the previous one");
    if (text_length && s.end > *text_length)
      problems.push_back("sentence " + std::to_string(i) + ": span exceeds text length " +
                         std::to_string(*text_length));
    prev_end = s.end;
  }
  if (b.tokens.size() != b.sentences.size())
    problems.push_back("token lists (" + std::to_string(b.tokens.size()) + ") != sentence spans (" +
                       std::to_string(b.sentences.size()) + ")");
  for (std::size_t i = 0; i < b.tokens.size(); ++i) {
    const int n = static_cast<int>(b.tokens[i].size());
    for (std::size_t t = 0; t < b.tokens[i].size(); ++t) {
      int h = b.tokens[i][t].head;
      if (h != -1 && (h < 0 || h >= n))
        problems.push_back("sentence " + std::to_string(i) + " token " + std::to_string(t) +
                           ": head index " + std::to_string(h) + " out of range");
    }
  }
  if (b.embeddings) {
    if (b.embeddings->size() != b.sentences.size())
      problems.push_back("embedding count != sentence count");
    std::set<std::size_t> dims;
    for (const auto& v : *b.embeddings) dims.insert(v.size());
    if (dims.count(0)) problems.push_back("embedding of dimension 0");
    if (dims.size() > 1) problems.push_back("embeddings have mixed dimensions");
  }
  if (b.sentiment_en) {
    if (!(b.sentiment_en->polarity >= -1.0 && b.sentiment_en->polarity <= 1.0))
      problems.push_back("sentiment_en.polarity outside [-1,1]");
    if (!(b.sentiment_en->subjectivity >= 0.0 && b.sentiment_en->subjectivity <= 1.0))
      problems.push_back("sentiment_en.subjectivity outside [0,1]");
  }
  if (b.sentiment_de) {
    const auto& d = *b.sentiment_de;
    for (double p : {d.p_pos, d.p_neg, d.p_neu})
      if (!(p >= 0.0 && p <= 1.0)) problems.push_back("sentiment_de probability outside [0,1]");
    if (std::abs(d.p_pos + d.p_neg + d.p_neu - 1.0) > 1e-6)
      problems.push_back("sentiment_de probabilities do not sum to 1");
  }
  if (b.components && b.components->size() != b.sentences.size())
    problems.push_back("component label count != sentence count");
  return problems;
}

inline AnnotationBundle bundle_from_json(const nlohmann::json& j) {
  AnnotationBundle b;
  try {
    b.pair_id = j.at("pair_id").get<std::string>();
    b.side = parse_side(j.at("side").get<std::string>());
    for (const auto& s : j.at("sentences")) {
      if (!s.is_array() || s.size() != 2) throw ParseError("sentence span must be [start, end]");
      auto start = s[0].get<long long>();
      auto end = s[1].get<long long>();
      if (start < 0 || end < 0) throw ParseError("negative sentence offset");
      b.sentences.push_back({static_cast<std::size_t>(start), static_cast<std::size_t>(end)});
    }
    if (auto it = j.find("tokens"); it != j.end() && !it->is_null()) {
      for (const auto& sent : *it) {
        std::vector<DepToken> toks;
        for (const auto& t : sent) {
          DepToken d;
          d.surface = t.at("surface").get<std::string>();
          d.dep = t.value("dep", std::string{});
          d.head = t.value("head", -1);
          d.pos = t.value("pos", std::string{});
          d.lemma = t.value("lemma", std::string{});
          toks.push_back(std::move(d));
        }
        b.tokens.push_back(std::move(toks));
      }
    } else {
      b.tokens.assign(b.sentences.size(), {});
    }
    if (auto it = j.find("embeddings"); it != j.end() && !it->is_null())
      b.embeddings = it->get<std::vector<std::vector<double>>>();
    if (auto it = j.find("sentiment_en"); it != j.end() && !it->is_null())
      b.sentiment_en = EnglishSentiment{it->at("polarity").get<double>(), it->at("subjectivity").get<double>()};
    if (auto it = j.find("sentiment_de"); it != j.end() && !it->is_null())
      b.sentiment_de =
          GermanSentiment{it->at("p_pos").get<double>(), it->at("p_neg").get<double>(), it->at("p_neu").get<double>()};
    if (auto it = j.find("rst"); it != j.end() && !it->is_null()) b.rst = it->get<std::string>();
    if (auto it = j.find("components"); it != j.end() && !it->is_null())
      b.components = it->get<std::vector<std::string>>();
    if (auto it = j.find("external_scores"); it != j.end() && !it->is_null())
      b.external_scores = it->get<std::map<std::string, double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("annotation bundle schema: ") + e.what());
  }
  return b;
}

inline nlohmann::ordered_json bundle_to_json(const AnnotationBundle& b) {
  nlohmann::ordered_json j;
  j["pair_id"] = b.pair_id;
  j["side"] = to_string(b.side);
  auto spans = nlohmann::ordered_json::array();
  for (const auto& s : b.sentences) spans.push_back({s.start, s.end});
  j["sentences"] = spans;
  auto toks = nlohmann::ordered_json::array();
  for (const auto& sent : b.tokens) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& t : sent) {
      nlohmann::ordered_json tj{{"surface", t.surface}, {"dep", t.dep}, {"head", t.head}, {"pos", t.pos}};
      if (!t.lemma.empty()) tj["lemma"] = t.lemma;
      arr.push_back(tj);
    }
    toks.push_back(arr);
  }
  j["tokens"] = toks;
  if (b.embeddings) j["embeddings"] = *b.embeddings;
  if (b.sentiment_en)
    j["sentiment_en"] = {{"polarity", b.sentiment_en->polarity}, {"subjectivity", b.sentiment_en->subjectivity}};
  if (b.sentiment_de)
    j["sentiment_de"] = {{"p_pos", b.sentiment_de->p_pos}, {"p_neg", b.sentiment_de->p_neg},
                         {"p_neu", b.sentiment_de->p_neu}};
  if (b.rst) j["rst"] = *b.rst;
  if (b.components) j["components"] = *b.components;
  if (!b.external_scores.empty()) j["external_scores"] = b.external_scores;
  return j;
}

inline std::filesystem::path bundle_path(const std::filesystem::path& dir, std::string_view pair_id, Side side) {
  return dir / (std::string(pair_id) + "." + std::string(to_string(side)) + ".json");
}

// std::nullopt when no bundle file exists for (pair_id, side).
inline std::optional<AnnotationBundle> load_annotations(const std::filesystem::path& dir, std::string_view pair_id,
                                                        Side side,
                                                        std::optional<std::size_t> text_length = std::nullopt) {
  auto path = bundle_path(dir, pair_id, side);
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open annotation bundle: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": malformed JSON: " + e.what());
  }
  AnnotationBundle b;
  try {
    b = bundle_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  auto problems = validate_bundle(b, text_length);
  if (b.pair_id != pair_id) problems.push_back("pair_id '" + b.pair_id + "' does not match file name");
  if (b.side != side) problems.push_back("side does not match file name");
  if (!problems.empty()) {
    std::string msg = path.string() + ": invalid annotation bundle:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ValidationError(msg);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Dataset statistics

struct DatasetStats {
  double avg_length_chars = 0.0;
  int doc_count = 0;
  double avg_sentence_count = 0.0;
  double avg_sentence_length_chars = 0.0;  // non-whitespace characters per sentence
  double avg_words_per_sentence = 0.0;
};

struct DocumentShape {
  std::size_t chars = 0;           // code points, trailing whitespace excluded
  std::size_t nonspace_chars = 0;  // code points that are not whitespace
  std::size_t sentences = 0;
  std::size_t words = 0;
};

inline DocumentShape document_shape(std::string_view text, const AbbreviationList& abbreviations = {}) {
  DocumentShape s;
  s.chars = unicode::count_code_points_rtrim(text);
  for (std::size_t i = 0; i < text.size();) {
    auto d = unicode::decode_at(text, i);
    if (!unicode::is_space(d.cp)) ++s.nonspace_chars;
    i = d.next;
  }
  auto sentences = segment_sentences(text, abbreviations);
  s.sentences = sentences.size();
  for (const auto& sent : sentences) s.words += sent.word_count();
  return s;
}

// Per-sentence averages skip documents without sentences (an empty improved
// text); length and sentence count average over every document.
inline DatasetStats dataset_stats(const Corpus& corpus, Side side, const AbbreviationList& abbreviations = {}) {
  if (corpus.empty()) throw InsufficientDataError("dataset_stats: empty corpus");
  DatasetStats st;
  st.doc_count = static_cast<int>(corpus.size());
  double len = 0, sent = 0, sent_len = 0, wps = 0;
  std::size_t with_sentences = 0;
  for (const auto& p : corpus) {
    auto shape = document_shape(p.text(side), abbreviations);
    len += static_cast<double>(shape.chars);
    sent += static_cast<double>(shape.sentences);
    if (shape.sentences > 0) {
      ++with_sentences;
      sent_len += static_cast<double>(shape.nonspace_chars) / static_cast<double>(shape.sentences);
      wps += static_cast<double>(shape.words) / static_cast<double>(shape.sentences);
    }
  }
  const double n = static_cast<double>(corpus.size());
  st.avg_length_chars = len / n;
  st.avg_sentence_count = sent / n;
  if (with_sentences > 0) {
    st.avg_sentence_length_chars = sent_len / static_cast<double>(with_sentences);
    st.avg_words_per_sentence = wps / static_cast<double>(with_sentences);
  }
  return st;
}

inline nlohmann::ordered_json to_json(const DatasetStats& s) {
  return {{"avg_length_chars", s.avg_length_chars},
          {"doc_count", s.doc_count},
          {"avg_sentence_count", s.avg_sentence_count},
          {"avg_sentence_length_chars", s.avg_sentence_length_chars},
          {"avg_words_per_sentence", s.avg_words_per_sentence}};
}

inline DatasetStats dataset_stats_from_json(const nlohmann::json& j) {
  return {j.at("avg_length_chars").get<double>(), j.at("doc_count").get<int>(), j.at("avg_sentence_count").get<double>(),
          j.at("avg_sentence_length_chars").get<double>(), j.at("avg_words_per_sentence").get<double>()};
}

}  // namespace clear
