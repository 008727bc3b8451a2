#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clear/corpus.hpp"
#include "clear/error.hpp"
#include "clear/textproc.hpp"
#include "clear/unicode.hpp"

namespace clear {

// ---------------------------------------------------------------------------
// Lexicon-based English sentiment

struct SentimentScore {
  double polarity = 0.0;
  double subjectivity = 0.0;
};

class SentimentLexicon {
 public:
  struct Entry {
    double polarity = 0.0;
    double subjectivity = 0.0;
  };

  SentimentLexicon() = default;
  explicit SentimentLexicon(std::unordered_map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  // TSV: word<TAB>polarity<TAB>subjectivity. '#' lines are comments.
  static SentimentLexicon from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sentiment lexicon: " + path);
    std::unordered_map<std::string, Entry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::istringstream fields(line);
      std::string word, pol, subj;
      if (!std::getline(fields, word, '\t') || !std::getline(fields, pol, '\t') || !std::getline(fields, subj, '\t'))
        throw ParseError(path + ":" + std::to_string(line_no) + ": expected word<TAB>polarity<TAB>subjectivity");
      try {
        entries[unicode::lowercase(word)] = {std::stod(pol), std::stod(subj)};
      } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": non-numeric score");
      }
    }
    return SentimentLexicon(std::move(entries));
  }

  const Entry* find(const std::string& word) const {
    auto it = entries_.find(word);
    return it == entries_.end() ? nullptr : &it->second;
  }
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, Entry> entries_;
};

namespace detail {

inline bool is_negator(std::string_view w) {
  return w == "not" || w == "never" || w == "no" || w == "n't" || w.ends_with("n't") || w.ends_with("n’t");
}

inline bool is_intensifier(std::string_view w) { return w == "very" || w == "extremely" || w == "really"; }

}  // namespace detail

// Mean (polarity, subjectivity) over lexicon words. A negator among the three
// preceding words multiplies polarity by -0.5; an intensifier directly before
// the word multiplies it by 1.3, clamped to [-1, 1].
inline SentimentScore english_sentiment(std::string_view text, const SentimentLexicon& lexicon) {
  std::vector<std::string> words;
  for (const auto& t : tokenize(text))
    if (t.is_word) words.push_back(unicode::lowercase(t.surface));
  double pol = 0.0, subj = 0.0;
  int matched = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    if (detail::is_negator(w) || detail::is_intensifier(w)) continue;
    const auto* e = lexicon.find(w);
    if (!e) continue;
    double p = e->polarity;
    for (std::size_t back = 1; back <= 3 && back <= i; ++back) {
      if (detail::is_negator(words[i - back])) {
        p *= -0.5;
        break;
      }
    }
    if (i > 0 && detail::is_intensifier(words[i - 1])) p = std::clamp(p * 1.3, -1.0, 1.0);
    pol += p;
    subj += e->subjectivity;
    ++matched;
  }
  if (matched == 0) return {};
  return {pol / matched, subj / matched};
}

// ---------------------------------------------------------------------------
// RST trees in bracketed form: (Relation[N][S] child child) with leaves
// (text "...").

struct RstNode {
  std::string relation;            // empty for leaves
  std::string nuclearity;          // one of 'N'/'S' per child, may be empty
  std::vector<std::size_t> children;
  std::optional<std::string> text;  // set for leaves

  bool is_leaf() const { return text.has_value(); }
};

struct RstTree {
  std::vector<RstNode> nodes;  // nodes[0] is the root

  std::size_t internal_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const RstNode& n) { return !n.is_leaf(); }));
  }
};

namespace detail {

class RstParser {
 public:
  explicit RstParser(std::string_view src) : src_(src) {}

  RstTree parse() {
    RstTree tree;
    skip_ws();
    if (pos_ >= src_.size()) fail("empty RST input");
    parse_node(tree);
    skip_ws();
    if (pos_ != src_.size()) fail("trailing content after RST tree");
    return tree;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("RST tree, offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= src_.size() || src_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string parse_string() {
    expect('"');
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
      out += src_[pos_++];
    }
    if (pos_ >= src_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  std::size_t parse_node(RstTree& tree) {
    expect('(');
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) && src_[pos_] != '[' &&
           src_[pos_] != '(' && src_[pos_] != ')')
      ++pos_;
    std::string label(src_.substr(start, pos_ - start));
    if (label.empty()) fail("missing relation label");

    std::size_t index = tree.nodes.size();
    tree.nodes.emplace_back();
    if (label == "text") {
      tree.nodes[index].text = parse_string();
      expect(')');
      return index;
    }
    std::string nuclearity;
    while (pos_ < src_.size() && src_[pos_] == '[') {
      if (pos_ + 2 >= src_.size() || src_[pos_ + 2] != ']' || (src_[pos_ + 1] != 'N' && src_[pos_ + 1] != 'S'))
        fail("malformed nuclearity marker");
      nuclearity += src_[pos_ + 1];
      pos_ += 3;
    }
    std::vector<std::size_t> children;
    for (skip_ws(); pos_ < src_.size() && src_[pos_] == '('; skip_ws()) children.push_back(parse_node(tree));
    expect(')');
    if (children.size() < 2) fail("relation '" + label + "' needs at least two children");
    if (!nuclearity.empty() && nuclearity.size() != children.size())
      fail("relation '" + label + "' has " + std::to_string(nuclearity.size()) + " nuclearity markers for " +
           std::to_string(children.size()) + " children");
    auto& node = tree.nodes[index];
    node.relation = std::move(label);
    node.nuclearity = std::move(nuclearity);
    node.children = std::move(children);
    return index;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline RstTree parse_rst(std::string_view bracketed) { return detail::RstParser(bracketed).parse(); }

// Edges on the longest root-to-leaf path.
inline int rst_depth(const RstTree& tree) {
  if (tree.nodes.empty()) return 0;
  int deepest = 0;
  std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [idx, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    for (auto c : tree.nodes[idx].children) stack.emplace_back(c, d + 1);
  }
  return deepest;
}

inline constexpr std::array<std::string_view, 17> kRstRelations{
    "Attribution", "Background",  "Cause",    "Comparison",   "Condition",  "Contrast",
    "Elaboration", "Enablement",  "Evaluation", "Explanation", "Joint",     "Manner-Means",
    "Summary",     "Temporal",    "Topic-Change", "Topic-Comment", "same-unit"};

struct RelationCounts {
  std::map<std::string, int> counts;         // every inventory label, plus unknown ones
  std::vector<std::string> unknown_labels;   // sorted, unique

  int total() const {
    int t = 0;
    for (const auto& [_, c] : counts) t += c;
    return t;
  }
};

// Labels match the inventory case-insensitively; others count under their own
// name and are listed in `unknown_labels`.
inline RelationCounts rst_relation_counts(const RstTree& tree) {
  RelationCounts out;
  for (auto r : kRstRelations) out.counts[std::string(r)] = 0;
  for (const auto& node : tree.nodes) {
    if (node.is_leaf()) continue;
    std::string label = node.relation;
    std::string lower = unicode::lowercase(label);
    bool known = false;
    for (auto r : kRstRelations) {
      if (unicode::lowercase(r) == lower) {
        label = std::string(r);
        known = true;
        break;
      }
    }
    ++out.counts[label];
    if (!known && std::find(out.unknown_labels.begin(), out.unknown_labels.end(), label) == out.unknown_labels.end())
      out.unknown_labels.push_back(label);
  }
  std::sort(out.unknown_labels.begin(), out.unknown_labels.end());
  return out;
}

// ---------------------------------------------------------------------------
// Externally computed scores

inline std::optional<double> ingest_external(const AnnotationBundle& bundle, std::string_view name) {
  auto it = bundle.external_scores.find(std::string(name));
  if (it == bundle.external_scores.end()) return std::nullopt;
  return it->second;
}

// Bundle sentiment_de, else external scores german_proba_{positive,negative,neutral}.
inline std::optional<GermanSentiment> german_sentiment(const AnnotationBundle& bundle) {
  if (bundle.sentiment_de) return bundle.sentiment_de;
  auto pos = ingest_external(bundle, "german_proba_positive");
  auto neg = ingest_external(bundle, "german_proba_negative");
  auto neu = ingest_external(bundle, "german_proba_neutral");
  if (!pos || !neg || !neu) return std::nullopt;
  return GermanSentiment{*pos, *neg, *neu};
}

}  // namespace clear
