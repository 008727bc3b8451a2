#pragma once

// Dependency-construction counts over annotated parses. Labels follow the
// ClearNLP / spaCy English inventory; part-of-speech may be Universal
// (NOUN, VERB, ...) or Penn Treebank (NN, VBD, ...).

#include <array>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "clear/corpus.hpp"
#include "clear/error.hpp"
#include "clear/unicode.hpp"

namespace clear {

struct SyntacticProfile {
  long num_adv_mod = 0;
  long num_advcl = 0;
  long num_appos = 0;
  long num_coordNP = 0;
  long num_coordVP = 0;
  long num_coord_cl = 0;
  long num_part = 0;
  long num_prep = 0;
  long num_relcl = 0;
  long num_speech = 0;

  SyntacticProfile& operator+=(const SyntacticProfile& o) {
    num_adv_mod += o.num_adv_mod;
    num_advcl += o.num_advcl;
    num_appos += o.num_appos;
    num_coordNP += o.num_coordNP;
    num_coordVP += o.num_coordVP;
    num_coord_cl += o.num_coord_cl;
    num_part += o.num_part;
    num_prep += o.num_prep;
    num_relcl += o.num_relcl;
    num_speech += o.num_speech;
    return *this;
  }
  friend bool operator==(const SyntacticProfile&, const SyntacticProfile&) = default;
};

inline constexpr std::array<std::string_view, 10> kSyntacticMetrics{
    "num_adv_mod", "num_advcl", "num_appos", "num_coordNP", "num_coordVP",
    "num_coord_cl", "num_part", "num_prep", "num_relcl", "num_speech"};

inline long syntactic_value(const SyntacticProfile& p, std::string_view name) {
  if (name == "num_adv_mod") return p.num_adv_mod;
  if (name == "num_advcl") return p.num_advcl;
  if (name == "num_appos") return p.num_appos;
  if (name == "num_coordNP") return p.num_coordNP;
  if (name == "num_coordVP") return p.num_coordVP;
  if (name == "num_coord_cl") return p.num_coord_cl;
  if (name == "num_part") return p.num_part;
  if (name == "num_prep") return p.num_prep;
  if (name == "num_relcl") return p.num_relcl;
  if (name == "num_speech") return p.num_speech;
  throw Error("unknown syntactic metric: " + std::string(name));
}

class CommunicationVerbs {
 public:
  CommunicationVerbs()
      : lemmas_{"say", "state", "claim", "argue", "report", "believe", "think", "note", "mention", "suggest"} {}

  static CommunicationVerbs from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open communication verb list: " + path);
    CommunicationVerbs v;
    v.lemmas_.clear();
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      v.lemmas_.insert(unicode::lowercase(line));
    }
    return v;
  }

  // Accepts a lemma, or a surface form reducible to one by the regular
  // English inflections (-s, -es, -ed, -d, -ing) or said/thought.
  bool matches(const DepToken& tok) const {
    if (!tok.lemma.empty()) return lemmas_.count(unicode::lowercase(tok.lemma)) > 0;
    std::string w = unicode::lowercase(tok.surface);
    if (lemmas_.count(w)) return true;
    if (w == "said") return lemmas_.count("say") > 0;
    if (w == "thought") return lemmas_.count("think") > 0;
    auto strip = [&](std::string_view suffix, std::string_view add = "") {
      if (w.size() > suffix.size() && w.ends_with(suffix)) {
        std::string stem = w.substr(0, w.size() - suffix.size()) + std::string(add);
        return lemmas_.count(stem) > 0;
      }
      return false;
    };
    return strip("s") || strip("es") || strip("ed") || strip("d") || strip("ing") || strip("ing", "e");
  }

 private:
  std::set<std::string> lemmas_;
};

namespace detail {

inline bool pos_in(std::string_view pos, std::initializer_list<std::string_view> prefixes) {
  for (auto p : prefixes)
    if (pos.starts_with(p)) return true;
  return false;
}

inline bool is_nominal(const DepToken& t) {
  return t.pos == "NOUN" || t.pos == "PROPN" || t.pos == "PRON" || pos_in(t.pos, {"NN", "PRP", "WP"});
}

inline bool is_verbal(const DepToken& t) {
  return t.pos == "VERB" || t.pos == "AUX" || pos_in(t.pos, {"VB", "MD"});
}

inline bool is_subject_label(std::string_view dep) {
  return dep == "nsubj" || dep == "nsubjpass" || dep == "nsubj:pass" || dep == "csubj" || dep == "csubjpass" ||
         dep == "csubj:pass" || dep == "expl";
}

inline bool is_relative_pronoun(const DepToken& t) {
  static const std::set<std::string> kPronouns{"who", "whom", "whose", "which", "that"};
  if (!kPronouns.count(unicode::lowercase(t.surface))) return false;
  return t.pos.empty() || t.pos == "PRON" || t.pos == "DET" || pos_in(t.pos, {"W"});
}

// Whether the subtree rooted at `root` (excluding root) contains a token
// satisfying `pred`.
template <typename Pred>
bool subtree_contains(const std::vector<DepToken>& sent, int root, Pred pred) {
  const int n = static_cast<int>(sent.size());
  std::vector<int> stack{root};
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  seen[static_cast<std::size_t>(root)] = 1;
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    for (int k = 0; k < n; ++k) {
      if (sent[static_cast<std::size_t>(k)].head != cur || seen[static_cast<std::size_t>(k)]) continue;
      seen[static_cast<std::size_t>(k)] = 1;
      if (pred(sent[static_cast<std::size_t>(k)])) return true;
      stack.push_back(k);
    }
  }
  return false;
}

}  // namespace detail

inline SyntacticProfile sentence_construction_counts(const std::vector<DepToken>& sent,
                                                     const CommunicationVerbs& verbs = {}) {
  SyntacticProfile p;
  const int n = static_cast<int>(sent.size());
  auto has_own_subject = [&](int idx) {
    for (int k = 0; k < n; ++k)
      if (sent[static_cast<std::size_t>(k)].head == idx && detail::is_subject_label(sent[static_cast<std::size_t>(k)].dep))
        return true;
    return false;
  };
  for (int i = 0; i < n; ++i) {
    const auto& t = sent[static_cast<std::size_t>(i)];
    const std::string dep = unicode::lowercase(t.dep);
    const DepToken* head = t.head >= 0 && t.head < n ? &sent[static_cast<std::size_t>(t.head)] : nullptr;
    if (dep == "advmod") ++p.num_adv_mod;
    else if (dep == "advcl") ++p.num_advcl;
    else if (dep == "appos") ++p.num_appos;
    else if (dep == "prep") ++p.num_prep;
    else if (dep == "prt" || dep == "compound:prt") ++p.num_part;
    else if (dep == "relcl" || dep == "acl:relcl") ++p.num_relcl;
    else if (dep == "acl") {
      if (detail::subtree_contains(sent, i, detail::is_relative_pronoun)) ++p.num_relcl;
    } else if (dep == "conj" && head) {
      if (detail::is_nominal(t) && detail::is_nominal(*head)) {
        ++p.num_coordNP;
      } else if (detail::is_verbal(t) && detail::is_verbal(*head)) {
        if (has_own_subject(i))
          ++p.num_coord_cl;
        else
          ++p.num_coordVP;
      }
    } else if (dep == "ccomp" && head && verbs.matches(*head)) {
      ++p.num_speech;
    }
  }
  return p;
}

// std::nullopt when the bundle carries no dependency labels.
inline std::optional<SyntacticProfile> construction_counts(const AnnotationBundle& bundle,
                                                           const CommunicationVerbs& verbs = {}) {
  if (!bundle.has_dependencies()) return std::nullopt;
  SyntacticProfile total;
  for (const auto& sent : bundle.tokens) total += sentence_construction_counts(sent, verbs);
  return total;
}

}  // namespace clear
