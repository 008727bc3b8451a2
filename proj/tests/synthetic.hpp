#pragma once

// Scripted document pairs for alignment tests. Each document applies a known
// list of sentence operations, so the expected TransformationCounts are known.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "clear/align.hpp"

namespace clear::synthetic {

inline const std::vector<std::string>& nouns() {
  static const std::vector<std::string> v{
      "teacher",  "river",    "garden",   "engine",   "council",  "student",  "harbor",   "village",  "doctor",
      "library",  "market",   "bridge",   "farmer",   "mountain", "company",  "window",   "kitchen",  "soldier",
      "museum",   "painter",  "forest",   "tower",    "journal",  "island",   "machine",  "citizen",  "planet",
      "orchestra", "highway", "cabinet",  "festival", "hospital", "factory",  "captain",  "volcano",  "workshop",
      "senator",  "desert",   "railway",  "blanket",  "climate",  "lawyer",   "theater",  "harvest",  "pilot",
      "medicine", "network",  "protest",  "sculpture", "treaty",  "vaccine",  "weather",  "budget",   "cottage",
      "dolphin",  "election", "fountain", "glacier",  "hunter",   "invoice",  "jungle",   "knight",   "lantern",
      "meadow",   "novelist", "oyster",   "parliament", "quarry", "rocket",   "satellite", "tractor", "umbrella",
      "violin",   "wizard",   "yacht",    "zebra",    "algorithm", "ballot",  "chemist",  "diploma",  "emperor"};
  return v;
}

inline const std::vector<std::string>& adjectives() {
  static const std::vector<std::string> v{
      "quiet",    "ancient",  "bright",   "careful",  "distant",  "eager",    "fragile",  "generous", "hollow",
      "icy",      "jealous",  "kind",     "lively",   "modest",   "narrow",   "obscure",  "patient",  "rapid",
      "silent",   "tidy",     "urgent",   "vivid",    "wealthy",  "young",    "zealous",  "bitter",   "crimson",
      "dusty",    "elegant",  "foreign",  "golden",   "humble",   "loyal",    "muddy",    "nervous",  "polite",
      "rural",    "sturdy",   "tropical", "upset",    "vast",     "wooden",   "frozen",   "curious",  "honest"};
  return v;
}

inline const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v{
      "admired",   "built",     "carried",  "defended", "examined", "followed", "guarded",  "helped",
      "ignored",   "joined",    "kept",     "launched", "measured", "noticed",  "opened",   "painted",
      "questioned", "repaired", "selected", "traced",   "visited",  "washed",   "praised",  "borrowed",
      "crossed",   "delivered", "explored", "financed", "gathered", "hired",    "inspected", "judged",
      "locked",    "mapped",    "named",    "ordered",  "printed",  "rescued",  "signed",   "tested"};
  return v;
}

inline const std::vector<std::string>& prepositions() {
  static const std::vector<std::string> v{"near", "behind", "beyond", "under", "across", "inside", "after", "before"};
  return v;
}

struct Clause {
  std::string det1, adj1, noun1, verb, det2, noun2, prep, adj3, noun3;

  std::string text() const {
    return det1 + " " + adj1 + " " + noun1 + " " + verb + " " + det2 + " " + noun2 + " " + prep + " the " + adj3 +
           " " + noun3;
  }
};

inline std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

inline std::string as_sentence(const std::string& body) { return capitalize(body) + "."; }

class Generator {
 public:
  explicit Generator(unsigned seed) : rng_(seed) {}

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[rng_() % v.size()];
  }

  Clause clause() {
    static const std::vector<std::string> dets{"the", "a", "every", "one", "that"};
    return {pick(dets),  pick(adjectives()), pick(nouns()),        pick(verbs()), pick(dets),
            pick(nouns()), pick(prepositions()), pick(adjectives()), pick(nouns())};
  }

  // Swaps three content words for fresh ones.
  Clause rephrase(Clause c) {
    std::vector<int> slots{0, 1, 2, 3, 4, 5};
    std::shuffle(slots.begin(), slots.end(), rng_);
    for (int k = 0; k < 3; ++k) {
      switch (slots[static_cast<std::size_t>(k)]) {
        case 0: c.adj1 = fresh(adjectives(), c.adj1); break;
        case 1: c.noun1 = fresh(nouns(), c.noun1); break;
        case 2: c.verb = fresh(verbs(), c.verb); break;
        case 3: c.noun2 = fresh(nouns(), c.noun2); break;
        case 4: c.adj3 = fresh(adjectives(), c.adj3); break;
        default: c.noun3 = fresh(nouns(), c.noun3); break;
      }
    }
    return c;
  }

  std::mt19937& rng() { return rng_; }

 private:
  const std::string& fresh(const std::vector<std::string>& v, const std::string& old) {
    for (;;) {
      const auto& w = pick(v);
      if (w != old) return w;
    }
  }

  std::mt19937 rng_;
};

struct Document {
  std::vector<std::string> original;
  std::vector<std::string> improved;
  TransformationCounts expected;
};

// One document whose script features `focus` once or twice among copy and
// rephrase filler operations.
inline Document make_document(Generator& g, Transformation focus) {
  Document d;
  auto& rng = g.rng();
  std::vector<Transformation> script;
  int filler = 2 + static_cast<int>(rng() % 4);
  int focused = 1 + static_cast<int>(rng() % 2);
  for (int i = 0; i < filler; ++i) script.push_back(rng() % 2 ? Transformation::copy : Transformation::rephrase);
  for (int i = 0; i < focused; ++i) script.push_back(focus);
  std::shuffle(script.begin(), script.end(), rng);

  for (auto op : script) {
    ++d.expected[op];
    switch (op) {
      case Transformation::copy: {
        auto s = as_sentence(g.clause().text());
        d.original.push_back(s);
        d.improved.push_back(s);
        break;
      }
      case Transformation::rephrase: {
        auto c = g.clause();
        d.original.push_back(as_sentence(c.text()));
        d.improved.push_back(as_sentence(g.rephrase(c).text()));
        break;
      }
      case Transformation::del:
        d.original.push_back(as_sentence(g.clause().text()));
        break;
      case Transformation::add:
        d.improved.push_back(as_sentence(g.clause().text()));
        break;
      case Transformation::split: {
        auto a = g.clause(), b = g.clause();
        d.original.push_back(as_sentence(a.text() + ", and " + b.text()));
        d.improved.push_back(as_sentence(a.text()));
        d.improved.push_back(as_sentence(b.text()));
        break;
      }
      case Transformation::merge: {
        auto a = g.clause(), b = g.clause();
        d.original.push_back(as_sentence(a.text()));
        d.original.push_back(as_sentence(b.text()));
        d.improved.push_back(as_sentence(a.text() + ", and " + b.text()));
        break;
      }
      case Transformation::fusion: {
        // Two sentences of two clauses each, recombined across the boundary.
        auto a1 = g.clause(), a2 = g.clause(), b1 = g.clause(), b2 = g.clause();
        d.original.push_back(as_sentence(a1.text() + ", and " + a2.text()));
        d.original.push_back(as_sentence(b1.text() + ", and " + b2.text()));
        d.improved.push_back(as_sentence(a1.text() + ", and " + b1.text()));
        d.improved.push_back(as_sentence(a2.text() + ", and " + b2.text()));
        break;
      }
      case Transformation::other:
        break;
    }
  }
  return d;
}

inline constexpr Transformation kScriptedCategories[] = {
    Transformation::add,   Transformation::copy,   Transformation::rephrase, Transformation::split,
    Transformation::merge, Transformation::fusion, Transformation::del};

inline std::vector<Document> make_suite(int count, unsigned seed) {
  Generator g(seed);
  std::vector<Document> docs;
  for (int i = 0; i < count; ++i) docs.push_back(make_document(g, kScriptedCategories[i % 7]));
  return docs;
}

}  // namespace clear::synthetic
