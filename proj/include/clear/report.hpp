#pragma once

// The evaluation pipeline: per-pair metrics on four levels, sentence
// alignment, bias statistics, and the JSON / CSV writers.

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "clear/align.hpp"
#include "clear/argcomp.hpp"
#include "clear/bias.hpp"
#include "clear/corpus.hpp"
#include "clear/error.hpp"
#include "clear/judge.hpp"
#include "clear/lexical.hpp"
#include "clear/semantic.hpp"
#include "clear/syntactic.hpp"
#include "clear/textproc.hpp"

namespace clear {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Level { lexical, syntactic, semantic, pragmatic };

inline constexpr std::array<Level, 4> kAllLevels{Level::lexical, Level::syntactic, Level::semantic, Level::pragmatic};

inline std::string_view to_string(Level l) {
  switch (l) {
    case Level::lexical: return "lexical";
    case Level::syntactic: return "syntactic";
    case Level::semantic: return "semantic";
    case Level::pragmatic: break;
  }
  return "pragmatic";
}

inline Level parse_level(std::string_view s) {
  for (auto l : kAllLevels)
    if (to_string(l) == s) return l;
  throw ParseError("unknown level '" + std::string(s) + "' (expected lexical, syntactic, semantic or pragmatic)");
}

enum class CorrelationMode { delta, raw, both };

inline std::string_view to_string(CorrelationMode m) {
  return m == CorrelationMode::delta ? "delta" : m == CorrelationMode::raw ? "raw" : "both";
}

inline CorrelationMode parse_correlation_mode(std::string_view s) {
  if (s == "delta") return CorrelationMode::delta;
  if (s == "raw") return CorrelationMode::raw;
  if (s == "both") return CorrelationMode::both;
  throw ParseError("unknown correlation mode '" + std::string(s) + "' (expected delta, raw or both)");
}

// Heatmap columns. Metrics with two sides contribute their mean percent
// change; pair-level values (lengths, distances, transformation counts)
// contribute their plain mean.
inline const std::vector<std::string>& heatmap_columns(Level level) {
  static const std::vector<std::string> lexical{
      "avg_word_length", "char_count",  "digit_count", "letter_count",  "avg_sentence_length",
      "avg_words_per_sentence", "ttr", "flesch_kincaid_grade", "flesch_reading_ease", "original_length",
      "count1to3", "count4to6", "count7to10", "count10plus", "length_change", "levenshtein"};
  static const std::vector<std::string> syntactic = [] {
    std::vector<std::string> c{"add", "copy", "delete", "fusion", "merge", "other", "rephrase", "split"};
    for (auto m : kSyntacticMetrics) c.emplace_back(m);
    c.emplace_back("improved_length");
    c.emplace_back("original_length");
    return c;
  }();
  static const std::vector<std::string> semantic = [] {
    std::vector<std::string> c{"rst_depth"};
    for (auto r : kRstRelations) c.emplace_back(r);
    for (const char* m : {"gruen", "polarity", "subjectivity", "german_proba_positive", "german_proba_negative",
                          "german_proba_neutral"})
      c.emplace_back(m);
    return c;
  }();
  static const std::vector<std::string> pragmatic{"coherence", "persuasion"};
  switch (level) {
    case Level::lexical: return lexical;
    case Level::syntactic: return syntactic;
    case Level::semantic: return semantic;
    case Level::pragmatic: break;
  }
  return pragmatic;
}

// ---------------------------------------------------------------------------
// Report model

struct MetricEntry {
  std::string name;
  std::optional<double> original;
  std::optional<double> improved;
  std::optional<std::string> unavailable;  // reason, when the metric could not be computed
  std::string source;                      // where values came from, when there is a choice

  static MetricEntry of(std::string name, std::optional<double> o, std::optional<double> i, std::string source = {}) {
    return {std::move(name), o, i, std::nullopt, std::move(source)};
  }
  static MetricEntry missing(std::string name, std::string reason) {
    return {std::move(name), std::nullopt, std::nullopt, std::move(reason), {}};
  }

  std::optional<double> percent_change() const { return clear::percent_change(original, improved); }
  std::optional<double> delta() const {
    if (!original || !improved) return std::nullopt;
    return *improved - *original;
  }
};

struct ScalarEntry {
  std::string name;
  std::optional<double> value;
  std::optional<std::string> unavailable;
};

struct LevelReport {
  std::vector<MetricEntry> metrics;
  std::vector<ScalarEntry> pair_metrics;

  const MetricEntry* metric(std::string_view name) const {
    for (const auto& m : metrics)
      if (m.name == name) return &m;
    return nullptr;
  }
  const ScalarEntry* scalar(std::string_view name) const {
    for (const auto& s : pair_metrics)
      if (s.name == name) return &s;
    return nullptr;
  }
};

struct LabeledLink {
  AlignmentLink link;
  Transformation category = Transformation::other;
};

struct PairReport {
  std::string id;
  Language language = Language::en;
  std::string topic;
  long original_length = 0;  // code points, trailing whitespace excluded
  long improved_length = 0;
  std::map<Level, LevelReport> levels;
  std::optional<TransformationCounts> transformations;
  std::string alignment_backend;
  std::vector<LabeledLink> alignment;  // filled when alignments are dumped
  std::optional<ComponentCounts> components_original;
  std::optional<ComponentCounts> components_improved;
  std::optional<std::string> components_unavailable;
  std::vector<JudgeResult> judge;
  std::vector<std::string> warnings;
};

struct CorrelationEntry {
  std::string metric;
  std::string mode;  // delta, raw or value
  std::optional<CorrelationResult> result;
  std::optional<std::string> unavailable;
};

struct BiasReport {
  std::vector<CorrelationEntry> correlations;
  std::vector<SentimentShift> shifts;
  ShiftSummary shift_summary;
};

struct ReportBundle {
  std::string version{kVersion};
  std::string config_hash;
  std::string dataset;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<Level> levels;
  std::vector<PairReport> pairs;
  BiasReport bias;
  std::optional<DatasetStats> stats_original;
  std::optional<DatasetStats> stats_improved;

  bool enabled(Level l) const { return std::find(levels.begin(), levels.end(), l) != levels.end(); }
};

// ---------------------------------------------------------------------------
// Configuration

struct RunConfig {
  std::filesystem::path pairs_path;
  std::optional<std::filesystem::path> annotations_dir;
  std::optional<std::filesystem::path> lexicon_path;
  std::optional<std::filesystem::path> abbreviations_path;
  std::optional<std::filesystem::path> verbs_path;
  std::optional<std::filesystem::path> rst_dir;  // <id>.<side>.rst files
  std::string dataset;                           // heatmap row label; pairs file stem when empty
  std::vector<Level> levels{kAllLevels.begin(), kAllLevels.end()};
  std::optional<JudgeConfig> judge;
  AlignParams align;
  BlockBounds bounds;
  CorrelationMode correlation = CorrelationMode::delta;
  std::vector<std::string> correlation_metrics;  // empty: all
  bool dump_alignments = false;
  int jobs = 1;

  bool enabled(Level l) const { return std::find(levels.begin(), levels.end(), l) != levels.end(); }

  std::string dataset_label() const { return dataset.empty() ? pairs_path.stem().string() : dataset; }
};

inline std::string path_string(const std::optional<std::filesystem::path>& p) { return p ? p->string() : ""; }

// Everything that can change report content. Output location, parallelism
// and the API key are left out.
inline nlohmann::ordered_json canonical_config(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["pairs"] = c.pairs_path.string();
  j["annotations"] = path_string(c.annotations_dir);
  j["lexicon"] = path_string(c.lexicon_path);
  j["abbreviations"] = path_string(c.abbreviations_path);
  j["verbs"] = path_string(c.verbs_path);
  j["rst_dir"] = path_string(c.rst_dir);
  j["dataset"] = c.dataset_label();
  auto levels = nlohmann::ordered_json::array();
  for (auto l : kAllLevels)
    if (c.enabled(l)) levels.push_back(to_string(l));
  j["levels"] = levels;
  if (c.judge) {
    j["judge"] = {{"url", c.judge->base_url}, {"model", c.judge->model}, {"retries", c.judge->retries}};
  } else {
    j["judge"] = nullptr;
  }
  j["align"] = {{"anchor_threshold", c.align.anchor_threshold},
                {"min_score", c.align.min_score},
                {"extra_penalty", c.align.extra_penalty},
                {"gap_score", c.align.gap_score},
                {"use_anchors", c.align.use_anchors},
                {"max_source", c.bounds.max_source},
                {"max_target", c.bounds.max_target}};
  j["correlation"] = to_string(c.correlation);
  j["correlation_metrics"] = c.correlation_metrics;
  j["dump_alignments"] = c.dump_alignments;
  return j;
}

inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

// Read-only inputs shared by all workers.
struct EvalResources {
  AbbreviationList abbreviations;
  CommunicationVerbs verbs;
  std::optional<SentimentLexicon> lexicon;

  static EvalResources load(const RunConfig& c) {
    EvalResources r;
    if (c.abbreviations_path) r.abbreviations = AbbreviationList::from_file(c.abbreviations_path->string());
    if (c.verbs_path) r.verbs = CommunicationVerbs::from_file(c.verbs_path->string());
    if (c.lexicon_path) r.lexicon = SentimentLexicon::from_file(c.lexicon_path->string());
    return r;
  }
};

// ---------------------------------------------------------------------------
// Per-pair evaluation

namespace detail {

inline std::optional<double> num(std::optional<double> v) { return v; }
inline std::optional<double> num(long v) { return static_cast<double>(v); }

struct SideInputs {
  const std::string* text = nullptr;
  std::optional<AnnotationBundle> bundle;
  std::vector<Span> spans;  // byte offsets
  std::vector<std::string> sentences;
};

inline SideInputs side_inputs(const DocumentPair& pair, Side side, const RunConfig& config,
                              const EvalResources& res) {
  SideInputs s;
  s.text = &pair.text(side);
  if (config.annotations_dir)
    s.bundle = load_annotations(*config.annotations_dir, pair.id, side, unicode::count_code_points(*s.text));
  if (s.bundle) {
    s.spans = s.bundle->byte_spans(*s.text);
  } else {
    for (const auto& sent : segment_sentences(*s.text, res.abbreviations)) s.spans.push_back(sent.span);
  }
  s.sentences = sentence_texts(*s.text, s.spans);
  return s;
}

inline std::string side_reason(const SideInputs& o, const SideInputs& i, std::string_view what,
                               const std::function<bool(const AnnotationBundle&)>& has) {
  bool ho = o.bundle && has(*o.bundle), hi = i.bundle && has(*i.bundle);
  if (!ho && !hi) return "no " + std::string(what) + " for either side";
  return "no " + std::string(what) + " for the " + (ho ? "improved" : "original") + " side";
}

inline LevelReport lexical_level(const DocumentPair& pair, const SideInputs& o, const SideInputs& i,
                                 const EvalResources& res, long original_length, long improved_length) {
  auto profile = [&](const SideInputs& s) {
    std::optional<std::span<const Span>> spans;
    if (s.bundle) spans = std::span<const Span>(s.spans);
    return lexical_profile(*s.text, pair.language, spans, res.abbreviations);
  };
  auto a = profile(o), b = profile(i);
  LevelReport r;
  auto add = [&](const char* name, auto LexicalProfile::*field) {
    r.metrics.push_back(MetricEntry::of(name, num(a.*field), num(b.*field)));
  };
  add("avg_word_length", &LexicalProfile::avg_word_length);
  add("char_count", &LexicalProfile::char_count);
  add("digit_count", &LexicalProfile::digit_count);
  add("letter_count", &LexicalProfile::letter_count);
  add("avg_sentence_length", &LexicalProfile::avg_sentence_length);
  add("avg_words_per_sentence", &LexicalProfile::avg_words_per_sentence);
  add("ttr", &LexicalProfile::ttr);
  add("flesch_kincaid_grade", &LexicalProfile::flesch_kincaid_grade);
  add("flesch_reading_ease", &LexicalProfile::flesch_reading_ease);
  add("count1to3", &LexicalProfile::count1to3);
  add("count4to6", &LexicalProfile::count4to6);
  add("count7to10", &LexicalProfile::count7to10);
  add("count10plus", &LexicalProfile::count10plus);
  add("word_count", &LexicalProfile::word_count);
  add("sentence_count", &LexicalProfile::sentence_count);
  add("syllable_count", &LexicalProfile::syllable_count);

  auto d = string_distances(pair.original, pair.improved);
  r.pair_metrics.push_back({"original_length", static_cast<double>(original_length), std::nullopt});
  r.pair_metrics.push_back({"improved_length", static_cast<double>(improved_length), std::nullopt});
  r.pair_metrics.push_back({"length_change", length_change(pair.original, pair.improved), std::nullopt});
  r.pair_metrics.push_back({"levenshtein", static_cast<double>(d.levenshtein), std::nullopt});
  r.pair_metrics.push_back({"jaro", d.jaro, std::nullopt});
  r.pair_metrics.push_back({"jaro_winkler", d.jaro_winkler, std::nullopt});
  return r;
}

inline std::optional<std::string> read_rst_file(const std::optional<std::filesystem::path>& dir,
                                                const std::string& id, Side side) {
  if (!dir) return std::nullopt;
  auto path = *dir / (id + "." + std::string(to_string(side)) + ".rst");
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open RST file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void semantic_level(PairReport& report, const DocumentPair& pair, const SideInputs& o, const SideInputs& i,
                           const RunConfig& config, const EvalResources& res) {
  LevelReport r;

  // RST: bundle first, then the RST directory.
  auto rst_text = [&](const SideInputs& s, Side side) -> std::optional<std::string> {
    if (s.bundle && s.bundle->rst) return s.bundle->rst;
    return read_rst_file(config.rst_dir, pair.id, side);
  };
  auto ro = rst_text(o, Side::original), ri = rst_text(i, Side::improved);
  if (ro && ri) {
    RstTree to, ti;
    try {
      to = parse_rst(*ro);
      ti = parse_rst(*ri);
    } catch (const ParseError& e) {
      throw ParseError(std::string("RST tree: ") + e.what());
    }
    r.metrics.push_back(MetricEntry::of("rst_depth", rst_depth(to), rst_depth(ti)));
    auto co = rst_relation_counts(to), ci = rst_relation_counts(ti);
    for (auto rel : kRstRelations) {
      std::string name(rel);
      r.metrics.push_back(MetricEntry::of(name, co.counts.at(name), ci.counts.at(name)));
    }
    std::set<std::string> unknown(co.unknown_labels.begin(), co.unknown_labels.end());
    unknown.insert(ci.unknown_labels.begin(), ci.unknown_labels.end());
    for (const auto& label : unknown) {
      auto get = [&](const RelationCounts& c) {
        auto it = c.counts.find(label);
        return it == c.counts.end() ? 0.0 : static_cast<double>(it->second);
      };
      r.metrics.push_back(MetricEntry::of(label, get(co), get(ci)));
      report.warnings.push_back("unknown RST relation label '" + label + "'");
    }
  } else {
    std::string reason = !ro && !ri ? "no RST tree for either side"
                                    : std::string("no RST tree for the ") + (ro ? "improved" : "original") + " side";
    r.metrics.push_back(MetricEntry::missing("rst_depth", reason));
    for (auto rel : kRstRelations) r.metrics.push_back(MetricEntry::missing(std::string(rel), reason));
  }

  // GRUEN
  auto external = [&](const SideInputs& s, std::string_view name) -> std::optional<double> {
    return s.bundle ? ingest_external(*s.bundle, name) : std::nullopt;
  };
  {
    auto a = external(o, "gruen"), b = external(i, "gruen");
    if (a && b) {
      r.metrics.push_back(MetricEntry::of("gruen", a, b, "external"));
    } else {
      r.metrics.push_back(MetricEntry::missing("gruen", !a && !b ? "no gruen score for either side"
                                                                 : std::string("no gruen score for the ") +
                                                                       (a ? "improved" : "original") + " side"));
    }
  }

  // English polarity / subjectivity. Bundle scores win when both sides have them.
  if (o.bundle && o.bundle->sentiment_en && i.bundle && i.bundle->sentiment_en) {
    r.metrics.push_back(
        MetricEntry::of("polarity", o.bundle->sentiment_en->polarity, i.bundle->sentiment_en->polarity, "bundle"));
    r.metrics.push_back(MetricEntry::of("subjectivity", o.bundle->sentiment_en->subjectivity,
                                        i.bundle->sentiment_en->subjectivity, "bundle"));
  } else if (pair.language == Language::en && res.lexicon) {
    auto a = english_sentiment(pair.original, *res.lexicon), b = english_sentiment(pair.improved, *res.lexicon);
    r.metrics.push_back(MetricEntry::of("polarity", a.polarity, b.polarity, "lexicon"));
    r.metrics.push_back(MetricEntry::of("subjectivity", a.subjectivity, b.subjectivity, "lexicon"));
  } else {
    std::string reason = pair.language == Language::en ? "no sentiment lexicon configured"
                                                       : "no English sentiment scores for a German pair";
    r.metrics.push_back(MetricEntry::missing("polarity", reason));
    r.metrics.push_back(MetricEntry::missing("subjectivity", reason));
  }

  // German class probabilities.
  std::optional<GermanSentiment> go, gi;
  if (o.bundle) go = german_sentiment(*o.bundle);
  if (i.bundle) gi = german_sentiment(*i.bundle);
  if (go && gi) {
    r.metrics.push_back(MetricEntry::of("german_proba_positive", go->p_pos, gi->p_pos, "external"));
    r.metrics.push_back(MetricEntry::of("german_proba_negative", go->p_neg, gi->p_neg, "external"));
    r.metrics.push_back(MetricEntry::of("german_proba_neutral", go->p_neu, gi->p_neu, "external"));
  } else {
    std::string reason = pair.language == Language::en ? "German sentiment applies to German pairs only"
                         : !go && !gi ? "no German sentiment probabilities for either side"
                                      : std::string("no German sentiment probabilities for the ") +
                                            (go ? "improved" : "original") + " side";
    for (const char* m : {"german_proba_positive", "german_proba_negative", "german_proba_neutral"})
      r.metrics.push_back(MetricEntry::missing(m, reason));
  }
  report.levels[Level::semantic] = std::move(r);
}

}  // namespace detail

struct PairAlignment {
  std::vector<LabeledLink> links;
  TransformationCounts counts;
  std::string backend;
};

inline PairAlignment align_sentences(const std::vector<std::string>& original, const std::vector<std::string>& improved,
                                     const std::optional<AnnotationBundle>& bo, const std::optional<AnnotationBundle>& bi,
                                     const AlignParams& params, const BlockBounds& bounds) {
  PairAlignment out;
  std::vector<AlignmentLink> links;
  if (bo && bi && bo->embeddings && bi->embeddings && !original.empty() && !improved.empty()) {
    EmbeddingSimilarity sim(*bo->embeddings, *bi->embeddings);
    links = align(sim, params);
    out.backend = "embedding";
  } else {
    links = align(original, improved, params);
    out.backend = "trigram";
  }
  out.counts = classify(links, original, improved, bounds);
  for (auto& l : links) {
    auto cat = classify_link(l, original, improved, bounds);
    out.links.push_back({std::move(l), cat});
  }
  return out;
}

// All levels except pragmatic, which needs the judge endpoint and runs as a
// batch afterwards.
inline PairReport evaluate_pair(const DocumentPair& pair, const RunConfig& config, const EvalResources& res) {
  PairReport report;
  report.id = pair.id;
  report.language = pair.language;
  report.topic = pair.topic;
  report.original_length = static_cast<long>(unicode::count_code_points_rtrim(pair.original));
  report.improved_length = static_cast<long>(unicode::count_code_points_rtrim(pair.improved));

  auto o = detail::side_inputs(pair, Side::original, config, res);
  auto i = detail::side_inputs(pair, Side::improved, config, res);

  if (config.enabled(Level::lexical))
    report.levels[Level::lexical] =
        detail::lexical_level(pair, o, i, res, report.original_length, report.improved_length);

  if (config.enabled(Level::syntactic)) {
    auto a = align_sentences(o.sentences, i.sentences, o.bundle, i.bundle, config.align, config.bounds);
    report.transformations = a.counts;
    report.alignment_backend = a.backend;
    if (config.dump_alignments) report.alignment = std::move(a.links);

    LevelReport r;
    std::optional<SyntacticProfile> po, pi;
    if (o.bundle) po = construction_counts(*o.bundle, res.verbs);
    if (i.bundle) pi = construction_counts(*i.bundle, res.verbs);
    if (po && pi) {
      for (auto m : kSyntacticMetrics)
        r.metrics.push_back(MetricEntry::of(std::string(m), static_cast<double>(syntactic_value(*po, m)),
                                            static_cast<double>(syntactic_value(*pi, m))));
    } else {
      auto reason = detail::side_reason(o, i, "dependency annotations",
                                        [](const AnnotationBundle& b) { return b.has_dependencies(); });
      for (auto m : kSyntacticMetrics) r.metrics.push_back(MetricEntry::missing(std::string(m), reason));
    }
    report.levels[Level::syntactic] = std::move(r);
  }

  if (config.enabled(Level::semantic)) detail::semantic_level(report, pair, o, i, config, res);

  if (o.bundle && o.bundle->components && i.bundle && i.bundle->components) {
    report.components_original = component_counts(*o.bundle->components);
    report.components_improved = component_counts(*i.bundle->components);
  } else {
    report.components_unavailable = detail::side_reason(o, i, "argument component labels",
                                                        [](const AnnotationBundle& b) { return b.components.has_value(); });
  }
  return report;
}

// ---------------------------------------------------------------------------
// Bias statistics over a set of pair reports

namespace detail {

inline std::optional<double> transformation_value(const PairReport& p, std::string_view name) {
  if (!p.transformations) return std::nullopt;
  for (auto t : kAllTransformations)
    if (to_string(t) == name) return static_cast<double>((*p.transformations)[t]);
  return std::nullopt;
}

}  // namespace detail

inline BiasReport compute_bias(const std::vector<PairReport>& pairs, CorrelationMode mode,
                               const std::vector<std::string>& only = {}) {
  BiasReport bias;
  auto wanted = [&](const std::string& name) {
    return only.empty() || std::find(only.begin(), only.end(), name) != only.end();
  };

  // Metric names in level order, then first-seen order.
  std::vector<std::pair<Level, std::string>> two_sided;
  std::set<std::pair<Level, std::string>> seen;
  for (const auto& p : pairs)
    for (const auto& [level, lr] : p.levels)
      for (const auto& m : lr.metrics)
        if (seen.insert({level, m.name}).second) two_sided.emplace_back(level, m.name);
  std::stable_sort(two_sided.begin(), two_sided.end(),
                   [](const auto& a, const auto& b) { return static_cast<int>(a.first) < static_cast<int>(b.first); });

  auto correlate = [&](const std::string& name, const std::string& how, std::vector<double> xs, std::vector<double> ys) {
    CorrelationEntry e{name, how, std::nullopt, std::nullopt};
    try {
      e.result = pearson(xs, ys, name);
    } catch (const InsufficientDataError& ex) {
      e.unavailable = ex.what();
    } catch (const DegenerateInputError& ex) {
      e.unavailable = ex.what();
    }
    bias.correlations.push_back(std::move(e));
  };

  for (const auto& [level, name] : two_sided) {
    if (!wanted(name)) continue;
    for (std::string how : {"delta", "raw"}) {
      if (how == "delta" && mode == CorrelationMode::raw) continue;
      if (how == "raw" && mode == CorrelationMode::delta) continue;
      std::vector<double> xs, ys;
      for (const auto& p : pairs) {
        auto it = p.levels.find(level);
        if (it == p.levels.end()) continue;
        const auto* m = it->second.metric(name);
        if (!m) continue;
        auto y = how == "delta" ? m->delta() : m->improved;
        if (!y) continue;
        xs.push_back(static_cast<double>(p.original_length));
        ys.push_back(*y);
      }
      correlate(name, how, std::move(xs), std::move(ys));
    }
  }

  // Pair-level values against original length.
  std::vector<std::string> scalar_names{"improved_length", "length_change", "levenshtein", "jaro", "jaro_winkler"};
  for (auto t : kAllTransformations) scalar_names.emplace_back(to_string(t));
  for (const auto& name : scalar_names) {
    if (!wanted(name)) continue;
    std::vector<double> xs, ys;
    bool any = false;
    for (const auto& p : pairs) {
      std::optional<double> y;
      if (name == "improved_length") {
        y = static_cast<double>(p.improved_length);
        any = true;
      } else if (auto t = detail::transformation_value(p, name)) {
        y = t;
        any = true;
      } else if (auto it = p.levels.find(Level::lexical); it != p.levels.end()) {
        if (const auto* s = it->second.scalar(name)) {
          any = true;
          y = s->value;
        }
      }
      if (!y) continue;
      xs.push_back(static_cast<double>(p.original_length));
      ys.push_back(*y);
    }
    if (any) correlate(name, "value", std::move(xs), std::move(ys));
  }

  for (const auto& p : pairs) {
    auto it = p.levels.find(Level::semantic);
    if (it == p.levels.end()) continue;
    const auto* m = it->second.metric("polarity");
    if (!m || !m->original || !m->improved) continue;
    bias.shifts.push_back(SentimentShift::make(p.id, *m->original, *m->improved));
  }
  bias.shift_summary = shift_summary(bias.shifts);
  return bias;
}

// ---------------------------------------------------------------------------
// Pipeline

using ChatClientFactory = std::function<std::unique_ptr<ChatClient>()>;

namespace detail {

// Re-throws `e` with the pair id prefixed, keeping the error category.
[[noreturn]] inline void rethrow_with_pair(const std::string& id) {
  const std::string prefix = "pair '" + id + "': ";
  try {
    throw;
  } catch (const JudgeParseError& e) {
    throw JudgeParseError(prefix + e.what(), e.raw_response());
  } catch (const ParseError& e) {
    throw ParseError(prefix + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + e.what());
  } catch (const IoError& e) {
    throw IoError(prefix + e.what());
  } catch (const TransportError& e) {
    throw TransportError(prefix + e.what());
  }
}

inline void run_judge(std::vector<PairReport>& reports, const Corpus& corpus, const RunConfig& config,
                      const ChatClientFactory& factory) {
  std::vector<JudgeRequest> requests;
  for (std::size_t k = 0; k < corpus.size(); ++k)
    for (Side side : {Side::original, Side::improved})
      for (Dimension d : {Dimension::coherence, Dimension::persuasion})
        requests.push_back({corpus[k].id, side, d, corpus[k].text(side)});
  auto results = judge_batch(requests, factory, config.judge->retries, config.judge->max_in_flight);
  for (const auto& r : results)
    if (r.failure == JudgeFailure::transport)
      throw TransportError("pair '" + r.pair_id + "', " + std::string(to_string(r.side)) + " " +
                           std::string(to_string(r.dimension)) + ": " + r.error);

  for (std::size_t k = 0; k < corpus.size(); ++k) {
    LevelReport level;
    for (Dimension d : {Dimension::coherence, Dimension::persuasion}) {
      const auto& ro = results[k * 4 + (d == Dimension::coherence ? 0 : 1)];
      const auto& ri = results[k * 4 + 2 + (d == Dimension::coherence ? 0 : 1)];
      std::string name(to_string(d));
      if (ro.score && ri.score) {
        level.metrics.push_back(MetricEntry::of(name, *ro.score, *ri.score, "judge"));
      } else {
        level.metrics.push_back(MetricEntry::missing(
            name, std::string("judge response unparsable for the ") +
                      (!ro.score && !ri.score ? "both sides" : !ro.score ? "original side" : "improved side")));
      }
      reports[k].judge.push_back(ro);
      reports[k].judge.push_back(ri);
    }
    std::stable_sort(reports[k].judge.begin(), reports[k].judge.end(), [](const JudgeResult& a, const JudgeResult& b) {
      return std::make_pair(static_cast<int>(a.side), static_cast<int>(a.dimension)) <
             std::make_pair(static_cast<int>(b.side), static_cast<int>(b.dimension));
    });
    reports[k].levels[Level::pragmatic] = std::move(level);
  }
}

}  // namespace detail

inline ReportBundle run_eval(const Corpus& corpus, const RunConfig& config, const ChatClientFactory& judge_factory = {}) {
  auto res = EvalResources::load(config);
  ReportBundle bundle;
  bundle.config = canonical_config(config);
  bundle.config_hash = "fnv1a64:" + fnv1a_hex(bundle.config.dump());
  bundle.dataset = config.dataset_label();
  for (auto l : kAllLevels)
    if (config.enabled(l)) bundle.levels.push_back(l);

  std::vector<PairReport> reports(corpus.size());
  std::vector<std::exception_ptr> errors(corpus.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < corpus.size(); k = next++) {
      try {
        try {
          reports[k] = evaluate_pair(corpus[k], config, res);
        } catch (const Error&) {
          detail::rethrow_with_pair(corpus[k].id);
        }
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(config.jobs, 1)), 1,
                                                      std::max<std::size_t>(corpus.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (config.enabled(Level::pragmatic)) {
    if (config.judge || judge_factory) {
      ChatClientFactory factory = judge_factory;
      if (!factory) {
        JudgeConfig jc = *config.judge;
        factory = [jc] { return std::make_unique<HttpChatClient>(jc); };
      }
      RunConfig effective = config;
      if (!effective.judge) effective.judge = JudgeConfig{};
      detail::run_judge(reports, corpus, effective, factory);
    } else {
      for (auto& r : reports) {
        LevelReport level;
        for (const char* m : {"coherence", "persuasion"})
          level.metrics.push_back(MetricEntry::missing(m, "no judge endpoint configured"));
        r.levels[Level::pragmatic] = std::move(level);
      }
    }
  }

  std::stable_sort(reports.begin(), reports.end(), [](const PairReport& a, const PairReport& b) { return a.id < b.id; });
  bundle.pairs = std::move(reports);
  bundle.bias = compute_bias(bundle.pairs, config.correlation, config.correlation_metrics);
  if (!corpus.empty()) {
    bundle.stats_original = dataset_stats(corpus, Side::original, res.abbreviations);
    bundle.stats_improved = dataset_stats(corpus, Side::improved, res.abbreviations);
  }
  return bundle;
}

inline ReportBundle run_eval(const RunConfig& config, const ChatClientFactory& judge_factory = {}) {
  return run_eval(load_pairs(config.pairs_path), config, judge_factory);
}

// ---------------------------------------------------------------------------
// Aggregates

inline std::vector<Observation> heatmap_observations(const ReportBundle& r, Level level) {
  const auto& columns = heatmap_columns(level);
  auto is_column = [&](std::string_view n) { return std::find(columns.begin(), columns.end(), n) != columns.end(); };
  std::vector<Observation> obs;
  for (const auto& p : r.pairs) {
    auto it = p.levels.find(level);
    if (it == p.levels.end()) continue;
    for (const auto& m : it->second.metrics)
      if (is_column(m.name)) obs.push_back({r.dataset, m.name, m.percent_change()});
    for (const auto& s : it->second.pair_metrics)
      if (is_column(s.name)) obs.push_back({r.dataset, s.name, s.value});
    if (level == Level::syntactic) {
      for (auto t : kAllTransformations) obs.push_back({r.dataset, std::string(to_string(t)), detail::transformation_value(p, to_string(t))});
      obs.push_back({r.dataset, "improved_length", static_cast<double>(p.improved_length)});
      obs.push_back({r.dataset, "original_length", static_cast<double>(p.original_length)});
    }
  }
  return obs;
}

inline Heatmap build_heatmap(std::span<const ReportBundle> reports, Level level) {
  std::vector<Observation> obs;
  for (const auto& r : reports) {
    auto more = heatmap_observations(r, level);
    obs.insert(obs.end(), more.begin(), more.end());
  }
  auto h = aggregate_observations(obs, heatmap_columns(level));
  // Datasets without observations still get a row.
  for (const auto& r : reports) {
    if (std::find(h.datasets.begin(), h.datasets.end(), r.dataset) == h.datasets.end()) {
      h.datasets.push_back(r.dataset);
      h.cells.emplace_back(h.metrics.size());
    }
  }
  return h;
}

struct TransformationSummary {
  TransformationCounts total;
  int documents = 0;
  double mean(Transformation t) const { return documents ? static_cast<double>(total[t]) / documents : 0.0; }
};

inline TransformationSummary summarize_transformations(const ReportBundle& r) {
  TransformationSummary s;
  for (const auto& p : r.pairs) {
    if (!p.transformations) continue;
    ++s.documents;
    for (auto t : kAllTransformations) s.total[t] += (*p.transformations)[t];
  }
  return s;
}

struct ComponentSummary {
  int documents = 0;
  std::array<double, 4> mean_delta{};  // kComponentMetrics order
};

inline ComponentSummary summarize_components(const ReportBundle& r) {
  ComponentSummary s;
  std::array<long, 4> sum{};
  for (const auto& p : r.pairs) {
    if (!p.components_original || !p.components_improved) continue;
    ++s.documents;
    auto d = component_delta(*p.components_original, *p.components_improved);
    for (std::size_t k = 0; k < kComponentMetrics.size(); ++k) sum[k] += component_value(d, kComponentMetrics[k]);
  }
  if (s.documents)
    for (std::size_t k = 0; k < 4; ++k) s.mean_delta[k] = static_cast<double>(sum[k]) / s.documents;
  return s;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline nlohmann::ordered_json opt(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline std::optional<double> opt_double(const nlohmann::ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

inline nlohmann::ordered_json counts_json(const ComponentCounts& c) {
  nlohmann::ordered_json j;
  for (auto m : kComponentMetrics) j[std::string(m)] = component_value(c, m);
  return j;
}

inline ComponentCounts counts_from_json(const nlohmann::ordered_json& j) {
  return {j.at("major_claim").get<int>(), j.at("claim").get<int>(), j.at("premise").get<int>(),
          j.at("none").get<int>()};
}

inline nlohmann::ordered_json transformations_json(const TransformationCounts& c) {
  nlohmann::ordered_json j;
  for (auto t : kAllTransformations) j[std::string(to_string(t))] = c[t];
  return j;
}

inline nlohmann::ordered_json link_json(const LabeledLink& l) {
  return {{"source", l.link.source},
          {"target", l.link.target},
          {"score", l.link.score},
          {"category", to_string(l.category)}};
}

inline Transformation parse_transformation(std::string_view s) {
  for (auto t : kAllTransformations)
    if (to_string(t) == s) return t;
  throw ParseError("unknown transformation category '" + std::string(s) + "'");
}

inline std::string_view to_string(JudgeFailure f) {
  return f == JudgeFailure::none ? "none" : f == JudgeFailure::parse ? "parse" : "transport";
}

inline JudgeFailure parse_failure(std::string_view s) {
  if (s == "none") return JudgeFailure::none;
  if (s == "parse") return JudgeFailure::parse;
  if (s == "transport") return JudgeFailure::transport;
  throw ParseError("unknown judge failure kind '" + std::string(s) + "'");
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const MetricEntry& m) {
  if (m.unavailable) return {{"unavailable", *m.unavailable}};
  nlohmann::ordered_json j{{"original", detail::opt(m.original)},
                           {"improved", detail::opt(m.improved)},
                           {"percent_change", detail::opt(m.percent_change())}};
  if (!m.source.empty()) j["source"] = m.source;
  return j;
}

inline nlohmann::ordered_json to_json(const PairReport& p) {
  nlohmann::ordered_json j;
  j["id"] = p.id;
  j["language"] = to_string(p.language);
  j["topic"] = p.topic;
  j["original_length"] = p.original_length;
  j["improved_length"] = p.improved_length;
  for (const auto& [level, lr] : p.levels) {
    nlohmann::ordered_json lj;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    for (const auto& m : lr.metrics) metrics[m.name] = to_json(m);
    lj["metrics"] = metrics;
    if (!lr.pair_metrics.empty()) {
      nlohmann::ordered_json pm;
      for (const auto& s : lr.pair_metrics) {
        if (s.unavailable)
          pm[s.name] = {{"unavailable", *s.unavailable}};
        else
          pm[s.name] = detail::opt(s.value);
      }
      lj["pair"] = pm;
    }
    if (level == Level::syntactic) {
      if (p.transformations)
        lj["transformations"] = detail::transformations_json(*p.transformations);
      else
        lj["transformations"] = {{"unavailable", "alignment not run"}};
      lj["alignment_backend"] = p.alignment_backend;
      if (!p.alignment.empty()) {
        auto links = nlohmann::ordered_json::array();
        for (const auto& l : p.alignment) links.push_back(detail::link_json(l));
        lj["alignment"] = links;
      }
    }
    if (level == Level::pragmatic && !p.judge.empty()) {
      auto calls = nlohmann::ordered_json::array();
      for (const auto& r : p.judge) {
        nlohmann::ordered_json c{{"side", to_string(r.side)},
                                 {"dimension", to_string(r.dimension)},
                                 {"score", r.score ? nlohmann::ordered_json(*r.score) : nlohmann::ordered_json(nullptr)},
                                 {"attempts", r.attempts},
                                 {"failure", detail::to_string(r.failure)},
                                 {"raw_response", r.raw_response}};
        if (!r.error.empty()) c["error"] = r.error;
        calls.push_back(c);
      }
      lj["judge"] = calls;
    }
    j[std::string(to_string(level))] = lj;
  }
  if (p.components_original && p.components_improved) {
    j["components"] = {{"original", detail::counts_json(*p.components_original)},
                       {"improved", detail::counts_json(*p.components_improved)},
                       {"delta", detail::counts_json(component_delta(*p.components_original, *p.components_improved))}};
  } else {
    j["components"] = {{"unavailable", p.components_unavailable.value_or("no argument component labels")}};
  }
  j["warnings"] = p.warnings;
  return j;
}

inline nlohmann::ordered_json to_json(const BiasReport& b) {
  nlohmann::ordered_json j;
  auto corr = nlohmann::ordered_json::array();
  for (const auto& c : b.correlations) {
    nlohmann::ordered_json e{{"metric", c.metric}, {"mode", c.mode}};
    if (c.result) {
      e["r"] = c.result->r;
      e["p"] = c.result->p;
      e["n"] = c.result->n;
    } else {
      e["unavailable"] = c.unavailable.value_or("");
    }
    corr.push_back(e);
  }
  j["correlations_vs_original_length"] = corr;
  auto shifts = nlohmann::ordered_json::array();
  for (const auto& s : b.shifts)
    shifts.push_back({{"pair_id", s.pair_id},
                      {"polarity_human", s.polarity_human},
                      {"polarity_improved", s.polarity_improved},
                      {"delta", s.delta},
                      {"shift_percentage", detail::opt(s.shift_percentage)},
                      {"class", to_string(s.shift_class)}});
  const auto& m = b.shift_summary;
  j["sentiment_shifts"] = {{"shifts", shifts},
                           {"summary",
                            {{"positive", m.positive},
                             {"neutral", m.neutral},
                             {"negative", m.negative},
                             {"undefined", m.undefined},
                             {"positive_pct", m.positive_pct},
                             {"neutral_pct", m.neutral_pct},
                             {"negative_pct", m.negative_pct},
                             {"mean", m.mean},
                             {"median", m.median}}}};
  return j;
}

inline nlohmann::ordered_json to_json(const ReportBundle& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json availability;
  for (auto level : r.levels) {
    nlohmann::ordered_json lv = nlohmann::ordered_json::object();
    std::map<std::string, std::pair<int, int>> counts;
    std::vector<std::string> order;
    for (const auto& p : r.pairs) {
      auto it = p.levels.find(level);
      if (it == p.levels.end()) continue;
      for (const auto& m : it->second.metrics) {
        if (!counts.count(m.name)) order.push_back(m.name);
        auto& c = counts[m.name];
        (m.unavailable ? c.second : c.first) += 1;
      }
    }
    for (const auto& name : order) lv[name] = {{"available", counts[name].first}, {"unavailable", counts[name].second}};
    availability[std::string(to_string(level))] = lv;
  }
  auto levels = nlohmann::ordered_json::array();
  for (auto l : r.levels) levels.push_back(to_string(l));
  j["provenance"] = {{"tool", "clear"},
                     {"version", r.version},
                     {"config_hash", r.config_hash},
                     {"dataset", r.dataset},
                     {"levels", levels},
                     {"pair_count", r.pairs.size()},
                     {"metric_availability", availability}};
  j["config"] = r.config;
  auto pairs = nlohmann::ordered_json::array();
  for (const auto& p : r.pairs) pairs.push_back(to_json(p));
  j["pairs"] = pairs;

  auto ts = summarize_transformations(r);
  nlohmann::ordered_json mean;
  for (auto t : kAllTransformations) mean[std::string(to_string(t))] = ts.mean(t);
  mean["copy+rephrase"] = ts.mean(Transformation::copy) + ts.mean(Transformation::rephrase);
  j["transformations"] = {{"documents", ts.documents}, {"total", detail::transformations_json(ts.total)}, {"mean", mean}};

  auto cs = summarize_components(r);
  nlohmann::ordered_json cmean;
  for (std::size_t k = 0; k < kComponentMetrics.size(); ++k) cmean[std::string(kComponentMetrics[k])] = cs.mean_delta[k];
  j["components"] = {{"documents", cs.documents}, {"mean_delta", cmean}};

  j["bias"] = to_json(r.bias);
  j["dataset_stats"] = {
      {"original", r.stats_original ? nlohmann::ordered_json(to_json(*r.stats_original)) : nlohmann::ordered_json(nullptr)},
      {"improved", r.stats_improved ? nlohmann::ordered_json(to_json(*r.stats_improved)) : nlohmann::ordered_json(nullptr)}};
  return j;
}

// Reads a report written by to_json. Derived sections (summaries,
// availability) are recomputed rather than read. Key order is kept.
inline ReportBundle report_from_json(const nlohmann::ordered_json& j) {
  ReportBundle r;
  try {
    const auto& prov = j.at("provenance");
    r.version = prov.at("version").get<std::string>();
    r.config_hash = prov.at("config_hash").get<std::string>();
    r.dataset = prov.at("dataset").get<std::string>();
    for (const auto& l : prov.at("levels")) r.levels.push_back(parse_level(l.get<std::string>()));
    r.config = j.at("config");

    for (const auto& pj : j.at("pairs")) {
      PairReport p;
      p.id = pj.at("id").get<std::string>();
      p.language = parse_language(pj.at("language").get<std::string>());
      p.topic = pj.at("topic").get<std::string>();
      p.original_length = pj.at("original_length").get<long>();
      p.improved_length = pj.at("improved_length").get<long>();
      for (auto level : kAllLevels) {
        auto it = pj.find(std::string(to_string(level)));
        if (it == pj.end()) continue;
        const auto& lj = *it;
        LevelReport lr;
        for (const auto& [name, mj] : lj.at("metrics").items()) {
          if (mj.contains("unavailable")) {
            lr.metrics.push_back(MetricEntry::missing(name, mj.at("unavailable").get<std::string>()));
          } else {
            lr.metrics.push_back(MetricEntry::of(name, detail::opt_double(mj, "original"),
                                                 detail::opt_double(mj, "improved"), mj.value("source", std::string{})));
          }
        }
        if (auto pm = lj.find("pair"); pm != lj.end()) {
          for (const auto& [name, v] : pm->items()) {
            if (v.is_object())
              lr.pair_metrics.push_back({name, std::nullopt, v.at("unavailable").get<std::string>()});
            else
              lr.pair_metrics.push_back({name, v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()),
                                         std::nullopt});
          }
        }
        if (level == Level::syntactic) {
          const auto& tj = lj.at("transformations");
          if (!tj.contains("unavailable")) {
            TransformationCounts c;
            for (auto t : kAllTransformations) c[t] = tj.at(std::string(to_string(t))).get<int>();
            p.transformations = c;
          }
          p.alignment_backend = lj.value("alignment_backend", std::string{});
          if (auto al = lj.find("alignment"); al != lj.end()) {
            for (const auto& l : *al)
              p.alignment.push_back({{l.at("source").get<std::vector<int>>(), l.at("target").get<std::vector<int>>(),
                                      l.at("score").get<double>()},
                                     detail::parse_transformation(l.at("category").get<std::string>())});
          }
        }
        if (level == Level::pragmatic) {
          if (auto calls = lj.find("judge"); calls != lj.end()) {
            for (const auto& c : *calls) {
              JudgeResult jr;
              jr.pair_id = p.id;
              jr.side = parse_side(c.at("side").get<std::string>());
              jr.dimension = parse_dimension(c.at("dimension").get<std::string>());
              if (!c.at("score").is_null()) jr.score = c.at("score").get<int>();
              jr.attempts = c.at("attempts").get<int>();
              jr.failure = detail::parse_failure(c.at("failure").get<std::string>());
              jr.raw_response = c.at("raw_response").get<std::string>();
              jr.error = c.value("error", std::string{});
              p.judge.push_back(std::move(jr));
            }
          }
        }
        p.levels[level] = std::move(lr);
      }
      const auto& cj = pj.at("components");
      if (cj.contains("unavailable")) {
        p.components_unavailable = cj.at("unavailable").get<std::string>();
      } else {
        p.components_original = detail::counts_from_json(cj.at("original"));
        p.components_improved = detail::counts_from_json(cj.at("improved"));
      }
      p.warnings = pj.at("warnings").get<std::vector<std::string>>();
      r.pairs.push_back(std::move(p));
    }

    const auto& bj = j.at("bias");
    for (const auto& c : bj.at("correlations_vs_original_length")) {
      CorrelationEntry e{c.at("metric").get<std::string>(), c.at("mode").get<std::string>(), std::nullopt, std::nullopt};
      if (c.contains("unavailable"))
        e.unavailable = c.at("unavailable").get<std::string>();
      else
        e.result = CorrelationResult{e.metric, c.at("r").get<double>(), c.at("p").get<double>(), c.at("n").get<int>()};
      r.bias.correlations.push_back(std::move(e));
    }
    for (const auto& s : bj.at("sentiment_shifts").at("shifts"))
      r.bias.shifts.push_back(SentimentShift::make(s.at("pair_id").get<std::string>(), s.at("polarity_human").get<double>(),
                                                   s.at("polarity_improved").get<double>()));
    r.bias.shift_summary = shift_summary(r.bias.shifts);

    const auto& ds = j.at("dataset_stats");
    if (!ds.at("original").is_null()) r.stats_original = dataset_stats_from_json(nlohmann::json::parse(ds.at("original").dump()));
    if (!ds.at("improved").is_null()) r.stats_improved = dataset_stats_from_json(nlohmann::json::parse(ds.at("improved").dump()));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  return r;
}

inline ReportBundle load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open report: " + path.string());
  try {
    return report_from_json(nlohmann::ordered_json::parse(in));
  } catch (const nlohmann::ordered_json::parse_error& e) {
    throw ParseError(path.string() + ": malformed JSON: " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV

// Shortest representation that reads back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string{}; }

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// One row per (pair, metric).
inline void write_metrics_csv(const ReportBundle& r, std::ostream& out) {
  out << "pair_id,level,metric,original,improved,percent_change,value,unavailable\n";
  for (const auto& p : r.pairs) {
    for (const auto& [level, lr] : p.levels) {
      const std::string prefix = csv_field(p.id) + "," + std::string(to_string(level)) + ",";
      for (const auto& m : lr.metrics)
        out << prefix << csv_field(m.name) << "," << format_number(m.original) << "," << format_number(m.improved)
            << "," << format_number(m.percent_change()) << ",," << csv_field(m.unavailable.value_or("")) << "\n";
      for (const auto& s : lr.pair_metrics)
        out << prefix << csv_field(s.name) << ",,,," << format_number(s.value) << ","
            << csv_field(s.unavailable.value_or("")) << "\n";
      if (level == Level::syntactic && p.transformations)
        for (auto t : kAllTransformations)
          out << prefix << to_string(t) << ",,,," << (*p.transformations)[t] << ",\n";
    }
  }
}

inline void write_heatmap_csv(const Heatmap& h, std::ostream& out) {
  out << "dataset";
  for (const auto& m : h.metrics) out << "," << csv_field(m);
  for (const auto& m : h.metrics) out << ",n_" << csv_field(m);
  out << "\n";
  for (std::size_t r = 0; r < h.datasets.size(); ++r) {
    out << csv_field(h.datasets[r]);
    for (const auto& c : h.cells[r]) out << "," << format_number(c.mean);
    for (const auto& c : h.cells[r]) out << "," << c.n;
    out << "\n";
  }
}

// Mean transformations per document; one column per dataset.
inline void write_transformations_csv(std::span<const ReportBundle> reports, std::ostream& out) {
  out << "category";
  for (const auto& r : reports) out << "," << csv_field(r.dataset);
  out << "\n";
  std::vector<TransformationSummary> sums;
  for (const auto& r : reports) sums.push_back(summarize_transformations(r));
  for (auto t : kAllTransformations) {
    out << to_string(t);
    for (const auto& s : sums) out << "," << format_number(s.mean(t));
    out << "\n";
  }
  out << "copy+rephrase";
  for (const auto& s : sums) out << "," << format_number(s.mean(Transformation::copy) + s.mean(Transformation::rephrase));
  out << "\n";
}

// Mean change in argument components per document.
inline void write_components_csv(std::span<const ReportBundle> reports, std::ostream& out) {
  out << "component";
  for (const auto& r : reports) out << "," << csv_field(r.dataset);
  out << "\n";
  std::vector<ComponentSummary> sums;
  for (const auto& r : reports) sums.push_back(summarize_components(r));
  static constexpr std::array<std::pair<std::string_view, std::size_t>, 4> kRows{
      {{"Claim", 1}, {"MajorClaim", 0}, {"None", 3}, {"Premise", 2}}};
  for (const auto& [label, k] : kRows) {
    out << label;
    for (const auto& s : sums) out << "," << (s.documents ? format_number(s.mean_delta[k]) : std::string{});
    out << "\n";
  }
}

inline void write_correlations_csv(const BiasReport& b, std::ostream& out) {
  out << "metric,mode,r,p,n,unavailable\n";
  for (const auto& c : b.correlations) {
    out << csv_field(c.metric) << "," << c.mode << ",";
    if (c.result)
      out << format_number(c.result->r) << "," << format_number(c.result->p) << "," << c.result->n << ",\n";
    else
      out << ",,," << csv_field(c.unavailable.value_or("")) << "\n";
  }
}

enum class OutputFormat { json, csv, heatmap_csv };

inline void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

inline void emit(const ReportBundle& r, OutputFormat format, const std::filesystem::path& path,
                 Level level = Level::lexical) {
  switch (format) {
    case OutputFormat::json:
      write_file(path, [&](std::ostream& o) { o << to_json(r).dump(1) << "\n"; });
      return;
    case OutputFormat::csv:
      write_file(path, [&](std::ostream& o) { write_metrics_csv(r, o); });
      return;
    case OutputFormat::heatmap_csv:
      write_file(path, [&](std::ostream& o) { write_heatmap_csv(build_heatmap(std::span(&r, 1), level), o); });
      return;
  }
}

// Full output set for one run.
inline std::vector<std::filesystem::path> emit_all(const ReportBundle& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
    write_file(dir / name, body);
    written.push_back(dir / name);
  };
  put("report.json", [&](std::ostream& o) { o << to_json(r).dump(1) << "\n"; });
  put("metrics.csv", [&](std::ostream& o) { write_metrics_csv(r, o); });
  for (auto level : r.levels)
    put("heatmap_" + std::string(to_string(level)) + ".csv",
        [&](std::ostream& o) { write_heatmap_csv(build_heatmap(std::span(&r, 1), level), o); });
  if (r.enabled(Level::syntactic))
    put("transformations.csv", [&](std::ostream& o) { write_transformations_csv(std::span(&r, 1), o); });
  put("components.csv", [&](std::ostream& o) { write_components_csv(std::span(&r, 1), o); });
  put("correlations.csv", [&](std::ostream& o) { write_correlations_csv(r.bias, o); });
  return written;
}

}  // namespace clear
