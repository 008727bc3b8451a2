#pragma once

// Monotone n:m sentence alignment between an original and an improved text,
// and classification of the resulting links into transformation categories.
//
// Stage 1 fixes 1:1 anchors (mutual best matches above a threshold that do
// not gain similarity when extended by a neighbouring sentence). Stage 2 runs
// a block dynamic program between consecutive anchors over the moves
// 1:0 0:1 1:1 1:2 2:1 2:2 1:3 3:1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clear/error.hpp"
#include "clear/textproc.hpp"
#include "clear/unicode.hpp"

namespace clear {

struct AlignmentLink {
  std::vector<int> source;  // original-sentence indices, strictly increasing
  std::vector<int> target;  // improved-sentence indices, strictly increasing
  double score = 0.0;
};

struct AlignParams {
  double anchor_threshold = 0.6;
  double min_score = 0.3;
  double extra_penalty = 0.05;  // per sentence beyond the first on each side
  double gap_score = 0.0;
  bool use_anchors = true;
};

// ---------------------------------------------------------------------------
// Similarity backends. Blocks are contiguous half-open sentence ranges.

struct Block {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
};

class SimilarityBackend {
 public:
  virtual ~SimilarityBackend() = default;
  virtual double similarity(Block source, Block target) const = 0;
  virtual int source_count() const = 0;
  virtual int target_count() const = 0;
};

namespace detail {

using SparseVector = std::vector<std::pair<std::uint64_t, double>>;  // sorted by key

inline double sparse_cosine(const SparseVector& a, const SparseVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [_, v] : a) na += v * v;
  for (const auto& [_, v] : b) nb += v * v;
  if (na == 0.0 || nb == 0.0) return 0.0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      dot += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

inline double dense_cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

}  // namespace detail

// Character trigram counts of the normalized text, padded with one space on
// each side. Code points fit in 21 bits, so a trigram packs into 63 bits.
inline detail::SparseVector trigram_vector(std::string_view text) {
  std::u32string s = U" " + unicode::to_u32(normalize(text)) + U" ";
  std::map<std::uint64_t, double> counts;
  for (std::size_t i = 0; i + 3 <= s.size(); ++i) {
    std::uint64_t key = (static_cast<std::uint64_t>(s[i]) << 42) | (static_cast<std::uint64_t>(s[i + 1]) << 21) |
                        static_cast<std::uint64_t>(s[i + 2]);
    counts[key] += 1.0;
  }
  return {counts.begin(), counts.end()};
}

inline std::string join_sentences(std::span<const std::string> sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i) out += ' ';
    out += sentences[i];
  }
  return out;
}

class TrigramSimilarity final : public SimilarityBackend {
 public:
  TrigramSimilarity(std::vector<std::string> source, std::vector<std::string> target)
      : source_(std::move(source)), target_(std::move(target)) {}

  double similarity(Block s, Block t) const override {
    return detail::sparse_cosine(vector_for(source_, source_cache_, s), vector_for(target_, target_cache_, t));
  }
  int source_count() const override { return static_cast<int>(source_.size()); }
  int target_count() const override { return static_cast<int>(target_.size()); }

 private:
  using Cache = std::map<std::pair<int, int>, detail::SparseVector>;

  static const detail::SparseVector& vector_for(const std::vector<std::string>& sents, Cache& cache, Block b) {
    auto key = std::make_pair(b.begin, b.end);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::span<const std::string> block(sents.data() + b.begin, static_cast<std::size_t>(b.size()));
    return cache.emplace(key, trigram_vector(join_sentences(block))).first->second;
  }

  std::vector<std::string> source_;
  std::vector<std::string> target_;
  mutable Cache source_cache_;
  mutable Cache target_cache_;
};

// Cosine of mean sentence vectors.
class EmbeddingSimilarity final : public SimilarityBackend {
 public:
  EmbeddingSimilarity(std::vector<std::vector<double>> source, std::vector<std::vector<double>> target)
      : source_(std::move(source)), target_(std::move(target)) {
    std::size_t dim = 0;
    for (const auto* side : {&source_, &target_})
      for (const auto& v : *side) {
        if (dim == 0) dim = v.size();
        if (v.size() != dim || dim == 0) throw ValidationError("embedding vectors differ in dimension");
      }
  }

  double similarity(Block s, Block t) const override {
    return detail::dense_cosine(mean(source_, s), mean(target_, t));
  }
  int source_count() const override { return static_cast<int>(source_.size()); }
  int target_count() const override { return static_cast<int>(target_.size()); }

 private:
  static std::vector<double> mean(const std::vector<std::vector<double>>& vs, Block b) {
    std::vector<double> m(vs.at(static_cast<std::size_t>(b.begin)).size(), 0.0);
    for (int i = b.begin; i < b.end; ++i)
      for (std::size_t k = 0; k < m.size(); ++k) m[k] += vs[static_cast<std::size_t>(i)][k];
    for (double& x : m) x /= static_cast<double>(b.size());
    return m;
  }

  std::vector<std::vector<double>> source_;
  std::vector<std::vector<double>> target_;
};

// Similarity of two non-empty sentence blocks; embeddings (one vector per
// sentence, source block first) select the embedding backend.
inline double block_similarity(std::span<const std::string> source, std::span<const std::string> target,
                               const std::optional<std::pair<std::vector<std::vector<double>>,
                                                             std::vector<std::vector<double>>>>& embeddings = std::nullopt) {
  if (source.empty() || target.empty()) throw ValidationError("block_similarity: empty block");
  if (embeddings) {
    EmbeddingSimilarity sim(embeddings->first, embeddings->second);
    return sim.similarity({0, sim.source_count()}, {0, sim.target_count()});
  }
  return detail::sparse_cosine(trigram_vector(join_sentences(source)), trigram_vector(join_sentences(target)));
}

// ---------------------------------------------------------------------------
// Alignment

inline constexpr std::array<std::pair<int, int>, 8> kAlignMoves{
    {{1, 1}, {1, 0}, {0, 1}, {2, 1}, {1, 2}, {2, 2}, {3, 1}, {1, 3}}};

// Objective contribution of one block. Similarity is weighted by the mean
// number of sentences the block covers, so a single n:m block competes with
// the sum of the smaller links it replaces.
inline double block_value(int n_source, int n_target, double similarity, const AlignParams& params) {
  if (n_source == 0 || n_target == 0) return params.gap_score * (n_source + n_target);
  return similarity * (n_source + n_target) / 2.0 - params.extra_penalty * (n_source + n_target - 2);
}

struct SegmentAlignment {
  std::vector<AlignmentLink> links;
  double objective = 0.0;
};

// Optimal monotone block alignment of source [s0, s1) to target [t0, t1).
inline SegmentAlignment align_segment(const SimilarityBackend& sim, int s0, int s1, int t0, int t1,
                                      const AlignParams& params) {
  const int n = s1 - s0, m = t1 - t0;
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(static_cast<std::size_t>(n + 1), std::vector<double>(static_cast<std::size_t>(m + 1), kNegInf));
  std::vector<std::vector<int>> move(static_cast<std::size_t>(n + 1), std::vector<int>(static_cast<std::size_t>(m + 1), -1));
  std::vector<std::vector<double>> link_sim(static_cast<std::size_t>(n + 1), std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
  best[0][0] = 0.0;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= m; ++j) {
      if (i == 0 && j == 0) continue;
      for (std::size_t k = 0; k < kAlignMoves.size(); ++k) {
        auto [di, dj] = kAlignMoves[k];
        if (di > i || dj > j) continue;
        double prev = best[static_cast<std::size_t>(i - di)][static_cast<std::size_t>(j - dj)];
        if (prev == kNegInf) continue;
        double s = 0.0;
        if (di > 0 && dj > 0) s = sim.similarity({s0 + i - di, s0 + i}, {t0 + j - dj, t0 + j});
        double v = prev + block_value(di, dj, s, params);
        if (v > best[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
          best[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
          move[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = static_cast<int>(k);
          link_sim[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
        }
      }
    }
  }
  SegmentAlignment out;
  out.objective = best[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
  for (int i = n, j = m; i > 0 || j > 0;) {
    int k = move[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    auto [di, dj] = kAlignMoves[static_cast<std::size_t>(k)];
    AlignmentLink link;
    for (int a = i - di; a < i; ++a) link.source.push_back(s0 + a);
    for (int b = j - dj; b < j; ++b) link.target.push_back(t0 + b);
    link.score = link_sim[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    out.links.push_back(std::move(link));
    i -= di;
    j -= dj;
  }
  std::reverse(out.links.begin(), out.links.end());
  return out;
}

// Anchors: mutual-argmax 1:1 pairs above the threshold whose similarity does
// not improve by absorbing an adjacent sentence on either side, reduced to the
// heaviest monotone chain.
inline std::vector<std::pair<int, int>> find_anchors(const SimilarityBackend& sim, const AlignParams& params) {
  const int n = sim.source_count(), m = sim.target_count();
  if (n == 0 || m == 0) return {};
  std::vector<std::vector<double>> s(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(m)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = sim.similarity({i, i + 1}, {j, j + 1});
  auto at = [&](int i, int j) { return s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };

  std::vector<std::pair<int, int>> candidates;
  for (int i = 0; i < n; ++i) {
    int bj = 0;
    for (int j = 1; j < m; ++j)
      if (at(i, j) > at(i, bj)) bj = j;
    int bi = 0;
    for (int k = 1; k < n; ++k)
      if (at(k, bj) > at(bi, bj)) bi = k;
    if (bi != i || at(i, bj) < params.anchor_threshold) continue;
    const double base = at(i, bj);
    bool extendable = (i > 0 && sim.similarity({i - 1, i + 1}, {bj, bj + 1}) > base) ||
                      (i + 1 < n && sim.similarity({i, i + 2}, {bj, bj + 1}) > base) ||
                      (bj > 0 && sim.similarity({i, i + 1}, {bj - 1, bj + 1}) > base) ||
                      (bj + 1 < m && sim.similarity({i, i + 1}, {bj, bj + 2}) > base);
    if (!extendable) candidates.emplace_back(i, bj);
  }
  if (candidates.empty()) return {};

  // Heaviest chain increasing in both coordinates; candidates are sorted by i.
  const std::size_t k = candidates.size();
  std::vector<double> weight(k);
  std::vector<int> parent(k, -1);
  for (std::size_t a = 0; a < k; ++a) {
    weight[a] = at(candidates[a].first, candidates[a].second);
    for (std::size_t b = 0; b < a; ++b) {
      if (candidates[b].first < candidates[a].first && candidates[b].second < candidates[a].second) {
        double w = weight[b] + at(candidates[a].first, candidates[a].second);
        if (w > weight[a]) {
          weight[a] = w;
          parent[a] = static_cast<int>(b);
        }
      }
    }
  }
  int end = static_cast<int>(std::max_element(weight.begin(), weight.end()) - weight.begin());
  std::vector<std::pair<int, int>> chain;
  for (int c = end; c >= 0; c = parent[static_cast<std::size_t>(c)]) chain.push_back(candidates[static_cast<std::size_t>(c)]);
  std::reverse(chain.begin(), chain.end());
  return chain;
}

inline std::vector<AlignmentLink> align(const SimilarityBackend& sim, const AlignParams& params = {}) {
  const int n = sim.source_count(), m = sim.target_count();
  std::vector<std::pair<int, int>> anchors;
  if (params.use_anchors) anchors = find_anchors(sim, params);

  std::vector<AlignmentLink> raw;
  int s = 0, t = 0;
  auto fill = [&](int s1, int t1) {
    auto seg = align_segment(sim, s, s1, t, t1, params);
    raw.insert(raw.end(), seg.links.begin(), seg.links.end());
  };
  for (auto [i, j] : anchors) {
    fill(i, j);
    raw.push_back({{i}, {j}, sim.similarity({i, i + 1}, {j, j + 1})});
    s = i + 1;
    t = j + 1;
  }
  fill(n, m);

  std::vector<AlignmentLink> out;
  for (auto& link : raw) {
    bool paired = !link.source.empty() && !link.target.empty();
    if (!paired || link.score >= params.min_score) {
      if (!paired) link.score = 0.0;
      out.push_back(std::move(link));
      continue;
    }
    for (int i : link.source) out.push_back({{i}, {}, 0.0});
    for (int j : link.target) out.push_back({{}, {j}, 0.0});
  }
  return out;
}

inline std::vector<AlignmentLink> align(const std::vector<std::string>& original_sentences,
                                        const std::vector<std::string>& improved_sentences,
                                        const AlignParams& params = {}) {
  TrigramSimilarity sim(original_sentences, improved_sentences);
  return align(sim, params);
}

// ---------------------------------------------------------------------------
// Transformation taxonomy

enum class Transformation { add, copy, rephrase, split, merge, fusion, del, other };

inline constexpr std::array<Transformation, 8> kAllTransformations{
    Transformation::add,   Transformation::copy,   Transformation::rephrase, Transformation::split,
    Transformation::merge, Transformation::fusion, Transformation::del,      Transformation::other};

inline std::string_view to_string(Transformation t) {
  switch (t) {
    case Transformation::add: return "add";
    case Transformation::copy: return "copy";
    case Transformation::rephrase: return "rephrase";
    case Transformation::split: return "split";
    case Transformation::merge: return "merge";
    case Transformation::fusion: return "fusion";
    case Transformation::del: return "delete";
    case Transformation::other: break;
  }
  return "other";
}

struct TransformationCounts {
  int add = 0;
  int copy = 0;
  int rephrase = 0;
  int split = 0;
  int merge = 0;
  int fusion = 0;
  int del = 0;
  int other = 0;

  int& operator[](Transformation t) {
    switch (t) {
      case Transformation::add: return add;
      case Transformation::copy: return copy;
      case Transformation::rephrase: return rephrase;
      case Transformation::split: return split;
      case Transformation::merge: return merge;
      case Transformation::fusion: return fusion;
      case Transformation::del: return del;
      case Transformation::other: break;
    }
    return other;
  }
  int operator[](Transformation t) const { return const_cast<TransformationCounts&>(*this)[t]; }
  friend bool operator==(const TransformationCounts&, const TransformationCounts&) = default;
};

struct BlockBounds {
  int max_source = 3;
  int max_target = 3;
};

inline Transformation classify_link(const AlignmentLink& link, std::span<const std::string> original,
                                    std::span<const std::string> improved, const BlockBounds& bounds = {}) {
  const auto n = static_cast<int>(link.source.size());
  const auto m = static_cast<int>(link.target.size());
  if (n > bounds.max_source || m > bounds.max_target) return Transformation::other;
  if (n == 1 && m == 0) return Transformation::del;
  if (n == 0 && m == 1) return Transformation::add;
  if (n == 1 && m == 1) {
    return normalize(original[static_cast<std::size_t>(link.source[0])]) ==
                   normalize(improved[static_cast<std::size_t>(link.target[0])])
               ? Transformation::copy
               : Transformation::rephrase;
  }
  if (n == 1 && m > 1) return Transformation::split;
  if (n > 1 && m == 1) return Transformation::merge;
  if (n > 1 && m > 1) return Transformation::fusion;
  return Transformation::other;  // multi-sentence gap links
}

// Throws ValidationError unless every sentence on both sides is covered by
// exactly one link with strictly increasing indices.
inline void check_alignment(std::span<const AlignmentLink> links, int n_source, int n_target) {
  std::vector<int> src(static_cast<std::size_t>(n_source), 0), tgt(static_cast<std::size_t>(n_target), 0);
  for (std::size_t k = 0; k < links.size(); ++k) {
    const auto& l = links[k];
    if (l.source.empty() && l.target.empty()) throw ValidationError("link " + std::to_string(k) + " is empty");
    for (const auto* side : {&l.source, &l.target}) {
      for (std::size_t a = 1; a < side->size(); ++a)
        if ((*side)[a] <= (*side)[a - 1])
          throw ValidationError("link " + std::to_string(k) + " indices are not strictly increasing");
    }
    for (int i : l.source) {
      if (i < 0 || i >= n_source) throw ValidationError("link " + std::to_string(k) + ": source index out of range");
      if (++src[static_cast<std::size_t>(i)] > 1)
        throw ValidationError("original sentence " + std::to_string(i) + " is covered twice");
    }
    for (int j : l.target) {
      if (j < 0 || j >= n_target) throw ValidationError("link " + std::to_string(k) + ": target index out of range");
      if (++tgt[static_cast<std::size_t>(j)] > 1)
        throw ValidationError("improved sentence " + std::to_string(j) + " is covered twice");
    }
  }
  for (int i = 0; i < n_source; ++i)
    if (!src[static_cast<std::size_t>(i)]) throw ValidationError("original sentence " + std::to_string(i) + " is not covered");
  for (int j = 0; j < n_target; ++j)
    if (!tgt[static_cast<std::size_t>(j)]) throw ValidationError("improved sentence " + std::to_string(j) + " is not covered");
}

// True when link order never crosses: every index of a later link is greater
// than every index of an earlier one on the same side.
inline bool is_monotone(std::span<const AlignmentLink> links) {
  int last_s = -1, last_t = -1;
  for (const auto& l : links) {
    for (int i : l.source) {
      if (i <= last_s) return false;
      last_s = i;
    }
    for (int j : l.target) {
      if (j <= last_t) return false;
      last_t = j;
    }
  }
  return true;
}

inline TransformationCounts classify(std::span<const AlignmentLink> links, std::span<const std::string> original,
                                     std::span<const std::string> improved, const BlockBounds& bounds = {}) {
  check_alignment(links, static_cast<int>(original.size()), static_cast<int>(improved.size()));
  TransformationCounts counts;
  for (const auto& l : links) ++counts[classify_link(l, original, improved, bounds)];
  return counts;
}

inline std::vector<std::string> sentence_texts(std::string_view text, std::span<const Span> spans) {
  std::vector<std::string> out;
  out.reserve(spans.size());
  for (const auto& s : spans) out.emplace_back(s.slice(text));
  return out;
}

}  // namespace clear
