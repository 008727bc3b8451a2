#pragma once

// Percent-change aggregation, Pearson correlation with two-sided p-values,
// and sentiment shift classification.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clear/error.hpp"

namespace clear {

inline std::optional<double> percent_change(double original, double improved) {
  if (original == 0.0) return std::nullopt;
  return 100.0 * (improved - original) / std::abs(original);
}

inline std::optional<double> percent_change(std::optional<double> original, std::optional<double> improved) {
  if (!original || !improved) return std::nullopt;
  return percent_change(*original, *improved);
}

struct MetricDelta {
  std::string pair_id;
  std::string dataset;
  std::string metric_name;
  std::optional<double> original_value;
  std::optional<double> improved_value;
  std::optional<double> percent_change;

  static MetricDelta make(std::string pair_id, std::string dataset, std::string metric,
                          std::optional<double> original, std::optional<double> improved) {
    MetricDelta d{std::move(pair_id), std::move(dataset), std::move(metric), original, improved, std::nullopt};
    d.percent_change = clear::percent_change(original, improved);
    return d;
  }
};

// ---------------------------------------------------------------------------
// Heatmaps: dataset x metric matrices of means.

struct Observation {
  std::string dataset;
  std::string metric;
  std::optional<double> value;
};

struct HeatmapCell {
  std::optional<double> mean;
  int n = 0;
};

struct Heatmap {
  std::vector<std::string> datasets;
  std::vector<std::string> metrics;
  std::vector<std::vector<HeatmapCell>> cells;  // [dataset][metric]

  const HeatmapCell& at(std::string_view dataset, std::string_view metric) const {
    auto r = std::find(datasets.begin(), datasets.end(), dataset);
    auto c = std::find(metrics.begin(), metrics.end(), metric);
    if (r == datasets.end() || c == metrics.end()) throw Error("heatmap has no cell for the requested key");
    return cells[static_cast<std::size_t>(r - datasets.begin())][static_cast<std::size_t>(c - metrics.begin())];
  }
};

// Values are summed in sorted order so the result does not depend on the
// order of the observations. `metric_order` fixes the columns; metrics not in
// it are appended alphabetically. Datasets appear in first-seen order.
inline Heatmap aggregate_observations(std::span<const Observation> observations,
                                      std::span<const std::string> metric_order = {}) {
  Heatmap h;
  h.metrics.assign(metric_order.begin(), metric_order.end());
  std::map<std::string, std::size_t> extra;
  for (const auto& o : observations) {
    if (std::find(h.datasets.begin(), h.datasets.end(), o.dataset) == h.datasets.end())
      h.datasets.push_back(o.dataset);
    if (std::find(h.metrics.begin(), h.metrics.end(), o.metric) == h.metrics.end()) extra[o.metric] = 0;
  }
  for (const auto& [m, _] : extra) h.metrics.push_back(m);

  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& o : observations) {
    auto& g = groups[{o.dataset, o.metric}];
    if (o.value && std::isfinite(*o.value)) g.push_back(*o.value);
  }
  h.cells.assign(h.datasets.size(), std::vector<HeatmapCell>(h.metrics.size()));
  for (std::size_t r = 0; r < h.datasets.size(); ++r) {
    for (std::size_t c = 0; c < h.metrics.size(); ++c) {
      auto it = groups.find({h.datasets[r], h.metrics[c]});
      if (it == groups.end() || it->second.empty()) continue;
      auto values = it->second;
      std::sort(values.begin(), values.end());
      double sum = 0.0;
      for (double v : values) sum += v;
      h.cells[r][c] = {sum / static_cast<double>(values.size()), static_cast<int>(values.size())};
    }
  }
  return h;
}

inline Heatmap aggregate_heatmap(std::span<const MetricDelta> deltas, std::span<const std::string> metric_order = {}) {
  std::vector<Observation> obs;
  obs.reserve(deltas.size());
  for (const auto& d : deltas) obs.push_back({d.dataset, d.metric_name, d.percent_change});
  return aggregate_observations(obs, metric_order);
}

// ---------------------------------------------------------------------------
// Pearson correlation

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

struct CorrelationResult {
  std::string metric_name;
  double r = 0.0;
  double p = 1.0;
  int n = 0;
};

inline CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys, std::string metric_name = {}) {
  if (xs.size() != ys.size()) throw InsufficientDataError("pearson: sequences differ in length");
  const std::size_t n = xs.size();
  if (n < 3) throw InsufficientDataError("pearson: need at least 3 points, got " + std::to_string(n));
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInputError("pearson: constant input sequence");
  double r = sxy / std::sqrt(sxx * syy);
  r = std::clamp(r, -1.0, 1.0);
  CorrelationResult out{std::move(metric_name), r, 0.0, static_cast<int>(n)};
  const double one_minus_r2 = (1.0 - r) * (1.0 + r);
  if (one_minus_r2 <= 0.0) return out;
  // With t = r*sqrt(nu/(1-r^2)), nu/(nu+t^2) reduces to 1-r^2.
  const double nu = static_cast<double>(n - 2);
  out.p = std::clamp(incomplete_beta(nu / 2.0, 0.5, one_minus_r2), 0.0, 1.0);
  return out;
}

// ---------------------------------------------------------------------------
// Sentiment shifts

enum class ShiftClass { positive, neutral, negative, undefined };

inline std::string_view to_string(ShiftClass c) {
  switch (c) {
    case ShiftClass::positive: return "positive";
    case ShiftClass::neutral: return "neutral";
    case ShiftClass::negative: return "negative";
    case ShiftClass::undefined: break;
  }
  return "undefined";
}

inline constexpr double kShiftThresholdPercent = 20.0;

// Strictly above +20 is positive, strictly below -20 negative.
inline ShiftClass classify_shift(std::optional<double> shift_percentage) {
  if (!shift_percentage || !std::isfinite(*shift_percentage)) return ShiftClass::undefined;
  if (*shift_percentage > kShiftThresholdPercent) return ShiftClass::positive;
  if (*shift_percentage < -kShiftThresholdPercent) return ShiftClass::negative;
  return ShiftClass::neutral;
}

struct SentimentShift {
  std::string pair_id;
  double polarity_human = 0.0;
  double polarity_improved = 0.0;
  double delta = 0.0;
  std::optional<double> shift_percentage;
  ShiftClass shift_class = ShiftClass::undefined;

  static SentimentShift make(std::string pair_id, double human, double improved) {
    SentimentShift s{std::move(pair_id), human, improved, improved - human, std::nullopt, ShiftClass::undefined};
    if (human != 0.0) s.shift_percentage = 100.0 * s.delta / std::abs(human);
    s.shift_class = classify_shift(s.shift_percentage);
    return s;
  }
};

struct ShiftSummary {
  int positive = 0;
  int neutral = 0;
  int negative = 0;
  int undefined = 0;
  double positive_pct = 0.0;
  double neutral_pct = 0.0;
  double negative_pct = 0.0;
  double mean = 0.0;
  double median = 0.0;

  int defined() const { return positive + neutral + negative; }
};

inline ShiftSummary shift_summary(std::span<const SentimentShift> shifts) {
  ShiftSummary s;
  std::vector<double> values;
  for (const auto& sh : shifts) {
    switch (sh.shift_class) {
      case ShiftClass::positive: ++s.positive; break;
      case ShiftClass::neutral: ++s.neutral; break;
      case ShiftClass::negative: ++s.negative; break;
      case ShiftClass::undefined: ++s.undefined; break;
    }
    if (sh.shift_class != ShiftClass::undefined) values.push_back(*sh.shift_percentage);
  }
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.positive_pct = 100.0 * s.positive / n;
  s.neutral_pct = 100.0 * s.neutral / n;
  s.negative_pct = 100.0 * s.negative / n;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  const std::size_t mid = values.size() / 2;
  s.median = values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
  return s;
}

}  // namespace clear
