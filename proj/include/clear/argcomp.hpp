#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

#include "clear/error.hpp"

namespace clear {

struct ComponentCounts {
  int major_claim = 0;
  int claim = 0;
  int premise = 0;
  int none = 0;

  int total() const { return major_claim + claim + premise + none; }
  friend bool operator==(const ComponentCounts&, const ComponentCounts&) = default;
};

inline constexpr std::array<std::string_view, 4> kComponentMetrics{"major_claim", "claim", "premise", "none"};

inline int component_value(const ComponentCounts& c, std::string_view name) {
  if (name == "major_claim") return c.major_claim;
  if (name == "claim") return c.claim;
  if (name == "premise") return c.premise;
  if (name == "none") return c.none;
  throw Error("unknown component metric: " + std::string(name));
}

// Labels: MajorClaim, Claim, Premise, None.
inline ComponentCounts component_counts(std::span<const std::string> labels) {
  ComponentCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& l = labels[i];
    if (l == "MajorClaim") ++c.major_claim;
    else if (l == "Claim") ++c.claim;
    else if (l == "Premise") ++c.premise;
    else if (l == "None") ++c.none;
    else
      throw ValidationError("sentence " + std::to_string(i) + ": unknown argument component label '" + l + "'");
  }
  return c;
}

// improved - original, per component type. Fields may be negative.
inline ComponentCounts component_delta(const ComponentCounts& original, const ComponentCounts& improved) {
  return {improved.major_claim - original.major_claim, improved.claim - original.claim,
          improved.premise - original.premise, improved.none - original.none};
}

}  // namespace clear
