#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "tkg/error.hpp"

namespace tkg {

using Frame = std::int64_t;

// Inclusive frame interval [start, end].
struct TimeInterval {
  Frame start = 0;
  Frame end = 0;

  constexpr Frame length() const noexcept { return end - start + 1; }
  constexpr bool valid() const noexcept { return start >= 0 && start <= end; }
  constexpr bool contains(const TimeInterval& o) const noexcept {
    return start <= o.start && o.end <= end;
  }

  friend constexpr auto operator<=>(const TimeInterval&,
                                    const TimeInterval&) = default;
};

inline TimeInterval make_interval(Frame start, Frame end) {
  TimeInterval i{start, end};
  if (!i.valid())
    throw Error(ErrorCode::InvariantViolation,
                "invalid interval [" + std::to_string(start) + ", " +
                    std::to_string(end) + "]");
  return i;
}

constexpr std::optional<TimeInterval> intersect(const TimeInterval& a,
                                                const TimeInterval& b) noexcept {
  const Frame s = std::max(a.start, b.start);
  const Frame e = std::min(a.end, b.end);
  if (s > e) return std::nullopt;
  return TimeInterval{s, e};
}

constexpr TimeInterval hull(const TimeInterval& a, const TimeInterval& b) noexcept {
  return {std::min(a.start, b.start), std::max(a.end, b.end)};
}

// The thirteen Allen relations of interval i to interval j.
enum class AllenRelation : std::uint8_t {
  Before,
  Meets,
  Overlaps,
  Starts,
  During,
  Finishes,
  Equals,
  FinishedBy,
  Contains,
  StartedBy,
  OverlappedBy,
  MetBy,
  After,
};

inline constexpr std::array<AllenRelation, 13> kAllAllenRelations = {
    AllenRelation::Before,     AllenRelation::Meets,     AllenRelation::Overlaps,
    AllenRelation::Starts,     AllenRelation::During,    AllenRelation::Finishes,
    AllenRelation::Equals,     AllenRelation::FinishedBy, AllenRelation::Contains,
    AllenRelation::StartedBy,  AllenRelation::OverlappedBy, AllenRelation::MetBy,
    AllenRelation::After};

constexpr AllenRelation inverse(AllenRelation r) noexcept {
  switch (r) {
    case AllenRelation::Before: return AllenRelation::After;
    case AllenRelation::Meets: return AllenRelation::MetBy;
    case AllenRelation::Overlaps: return AllenRelation::OverlappedBy;
    case AllenRelation::Starts: return AllenRelation::StartedBy;
    case AllenRelation::During: return AllenRelation::Contains;
    case AllenRelation::Finishes: return AllenRelation::FinishedBy;
    case AllenRelation::Equals: return AllenRelation::Equals;
    case AllenRelation::FinishedBy: return AllenRelation::Finishes;
    case AllenRelation::Contains: return AllenRelation::During;
    case AllenRelation::StartedBy: return AllenRelation::Starts;
    case AllenRelation::OverlappedBy: return AllenRelation::Overlaps;
    case AllenRelation::MetBy: return AllenRelation::Meets;
    case AllenRelation::After: return AllenRelation::Before;
  }
  return r;
}

inline std::string_view to_string(AllenRelation r) {
  switch (r) {
    case AllenRelation::Before: return "Before";
    case AllenRelation::Meets: return "Meets";
    case AllenRelation::Overlaps: return "Overlaps";
    case AllenRelation::Starts: return "Starts";
    case AllenRelation::During: return "During";
    case AllenRelation::Finishes: return "Finishes";
    case AllenRelation::Equals: return "Equals";
    case AllenRelation::FinishedBy: return "FinishedBy";
    case AllenRelation::Contains: return "Contains";
    case AllenRelation::StartedBy: return "StartedBy";
    case AllenRelation::OverlappedBy: return "OverlappedBy";
    case AllenRelation::MetBy: return "MetBy";
    case AllenRelation::After: return "After";
  }
  return "?";
}

// Discrete inclusive convention: frames are integers, so i meets j when
// j starts on the frame right after i ends.
constexpr AllenRelation allen_relation(const TimeInterval& i,
                                       const TimeInterval& j) noexcept {
  if (i.end + 1 < j.start) return AllenRelation::Before;
  if (i.end + 1 == j.start) return AllenRelation::Meets;
  if (j.end + 1 < i.start) return AllenRelation::After;
  if (j.end + 1 == i.start) return AllenRelation::MetBy;
  // The intervals share at least one frame from here on.
  if (i.start == j.start) {
    if (i.end == j.end) return AllenRelation::Equals;
    return i.end < j.end ? AllenRelation::Starts : AllenRelation::StartedBy;
  }
  if (i.end == j.end)
    return i.start > j.start ? AllenRelation::Finishes : AllenRelation::FinishedBy;
  if (i.start < j.start)
    return i.end < j.end ? AllenRelation::Overlaps : AllenRelation::Contains;
  return i.end < j.end ? AllenRelation::During : AllenRelation::OverlappedBy;
}

}  // namespace tkg
