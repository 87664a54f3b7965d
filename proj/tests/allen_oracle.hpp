#pragma once

#include <vector>

#include "tkg/interval.hpp"

namespace testing_support {

// Each relation as an independent predicate over endpoints; a correct
// classifier has exactly one of them true for every pair.
inline std::vector<tkg::AllenRelation> allen_truths(const tkg::TimeInterval& i,
                                                    const tkg::TimeInterval& j) {
  using R = tkg::AllenRelation;
  const auto [a, b] = std::pair{i.start, i.end};
  const auto [c, d] = std::pair{j.start, j.end};
  std::vector<R> out;
  if (b + 1 < c) out.push_back(R::Before);
  if (b + 1 == c) out.push_back(R::Meets);
  if (a < c && c <= b && b < d) out.push_back(R::Overlaps);
  if (a == c && b < d) out.push_back(R::Starts);
  if (c < a && b < d) out.push_back(R::During);
  if (c < a && b == d) out.push_back(R::Finishes);
  if (a == c && b == d) out.push_back(R::Equals);
  if (a < c && b == d) out.push_back(R::FinishedBy);
  if (a < c && d < b) out.push_back(R::Contains);
  if (a == c && d < b) out.push_back(R::StartedBy);
  if (c < a && a <= d && d < b) out.push_back(R::OverlappedBy);
  if (d + 1 == a) out.push_back(R::MetBy);
  if (d + 1 < a) out.push_back(R::After);
  return out;
}

inline std::vector<tkg::TimeInterval> intervals_upto(tkg::Frame hi) {
  std::vector<tkg::TimeInterval> out;
  for (tkg::Frame s = 0; s <= hi; ++s)
    for (tkg::Frame e = s; e <= hi; ++e) out.push_back({s, e});
  return out;
}

}  // namespace testing_support
