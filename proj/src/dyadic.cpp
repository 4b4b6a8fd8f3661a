#include "haardy/dyadic.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

#include "haardy/err.hpp"

namespace haardy {

static void check_valid(const DyadicInterval& I) {
  if (I.level > kMaxLevel) throw DomainError("interval level exceeds cap");
  if (I.pos >= (uint64_t(1) << I.level)) throw DomainError("interval position out of range");
}

uint64_t iota(const DyadicInterval& I) {
  check_valid(I);
  return (uint64_t(1) << I.level) + I.pos;
}

DyadicInterval interval_from_iota(uint64_t n) {
  if (n == 0) throw DomainError("iota 0 is the constant slot, not an interval");
  uint32_t level = 63;
  while (!(n >> level)) level--;
  return DyadicInterval{level, n - (uint64_t(1) << level)};
}

DyadicInterval make_interval(uint32_t level, uint64_t pos) {
  DyadicInterval I{level, pos};
  check_valid(I);
  return I;
}

DyadicInterval left_half(const DyadicInterval& I) {
  return make_interval(I.level + 1, 2 * I.pos);
}

DyadicInterval right_half(const DyadicInterval& I) {
  return make_interval(I.level + 1, 2 * I.pos + 1);
}

DyadicInterval predecessor(const DyadicInterval& I) {
  if (I.level == 0) throw DomainError("the unit interval has no predecessor");
  return DyadicInterval{I.level - 1, I.pos / 2};
}

bool is_root(const DyadicInterval& I) { return I.level == 0; }

bool contains(const DyadicInterval& outer, const DyadicInterval& inner) {
  if (inner.level < outer.level) return false;
  return (inner.pos >> (inner.level - outer.level)) == outer.pos;
}

bool disjoint(const DyadicInterval& a, const DyadicInterval& b) {
  return !contains(a, b) && !contains(b, a);
}

Rat measure(const DyadicInterval& I) { return dyadic_measure(I.level); }

std::string interval_key(const DyadicInterval& I) {
  return std::to_string(I.level) + ":" + std::to_string(I.pos);
}

DyadicInterval interval_from_key(const std::string& key) {
  auto colon = key.find(':');
  if (colon == std::string::npos) throw DomainError("interval key must be \"j:i\": " + key);
  uint32_t level = 0;
  uint64_t pos = 0;
  auto r1 = std::from_chars(key.data(), key.data() + colon, level);
  auto r2 = std::from_chars(key.data() + colon + 1, key.data() + key.size(), pos);
  if (r1.ec != std::errc() || r1.ptr != key.data() + colon || r2.ec != std::errc() ||
      r2.ptr != key.data() + key.size())
    throw DomainError("interval key must be \"j:i\": " + key);
  return make_interval(level, pos);
}

IntervalCollection normalize_collection(IntervalCollection A) {
  std::sort(A.begin(), A.end(), [](const DyadicInterval& a, const DyadicInterval& b) {
    return iota(a) < iota(b);
  });
  A.erase(std::unique(A.begin(), A.end()), A.end());
  return A;
}

bool pairwise_disjoint(const IntervalCollection& A) {
  // dyadic intervals overlap exactly when one contains the other, so it is
  // enough to look for a member among each member's ancestors
  std::unordered_set<uint64_t> seen;
  for (const auto& I : A)
    if (!seen.insert(iota(I)).second) return false;
  for (const auto& I : A) {
    DyadicInterval J = I;
    while (!is_root(J)) {
      J = predecessor(J);
      if (seen.count(iota(J))) return false;
    }
  }
  return true;
}

Rat union_measure(const IntervalCollection& A) {
  // keep only inclusion-maximal members, then sum
  IntervalCollection sorted = normalize_collection(A);
  Rat total = 0;
  std::vector<DyadicInterval> kept;
  for (const auto& I : sorted) {
    bool covered = false;
    for (const auto& J : kept)
      if (contains(J, I)) { covered = true; break; }
    if (!covered) {
      kept.push_back(I);
      total += measure(I);
    }
  }
  return total;
}

bool is_tiling(const IntervalCollection& A) {
  return pairwise_disjoint(A) && union_measure(A) == 1;
}

std::vector<IntervalCollection> generations(const IntervalCollection& A) {
  IntervalCollection rest = normalize_collection(A);
  std::vector<IntervalCollection> gens;
  while (!rest.empty()) {
    IntervalCollection maximal, remainder;
    for (const auto& I : rest) {
      bool dominated = false;
      for (const auto& J : rest) {
        if (!(J == I) && contains(J, I)) { dominated = true; break; }
      }
      (dominated ? remainder : maximal).push_back(I);
    }
    gens.push_back(normalize_collection(maximal));
    rest = remainder;
  }
  return gens;
}

}  // namespace haardy
