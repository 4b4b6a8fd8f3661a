#ifndef HAARDY_DYADIC_HPP
#define HAARDY_DYADIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "haardy/rat.hpp"

namespace haardy {

// Half-open dyadic interval [i*2^-j, (i+1)*2^-j) of [0,1).
struct DyadicInterval {
  uint32_t level = 0;
  uint64_t pos = 0;

  bool operator==(const DyadicInterval&) const = default;
};

inline constexpr uint32_t kMaxLevel = 40;

// iota enumeration: root -> 1, left-to-right within a level, level by level.
// The constant slot (empty symbol) is 0 by convention.
uint64_t iota(const DyadicInterval& I);
DyadicInterval interval_from_iota(uint64_t n);

DyadicInterval make_interval(uint32_t level, uint64_t pos);

// Left half I+ (where the Haar function is +1) and right half I-.
DyadicInterval left_half(const DyadicInterval& I);
DyadicInterval right_half(const DyadicInterval& I);

// Dyadic predecessor; DomainError for the root.
DyadicInterval predecessor(const DyadicInterval& I);

bool is_root(const DyadicInterval& I);
bool contains(const DyadicInterval& outer, const DyadicInterval& inner);
bool disjoint(const DyadicInterval& a, const DyadicInterval& b);
Rat measure(const DyadicInterval& I);

// Serialization key "j:i".
std::string interval_key(const DyadicInterval& I);
DyadicInterval interval_from_key(const std::string& key);

// Collections are kept sorted by iota with duplicates removed.
using IntervalCollection = std::vector<DyadicInterval>;

IntervalCollection normalize_collection(IntervalCollection A);

// Pairwise disjointness of all members.
bool pairwise_disjoint(const IntervalCollection& A);

// Total measure of the union (members need not be disjoint).
Rat union_measure(const IntervalCollection& A);

// Whether the union of A equals [0,1) exactly.
bool is_tiling(const IntervalCollection& A);

// Generations: G_0(A) = inclusion-maximal members, G_{n+1} = G_0 of what
// remains. Returned until exhaustion; every member appears exactly once.
std::vector<IntervalCollection> generations(const IntervalCollection& A);

}  // namespace haardy

#endif
