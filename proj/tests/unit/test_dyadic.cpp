#include <doctest.h>

#include "haardy/dyadic.hpp"
#include "haardy/haarfun.hpp"
#include "haardy/err.hpp"

using namespace haardy;

TEST_CASE("iota enumerates levels breadth first and round trips") {
  CHECK(iota(make_interval(0, 0)) == 1);
  CHECK(iota(make_interval(1, 0)) == 2);
  CHECK(iota(make_interval(1, 1)) == 3);
  CHECK(iota(make_interval(3, 5)) == 13);
  for (uint64_t k = 1; k < 512; k++) {
    DyadicInterval I = interval_from_iota(k);
    CHECK(iota(I) == k);
  }
}

TEST_CASE("interval keys round trip") {
  DyadicInterval I = make_interval(4, 11);
  CHECK(interval_key(I) == "4:11");
  CHECK(interval_from_key("4:11") == I);
  CHECK_THROWS_AS(interval_from_key("4:16"), DomainError);
  CHECK_THROWS_AS(interval_from_key("potato"), DomainError);
}

TEST_CASE("halves, predecessor, containment") {
  DyadicInterval I = make_interval(2, 1);
  CHECK(left_half(I) == make_interval(3, 2));
  CHECK(right_half(I) == make_interval(3, 3));
  CHECK(predecessor(left_half(I)) == I);
  CHECK(predecessor(right_half(I)) == I);
  CHECK_THROWS_AS(predecessor(make_interval(0, 0)), DomainError);
  CHECK(is_root(make_interval(0, 0)));

  CHECK(contains(I, left_half(left_half(I))));
  CHECK(!contains(I, make_interval(2, 0)));
  CHECK(disjoint(make_interval(1, 0), make_interval(1, 1)));
  CHECK(!disjoint(I, left_half(I)));
  CHECK(measure(make_interval(3, 5)) == Rat(1, 8));
}

TEST_CASE("collection utilities") {
  IntervalCollection A = {make_interval(1, 1), make_interval(1, 0),
                          make_interval(1, 1)};
  IntervalCollection N = normalize_collection(A);
  REQUIRE(N.size() == 2);
  CHECK(N[0] == make_interval(1, 0));
  CHECK(N[1] == make_interval(1, 1));
  CHECK(pairwise_disjoint(N));
  CHECK(!pairwise_disjoint({make_interval(1, 0), make_interval(2, 1)}));
  CHECK(union_measure(N) == Rat(1));
  CHECK(union_measure({make_interval(2, 0), make_interval(1, 0)}) == Rat(1, 2));
  CHECK(is_tiling(N));
  CHECK(!is_tiling(IntervalCollection{make_interval(1, 0)}));
}

TEST_CASE("generations split a collection into inclusion-maximal layers") {
  IntervalCollection A = {make_interval(1, 0), make_interval(1, 1),
                          make_interval(2, 0), make_interval(2, 1)};
  auto gens = generations(A);
  REQUIRE(gens.size() == 2);
  CHECK(gens[0] == normalize_collection({make_interval(1, 0), make_interval(1, 1)}));
  CHECK(gens[1] == normalize_collection({make_interval(2, 0), make_interval(2, 1)}));
}

TEST_CASE("finite limsup of a chain is the deepest survivor") {
  IntervalCollection B = {make_interval(0, 0), make_interval(1, 0)};
  StepFun ind = limsup_finite(B, 1, 3);
  Rat total = 0;
  for (const auto& v : ind.v) total += v;
  CHECK(total * Rat(1, uint64_t(1) << ind.depth) == Rat(1, 2));
  for (size_t i = 0; i < ind.v.size(); i++) {
    Rat want = i < ind.v.size() / 2 ? Rat(1) : Rat(0);
    CHECK(ind.v[i] == want);
  }
}
