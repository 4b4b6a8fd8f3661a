#include <doctest.h>

#include "haardy/err.hpp"
#include "haardy/stabilize.hpp"

using namespace haardy;

namespace {

HaarMultiplier by_rule(int depth, Rat (*rule)(uint64_t)) {
  HaarMultiplier D;
  D.depth = depth;
  for (uint64_t k = 1; k < (uint64_t(1) << depth); k++) D.entries[k] = rule(k);
  return D;
}

int level_of(uint64_t k) { return int(64 - __builtin_clzll(k)) - 1; }

Rat rule_identity(uint64_t) { return Rat(1); }

Rat rule_alternating(uint64_t k) {
  return (k - (uint64_t(1) << level_of(k))) % 2 == 0 ? Rat(1) : Rat(-1);
}

Rat rule_left_child(uint64_t k) {
  return level_of(k) >= 1 && k % 2 == 0 ? Rat(1) : Rat(0);
}

Rat rule_half_support(uint64_t k) {
  int j = level_of(k);
  return j >= 1 && (k - (uint64_t(1) << j)) < (uint64_t(1) << (j - 1)) ? Rat(1)
                                                                       : Rat(0);
}

}  // namespace

TEST_CASE("randomized system derives gamma sets from signs") {
  RandomizedSystem rs = randomized_system({{1, 1}, {2, 2}, {3, 3}}, {}, 5);
  REQUIRE(rs.index_set.size() == 3);
  CHECK(rs.gamma.at(1) == IntervalCollection{make_interval(1, 0), make_interval(1, 1)});
  IntervalCollection g2 = {make_interval(2, 0), make_interval(2, 2)};
  CHECK(rs.gamma.at(2) == g2);

  std::map<uint64_t, int> flip = {{2, -1}, {3, -1}};
  RandomizedSystem rf = randomized_system({{1, 1}, {2, 2}, {3, 3}}, flip, 5);
  IntervalCollection g2f = {make_interval(2, 1), make_interval(2, 3)};
  CHECK(rf.gamma.at(2) == g2f);

  CHECK_THROWS_AS(randomized_system({{1, 2}, {2, 2}}, {}, 5), ValidationError);
  CHECK_THROWS_AS(randomized_system({{1, 1}, {3, 2}}, {}, 5), ValidationError);
  CHECK_THROWS_AS(randomized_system({{1, 5}}, {}, 5), ResolutionError);
}

TEST_CASE("randomized systems are faithful block systems") {
  RandomizedSystem rs = randomized_system({{1, 1}, {2, 2}, {3, 3}}, {}, 5);
  FaithfulSystem sys = as_faithful(rs);
  SystemReport rep = validate(sys);
  CHECK(rep.valid);
  CHECK(rep.faithful);
  StepFun img = hhat(rs, 1, 5);
  StepFun blk = htilde(sys, 1, 5);
  CHECK(img.v == blk.v);
}

TEST_CASE("conditional statistics match the closed forms") {
  RandomizedSystem rs = randomized_system({{1, 1}, {2, 2}, {3, 3}}, {}, 5);

  ProbStats id = prob_stats_bruteforce(by_rule(5, rule_identity), rs, 1);
  CHECK(id.match);
  CHECK(id.bound_ok);
  CHECK(id.mean_plus == Rat(1, 2));
  CHECK(id.var_plus == Rat(0));

  ProbStats alt = prob_stats_bruteforce(by_rule(5, rule_alternating), rs, 1);
  CHECK(alt.match);
  CHECK(alt.bound_ok);
  CHECK(alt.mean_plus == Rat(0));
  CHECK(alt.var_plus == Rat(1, 8));
  CHECK(alt.mean_minus == Rat(0));
  CHECK(alt.var_minus == Rat(0));

  ProbStats lc = prob_stats_bruteforce(by_rule(5, rule_left_child), rs, 1);
  CHECK(lc.match);
  CHECK(lc.bound_ok);
  CHECK(lc.mean_plus == Rat(1, 4));
  CHECK(lc.var_plus == Rat(1, 32));
}

TEST_CASE("conditional statistics one turn deeper") {
  // hand-built frame: Gamma_2 = [0,1/4) u [1/2,3/4) with child frequency 3
  RandomizedSystem rs;
  rs.depth = 5;
  rs.index_set = {1, 2, 3, 4, 5};
  rs.freq = {{1, 1}, {2, 2}, {3, 2}, {4, 3}, {5, 3}};
  rs.gamma[2] = {make_interval(2, 0), make_interval(2, 2)};

  ProbStats st = prob_stats_bruteforce(by_rule(5, rule_left_child), rs, 2);
  CHECK(st.match);
  CHECK(st.bound_ok);
  CHECK(st.patterns == 4);
  CHECK(st.mean_plus == Rat(1, 8));
  CHECK(st.var_plus == Rat(1, 128));
  CHECK(st.var_bound == Rat(1, 32));
}

TEST_CASE("gamma sums weight entries by tile measure") {
  HaarMultiplier D = by_rule(4, rule_half_support);
  CHECK(gamma_sum(D, 2, {make_interval(0, 0)}) == Rat(1, 2));
  CHECK(gamma_sum(D, 3, {make_interval(1, 0)}) == Rat(1, 2));
  CHECK(gamma_sum(D, 3, {make_interval(1, 1)}) == Rat(0));
}

TEST_CASE("half-support multiplier stabilizes to one half exactly") {
  HaarMultiplier D = by_rule(6, rule_half_support);
  std::map<uint64_t, Rat> eta;
  for (uint64_t k = 1; k <= 7; k++) eta[k] = Rat(1, 10);
  StabilizeResult res = stabilize(D, Rat(1, 2), eta, 6);
  CHECK(res.all_within_budget);
  CHECK(res.root_deviation == Rat(0));
  CHECK(res.certificate == Rat(0));
  REQUIRE(res.dstab.size() == 7);
  for (const auto& [k, v] : res.dstab) {
    (void)k;
    CHECK(v == Rat(1, 2));
  }
  for (const auto& e : res.entries) {
    CHECK(e.within_budget);
    CHECK(e.freq_admissible);
  }
}

TEST_CASE("stabilize infers the target from the characteristic tail") {
  HaarMultiplier D = by_rule(6, rule_half_support);
  std::map<uint64_t, Rat> eta = {{1, Rat(1, 10)}};
  StabilizeResult res = stabilize(D, std::nullopt, eta, 6);
  CHECK(res.c == Rat(1, 2));
}

TEST_CASE("budget violations are flagged, not hidden") {
  HaarMultiplier D = by_rule(5, rule_identity);
  std::map<uint64_t, Rat> eta = {{1, Rat(1, 1000)}};
  StabilizeResult res = stabilize(D, Rat(1, 3), eta, 5);
  bool any_flagged = !res.all_within_budget;
  for (const auto& e : res.entries)
    if (!e.within_budget) any_flagged = true;
  CHECK(any_flagged);
}

TEST_CASE("full check of the stabilization theorem on the half multiplier") {
  HaarMultiplier D = by_rule(7, rule_half_support);
  Theorem3Result r = verify_theorem3(D, Rat(1, 2), Rat(1, 10), 7);
  CHECK(r.certificate_ok);
  CHECK(r.stab.certificate <= r.eta);
  CHECK(r.diagonal.attempted);
  CHECK(r.diagonal.ok);
  CHECK(r.identity.attempted);
  CHECK(r.identity.ok);
  CHECK(r.complement.attempted);
  CHECK(r.complement.ok);
}
