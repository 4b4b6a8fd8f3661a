#include <doctest.h>

#include "haardy/err.hpp"
#include "haardy/faithful.hpp"

using namespace haardy;

namespace {

// Root block over level 1, child blocks over level 2, all signs +1.
FaithfulSystem two_level_system() {
  IntervalCollection Ahat = {make_interval(1, 0), make_interval(1, 1),
                             make_interval(2, 0), make_interval(2, 1),
                             make_interval(2, 2), make_interval(2, 3)};
  return build_from_generations(Ahat, {}, 3);
}

}  // namespace

TEST_CASE("root block with plus signs synthesizes the level-1 rademacher") {
  FaithfulSystem sys = two_level_system();
  StepFun hb = htilde(sys, 1, 3);
  StepFun r1 = rademacher(1, 3);
  CHECK(hb.v == r1.v);
  CHECK(block_measure(sys, 1) == Rat(1));

  SystemReport rep = validate(sys);
  CHECK(rep.valid);
  CHECK(rep.faithful);
  CHECK(rep.sigma == Rat(0));
  CHECK(rep.mu == Rat(1));
}

TEST_CASE("hat operators invert exactly on the realized span") {
  FaithfulSystem sys = two_level_system();
  HatOperators ops = operators_hat(sys, 3);
  CHECK(is_identity(matmul(ops.Ahat, ops.Bhat)));
  REQUIRE(ops.index_set.size() == 3);

  // analysis coefficient <h~, h~>/|B*| = 1 recovers the root coordinate
  Expansion e;
  e.coef[1] = Rat(1);
  Expansion img = apply(ops.Bhat, e);
  Expansion back = apply(ops.Ahat, img);
  CHECK(back.coef.at(1) == Rat(1));
  CHECK(back.coef.size() == 1);

  // cross pairing with a deeper haar function vanishes
  StepFun hb = htilde(sys, 1, 3);
  CHECK(pairing(hb, haar(make_interval(2, 0), 3)) == Rat(0));
}

TEST_CASE("dropping a child member yields kappa one half") {
  FaithfulSystem sys = two_level_system();
  // child block at iota 2 covers {htilde_root = 1} = [0,1/2) with the level-2
  // tiles [0,1/4) and [1/2,3/4); keep only [0,1/4)
  sys.blocks[2] = {make_interval(2, 0)};
  sys.signs.erase(iota(make_interval(2, 2)));
  sys.kappa[1] = Rat(1, 2);

  SystemReport rep = validate(sys);
  CHECK(rep.valid);
  CHECK(!rep.faithful);
  CHECK(rep.sigma == Rat(1, 2));

  // understated kappa stays valid, overstated fails the measure inequality
  sys.kappa[1] = Rat(1, 4);
  CHECK(validate(sys).valid);
  sys.kappa[1] = Rat(3, 4);
  CHECK(!validate(sys).valid);
}

TEST_CASE("kappa operators invert a deficient system with sigma control") {
  FaithfulSystem sys = two_level_system();
  sys.blocks[2] = {make_interval(2, 0)};
  sys.signs.erase(iota(make_interval(2, 2)));
  sys.kappa[1] = Rat(1, 2);

  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  KappaOperators ops = operators_kappa(sp, sys, 30, 11, 3);
  CHECK(ops.ab_identity);
  CHECK(ops.sigma == Rat(1, 2));
  CHECK(ops.mu == Rat(1));
  CHECK(ops.sampled_B_contractive);
  CHECK(ops.sampled_A_within_bound);
  CHECK(ops.analytic_bound == doctest::Approx(5.0));
}

TEST_CASE("sigma at one or beyond is rejected") {
  IntervalCollection Ahat;
  for (int lev = 1; lev <= 3; lev++)
    for (uint64_t p = 0; p < (uint64_t(1) << lev); p++)
      Ahat.push_back(make_interval(lev, p));
  FaithfulSystem sys = build_from_generations(Ahat, {}, 4);
  for (auto& [k, kap] : sys.kappa) {
    (void)k;
    kap = Rat(1, 2);
  }
  CHECK(validate(sys).valid);
  CHECK(validate(sys).sigma == Rat(3, 2));
  CHECK_THROWS_AS(
      operators_kappa(lp_space(Rat(2), RMode::Constant), sys, 5, 1, 4),
      DomainError);
}

TEST_CASE("extension fills gaps and the stopping pattern recovers images") {
  FaithfulSystem sys;
  sys.depth = 2;
  sys.blocks[1] = {make_interval(1, 0)};
  sys.signs[iota(make_interval(1, 0))] = 1;
  SystemReport before = validate(sys);
  CHECK(before.valid);
  CHECK(!before.faithful);

  ExtensionResult ext = extend_to_faithful(sys);
  SystemReport after = validate(ext.extended);
  CHECK(after.valid);
  CHECK(after.faithful);

  // R htilde'_root = htilde_root
  StepFun orig = htilde(sys, 1, 3);
  Expansion img = analyze(htilde(ext.extended, 1, 3));
  Expansion rec = multiplier_apply(ext.R, img);
  StepFun back = synthesize(rec, 3);
  CHECK(back.v == orig.v);
}

TEST_CASE("validation names structural violations") {
  FaithfulSystem sys;
  sys.depth = 2;
  sys.blocks[2] = {make_interval(1, 0)};
  sys.signs[iota(make_interval(1, 0))] = 1;
  SystemReport rep = validate(sys);
  CHECK(!rep.valid);
  CHECK(!rep.violations.empty());

  FaithfulSystem overlap = two_level_system();
  overlap.blocks[3] = overlap.blocks[2];
  CHECK(!validate(overlap).valid);
}
