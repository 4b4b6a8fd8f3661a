#include <doctest.h>

#include <cmath>

#include "haardy/err.hpp"
#include "haardy/game.hpp"

using namespace haardy;

TEST_CASE("the full dyadic family rebuilds the haar system itself") {
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  GameTranscript t = strat_supp_build(sp, {}, 4, {});
  CHECK(!t.partial);
  CHECK(t.side == 1);
  REQUIRE(t.turns.size() == 15);
  for (const auto& rec : t.turns) {
    CHECK(rec.sum_lambda_mu == Rat(1));
    REQUIRE(rec.block.size() == 1);
    CHECK(iota(rec.block[0]) == rec.iota_key);
    CHECK(rec.lambda[0] == doctest::Approx(std::sqrt(2.0)));
    CHECK(rec.lambda_mu[0] == Rat(1));
  }
  SystemReport rep = validate(t.system);
  CHECK(rep.valid);
  CHECK(rep.mu == Rat(1));
  CHECK(rep.sigma < Rat(1, 100));
}

TEST_CASE("a partitioned family plays on the heavier side") {
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  std::vector<uint64_t> a2 = {2, 4, 5, 8, 9, 10, 11};
  GameTranscript t = strat_supp_build(sp, a2, 4, {});
  CHECK(t.side == 1);
  CHECK(t.limsup_measure == Rat(1, 2));
  REQUIRE(t.turns.size() == 7);
  CHECK(t.partial);
  IntervalCollection b1 = {make_interval(1, 1)};
  CHECK(t.system.blocks.at(1) == b1);
  for (const auto& rec : t.turns) CHECK(rec.sum_lambda_mu == Rat(1));
  CHECK(validate(t.system).valid);
}

TEST_CASE("sign oracles steer the regions") {
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  SignOracle flip = [](uint64_t, const IntervalCollection& B) {
    std::map<uint64_t, int> out;
    for (const auto& L : B) out[iota(L)] = -1;
    return out;
  };
  GameTranscript t = strat_supp_build(sp, {}, 3, {}, flip);
  CHECK(!t.partial);
  // minus signs swap the children: the plus region of the root is its right half
  IntervalCollection b2 = {make_interval(1, 1)};
  CHECK(t.system.blocks.at(2) == b2);
  CHECK(t.system.signs.at(1) == -1);
}

TEST_CASE("impartial equivalence of the rebuilt haar system is exactly sqrt 2") {
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  GameTranscript t = strat_supp_build(sp, {}, 4, {});
  ImpartialReport rep = impartial_check(sp, t, 2.1, 100, 7);
  CHECK(rep.samples == 100);
  CHECK(rep.worst_ratio == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(rep.ok);
}

TEST_CASE("scripted adversaries bound the turn count and place signs") {
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  AdversaryScript adv;
  adv.turns.resize(3);
  GameTranscript t = game_run(sp, adv, 4, {});
  CHECK(!t.partial);
  CHECK(t.turns.size() == 3);

  adv.turns[0].signs = "explicit";
  adv.turns[0].explicit_signs = {{1, -1}};
  GameTranscript tf = game_run(sp, adv, 4, {});
  IntervalCollection b2 = {make_interval(1, 1)};
  CHECK(tf.system.blocks.at(2) == b2);

  adv.turns[0].signs = "sideways";
  CHECK_THROWS_AS(game_run(sp, adv, 4, {}), ValidationError);
}

TEST_CASE("annihilated functionals are checked against the eta budget") {
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  AdversaryScript adv;
  adv.turns.resize(2);
  adv.turns[0].eta = 1e-6;
  adv.turns[0].W = {indicator(make_interval(0, 0), 2)};
  GameTranscript t = game_run(sp, adv, 4, {});
  REQUIRE(t.turns.size() == 2);
  REQUIRE(t.turns[0].checks.size() == 1);
  CHECK(t.turns[0].checks[0].met);
  CHECK(!t.turns[0].flagged);

  AdversaryScript hard;
  hard.turns.resize(1);
  hard.turns[0].eta = 1e-6;
  hard.turns[0].W = {haar(make_interval(0, 0), 2)};
  GameTranscript th = game_run(sp, hard, 4, {});
  REQUIRE(th.turns.size() == 1);
  CHECK(!th.turns[0].checks[0].met);
  CHECK(th.turns[0].flagged);
}

TEST_CASE("reduction of the identity through itself") {
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  OpMatrix T = identity_matrix(2, false);
  ReducePositiveResult r = reduce_positive(sp, T, Rat(1, 2), 0.1, 3, {});
  CHECK(r.ok);
  CHECK(r.side == 1);
  CHECK(!r.transcript.partial);
  REQUIRE(r.diag.size() == 7);
  for (const auto& d : r.diag) CHECK(d == Rat(1));
  CHECK(r.constant_bound <= 2.1);
  CHECK(is_identity(r.witness.S));

  SpaceSpec l1 = lp_space(Rat(1), RMode::Constant);
  WitnessReport wr = witness_verify(l1, r.witness, 20, 5, 1e-9);
  CHECK(wr.ok);
  CHECK(wr.residual_exact_zero);
}

TEST_CASE("reduction of a negative operator lands on the negated side") {
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  OpMatrix T = identity_matrix(2, false);
  for (size_t i = 0; i < T.rows(); i++) T.a[i][i] = Rat(-1);
  ReducePositiveResult r = reduce_positive(sp, T, Rat(1, 2), 0.1, 3, {});
  CHECK(r.ok);
  CHECK(r.side == 2);
  for (const auto& d : r.diag) CHECK(d == Rat(-1));
}

TEST_CASE("small diagonals and bad shapes are rejected") {
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  OpMatrix T = identity_matrix(2, false);
  T.a[3][3] = Rat(1, 10);
  CHECK_THROWS_AS(reduce_positive(sp, T, Rat(3, 10), 0.1, 3, {}),
                  ValidationError);
  OpMatrix C = identity_matrix(2, true);
  CHECK_THROWS_AS(reduce_positive(sp, C, Rat(1, 2), 0.1, 3, {}), DomainError);
  OpMatrix ok = identity_matrix(2, false);
  CHECK_THROWS_AS(reduce_positive(sp, ok, Rat(1, 2), 0.1, 2, {}), DomainError);
}

TEST_CASE("off-diagonal mass steers the greedy signs without breaking the floor") {
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  OpMatrix T = identity_matrix(2, false);
  T.a[0][1] = Rat(1, 4);
  T.a[1][2] = Rat(-1, 4);
  T.a[4][2] = Rat(1, 8);
  ReducePositiveResult r = reduce_positive(sp, T, Rat(1, 2), 0.1, 3, {});
  CHECK(r.ok);
  for (const auto& d : r.diag) CHECK(d >= Rat(1, 2));
}
