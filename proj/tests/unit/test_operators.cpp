#include <doctest.h>

#include "haardy/err.hpp"
#include "haardy/operators.hpp"

using namespace haardy;

namespace {

bool in_left_half(uint64_t k) {
  int j = int(64 - __builtin_clzll(k)) - 1;
  return j >= 1 && (k - (uint64_t(1) << j)) < (uint64_t(1) << (j - 1));
}

HaarMultiplier half_support(int depth) {
  HaarMultiplier D;
  D.depth = depth;
  for (uint64_t k = 1; k < (uint64_t(1) << depth); k++)
    if (in_left_half(k)) D.entries[k] = Rat(1);
  return D;
}

}  // namespace

TEST_CASE("triple and independent multiplier bounds") {
  HaarMultiplier root_only;
  root_only.depth = 7;
  root_only.entries[1] = Rat(1);
  MultiplierBound b = multiplier_bound(root_only);
  CHECK(b.triple == Rat(5));
  CHECK(b.indep == Rat(1));

  MultiplierBound h = multiplier_bound(half_support(7));
  CHECK(h.triple == Rat(2));
  CHECK(h.indep == Rat(1));

  HaarMultiplier id;
  id.depth = 7;
  for (uint64_t k = 1; k < (uint64_t(1) << 7); k++) id.entries[k] = Rat(1);
  MultiplierBound bi = multiplier_bound(id);
  CHECK(bi.triple == Rat(1));
  CHECK(bi.indep == Rat(1));
}

TEST_CASE("multiplier application matches its matrix") {
  HaarMultiplier D = half_support(4);
  Expansion x;
  x.coef[2] = Rat(3);
  x.coef[3] = Rat(-1);
  x.coef[4] = Rat(1, 2);
  Expansion y = multiplier_apply(D, x);
  CHECK(y.coef.at(2) == Rat(3));
  CHECK(y.coef.count(3) == 0);
  CHECK(y.coef.at(4) == Rat(1, 2));

  OpMatrix M = multiplier_matrix(D, 4);
  Expansion z = apply(M, x);
  CHECK(z.coef == y.coef);

  Expansion bad = x;
  bad.cnst = Rat(1);
  CHECK_THROWS_AS(multiplier_apply(D, bad), DomainError);
}

TEST_CASE("characteristic sequence and tail clusters") {
  auto cs = char_sequence(half_support(7), 6);
  REQUIRE(cs.size() == 7);
  CHECK(cs[0] == Rat(0));
  for (size_t n = 1; n < cs.size(); n++) CHECK(cs[n] == Rat(1, 2));
  auto cl = cluster_estimate(cs, 1e-6);
  REQUIRE(cl.size() == 1);
  CHECK(cl[0] == doctest::Approx(0.5));

  HaarMultiplier alt;
  alt.depth = 6;
  for (uint64_t k = 1; k < (uint64_t(1) << 6); k++) {
    int lev = int(64 - __builtin_clzll(k)) - 1;
    alt.entries[k] = lev % 2 == 0 ? Rat(1) : Rat(-1);
  }
  auto cl2 = cluster_estimate(char_sequence(alt, 5), 1e-6);
  REQUIRE(cl2.size() == 2);
  CHECK(cl2[0] == doctest::Approx(-1.0));
  CHECK(cl2[1] == doctest::Approx(1.0));
}

TEST_CASE("stopping multiplier validation") {
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  HaarMultiplier prefix;
  prefix.depth = 5;
  for (uint64_t k = 1; k < 32; k++) prefix.entries[k] = k < 8 ? Rat(1) : Rat(0);
  StoppingReport ok = stopping_multiplier(sp, prefix, 30, 5, 1e-9, 5);
  CHECK(ok.valid_pattern);
  CHECK(ok.contraction_ok);

  HaarMultiplier gap;
  gap.depth = 3;
  gap.entries[1] = Rat(0);
  gap.entries[2] = Rat(1);
  StoppingReport bad = stopping_multiplier(sp, gap, 10, 5, 1e-9, 3);
  CHECK(!bad.valid_pattern);
  REQUIRE(bad.offending.has_value());
  CHECK(iota(*bad.offending) == 2);
}

TEST_CASE("shift sends each haar function one level down on the left") {
  Expansion x;
  x.coef[1] = Rat(1);
  Expansion y = shift_W(x, 3);
  CHECK(y.coef.count(1) == 0);
  CHECK(y.coef.at(2) == Rat(1));

  SpaceSpec l1 = lp_space(Rat(1), RMode::Constant);
  NormValue nx = hardy_norm(l1, x, 3);
  NormValue ny = hardy_norm(l1, y, 3);
  CHECK(Rat(*ny.exact / *nx.exact) == Rat(1, 2));

  OpMatrix W = shift_W_matrix(3);
  Expansion z = apply(W, x);
  CHECK(z.coef == y.coef);
}

TEST_CASE("isomorphism round trips and its matrix inverts") {
  Expansion x;
  x.cnst = Rat(2, 3);
  x.coef[3] = Rat(5);
  x.coef[4] = Rat(-1, 7);
  Expansion y = iso_S(x, 4);
  Expansion back = iso_S_inv(y, 4);
  CHECK(back.cnst == x.cnst);
  CHECK(back.coef == x.coef);

  OpMatrix S = iso_S_matrix(4);
  OpMatrix Sinv = inverse(S);
  CHECK(is_identity(matmul(S, Sinv)));
}

TEST_CASE("projection onto the shifted range is idempotent") {
  OpMatrix P = proj_P_matrix(4);
  CHECK(mat_equal(matmul(P, P), P));
  Expansion x;
  x.cnst = Rat(1);
  x.coef[1] = Rat(1);
  x.coef[2] = Rat(1);
  Expansion px = proj_P(x);
  Expansion ppx = proj_P(px);
  CHECK(px.coef == ppx.coef);
  CHECK(px.cnst == ppx.cnst);
}

TEST_CASE("matrix algebra basics") {
  OpMatrix I = identity_matrix(3, true);
  CHECK(is_identity(I));
  CHECK(is_identity(matmul(I, I)));
  OpMatrix Z = zero_matrix(3, true, true);
  CHECK(mat_equal(matadd(Z, I), I));
  CHECK(mat_equal(matsub(I, I), Z));
  CHECK_THROWS_AS(inverse(Z), DomainError);
}

TEST_CASE("matrices with broken storage are refused, not dereferenced") {
  OpMatrix broken;
  broken.depth = 2;
  OpMatrix I = identity_matrix(2, true);
  CHECK_THROWS_AS(matmul(broken, I), DomainError);
  CHECK_THROWS_AS(matadd(I, broken), DomainError);
}

TEST_CASE("factorization witnesses verify, exactify, complement") {
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  FactorizationWitness w;
  w.S = identity_matrix(3, true);
  w.T = identity_matrix(3, true);
  w.A = identity_matrix(3, true);
  w.B = identity_matrix(3, true);
  w.projectional = true;
  WitnessReport rep = witness_verify(sp, w, 20, 3, 1e-9);
  CHECK(rep.ok);
  CHECK(rep.ab_identity);
  CHECK(rep.residual_exact_zero);

  FactorizationWitness w2 = witness_compose(w, w);
  CHECK(w2.constant == Rat(1));
  CHECK(w2.error == Rat(0));

  FactorizationWitness wc = witness_complement(w);
  CHECK(mat_equal(wc.S, zero_matrix(3, true, true)));

  FactorizationWitness wa = w;
  wa.B.a[2][2] = Rat(9, 10);
  wa.error = Rat(1, 10);
  FactorizationWitness we = witness_exactify(wa, Rat(1));
  CHECK(we.error == Rat(0));
  WitnessReport rep2 = witness_verify(sp, we, 20, 3, 1e-9);
  CHECK(rep2.residual_exact_zero);
}
