#include <doctest.h>

#include <cmath>

#include "haardy/spaces.hpp"

using namespace haardy;

namespace {

Expansion two_term() {
  Expansion e;
  e.coef[1] = Rat(1);
  e.coef[2] = Rat(1);
  return e;
}

}  // namespace

TEST_CASE("constant-mode Lp norms carry exact payloads") {
  Expansion e = two_term();
  NormValue n2 = hardy_norm(lp_space(Rat(2), RMode::Constant), e, 3);
  CHECK(n2.kind == NormValue::Exact::Ppow);
  CHECK(n2.p_int == 2);
  REQUIRE(n2.exact.has_value());
  CHECK(*n2.exact == Rat(3, 2));
  CHECK(n2.value == doctest::Approx(1.224744871391589).epsilon(1e-12));

  NormValue n1 = hardy_norm(lp_space(Rat(1), RMode::Constant), e, 3);
  REQUIRE(n1.exact.has_value());
  CHECK(*n1.exact == Rat(1));

  NormValue ns = hardy_norm(linf_closure_space(RMode::Constant), e, 3);
  CHECK(ns.kind == NormValue::Exact::Sup);
  REQUIRE(ns.exact.has_value());
  CHECK(*ns.exact == Rat(2));
}

TEST_CASE("independent-mode average flattens the two-term example") {
  Expansion e = two_term();
  NormValue n = hardy_norm(lp_space(Rat(1), RMode::Independent), e, 3);
  REQUIRE(n.exact.has_value());
  CHECK(*n.exact == Rat(1));
  NormValue n2 = hardy_norm(lp_space(Rat(2), RMode::Independent), e, 3);
  REQUIRE(n2.exact.has_value());
  CHECK(*n2.exact == Rat(1));
}

TEST_CASE("norm_equal_exact distinguishes payloads, not doubles") {
  Expansion e = two_term();
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  NormValue a = hardy_norm(sp, e, 3);
  NormValue b = hardy_norm(sp, e, 5);
  CHECK(norm_equal_exact(a, b));
  Expansion f = e;
  f.coef[2] = Rat(1) + Rat(1, uint64_t(1) << 40);
  NormValue c = hardy_norm(sp, f, 3);
  CHECK(!norm_equal_exact(a, c));
}

TEST_CASE("single haar functions scale by measure in L1") {
  SpaceSpec sp = lp_space(Rat(1), RMode::Constant);
  for (uint64_t k : {uint64_t(1), uint64_t(3), uint64_t(6), uint64_t(13)}) {
    Expansion e;
    e.coef[k] = Rat(1);
    NormValue n = hardy_norm(sp, e, 5);
    REQUIRE(n.exact.has_value());
    CHECK(*n.exact == measure(interval_from_iota(k)));
  }
}

TEST_CASE("pairing is the exact integral of the product") {
  StepFun f = haar(make_interval(0, 0), 2);
  StepFun g = indicator(make_interval(1, 0), 2);
  CHECK(pairing(f, g) == Rat(1, 2));
  Expansion a = analyze(f);
  Expansion b = analyze(g);
  CHECK(pairing(a, b) == Rat(1, 2));
  CHECK(pairing(analyze(haar(make_interval(1, 0), 2)), a) == Rat(0));
}

TEST_CASE("duality witness at a haar function pairs to its measure") {
  for (const auto& sp : {lp_space(Rat(1), RMode::Constant),
                         lp_space(Rat(2), RMode::Constant),
                         lp_space(Rat(2), RMode::Independent),
                         linf_closure_space(RMode::Constant)}) {
    DyadicInterval I = make_interval(2, 3);
    Expansion g;
    g.coef[iota(I)] = Rat(1);
    NormCertificate cert = dual_norm_lower(sp, haar(I, 4), 40, 7);
    REQUIRE(cert.witness_pairing.has_value());
    NormValue hn = hardy_norm(sp, g, 4);
    double prod = hn.value * cert.lower;
    CHECK(prod == doctest::Approx(Rat(measure(I)).get_d()).epsilon(1e-9));
  }
}

TEST_CASE("khintchine-style floor between independent and square norms") {
  Expansion e;
  e.coef[1] = Rat(3);
  e.coef[2] = Rat(4);
  NormValue ind = hardy_norm(lp_space(Rat(1), RMode::Independent), e, 3);
  double sq = std::sqrt(Rat(Rat(9) * Rat(1) + Rat(16) * Rat(1, 2)).get_d());
  CHECK(ind.value >= sq / std::sqrt(2.0) - 1e-12);
  CHECK(ind.value <= sq + 1e-12);
}

TEST_CASE("upper tau bound holds for nested haar blocks") {
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  std::vector<Expansion> blocks(2);
  blocks[0].coef[1] = Rat(1);
  blocks[1].coef[2] = Rat(1);
  UpperTauReport rep = upper_tau_check(sp, blocks, std::nullopt, 2.0, 4, 1e-9);
  CHECK(rep.valid);
  CHECK(rep.satisfied);
  REQUIRE(rep.prefix_norms.size() == 2);
  CHECK(rep.prefix_norms[1] <= rep.rhs_bounds[1] + 1e-9);
}

TEST_CASE("gauge validation flags a non-monotone table") {
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  GaugeValidation ok = validate_gauge(sp, 3, 5);
  CHECK(ok.ok);
}
