#include <doctest.h>

#include "haardy/err.hpp"
#include "haardy/haarfun.hpp"

using namespace haardy;

TEST_CASE("haar functions take the signed-halves values") {
  StepFun h = haar(make_interval(1, 1), 2);
  REQUIRE(h.v.size() == 4);
  CHECK(h.v[0] == Rat(0));
  CHECK(h.v[1] == Rat(0));
  CHECK(h.v[2] == Rat(1));
  CHECK(h.v[3] == Rat(-1));
  CHECK_THROWS_AS(haar(make_interval(2, 0), 2), ResolutionError);
}

TEST_CASE("analysis of a half indicator") {
  StepFun f = indicator(make_interval(1, 0), 2);
  Expansion e = analyze(f);
  REQUIRE(e.cnst.has_value());
  CHECK(*e.cnst == Rat(1, 2));
  CHECK(e.coef.at(1) == Rat(1, 2));
  CHECK(e.coef.count(2) == 0);
  StepFun back = synthesize(e, 2);
  CHECK(back.v == f.v);
}

TEST_CASE("analysis and synthesis round trip exactly") {
  Expansion e;
  e.cnst = Rat(3, 7);
  e.coef[1] = Rat(-2, 5);
  e.coef[5] = Rat(9, 4);
  e.coef[11] = Rat(1, 3);
  StepFun f = synthesize(e, 4);
  Expansion back = analyze(f);
  CHECK(back.cnst == e.cnst);
  CHECK(back.coef == e.coef);
  CHECK(max_level(e) == 3);
  CHECK_THROWS_AS(synthesize(e, 3), ResolutionError);
}

TEST_CASE("refine preserves values and rejects coarsening") {
  StepFun f = indicator(make_interval(1, 1), 1);
  StepFun g = refine(f, 3);
  CHECK(g.depth == 3);
  for (size_t i = 0; i < g.v.size(); i++)
    CHECK(g.v[i] == (i < 4 ? Rat(0) : Rat(1)));
  CHECK_THROWS_AS(refine(g, 1), ResolutionError);
  CHECK(integral(g) == Rat(1, 2));
}

TEST_CASE("signed level-1 rademacher relative to the root") {
  std::map<uint64_t, int> eps = {{2, 1}, {3, -1}};
  StepFun r = rademacher_on(1, {make_interval(0, 0)}, eps, 2);
  REQUIRE(r.v.size() == 4);
  CHECK(r.v[0] == Rat(1));
  CHECK(r.v[1] == Rat(-1));
  CHECK(r.v[2] == Rat(-1));
  CHECK(r.v[3] == Rat(1));
  StepFun plain = rademacher(1, 2);
  CHECK(plain.v[0] == Rat(1));
  CHECK(plain.v[1] == Rat(-1));
  CHECK(plain.v[2] == Rat(1));
  CHECK(plain.v[3] == Rat(-1));
  CHECK_THROWS_AS(rademacher_on(1, {make_interval(2, 0)}, {}, 3), DomainError);
}

TEST_CASE("conditional expectation averages over the partition") {
  StepFun f(2, Rat(0));
  f.v = {Rat(1), Rat(3), Rat(2), Rat(2)};
  std::vector<StepFun> part = {indicator(make_interval(1, 0), 2),
                               indicator(make_interval(1, 1), 2)};
  StepFun g = cond_expect(f, part);
  CHECK(g.v[0] == Rat(2));
  CHECK(g.v[1] == Rat(2));
  CHECK(g.v[2] == Rat(2));
  CHECK(g.v[3] == Rat(2));
  CHECK_THROWS_AS(cond_expect(f, {indicator(make_interval(1, 0), 2)}),
                  DomainError);
}

TEST_CASE("absolute-value distributions distinguish root from half support") {
  StepFun hr = haar(make_interval(0, 0), 2);
  StepFun hl = haar(make_interval(1, 0), 2);
  CHECK(!equimeasurable(hr, hl));
  StepFun hrr = haar(make_interval(1, 1), 2);
  CHECK(equimeasurable(hl, hrr));
}

TEST_CASE("step arithmetic aligns depths") {
  StepFun a = indicator(make_interval(1, 0), 1);
  StepFun b = indicator(make_interval(2, 1), 2);
  StepFun s = add(a, b);
  CHECK(s.depth == 2);
  CHECK(s.v[0] == Rat(1));
  CHECK(s.v[1] == Rat(2));
  CHECK(s.v[2] == Rat(0));
  StepFun d = sub(s, scale(b, Rat(2)));
  CHECK(d.v[1] == Rat(0));
  CHECK(d.v[0] == Rat(1));
}
