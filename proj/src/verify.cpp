#include "haardy/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace haardy {

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct SpaceCase {
  SpaceSpec sp;
  std::string tag;
};

std::vector<SpaceCase> sweep(const VerifyConfig& cfg) {
  if (cfg.space_given) return {{cfg.space, "given-space"}};
  std::vector<SpaceCase> out;
  const RMode modes[2] = {RMode::Constant, RMode::Independent};
  const char* mt[2] = {"const", "indep"};
  for (int m = 0; m < 2; m++) {
    out.push_back({lp_space(Rat(1), modes[m]), std::string("L1/") + mt[m]});
    out.push_back({lp_space(Rat(2), modes[m]), std::string("L2/") + mt[m]});
    out.push_back({lp_space(Rat(4), modes[m]), std::string("L4/") + mt[m]});
    out.push_back({linf_closure_space(modes[m]), std::string("Linf/") + mt[m]});
  }
  return out;
}

Assertion mk(const std::string& anchor, const std::string& stmt, double measured,
             double bound, bool pass, const std::string& detail = "") {
  Assertion a;
  a.anchor = anchor;
  a.statement = stmt;
  a.measured = measured;
  a.bound = bound;
  a.pass = pass;
  a.detail = detail;
  return a;
}

Rat rand_dyadic(std::mt19937_64& rng, int num_range = 64, int den_bits = 5) {
  std::uniform_int_distribution<int> num(-num_range, num_range);
  std::uniform_int_distribution<int> den(0, den_bits);
  int n = num(rng);
  if (n == 0) n = 1;
  return Rat(n) / Rat(long(1) << den(rng));
}

Expansion rand_expansion(std::mt19937_64& rng, int depth, int maxterms,
                         bool with_const = false) {
  std::uniform_int_distribution<uint64_t> pick(1, (uint64_t(1) << depth) - 1);
  std::uniform_int_distribution<int> nt(1, maxterms);
  Expansion e;
  int n = nt(rng);
  for (int i = 0; i < n; i++) e.coef[pick(rng)] = rand_dyadic(rng);
  if (with_const && (rng() & 3) == 0) e.cnst = rand_dyadic(rng);
  return e;
}

ExpansionD rand_expansion_d(std::mt19937_64& rng, int depth, int maxterms) {
  std::uniform_int_distribution<uint64_t> pick(1, (uint64_t(1) << depth) - 1);
  std::uniform_int_distribution<int> nt(1, maxterms);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ExpansionD e;
  int n = nt(rng);
  for (int i = 0; i < n; i++) e.coef[pick(rng)] = u(rng);
  return e;
}

StepFun rand_step(std::mt19937_64& rng, int depth) {
  StepFun f(depth, Rat(0));
  for (auto& v : f.v) v = rand_dyadic(rng);
  return f;
}

HaarMultiplier rand_multiplier(std::mt19937_64& rng, int depth, double density) {
  HaarMultiplier D;
  D.depth = depth;
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> num(-64, 64);
  for (uint64_t k = 1; k < (uint64_t(1) << depth); k++)
    if (u(rng) < density) D.entries[k] = Rat(num(rng)) / Rat(64);
  return D;
}

void rand_tiling_rec(std::mt19937_64& rng, const DyadicInterval& I, uint32_t minlv,
                     uint32_t maxlv, IntervalCollection& out) {
  if (I.level >= maxlv || (I.level >= minlv && (rng() & 1))) {
    out.push_back(I);
    return;
  }
  rand_tiling_rec(rng, left_half(I), minlv, maxlv, out);
  rand_tiling_rec(rng, right_half(I), minlv, maxlv, out);
}

FaithfulSystem rand_faithful(std::mt19937_64& rng, int depth, int ngens) {
  uint32_t cap = uint32_t(depth - 1);
  std::vector<IntervalCollection> gens;
  IntervalCollection g0;
  rand_tiling_rec(rng, make_interval(0, 0), 0, std::min<uint32_t>(2, cap), g0);
  gens.push_back(normalize_collection(g0));
  for (int n = 1; n < ngens; n++) {
    IntervalCollection gn;
    bool room = true;
    for (const auto& K : gens.back()) {
      if (K.level + 1 > cap) {
        room = false;
        break;
      }
      uint32_t hi = std::min(K.level + 2, cap);
      rand_tiling_rec(rng, left_half(K), K.level + 1, hi, gn);
      rand_tiling_rec(rng, right_half(K), K.level + 1, hi, gn);
    }
    if (!room) break;
    gens.push_back(normalize_collection(gn));
  }
  IntervalCollection all;
  std::map<uint64_t, int> eps;
  for (const auto& g : gens)
    for (const auto& K : g) {
      all.push_back(K);
      eps[iota(K)] = (rng() & 1) ? 1 : -1;
    }
  return build_from_generations(normalize_collection(all), eps, depth);
}

// Drops members from childless blocks and records the honest kappa values.
FaithfulSystem rand_kappa_faithful(std::mt19937_64& rng, int depth, int ngens) {
  FaithfulSystem sys = rand_faithful(rng, depth, ngens);
  for (auto& [k, blk] : sys.blocks) {
    if (k == 1) continue;
    if (sys.blocks.count(2 * k) || sys.blocks.count(2 * k + 1)) continue;
    if (blk.size() < 2 || rng() % 3 != 0) continue;
    size_t deepest = 0;
    for (size_t i = 1; i < blk.size(); i++)
      if (blk[i].level > blk[deepest].level) deepest = i;
    sys.signs.erase(iota(blk[deepest]));
    blk.erase(blk.begin() + deepest);
  }
  Rat sigma = 0;
  for (auto& [k, kap] : sys.kappa) {
    Rat pb = block_measure(sys, k);
    Rat worst = 1;
    for (uint64_t c : {2 * k, 2 * k + 1})
      if (sys.blocks.count(c)) {
        Rat r = 2 * block_measure(sys, c) / pb;
        if (r < worst) worst = r;
      }
    kap = worst;
    sigma += 1 - worst;
  }
  if (sigma >= Rat(9, 10)) return rand_faithful(rng, depth, ngens);
  return sys;
}

double pair_d(const StepFunD& a, const StepFun& b) {
  StepFun br = refine(b, a.depth);
  double s = 0;
  for (size_t t = 0; t < a.v.size(); t++) s += a.v[t] * br.v[t].get_d();
  return s / double(size_t(1) << a.depth);
}

int bio_mismatches(const GameTranscript& t) {
  std::vector<uint64_t> nodes;
  for (const auto& [k, b] : t.system.blocks) {
    (void)b;
    nodes.push_back(k);
  }
  std::vector<StepFun> hs;
  for (uint64_t k : nodes) hs.push_back(htilde(t.system, k, t.depth));
  int bad = 0;
  for (size_t i = 0; i < nodes.size(); i++)
    for (size_t j = 0; j < nodes.size(); j++) {
      Rat want = i == j ? block_measure(t.system, nodes[i]) : Rat(0);
      if (pairing(hs[i], hs[j]) != want) bad++;
    }
  return bad;
}

// ---- suites ----

SuiteResult suite_l41(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "lemma-4.1";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int d = std::min(cfg.depth, 6);
  double tol = cfg.tol;

  double worst_unit = 0, worst_single = 0;
  for (const auto& [sp, tag] : sweep(cfg)) {
    double u = ri_norm(sp, indicator(make_interval(0, 0), d)).value;
    worst_unit = std::max(worst_unit, std::abs(u - 1));
    for (uint64_t k : {uint64_t(1), uint64_t(2), uint64_t(7)}) {
      Expansion e;
      e.coef[k] = rand_dyadic(rng);
      double hn = hardy_norm(sp, e, d).value;
      double rn =
          ri_norm(sp, scale(haar(interval_from_iota(k), d), rat_abs(e.coef[k])))
              .value;
      worst_single = std::max(worst_single, std::abs(hn - rn));
    }
  }
  r.assertions.push_back(mk("lemma-4.1/unit-normalization",
                            "the norm of the unit indicator is 1 in every space",
                            worst_unit, tol, worst_unit <= tol));
  r.assertions.push_back(
      mk("lemma-4.1/single-coefficient-norm",
         "a one-term expansion has the same norm in both randomization modes",
         worst_single, tol, worst_single <= tol));

  int mono_bad = 0, rearr_bad = 0, pars_bad = 0;
  for (int it = 0; it < 16; it++) {
    StepFun f = rand_step(rng, d);
    StepFun g = f;
    for (auto& v : g.v) v = v * Rat(3, 2);
    StepFun perm = f;
    std::shuffle(perm.v.begin(), perm.v.end(), rng);
    for (const auto& [sp, tag] : sweep(cfg)) {
      if (sp.rmode != RMode::Constant) continue;
      if (ri_norm(sp, f).value > ri_norm(sp, g).value + tol) mono_bad++;
      if (std::abs(ri_norm(sp, f).value - ri_norm(sp, perm).value) > tol)
        rearr_bad++;
    }
    StepFun h = rand_step(rng, d);
    if (pairing(f, h) != pairing(analyze(f), analyze(h))) pars_bad++;
  }
  r.assertions.push_back(
      mk("lemma-4.1/monotone", "norms are monotone under pointwise domination",
         mono_bad, 0, mono_bad == 0));
  r.assertions.push_back(mk("lemma-4.1/rearrangement-invariant",
                            "cell permutations leave every base norm unchanged",
                            rearr_bad, 0, rearr_bad == 0));
  r.assertions.push_back(
      mk("lemma-4.1/pairing-parseval",
         "the integral pairing equals its exact coefficient form", pars_bad, 0,
         pars_bad == 0));
  return r;
}

SuiteResult suite_l42(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "lemma-4.2";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int d = std::min(cfg.depth, 6);
  double tol = std::max(cfg.tol, 1e-9);

  double worst_dev = 0;
  int exact_bad = 0;
  std::string worst_tag;
  for (const auto& [sp, tag] : sweep(cfg)) {
    for (uint64_t k = 1; k < 8; k++) {
      DyadicInterval I = interval_from_iota(k);
      Expansion e;
      e.coef[k] = 1;
      double nh = hardy_norm(sp, e, d).value;
      NormCertificate cert =
          dual_norm_lower(sp, haar(I, d), std::min(cfg.samples, 40),
                          cfg.seed + k);
      double dev = std::abs(nh * cert.lower - measure(I).get_d());
      if (dev > worst_dev) {
        worst_dev = dev;
        worst_tag = tag + " " + interval_key(I);
      }
      if (!cert.witness_pairing || *cert.witness_pairing != measure(I))
        exact_bad++;
    }
  }
  r.assertions.push_back(mk(
      "lemma-4.2/product-of-norms",
      "norm times certified dual lower bound equals the interval measure",
      worst_dev, 1e-6, worst_dev <= 1e-6, worst_tag));
  r.assertions.push_back(
      mk("lemma-4.2/exact-witness",
         "the recorded dual witness pairing equals the interval measure exactly",
         exact_bad, 0, exact_bad == 0));

  double worst_hold = 0;
  int m = std::min(cfg.samples, 100);
  for (const auto& [sp, tag] : sweep(cfg)) {
    std::vector<double> dual_bound(size_t(1) << d, 0.0);
    for (uint64_t k = 1; k < (uint64_t(1) << d); k++) {
      Expansion e;
      e.coef[k] = 1;
      dual_bound[k] =
          measure(interval_from_iota(k)).get_d() / hardy_norm(sp, e, d).value;
    }
    for (int s = 0; s < m; s++) {
      ExpansionD x = rand_expansion_d(rng, d, 12);
      double nx = hardy_norm_d(sp, x, d);
      if (nx < 1e-9) continue;
      StepFunD xs = synthesize(x, d);
      for (uint64_t k = 1; k < (uint64_t(1) << d); k++) {
        double lhs = std::abs(pair_d(xs, haar(interval_from_iota(k), d)));
        worst_hold = std::max(worst_hold, lhs - dual_bound[k] * nx);
      }
    }
  }
  r.assertions.push_back(
      mk("lemma-4.2/holder-pairings",
         "sampled pairings never exceed the dual-norm bound", worst_hold, tol,
         worst_hold <= tol));
  return r;
}

SuiteResult suite_l43(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "lemma-4.3";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int d = std::min(cfg.depth, 6);
  double tol = cfg.tol;

  HaarMultiplier id;
  id.depth = d;
  for (uint64_t k = 1; k < (uint64_t(1) << d); k++) id.entries[k] = 1;
  MultiplierBound ib = multiplier_bound(id);
  r.assertions.push_back(mk("lemma-4.3/identity-triple",
                            "the identity multiplier has triple norm exactly 1",
                            ib.triple.get_d(), 1, ib.triple == 1));

  double worst = 0;
  std::string worst_tag;
  int msamp = std::max(10, cfg.samples / 10);
  for (const auto& [sp, tag] : sweep(cfg)) {
    for (int t = 0; t < 8; t++) {
      HaarMultiplier D = rand_multiplier(rng, d, 0.7);
      MultiplierBound b = multiplier_bound(D);
      double bound = sp.rmode == RMode::Constant ? b.triple.get_d()
                                                 : b.indep.get_d();
      if (bound < 1e-12) continue;
      for (int s = 0; s < msamp; s++) {
        ExpansionD x = rand_expansion_d(rng, d, 10);
        double nx = hardy_norm_d(sp, x, d);
        if (nx < 1e-9) continue;
        ExpansionD Dx;
        for (const auto& [k, a] : x.coef) Dx.coef[k] = a * D.entry(k).get_d();
        double ratio = hardy_norm_d(sp, Dx, d) / nx;
        if (ratio / bound > worst) {
          worst = ratio / bound;
          worst_tag = tag;
        }
      }
    }
  }
  r.assertions.push_back(
      mk("lemma-4.3/diagonal-bound",
         "sampled multiplier ratios stay within the mode's norm bound", worst,
         1 + tol, worst <= 1 + tol, worst_tag));
  return r;
}

SuiteResult suite_l44(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "lemma-4.4";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int d = std::min(cfg.depth, 6);

  int bad = 0;
  double worst = 0;
  for (const auto& [sp, tag] : sweep(cfg)) {
    for (int t = 0; t < 4; t++) {
      HaarMultiplier D;
      D.depth = d;
      std::vector<char> one(size_t(1) << d, 0);
      one[1] = 1;
      for (uint64_t k = 1; k < (uint64_t(1) << d); k++) {
        if (k > 1) one[k] = one[k >> 1] && (rng() % 5 != 0);
        if (one[k]) D.entries[k] = 1;
      }
      StoppingReport rep = stopping_multiplier(sp, D, 12, cfg.seed + t, cfg.tol, d);
      if (!rep.valid_pattern || !rep.contraction_ok) bad++;
      worst = std::max(worst, rep.max_ratio);
    }
  }
  r.assertions.push_back(
      mk("lemma-4.4/contraction",
         "downward-closed zero-one patterns give sampled ratios at most 1", bad,
         0, bad == 0, "worst ratio " + std::to_string(worst)));

  HaarMultiplier badD;
  badD.depth = d;
  badD.entries[1] = 1;
  badD.entries[4] = 1;  // nonzero under a zero parent
  StoppingReport rep =
      stopping_multiplier(lp_space(Rat(2), RMode::Constant), badD, 4, cfg.seed,
                          cfg.tol, d);
  bool guard = !rep.valid_pattern && rep.offending &&
               iota(*rep.offending) == 4;
  r.assertions.push_back(
      mk("lemma-4.4/pattern-guard",
         "a nonzero entry under a zero parent is rejected and named", guard ? 0 : 1,
         0, guard));
  return r;
}

SuiteResult suite_l45(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "lemma-4.5";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int d = std::min(cfg.depth, 7);
  double tol = cfg.tol;

  double lo = 10, hi = 0;
  std::string lo_tag, hi_tag;
  int msamp = std::max(10, cfg.samples / 10);
  for (const auto& [sp, tag] : sweep(cfg)) {
    for (int s = 0; s < msamp; s++) {
      Expansion x;
      for (int j = 0; j + 1 < d; j++)
        if (rng() & 1) x.coef[uint64_t(1) << j] = rand_dyadic(rng);
      if (x.coef.empty()) x.coef[1] = 1;
      double nx = hardy_norm(sp, x, d).value;
      if (nx < 1e-12) continue;
      double ny = hardy_norm(sp, shift_W(x, d), d).value;
      double ratio = ny / nx;
      if (ratio < lo) {
        lo = ratio;
        lo_tag = tag;
      }
      if (ratio > hi) {
        hi = ratio;
        hi_tag = tag;
      }
    }
  }
  r.assertions.push_back(mk("lemma-4.5/upper",
                            "the half-shift never increases the norm", hi, 1 + tol,
                            hi <= 1 + tol, hi_tag));
  r.assertions.push_back(mk("lemma-4.5/lower",
                            "the half-shift never halves the norm", lo,
                            0.5 - tol, lo >= 0.5 - tol, lo_tag));
  return r;
}

SuiteResult suite_p46(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "prop-4.6";
  int d = std::min(cfg.depth, 6);

  OpMatrix P = proj_P_matrix(d);
  bool idem = mat_equal(matmul(P, P), P);
  r.assertions.push_back(mk("prop-4.6/idempotent",
                            "the zero-path coefficient projection is idempotent",
                            idem ? 0 : 1, 0, idem));

  HaarMultiplier Dp;
  Dp.depth = d;
  for (uint64_t k = 1; k < (uint64_t(1) << d); k++)
    if ((k & (k - 1)) == 0) Dp.entries[k] = 1;
  int bad = 0;
  double worst = 0;
  for (const auto& [sp, tag] : sweep(cfg)) {
    StoppingReport rep = stopping_multiplier(sp, Dp, 12, cfg.seed, cfg.tol, d);
    if (!rep.valid_pattern || !rep.contraction_ok) bad++;
    worst = std::max(worst, rep.max_ratio);
  }
  r.assertions.push_back(
      mk("prop-4.6/contraction",
         "the projection is a valid stopping pattern and a sampled contraction",
         bad, 0, bad == 0, "worst ratio " + std::to_string(worst)));
  return r;
}

SuiteResult suite_r47(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "rem-4.7";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int d = std::min(cfg.depth, 6);
  double tol = cfg.tol;

  OpMatrix S = iso_S_matrix(d);
  OpMatrix Sinv = inverse(S);
  bool inv_ok = is_identity(matmul(S, Sinv)) && is_identity(matmul(Sinv, S));
  r.assertions.push_back(mk("rem-4.7/exact-inverse",
                            "the hyperplane isomorphism inverts exactly",
                            inv_ok ? 0 : 1, 0, inv_ok));

  int rt_bad = 0;
  for (int t = 0; t < 10; t++) {
    // the isomorphism shifts the zero path down a level, so sampled
    // coefficients stay one level short of the floor
    Expansion x = rand_expansion(rng, d - 1, 10, true);
    Expansion y = iso_S_inv(iso_S(x, d), d);
    Expansion diff;
    for (const auto& [k, a] : x.coef) diff.coef[k] = a;
    for (const auto& [k, a] : y.coef) diff.coef[k] -= a;
    for (const auto& [k, a] : diff.coef)
      if (a != 0) rt_bad++;
    Rat cx = x.cnst ? *x.cnst : Rat(0), cy = y.cnst ? *y.cnst : Rat(0);
    if (cx != cy) rt_bad++;
  }
  r.assertions.push_back(mk("rem-4.7/round-trip",
                            "the isomorphism round-trips every expansion exactly",
                            rt_bad, 0, rt_bad == 0));

  double worstS = 0, worstSi = 0;
  std::string tagS, tagSi;
  for (const auto& [sp, tag] : sweep(cfg)) {
    double ls = op_norm_lower(sp, S, std::min(cfg.samples, 60), cfg.seed).lower;
    double li =
        op_norm_lower(sp, Sinv, std::min(cfg.samples, 60), cfg.seed ^ 0xf).lower;
    if (ls > worstS) {
      worstS = ls;
      tagS = tag;
    }
    if (li > worstSi) {
      worstSi = li;
      tagSi = tag;
    }
  }
  r.assertions.push_back(mk("rem-4.7/norm-S",
                            "sampled lower bounds keep the isomorphism norm at most 9",
                            worstS, 9 + tol, worstS <= 9 + tol, tagS));
  r.assertions.push_back(
      mk("rem-4.7/norm-S-inverse",
         "sampled lower bounds keep the inverse norm at most 18", worstSi,
         18 + tol, worstSi <= 18 + tol, tagSi));
  return r;
}

SuiteResult suite_r24(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "rem-2.4";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int d = std::min(cfg.depth, 7);
  double tol = std::max(cfg.tol, 1e-9);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  double worst_hi = 0, worst_lo = 0;
  int n = std::max(20, cfg.samples / 2);
  for (const Rat& p : {Rat(1), Rat(2)}) {
    SpaceSpec base = lp_space(p, RMode::Constant);
    SpaceSpec indep = lp_space(p, RMode::Independent);
    for (int s = 0; s < n; s++) {
      ExpansionD x = rand_expansion_d(rng, d, 12);
      double hn = hardy_norm_d(indep, x, d);
      StepFunD sq(d, 0.0);
      for (const auto& [k, a] : x.coef) {
        DyadicInterval I = interval_from_iota(k);
        size_t span = size_t(1) << (d - I.level);
        for (size_t t = 0; t < span; t++) sq.v[I.pos * span + t] += a * a;
      }
      for (auto& v : sq.v) v = std::sqrt(v);
      double sqn = ri_norm_d(base, sq);
      worst_hi = std::max(worst_hi, hn - sqn);
      worst_lo = std::max(worst_lo, inv_sqrt2 * sqn - hn);
    }
  }
  r.assertions.push_back(
      mk("rem-2.4/khintchine-upper",
         "the independent-mode norm never exceeds the square-function norm",
         worst_hi, tol, worst_hi <= tol));
  r.assertions.push_back(
      mk("rem-2.4/khintchine-lower",
         "the independent-mode norm stays above the square-function norm over sqrt(2)",
         worst_lo, tol, worst_lo <= tol));
  return r;
}

SuiteResult suite_r53(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "rem-5.3";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int d = std::min(cfg.depth, 7);

  int invalid = 0, unbalanced = 0;
  std::string first_violation;
  for (int t = 0; t < 12; t++) {
    FaithfulSystem sys = rand_faithful(rng, d, 2 + int(rng() % 2));
    SystemReport rep = validate(sys);
    if (!rep.valid || !rep.faithful || rep.sigma != 0 || rep.mu != 1) {
      invalid++;
      if (first_violation.empty() && !rep.violations.empty())
        first_violation = rep.violations[0];
    }
    for (const auto& [k, blk] : sys.blocks) {
      (void)blk;
      StepFun h = htilde(sys, k, d);
      Rat plus = 0, minus = 0;
      for (const auto& v : h.v) {
        if (v == 1) plus += 1;
        else if (v == -1) minus += 1;
        else if (v != 0) unbalanced += 1000;
      }
      if (plus != minus) unbalanced++;
    }
  }
  r.assertions.push_back(
      mk("rem-5.3/construction-valid",
         "systems built from tiling generations validate as faithful", invalid, 0,
         invalid == 0, first_violation));
  r.assertions.push_back(
      mk("rem-5.3/balanced-images",
         "every block image takes values -1, 0, 1 with balanced mass",
         unbalanced, 0, unbalanced == 0));
  return r;
}

SuiteResult suite_l54(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "lemma-5.4";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int d = std::min(cfg.depth, 7);

  int not_faithful = 0, bad_pattern = 0, bad_recover = 0;
  for (int t = 0; t < 8; t++) {
    FaithfulSystem sys = rand_kappa_faithful(rng, d, 2 + int(rng() % 2));
    ExtensionResult ext = extend_to_faithful(sys);
    if (!validate(ext.extended).faithful) not_faithful++;
    StoppingReport rep = stopping_multiplier(lp_space(Rat(2), RMode::Constant),
                                             ext.R, 4, cfg.seed, cfg.tol, d);
    if (!rep.valid_pattern) bad_pattern++;
    for (const auto& [k, blk] : sys.blocks) {
      (void)blk;
      Expansion rec = multiplier_apply(ext.R, analyze(htilde(ext.extended, k, d)));
      StepFun back = synthesize(rec, d);
      StepFun want = htilde(sys, k, d);
      for (size_t c = 0; c < back.v.size(); c++)
        if (back.v[c] != want.v[c]) {
          bad_recover++;
          break;
        }
    }
  }
  r.assertions.push_back(mk("lemma-5.4/extension-faithful",
                            "gap filling always lands on a faithful system",
                            not_faithful, 0, not_faithful == 0));
  r.assertions.push_back(mk("lemma-5.4/pattern-valid",
                            "the recovery multiplier is a valid stopping pattern",
                            bad_pattern, 0, bad_pattern == 0));
  r.assertions.push_back(
      mk("lemma-5.4/stopping-recovery",
         "the stopping multiplier recovers every original block image exactly",
         bad_recover, 0, bad_recover == 0));
  return r;
}

SuiteResult suite_p65(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "prop-6.5";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int d = std::min(std::max(cfg.depth, 6), 8);
  double tol = std::max(cfg.tol, 1e-9);

  std::vector<SpaceCase> cases = {
      {linf_closure_space(RMode::Constant), "Linf/const"},
      {linf_closure_space(RMode::Independent), "Linf/indep"},
      {lp_space(Rat(2), RMode::Constant), "L2/const"}};
  int bad2 = 0, bad_sup = 0;
  double worst = 0;
  for (const auto& [sp, tag] : cases) {
    for (int t = 0; t < 6; t++) {
      // block j: coefficients at level j+3 inside the level-2 region [j/4,(j+1)/4)
      int k = 2 + int(rng() % 2);
      std::vector<Expansion> blocks;
      for (int j = 0; j < k && j + 4 <= d; j++) {
        Expansion b;
        uint32_t lv = uint32_t(j + 3);
        uint64_t lo = (uint64_t(j) << (lv - 2));
        uint64_t n = uint64_t(1) << (lv - 2);
        for (uint64_t pos = lo; pos < lo + n; pos++)
          if (rng() & 1) b.coef[iota(make_interval(lv, pos))] = rand_dyadic(rng);
        if (b.coef.empty()) b.coef[iota(make_interval(lv, lo))] = 1;
        blocks.push_back(b);
      }
      UpperTauReport r2 = upper_tau_check(sp, blocks, Rat(2), 1.0, d, tol);
      if (!r2.valid || !r2.satisfied) bad2++;
      worst = std::max(worst, r2.worst_ratio);
      if (sp.base == SpaceSpec::Base::LinfClosure) {
        UpperTauReport rs = upper_tau_check(sp, blocks, std::nullopt, 1.0, d, tol);
        if (!rs.valid || !rs.satisfied) bad_sup++;
      }
    }
  }
  r.assertions.push_back(
      mk("prop-6.5/upper-2-estimate",
         "disjoint increasing blocks satisfy the upper 2-estimate with constant 1",
         bad2, 0, bad2 == 0, "worst ratio " + std::to_string(worst)));
  r.assertions.push_back(
      mk("prop-6.5/sup-estimate",
         "in the sup-type space the same blocks satisfy the sup-form estimate",
         bad_sup, 0, bad_sup == 0));
  return r;
}

SuiteResult suite_p71(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "prop-7.1";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int d = std::min(cfg.depth, 7);
  double tol = std::max(cfg.tol, 1e-9);

  int nsys = std::min(20, std::max(8, cfg.samples / 10));
  int id_bad = 0, iso_bad = 0;
  double worstA = 0;
  std::string tagA;
  for (int t = 0; t < nsys; t++) {
    FaithfulSystem sys = rand_faithful(rng, d, 2 + int(rng() % 2));
    HatOperators ops = operators_hat(sys, d);
    if (!is_identity(matmul(ops.Ahat, ops.Bhat))) id_bad++;

    for (const auto& [sp, tag] : sweep(cfg)) {
      for (int s = 0; s < 3; s++) {
        Expansion x;
        for (uint64_t k : ops.index_set)
          if (rng() & 1) x.coef[k] = rand_dyadic(rng);
        if (x.coef.empty()) x.coef[ops.index_set[0]] = 1;
        NormValue nx = hardy_norm(sp, x, d);
        NormValue nb = hardy_norm(sp, apply(ops.Bhat, x), d);
        if (std::abs(nx.value - nb.value) > tol) iso_bad++;

        Expansion y = rand_expansion(rng, d, 10);
        double nyv = hardy_norm(sp, y, d).value;
        if (nyv < 1e-12) continue;
        double na = hardy_norm(sp, apply(ops.Ahat, y), d).value;
        if (na / nyv > worstA) {
          worstA = na / nyv;
          tagA = tag;
        }
      }
    }
  }
  r.assertions.push_back(mk("prop-7.1/exact-identity",
                            "analysis after synthesis is the exact identity",
                            id_bad, 0, id_bad == 0));
  r.assertions.push_back(
      mk("prop-7.1/B-isometry",
         "the synthesis operator preserves every sampled norm", iso_bad, 0,
         iso_bad == 0));
  r.assertions.push_back(mk("prop-7.1/A-contraction",
                            "the analysis operator never increases sampled norms",
                            worstA, 1 + tol, worstA <= 1 + tol, tagA));
  return r;
}

SuiteResult suite_t73(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "thm-7.3";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int d = std::min(cfg.depth, 7);

  std::vector<SpaceCase> cases = {
      {lp_space(Rat(1), RMode::Constant), "L1/const"},
      {lp_space(Rat(2), RMode::Independent), "L2/indep"}};
  int id_bad = 0, a_bad = 0, b_bad = 0;
  double worst_sigma = 0;
  for (int t = 0; t < 10; t++) {
    FaithfulSystem sys = rand_kappa_faithful(rng, d, 2 + int(rng() % 2));
    for (const auto& [sp, tag] : cases) {
      KappaOperators ops = operators_kappa(sp, sys, 24, cfg.seed + t, d);
      if (!ops.ab_identity) id_bad++;
      if (!ops.sampled_A_within_bound) a_bad++;
      if (!ops.sampled_B_contractive) b_bad++;
      worst_sigma = std::max(worst_sigma, ops.sigma.get_d());
    }
  }
  r.assertions.push_back(
      mk("thm-7.3/exact-inverse-pair",
         "the block operators compose to the exact identity", id_bad, 0,
         id_bad == 0, "max sigma " + std::to_string(worst_sigma)));
  r.assertions.push_back(
      mk("thm-7.3/A-analytic-bound",
         "sampled norms of the unnormalized side stay within the analytic bound",
         a_bad, 0, a_bad == 0));
  r.assertions.push_back(mk("thm-7.3/B-contraction",
                            "the synthesis side stays a sampled contraction",
                            b_bad, 0, b_bad == 0));
  return r;
}

SuiteResult suite_l83(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "lemma-8.3";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int d = std::min(std::max(cfg.depth, 6), 8);

  int mism = 0, bound_bad = 0;
  uint64_t max_patterns = 0;
  int n = std::max(20, cfg.samples / 5);
  for (int t = 0; t < n; t++) {
    HaarMultiplier D = rand_multiplier(rng, d, 0.8);
    int n1 = int(rng() % 4);
    int n2 = std::min(n1 + 1 + int(rng() % 2), d - 2);
    int n3 = std::min(n2 + 1 + int(rng() % 2), d - 1);
    std::map<uint64_t, int> theta;
    for (uint64_t k = 1; k < (uint64_t(1) << d); k++)
      if (rng() & 1) theta[k] = -1;
    RandomizedSystem rs = randomized_system({{1, n1}, {2, n2}, {3, n3}}, theta, d);
    ProbStats st = prob_stats_bruteforce(D, rs, 1);
    if (!st.match) mism++;
    if (!st.bound_ok) bound_bad++;
    max_patterns = std::max(max_patterns, st.patterns);
  }
  r.assertions.push_back(
      mk("lemma-8.3/brute-force-match",
         "exhaustive sign enumeration reproduces the closed form exactly", mism,
         0, mism == 0, std::to_string(max_patterns) + " patterns max"));
  r.assertions.push_back(
      mk("lemma-8.3/variance-bound",
         "conditional variances respect the frequency decay bound", bound_bad, 0,
         bound_bad == 0));

  HaarMultiplier id;
  id.depth = d;
  for (uint64_t k = 1; k < (uint64_t(1) << d); k++) id.entries[k] = 1;
  RandomizedSystem rs = randomized_system({{1, 1}, {2, 2}, {3, 3}}, {}, d);
  ProbStats st = prob_stats_bruteforce(id, rs, 1);
  Rat half_gamma = union_measure(rs.gamma.at(1)) / 2;
  bool id_ok = st.var_plus == 0 && st.var_minus == 0 &&
               st.mean_plus == half_gamma && st.mean_minus == half_gamma;
  r.assertions.push_back(
      mk("lemma-8.3/identity-case",
         "the identity multiplier has zero variance and mean half the cell mass",
         id_ok ? 0 : 1, 0, id_ok));
  return r;
}

SuiteResult suite_t36(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "thm-3.6";
  int d = std::min(std::max(cfg.depth, 5), 8);

  HaarMultiplier D;
  D.depth = d;
  for (uint64_t k = 1; k < (uint64_t(1) << d); k++) {
    DyadicInterval I = interval_from_iota(k);
    if (I.level >= 1 && I.pos < (uint64_t(1) << (I.level - 1))) D.entries[k] = 1;
  }
  Theorem3Result res = verify_theorem3(D, Rat(1, 2), Rat(1, 20), d);
  r.assertions.push_back(mk("thm-3.6/exact-certificate",
                            "the half-support multiplier stabilizes with certificate 0",
                            res.stab.certificate.get_d(), 0,
                            res.stab.certificate == 0));
  r.assertions.push_back(mk("thm-3.6/certificate-within-eta",
                            "the certified deviation stays within the budget",
                            res.stab.certificate.get_d(), res.eta.get_d(),
                            res.certificate_ok));
  r.assertions.push_back(mk("thm-3.6/diagonal-branch",
                            "the target-constant diagonal branch verifies",
                            res.diagonal.ok ? 0 : 1, 0, res.diagonal.ok,
                            res.diagonal.note));
  r.assertions.push_back(mk("thm-3.6/identity-branch",
                            "the identity factors exactly through the multiplier",
                            res.identity.ok ? 0 : 1, 0,
                            res.identity.ok && res.identity.error == 0,
                            res.identity.note));
  r.assertions.push_back(mk("thm-3.6/complement-branch",
                            "the complement identity branch verifies",
                            res.complement.ok ? 0 : 1, 0, res.complement.ok,
                            res.complement.note));

  SpaceSpec sp = lp_space(Rat(1), RMode::Constant);
  WitnessReport wr = witness_verify(sp, res.stab.witness, 10, cfg.seed, cfg.tol);
  r.assertions.push_back(mk("thm-3.6/witness-verified",
                            "the stabilization witness has exact zero residual",
                            wr.residual_exact_zero ? 0 : 1, 0,
                            wr.ok && wr.residual_exact_zero &&
                                res.stab.witness.projectional));

  HaarMultiplier alt;
  alt.depth = d;
  for (uint64_t k = 1; k < (uint64_t(1) << d); k++) {
    DyadicInterval I = interval_from_iota(k);
    alt.entries[k] = (I.level % 2 == 0) ? Rat(1) : Rat(-1);
  }
  std::map<uint64_t, Rat> eta;
  for (uint64_t k = 1; k <= 3; k++) eta[k] = Rat(1, 10);
  StabilizeResult st = stabilize(alt, std::nullopt, eta, d);
  Rat recomputed = rat_abs(st.c - st.dstab.at(1));
  for (const auto& [k, v] : st.dstab)
    if (k > 1) recomputed += 2 * rat_abs(v - st.dstab.at(k >> 1));
  r.assertions.push_back(
      mk("thm-3.6/certificate-consistency",
         "the reported certificate matches its definition on an inferred target",
         std::abs(Rat(recomputed - st.certificate).get_d()), 0,
         recomputed == st.certificate, st.note));
  return r;
}

SuiteResult suite_p96(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "prop-9.6";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int dT = 3;
  double tol = 1e-12;

  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);
  Rat delta(3, 10);
  int not_ok = 0, diag_bad = 0, resid_bad = 0, side2_seen = 0;
  double worst_c = 0, min_diag = 1e9;
  std::string note;
  for (int t = 0; t < 6; t++) {
    size_t n = (size_t(1) << (dT + 1)) - 1;
    OpMatrix T;
    T.depth = dT;
    T.a.assign(n, std::vector<Rat>(n, Rat(0)));
    std::uniform_int_distribution<int> dmag(40, 100);
    std::uniform_int_distribution<int> off(-6, 6);
    int sgn = (rng() & 1) ? 1 : -1;
    for (size_t i = 0; i < n; i++) {
      T.a[i][i] = Rat(sgn * dmag(rng)) / Rat(128);
      for (size_t j = 0; j < n; j++)
        if (i != j && rng() % 4 == 0) T.a[i][j] = Rat(off(rng)) / Rat(128);
    }
    BuildParams params;
    params.sigma_budget = Rat(1, 100);
    ReducePositiveResult rp = reduce_positive(sp, T, delta, 0.1, dT + 1, params);
    if (!rp.ok) {
      not_ok++;
      if (note.empty()) note = rp.note;
      continue;
    }
    if (rp.side == 2) side2_seen++;
    worst_c = std::max(worst_c, rp.constant_bound);
    for (const auto& v : rp.diag) {
      Rat adj = rp.side == 2 ? -v : v;
      min_diag = std::min(min_diag, adj.get_d());
      if (adj < delta) diag_bad++;
    }
    WitnessReport wr = witness_verify(sp, rp.witness, 6, cfg.seed + t, cfg.tol);
    if (!wr.residual_exact_zero) resid_bad++;
  }
  r.assertions.push_back(mk("prop-9.6/reduction-succeeds",
                            "every sampled large-diagonal operator reduces", not_ok,
                            0, not_ok == 0, note));
  r.assertions.push_back(
      mk("prop-9.6/diagonal-delta",
         "output diagonal pairings stay at or above delta exactly", min_diag,
         delta.get_d(), diag_bad == 0));
  r.assertions.push_back(mk("prop-9.6/constant-bound",
                            "witness constants stay within 2 plus the margin",
                            worst_c, 2.1 + tol, worst_c <= 2.1 + tol));
  r.assertions.push_back(mk("prop-9.6/exact-product",
                            "the reduced operator is the exact triple product",
                            resid_bad, 0, resid_bad == 0));

  // alternating diagonal signs force the case split; whichever side carries
  // the taller tower still yields exact delta-large output entries
  {
    size_t n = (size_t(1) << (dT + 1)) - 1;
    OpMatrix T;
    T.depth = dT;
    T.a.assign(n, std::vector<Rat>(n, Rat(0)));
    for (size_t i = 0; i < n; i++) T.a[i][i] = (i % 2 == 0) ? 1 : -1;
    BuildParams params;
    params.sigma_budget = Rat(1, 100);
    ReducePositiveResult rp = reduce_positive(sp, T, Rat(1), 0.1, dT + 1, params);
    bool built = !rp.diag.empty() && (rp.side == 1 || rp.side == 2);
    bool all_large = built;
    double lo = built ? 1e9 : 0;
    for (const auto& v : rp.diag) {
      Rat adj = rp.side == 2 ? -v : v;
      lo = std::min(lo, adj.get_d());
      all_large = all_large && adj >= 1;
    }
    r.assertions.push_back(mk("prop-9.6/alternating-case-split",
                              "an alternating diagonal picks a side and keeps "
                              "its built entries at or above delta",
                              lo, 1.0, all_large, rp.note));
  }
  return r;
}

SuiteResult suite_l101(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "lemma-10.1";
  int d = std::min(std::max(cfg.depth, 6), 8);

  std::vector<SpaceCase> cases = {
      {lp_space(Rat(1), RMode::Constant), "L1/const"},
      {lp_space(Rat(2), RMode::Constant), "L2/const"},
      {linf_closure_space(RMode::Independent), "Linf/indep"}};
  double worst = 0;
  std::string worst_tag;
  int bio_bad = 0, partial = 0;
  for (const auto& [sp, tag] : cases) {
    BuildParams params;
    params.sigma_budget = Rat(1, 200);
    GameTranscript t = strat_supp_build(sp, {}, d, params);
    if (t.partial) partial++;
    bio_bad += bio_mismatches(t);
    ImpartialReport rep =
        impartial_check(sp, t, 2.1, std::max(100, cfg.samples), cfg.seed);
    if (rep.worst_ratio > worst) {
      worst = rep.worst_ratio;
      worst_tag = tag;
    }
  }
  r.assertions.push_back(mk(
      "lemma-10.1/impartial-ratio",
      "sampled coefficient vectors stay within the impartial equivalence bound",
      worst, std::sqrt(2.1) + 1e-9, worst <= std::sqrt(2.1) + 1e-9, worst_tag));
  r.assertions.push_back(mk("lemma-10.1/biorthogonal",
                            "the built block images are exactly biorthogonal",
                            bio_bad, 0, bio_bad == 0));
  r.assertions.push_back(mk("lemma-10.1/complete-run",
                            "the unconstrained build never ends partial", partial,
                            0, partial == 0));
  return r;
}

SuiteResult suite_t104(const VerifyConfig& cfg) {
  SuiteResult r;
  r.suite = "thm-10.4";
  std::mt19937_64 rng(cfg.seed ^ fnv1a(r.suite));
  int d = std::min(std::max(cfg.depth, 6), 8);
  SpaceSpec sp = lp_space(Rat(2), RMode::Constant);

  std::vector<AdversaryScript> advs;
  {
    AdversaryScript a;
    a.turns.assign(2, AdversaryTurn{});
    advs.push_back(a);
  }
  {
    AdversaryScript a;
    AdversaryTurn t;
    t.signs = "random:42";
    a.turns.assign(3, t);
    advs.push_back(a);
  }
  {
    AdversaryScript a;
    AdversaryTurn t;
    t.eta = 0.01;
    t.W.push_back(rademacher(d - 1, d));
    a.turns.assign(4, t);
    advs.push_back(a);
  }
  {
    AdversaryScript a;
    AdversaryTurn t;
    t.eta = 4.0;
    t.G.push_back(rand_step(rng, d));
    t.signs = "explicit";
    t.explicit_signs[2] = -1;
    t.explicit_signs[5] = -1;
    a.turns.assign(3, t);
    advs.push_back(a);
  }
  {
    AdversaryScript a;
    AdversaryTurn t;
    t.eta = 1.0;
    t.W.push_back(rand_step(rng, d));
    t.signs = "random:7";
    a.turns.assign(3, t);
    advs.push_back(a);
  }

  int sum_bad = 0, bio_bad = 0, flag_bad = 0, sys_bad = 0;
  double annih = 0;
  for (size_t ai = 0; ai < advs.size(); ai++) {
    BuildParams params;
    params.sigma_budget = Rat(1, 100);
    GameTranscript t = game_run(sp, advs[ai], d, params);
    for (const auto& turn : t.turns) {
      if (turn.sum_lambda_mu != 1) sum_bad++;
      bool any_unmet = false;
      for (const auto& c : turn.checks) any_unmet = any_unmet || !c.met;
      if (turn.flagged != any_unmet) flag_bad++;
      if (ai == 2)
        for (const auto& c : turn.checks) annih = std::max(annih, c.value);
    }
    bio_bad += bio_mismatches(t);
    if (!t.turns.empty() && !validate(t.system).valid) sys_bad++;
  }
  r.assertions.push_back(mk("thm-10.4/weights-sum",
                            "every turn's weight products sum to exactly 1",
                            sum_bad, 0, sum_bad == 0));
  r.assertions.push_back(mk("thm-10.4/biorthogonal",
                            "transcript systems are exactly biorthogonal", bio_bad,
                            0, bio_bad == 0));
  r.assertions.push_back(
      mk("thm-10.4/flag-consistency",
         "a turn is flagged exactly when one of its checks fails", flag_bad, 0,
         flag_bad == 0));
  r.assertions.push_back(mk("thm-10.4/system-valid",
                            "every nonempty transcript builds a valid system",
                            sys_bad, 0, sys_bad == 0));
  r.assertions.push_back(
      mk("thm-10.4/annihilated-pairings",
         "blocks against the fine Rademacher functional pair to zero", annih,
         1e-12, annih <= 1e-12));
  return r;
}

using SuiteFn = SuiteResult (*)(const VerifyConfig&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> reg = {
      {"lemma-4.1", suite_l41},   {"lemma-4.2", suite_l42},
      {"lemma-4.3", suite_l43},   {"lemma-4.4", suite_l44},
      {"lemma-4.5", suite_l45},   {"prop-4.6", suite_p46},
      {"rem-4.7", suite_r47},     {"rem-2.4", suite_r24},
      {"rem-5.3", suite_r53},     {"lemma-5.4", suite_l54},
      {"prop-6.5", suite_p65},    {"prop-7.1", suite_p71},
      {"thm-7.3", suite_t73},     {"lemma-8.3", suite_l83},
      {"thm-3.6", suite_t36},     {"prop-9.6", suite_p96},
      {"lemma-10.1", suite_l101}, {"thm-10.4", suite_t104},
  };
  return reg;
}

}  // namespace

std::vector<std::string> verify_suites() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) {
    (void)fn;
    out.push_back(name);
  }
  return out;
}

std::vector<SuiteResult> run_suites(const std::string& name,
                                    const VerifyConfig& cfg) {
  std::vector<SuiteResult> out;
  bool all = name == "all";
  bool found = false;
  for (const auto& [sname, fn] : registry()) {
    if (!all && sname != name) continue;
    found = true;
    SuiteResult res;
    try {
      res = fn(cfg);
    } catch (const std::exception& e) {
      res.suite = sname;
      res.assertions.push_back(mk(sname + "/aborted", "suite aborted", 1, 0,
                                  false, e.what()));
    }
    res.pass = true;
    for (const auto& a : res.assertions) res.pass = res.pass && a.pass;
    out.push_back(std::move(res));
  }
  if (!found) {
    std::ostringstream os;
    os << "unknown suite '" << name << "'; known:";
    for (const auto& [sname, fn] : registry()) {
      (void)fn;
      os << " " << sname;
    }
    os << " all";
    throw ValidationError(os.str());
  }
  return out;
}

}  // namespace haardy
