#include "haardy/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <unordered_map>

#include "haardy/operators.hpp"

namespace haardy {

SpaceSpec lp_space(const Rat& p, RMode m) {
  if (p < 1) throw DomainError("Lp requires p >= 1, got " + rat_str(p));
  SpaceSpec sp;
  sp.base = SpaceSpec::Base::Lp;
  sp.p = p;
  sp.rmode = m;
  return sp;
}

SpaceSpec linf_closure_space(RMode m) {
  SpaceSpec sp;
  sp.base = SpaceSpec::Base::LinfClosure;
  sp.rmode = m;
  return sp;
}

static bool integer_p(const SpaceSpec& sp, unsigned long& p_out) {
  if (sp.base != SpaceSpec::Base::Lp) return false;
  if (sp.p.get_den() != 1) return false;
  p_out = mpz_get_ui(sp.p.get_num_mpz_t());
  return true;
}

static GaugeValidation gauge_check_once(const SpaceSpec& sp);

NormValue ri_norm(const SpaceSpec& sp, const StepFun& f) {
  NormValue out;
  switch (sp.base) {
    case SpaceSpec::Base::Lp: {
      unsigned long pi = 0;
      if (integer_p(sp, pi)) {
        Rat ppow = 0;
        for (const auto& v : f.v) ppow += rat_pow(rat_abs(v), pi);
        ppow *= dyadic_measure(uint32_t(f.depth));
        out.kind = NormValue::Exact::Ppow;
        out.exact = ppow;
        out.p_int = pi;
        out.value = rat_root(ppow, pi);
      } else {
        double p = sp.p.get_d();
        double s = 0;
        for (const auto& v : f.v) s += std::pow(std::abs(v.get_d()), p);
        out.value = std::pow(s / std::ldexp(1.0, f.depth), 1.0 / p);
      }
      return out;
    }
    case SpaceSpec::Base::LinfClosure: {
      Rat m = 0;
      for (const auto& v : f.v) m = std::max(m, rat_abs(v));
      out.kind = NormValue::Exact::Sup;
      out.exact = m;
      out.value = m.get_d();
      return out;
    }
    case SpaceSpec::Base::CustomGauge: {
      auto val = gauge_check_once(sp);
      if (!val.ok) throw ValidationError("gauge refused: " + val.reason);
      StepFunD fd(f.depth, 0.0);
      for (size_t t = 0; t < f.v.size(); t++) fd.v[t] = f.v[t].get_d();
      out.value = sp.gauge(fd);
      return out;
    }
  }
  throw DomainError("unknown base space");
}

double ri_norm_d(const SpaceSpec& sp, const StepFunD& f) {
  switch (sp.base) {
    case SpaceSpec::Base::Lp: {
      double p = sp.p.get_d();
      double s = 0;
      for (double v : f.v) s += std::pow(std::abs(v), p);
      return std::pow(s / std::ldexp(1.0, f.depth), 1.0 / p);
    }
    case SpaceSpec::Base::LinfClosure: {
      double m = 0;
      for (double v : f.v) m = std::max(m, std::abs(v));
      return m;
    }
    case SpaceSpec::Base::CustomGauge: {
      auto val = gauge_check_once(sp);
      if (!val.ok) throw ValidationError("gauge refused: " + val.reason);
      return sp.gauge(f);
    }
  }
  throw DomainError("unknown base space");
}

bool norm_equal_exact(const NormValue& a, const NormValue& b) {
  if (a.kind == NormValue::Exact::None || b.kind == NormValue::Exact::None) return false;
  if (a.kind != b.kind) return false;
  if (a.kind == NormValue::Exact::Ppow && a.p_int != b.p_int) return false;
  return *a.exact == *b.exact;
}

// Active signed magnitudes per cell for the independent-mode average.
struct CellActives {
  std::vector<Rat> mags;  // |a_I| for active coefficients (sign irrelevant)
};

static std::vector<CellActives> collect_actives(const Expansion& e, int depth) {
  std::vector<CellActives> cells(size_t(1) << depth);
  if (e.cnst && *e.cnst != 0) {
    Rat m = rat_abs(*e.cnst);
    for (auto& c : cells) c.mags.push_back(m);
  }
  for (const auto& [key, a] : e.coef) {
    if (a == 0) continue;
    DyadicInterval I = interval_from_iota(key);
    if (int(I.level) >= depth)
      throw ResolutionError("coefficient level " + std::to_string(I.level) +
                            " not representable at depth " + std::to_string(depth));
    Rat m = rat_abs(a);
    size_t span = size_t(1) << (depth - I.level);
    for (size_t t = 0; t < span; t++) cells[I.pos * span + t].mags.push_back(m);
  }
  return cells;
}

// Exact mean over sign patterns of |sum eps_i m_i|, Gray-code enumeration.
static Rat sign_average_exact(const std::vector<Rat>& mags) {
  size_t k = mags.size();
  if (k == 0) return Rat(0);
  Rat sum = 0;
  for (const auto& m : mags) sum += m;
  Rat total = rat_abs(sum);
  uint64_t patterns = uint64_t(1) << (k - 1);  // global flip symmetry
  std::vector<int> signs(k, 1);
  uint64_t gray = 0;
  for (uint64_t idx = 1; idx < patterns; idx++) {
    uint64_t g = idx ^ (idx >> 1);
    uint64_t bit = g ^ gray;
    gray = g;
    int b = 0;
    while (!((bit >> b) & 1)) b++;
    // flips only among the first k-1 entries; the last sign is pinned by symmetry
    signs[b] = -signs[b];
    sum += signs[b] > 0 ? 2 * mags[b] : -2 * mags[b];
    total += rat_abs(sum);
  }
  return total / Rat(long(patterns));
}

static double sign_average_mc(const std::vector<Rat>& mags, int n, uint64_t seed,
                              double& stderr_out) {
  std::vector<double> m(mags.size());
  for (size_t i = 0; i < mags.size(); i++) m[i] = mags[i].get_d();
  std::mt19937_64 rng(seed);
  double acc = 0, acc2 = 0;
  for (int s = 0; s < n; s++) {
    double sum = 0;
    uint64_t bits = rng();
    for (size_t i = 0; i < m.size(); i++) {
      sum += ((bits >> (i & 63)) & 1) ? m[i] : -m[i];
      if ((i & 63) == 63) bits = rng();
    }
    double a = std::abs(sum);
    acc += a;
    acc2 += a * a;
  }
  double mean = acc / n;
  double var = std::max(0.0, acc2 / n - mean * mean);
  stderr_out = std::sqrt(var / n);
  return mean;
}

NormValue hardy_norm(const SpaceSpec& sp, const Expansion& e, int depth,
                     const HardyOpts& opts) {
  if (sp.rmode == RMode::Constant) return ri_norm(sp, synthesize(e, depth));
  auto cells = collect_actives(e, depth);
  bool any_mc = false;
  double worst_stderr = 0;
  StepFun inner(depth, Rat(0));
  std::map<std::vector<Rat>, Rat> memo;
  for (size_t t = 0; t < cells.size(); t++) {
    auto mags = cells[t].mags;
    std::sort(mags.begin(), mags.end());
    if (int(mags.size()) <= opts.cap) {
      auto it = memo.find(mags);
      if (it == memo.end()) it = memo.emplace(mags, sign_average_exact(mags)).first;
      inner.v[t] = it->second;
    } else {
      any_mc = true;
      double se = 0;
      double mean = sign_average_mc(mags, opts.mc_samples,
                                    opts.seed ^ (0x9e3779b97f4a7c15ULL * (t + 1)), se);
      worst_stderr = std::max(worst_stderr, se);
      inner.v[t] = rat_from_double(mean);
    }
  }
  NormValue out = ri_norm(sp, inner);
  if (any_mc) {
    out.kind = NormValue::Exact::None;
    out.exact.reset();
    out.mc_stderr = worst_stderr;
  }
  return out;
}

double hardy_norm_d(const SpaceSpec& sp, const ExpansionD& e, int depth,
                    const HardyOpts& opts) {
  if (sp.rmode == RMode::Constant) {
    StepFunD f = synthesize(e, depth);
    return ri_norm_d(sp, f);
  }
  std::vector<std::vector<double>> cells(size_t(1) << depth);
  if (e.cnst && *e.cnst != 0)
    for (auto& c : cells) c.push_back(std::abs(*e.cnst));
  for (const auto& [key, a] : e.coef) {
    if (a == 0) continue;
    DyadicInterval I = interval_from_iota(key);
    if (int(I.level) >= depth) throw ResolutionError("coefficient too deep for grid");
    size_t span = size_t(1) << (depth - I.level);
    for (size_t t = 0; t < span; t++) cells[I.pos * span + t].push_back(std::abs(a));
  }
  StepFunD inner(depth, 0.0);
  for (size_t t = 0; t < cells.size(); t++) {
    auto& m = cells[t];
    size_t k = m.size();
    if (k == 0) continue;
    if (int(k) <= opts.cap) {
      double sum = 0;
      for (double x : m) sum += x;
      double total = std::abs(sum);
      uint64_t patterns = uint64_t(1) << (k - 1);
      std::vector<int> signs(k, 1);
      uint64_t gray = 0;
      for (uint64_t idx = 1; idx < patterns; idx++) {
        uint64_t g = idx ^ (idx >> 1);
        uint64_t bit = g ^ gray;
        gray = g;
        int b = 0;
        while (!((bit >> b) & 1)) b++;
        signs[b] = -signs[b];
        sum += signs[b] > 0 ? 2 * m[b] : -2 * m[b];
        total += std::abs(sum);
      }
      inner.v[t] = total / double(patterns);
    } else {
      std::vector<Rat> mags(k);
      for (size_t i = 0; i < k; i++) mags[i] = rat_from_double(m[i]);
      double se = 0;
      inner.v[t] = sign_average_mc(mags, opts.mc_samples,
                                   opts.seed ^ (0x9e3779b97f4a7c15ULL * (t + 1)), se);
    }
  }
  return ri_norm_d(sp, inner);
}

Rat pairing(const StepFun& f, const StepFun& g) {
  int d = std::max(f.depth, g.depth);
  StepFun a = refine(f, d), b = refine(g, d);
  Rat s = 0;
  for (size_t t = 0; t < a.v.size(); t++) s += a.v[t] * b.v[t];
  return s * dyadic_measure(uint32_t(d));
}

Rat pairing(const Expansion& f, const Expansion& g) {
  Rat s = 0;
  if (f.cnst && g.cnst) s += *f.cnst * *g.cnst;
  auto it = f.coef.begin();
  auto jt = g.coef.begin();
  while (it != f.coef.end() && jt != g.coef.end()) {
    if (it->first < jt->first) ++it;
    else if (jt->first < it->first) ++jt;
    else {
      s += it->second * jt->second * measure(interval_from_iota(it->first));
      ++it;
      ++jt;
    }
  }
  return s;
}

// ---- dual norm lower bound ----

static ExpansionD to_double(const Expansion& e) {
  ExpansionD out;
  if (e.cnst) out.cnst = e.cnst->get_d();
  for (const auto& [k, a] : e.coef) out.coef[k] = a.get_d();
  return out;
}

static double pairing_d(const StepFunD& f, const StepFunD& g) {
  int d = std::max(f.depth, g.depth);
  StepFunD a = refine(f, d), b = refine(g, d);
  double s = 0;
  for (size_t t = 0; t < a.v.size(); t++) s += a.v[t] * b.v[t];
  return s / std::ldexp(1.0, d);
}

static StepFunD to_double(const StepFun& f) {
  StepFunD out(f.depth, 0.0);
  for (size_t t = 0; t < f.v.size(); t++) out.v[t] = f.v[t].get_d();
  return out;
}

NormCertificate dual_norm_lower(const SpaceSpec& sp, const StepFun& g,
                                int samples, uint64_t seed) {
  NormCertificate cert;
  cert.method = "canonical+sampled+ascent";
  cert.seed = seed;
  cert.samples = samples;
  int depth = g.depth;
  StepFunD gd = to_double(g);

  double best = 0;
  // canonical exact witnesses: Haar functions and the sign pattern of g
  struct ExactCand {
    std::string desc;
    Rat pair;
    NormValue norm;
  };
  std::vector<ExactCand> exacts;
  for (int level = 0; level < depth; level++) {
    for (uint64_t pos = 0; pos < (uint64_t(1) << level); pos++) {
      DyadicInterval I = make_interval(uint32_t(level), pos);
      Expansion e;
      e.coef[iota(I)] = 1;
      Rat pr = pairing(haar(I, depth), g);
      if (pr == 0) continue;
      NormValue nv = hardy_norm(sp, e, depth);
      if (nv.value <= 0) continue;
      exacts.push_back({"haar:" + interval_key(I), rat_abs(pr), nv});
    }
  }
  {
    StepFun sgn(depth, Rat(0));
    bool nonzero = false;
    for (size_t t = 0; t < g.v.size(); t++) {
      sgn.v[t] = g.v[t] > 0 ? 1 : (g.v[t] < 0 ? Rat(-1) : Rat(0));
      nonzero = nonzero || sgn.v[t] != 0;
    }
    if (nonzero) {
      Rat pr = pairing(sgn, g);
      NormValue nv = hardy_norm(sp, analyze(sgn), depth);
      if (nv.value > 0) exacts.push_back({"sign-pattern", rat_abs(pr), nv});
    }
  }
  for (const auto& c : exacts) {
    double r = c.pair.get_d() / c.norm.value;
    if (r > best) {
      best = r;
      cert.witness = c.desc;
      cert.witness_pairing = c.pair;
      cert.witness_norm = c.norm;
    }
  }

  // sampled expansions with local coordinate ascent
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0, 1);
  uint64_t top = (uint64_t(1) << std::min(depth, 7)) - 1;
  ExpansionD bestx;
  double bestx_ratio = -1;
  auto ratio_of = [&](const ExpansionD& x) {
    double nx = hardy_norm_d(sp, x, depth);
    if (nx <= 0) return -1.0;
    StepFunD xs = synthesize(x, depth);
    return std::abs(pairing_d(xs, gd)) / nx;
  };
  for (int s = 0; s < samples; s++) {
    ExpansionD x;
    int terms = 1 + int(rng() % 8);
    for (int t = 0; t < terms; t++) x.coef[1 + rng() % top] = gauss(rng);
    if (rng() % 2) x.cnst = gauss(rng);
    double r = ratio_of(x);
    if (r > bestx_ratio) {
      bestx_ratio = r;
      bestx = x;
    }
  }
  if (bestx_ratio > 0) {
    std::vector<uint64_t> keys;
    for (const auto& [k, a] : bestx.coef) keys.push_back(k);
    double step = 0.5;
    for (int round = 0; round < 24 && step >= 1e-6; round++) {
      bool improved = false;
      for (uint64_t k : keys) {
        for (double dir : {step, -step}) {
          ExpansionD y = bestx;
          y.coef[k] += dir;
          double r = ratio_of(y);
          if (r > bestx_ratio + 1e-15) {
            bestx_ratio = r;
            bestx = std::move(y);
            improved = true;
          }
        }
      }
      if (!improved) step /= 2;
    }
    if (bestx_ratio > best + 1e-12) {
      best = bestx_ratio;
      cert.witness = "sampled-ascent";
      cert.witness_pairing.reset();
      cert.witness_norm.reset();
    }
  }
  cert.lower = best;

  // closed-form uppers in constant mode
  if (sp.rmode == RMode::Constant) {
    if (sp.base == SpaceSpec::Base::LinfClosure) {
      Rat l1 = 0;
      for (const auto& v : g.v) l1 += rat_abs(v);
      cert.upper = Rat(l1 * dyadic_measure(uint32_t(depth))).get_d();
    } else if (sp.base == SpaceSpec::Base::Lp) {
      if (sp.p == 1) {
        Rat m = 0;
        for (const auto& v : g.v) m = std::max(m, rat_abs(v));
        cert.upper = m.get_d();
      } else {
        Rat q = sp.p / (sp.p - 1);
        cert.upper = ri_norm(lp_space(q, RMode::Constant), g).value;
      }
    }
  }
  return cert;
}

// ---- operator norm lower bound ----

struct DenseD {
  std::vector<std::vector<double>> a;
  std::vector<uint64_t> rows, cols;
};

static DenseD densify(const OpMatrix& T) {
  DenseD d;
  d.rows = T.row_basis();
  d.cols = T.col_basis();
  d.a.resize(T.rows(), std::vector<double>(T.cols(), 0));
  for (size_t r = 0; r < T.rows(); r++)
    for (size_t c = 0; c < T.cols(); c++) d.a[r][c] = T.a[r][c].get_d();
  return d;
}

static ExpansionD apply_d(const DenseD& T, const std::vector<double>& x) {
  ExpansionD out;
  for (size_t r = 0; r < T.a.size(); r++) {
    double s = 0;
    for (size_t c = 0; c < T.a[r].size(); c++) s += T.a[r][c] * x[c];
    if (s != 0) {
      if (T.rows[r] == 0) out.cnst = s;
      else out.coef[T.rows[r]] = s;
    }
  }
  return out;
}

NormCertificate op_norm_lower(const SpaceSpec& sp, const OpMatrix& T,
                              int samples, uint64_t seed) {
  NormCertificate cert;
  cert.method = "sampled+ascent";
  cert.seed = seed;
  cert.samples = samples;
  DenseD dt = densify(T);
  int depth = T.depth + 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0, 1);

  auto ratio_of = [&](const std::vector<double>& x) {
    ExpansionD xe;
    for (size_t c = 0; c < x.size(); c++) {
      if (x[c] == 0) continue;
      if (dt.cols[c] == 0) xe.cnst = x[c];
      else xe.coef[dt.cols[c]] = x[c];
    }
    double nx = hardy_norm_d(sp, xe, depth);
    if (nx <= 0) return -1.0;
    return hardy_norm_d(sp, apply_d(dt, x), depth) / nx;
  };

  std::vector<double> best;
  double best_ratio = 0;
  size_t n = dt.cols.size();
  for (int s = 0; s < samples; s++) {
    std::vector<double> x(n, 0);
    int terms = 1 + int(rng() % std::min<size_t>(n, 8));
    for (int t = 0; t < terms; t++) x[rng() % n] = gauss(rng);
    double r = ratio_of(x);
    if (r > best_ratio) {
      best_ratio = r;
      best = x;
      cert.witness = "sample:" + std::to_string(s);
    }
  }
  // single-coordinate witnesses
  for (size_t c = 0; c < n; c++) {
    std::vector<double> x(n, 0);
    x[c] = 1;
    double r = ratio_of(x);
    if (r > best_ratio) {
      best_ratio = r;
      best = x;
      cert.witness = "basis:" + std::to_string(dt.cols[c]);
    }
  }
  if (!best.empty()) {
    double step = 0.5;
    for (int round = 0; round < 20; round++) {
      bool improved = false;
      for (size_t c = 0; c < n; c++) {
        for (double dir : {step, -step}) {
          std::vector<double> y = best;
          y[c] += dir;
          double r = ratio_of(y);
          if (r > best_ratio) {
            best_ratio = r;
            best = y;
            improved = true;
          }
        }
      }
      if (!improved) step /= 2;
      if (step < 1e-6) break;
    }
  }
  cert.lower = best_ratio;
  return cert;
}

UpperTauReport upper_tau_check(const SpaceSpec& sp,
                               const std::vector<Expansion>& blocks,
                               std::optional<Rat> tau, double C, int depth,
                               double tol) {
  UpperTauReport rep;
  uint64_t prev_max = 0;
  for (size_t j = 0; j < blocks.size(); j++) {
    if (blocks[j].cnst && *blocks[j].cnst != 0) {
      rep.violation = "block " + std::to_string(j) + " has a constant component";
      return rep;
    }
    uint64_t lo = UINT64_MAX, hi = 0;
    for (const auto& [k, a] : blocks[j].coef) {
      if (a == 0) continue;
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
    if (hi == 0) {
      rep.violation = "block " + std::to_string(j) + " is zero";
      return rep;
    }
    if (lo <= prev_max) {
      rep.violation = "block " + std::to_string(j) + " does not come after block " +
                      std::to_string(j - 1) + " in iota order";
      return rep;
    }
    prev_max = hi;
  }
  rep.valid = true;
  if (tau && *tau < 1) throw DomainError("tau must be >= 1");

  std::vector<double> norms(blocks.size());
  for (size_t j = 0; j < blocks.size(); j++)
    norms[j] = hardy_norm(sp, blocks[j], depth).value;

  Expansion prefix;
  double worst = 0;
  for (size_t k = 0; k < blocks.size(); k++) {
    for (const auto& [key, a] : blocks[k].coef) prefix.coef[key] = a;
    double lhs = hardy_norm(sp, prefix, depth).value;
    double rhs;
    if (tau) {
      double tp = tau->get_d();
      double s = 0;
      for (size_t j = 0; j <= k; j++) s += std::pow(norms[j], tp);
      rhs = C * std::pow(s, 1.0 / tp);
    } else {
      double m = 0;
      for (size_t j = 0; j <= k; j++) m = std::max(m, norms[j]);
      rhs = C * m;
    }
    rep.prefix_norms.push_back(lhs);
    rep.rhs_bounds.push_back(rhs);
    double ratio = rhs > 0 ? lhs / rhs : (lhs > 0 ? 1e300 : 0);
    if (ratio > worst) {
      worst = ratio;
      rep.worst_prefix = int(k);
    }
  }
  rep.worst_ratio = worst;
  rep.satisfied = worst <= 1 + tol;
  return rep;
}

// ---- custom gauge validation ----

GaugeValidation validate_gauge(const SpaceSpec& sp, int samples, uint64_t seed) {
  GaugeValidation val;
  if (sp.base != SpaceSpec::Base::CustomGauge) {
    val.ok = true;
    return val;
  }
  if (!sp.gauge) {
    val.reason = "no gauge callable supplied";
    return val;
  }
  const double tol = 1e-9;
  int depth = 4;
  size_t cells = size_t(1) << depth;
  StepFunD unit(depth, 1.0);
  double u = sp.gauge(unit);
  if (std::abs(u - 1.0) > tol) {
    val.reason = "gauge of the unit indicator is " + std::to_string(u) + ", not 1";
    return val;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0, 1);
  for (int s = 0; s < samples; s++) {
    StepFunD f(depth, 0.0), g(depth, 0.0);
    for (size_t t = 0; t < cells; t++) {
      g.v[t] = 2 * unif(rng) - 1;
      f.v[t] = g.v[t] * unif(rng);  // |f| <= |g| pointwise
    }
    double gf = sp.gauge(f), gg = sp.gauge(g);
    if (gf > gg + tol) {
      val.reason = "gauge is not monotone on a sampled pair";
      return val;
    }
    double l1 = 0, linf = 0;
    for (double v : g.v) {
      l1 += std::abs(v);
      linf = std::max(linf, std::abs(v));
    }
    l1 /= double(cells);
    if (gg + tol < l1 || gg > linf + tol) {
      val.reason = "gauge escapes the L1..Linf sandwich on a sample";
      return val;
    }
    StepFunD perm = g;
    std::shuffle(perm.v.begin(), perm.v.end(), rng);
    if (std::abs(sp.gauge(perm) - gg) > tol) {
      val.reason = "gauge is not symmetric under cell permutation";
      return val;
    }
  }
  val.ok = true;
  return val;
}

static GaugeValidation gauge_check_once(const SpaceSpec& sp) {
  static std::unordered_map<std::string, GaugeValidation> cache;
  std::string key = sp.gauge_name.empty() ? "<anonymous>" : sp.gauge_name;
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  GaugeValidation val = validate_gauge(sp, 64, 0x5eed);
  cache.emplace(key, val);
  return val;
}

}  // namespace haardy
