#include "haardy/haarfun.hpp"

#include <algorithm>

namespace haardy {

int max_level(const Expansion& e) {
  int m = -1;
  for (const auto& [key, a] : e.coef)
    m = std::max(m, int(interval_from_iota(key).level));
  return m;
}

StepFun haar(const DyadicInterval& I, int depth) {
  if (int(I.level) >= depth)
    throw ResolutionError("haar function at level " + std::to_string(I.level) +
                          " is not representable at depth " + std::to_string(depth));
  Expansion e;
  e.coef[iota(I)] = Rat(1);
  return synthesize(e, depth);
}

StepFun indicator(const DyadicInterval& I, int depth) {
  if (int(I.level) > depth)
    throw ResolutionError("indicator finer than the grid");
  StepFun out(depth, Rat(0));
  size_t cells = size_t(1) << (depth - I.level);
  for (size_t t = 0; t < cells; t++) out.v[I.pos * cells + t] = 1;
  return out;
}

Expansion analyze(const StepFun& f) {
  // bottom-up pyramid: averages of halves give coefficients level by level
  Expansion e;
  std::vector<Rat> cur = f.v;
  for (int level = f.depth - 1; level >= 0; level--) {
    std::vector<Rat> next(size_t(1) << level);
    for (size_t i = 0; i < next.size(); i++) {
      const Rat& lo = cur[2 * i];
      const Rat& hi = cur[2 * i + 1];
      next[i] = (lo + hi) / 2;
      Rat a = (lo - hi) / 2;
      if (a != 0) e.coef[iota(make_interval(uint32_t(level), i))] = a;
    }
    cur = std::move(next);
  }
  if (cur[0] != 0) e.cnst = cur[0];
  return e;
}

StepFun add(const StepFun& f, const StepFun& g) {
  int d = std::max(f.depth, g.depth);
  StepFun a = refine(f, d), b = refine(g, d);
  for (size_t t = 0; t < a.v.size(); t++) a.v[t] += b.v[t];
  return a;
}

StepFun sub(const StepFun& f, const StepFun& g) {
  int d = std::max(f.depth, g.depth);
  StepFun a = refine(f, d), b = refine(g, d);
  for (size_t t = 0; t < a.v.size(); t++) a.v[t] -= b.v[t];
  return a;
}

StepFun scale(const StepFun& f, const Rat& c) {
  StepFun out = f;
  for (auto& x : out.v) x *= c;
  return out;
}

Rat integral(const StepFun& f) {
  Rat s = 0;
  for (const auto& x : f.v) s += x;
  return s * dyadic_measure(uint32_t(f.depth));
}

StepFun rademacher(int n, int depth) {
  if (n + 1 > depth)
    throw ResolutionError("rademacher level " + std::to_string(n) +
                          " needs depth > " + std::to_string(n));
  StepFun out(depth, Rat(0));
  size_t cells = size_t(1) << (depth - n - 1);
  for (size_t k = 0; k < (size_t(1) << n); k++)
    for (size_t t = 0; t < cells; t++) {
      out.v[2 * k * cells + t] = 1;
      out.v[(2 * k + 1) * cells + t] = -1;
    }
  return out;
}

StepFun rademacher_on(int n, const IntervalCollection& Gamma,
                      const std::map<uint64_t, int>& eps, int depth) {
  if (n + 1 > depth)
    throw ResolutionError("rademacher level " + std::to_string(n) +
                          " needs depth > " + std::to_string(n));
  // Gamma must be a union of level-n intervals: its indicator has to be
  // constant on level-n cells
  int fine = n;
  for (const auto& G : Gamma) fine = std::max(fine, int(G.level));
  if (fine + 1 > depth && fine > n)
    throw ResolutionError("Gamma members finer than the grid");
  std::vector<char> fmask(size_t(1) << fine, 0);
  for (const auto& G : Gamma) {
    size_t cells = size_t(1) << (fine - G.level);
    for (size_t t = 0; t < cells; t++) {
      if (fmask[G.pos * cells + t]) throw DomainError("Gamma members overlap");
      fmask[G.pos * cells + t] = 1;
    }
  }
  std::vector<char> mask(size_t(1) << n, 0);
  size_t sub = size_t(1) << (fine - n);
  for (size_t k = 0; k < mask.size(); k++) {
    size_t ones = 0;
    for (size_t t = 0; t < sub; t++) ones += fmask[k * sub + t];
    if (ones != 0 && ones != sub)
      throw DomainError("Gamma is not a union of level-" + std::to_string(n) +
                        " intervals");
    mask[k] = ones == sub;
  }
  Expansion e;
  for (size_t k = 0; k < mask.size(); k++) {
    if (!mask[k]) continue;
    DyadicInterval K = make_interval(uint32_t(n), k);
    auto it = eps.find(iota(K));
    int sign = it == eps.end() ? 1 : it->second;
    if (sign != 1 && sign != -1) throw DomainError("sign must be +-1");
    e.coef[iota(K)] = Rat(sign);
  }
  return synthesize(e, depth);
}

StepFun cond_expect(const StepFun& f, const std::vector<StepFun>& partition) {
  if (partition.empty()) throw DomainError("empty partition");
  int depth = f.depth;
  for (const auto& p : partition) depth = std::max(depth, p.depth);
  StepFun ff = refine(f, depth);
  std::vector<char> covered(ff.v.size(), 0);
  StepFun out(depth, Rat(0));
  for (const auto& p : partition) {
    StepFun ind = refine(p, depth);
    Rat mass = 0, sum = 0;
    for (size_t t = 0; t < ind.v.size(); t++) {
      if (ind.v[t] == 0) continue;
      if (ind.v[t] != 1) throw DomainError("partition member is not an indicator");
      if (covered[t]) throw DomainError("partition members overlap");
      covered[t] = 1;
      mass += 1;
      sum += ff.v[t];
    }
    if (mass == 0) throw DomainError("partition member is empty");
    Rat avg = sum / mass;
    for (size_t t = 0; t < ind.v.size(); t++)
      if (ind.v[t] == 1) out.v[t] = avg;
  }
  for (char c : covered)
    if (!c) throw DomainError("partition does not cover [0,1)");
  return out;
}

bool equimeasurable(const StepFun& f, const StepFun& g) {
  int d = std::max(f.depth, g.depth);
  std::vector<Rat> a = refine(f, d).v, b = refine(g, d).v;
  for (auto& x : a) x = rat_abs(x);
  for (auto& x : b) x = rat_abs(x);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

StepFun limsup_finite(const IntervalCollection& A, int n_max, int depth) {
  if (n_max < 0) throw DomainError("n_max must be nonnegative");
  auto gens = generations(A);
  StepFun out(depth, Rat(1));
  for (int n = 0; n <= n_max; n++) {
    StepFun un(depth, Rat(0));
    if (n < int(gens.size()))
      for (const auto& I : gens[n]) {
        StepFun ind = indicator(I, depth);
        for (size_t t = 0; t < un.v.size(); t++)
          if (ind.v[t] == 1) un.v[t] = 1;
      }
    for (size_t t = 0; t < out.v.size(); t++)
      if (un.v[t] == 0) out.v[t] = 0;
  }
  return out;
}

}  // namespace haardy
