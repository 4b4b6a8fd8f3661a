#ifndef HAARDY_HAARFUN_HPP
#define HAARDY_HAARFUN_HPP

#include <map>
#include <optional>
#include <vector>

#include "haardy/dyadic.hpp"
#include "haardy/err.hpp"

namespace haardy {

// Step function constant on the 2^depth dyadic cells of [0,1).
template <class T>
struct StepFunT {
  int depth = 0;
  std::vector<T> v;  // size 2^depth

  StepFunT() : v(1, T(0)) {}
  StepFunT(int d, T fill) : depth(d), v(size_t(1) << d, fill) {}
};

using StepFun = StepFunT<Rat>;
using StepFunD = StepFunT<double>;

// Finite Haar expansion: coefficients keyed by iota (>= 1), plus an optional
// constant-mode coefficient. Routines working in the mean-zero part reject a
// nonzero constant.
template <class T>
struct ExpansionT {
  std::map<uint64_t, T> coef;
  std::optional<T> cnst;
};

using Expansion = ExpansionT<Rat>;
using ExpansionD = ExpansionT<double>;

int max_level(const Expansion& e);

// Haar function h_I on a grid of the given depth; level(I) < depth required.
StepFun haar(const DyadicInterval& I, int depth);

// Indicator of I on the grid.
StepFun indicator(const DyadicInterval& I, int depth);

template <class T>
StepFunT<T> synthesize(const ExpansionT<T>& e, int depth);

// Exact analysis: a_I = <h_I, f>/|I| for levels < depth, constant = mean.
// Zero coefficients are dropped. Round-trips with synthesize exactly.
Expansion analyze(const StepFun& f);

// Pointwise arithmetic at a common refinement.
template <class T>
StepFunT<T> refine(const StepFunT<T>& f, int depth);
StepFun add(const StepFun& f, const StepFun& g);
StepFun sub(const StepFun& f, const StepFun& g);
StepFun scale(const StepFun& f, const Rat& c);
Rat integral(const StepFun& f);

// Rademacher function r_n = sum of h_K over K at level n.
StepFun rademacher(int n, int depth);

// Rademacher relative to Gamma with signs eps (keyed by iota of level-n
// intervals; missing keys default to +1):
//   r_n^Gamma(eps) = sum_{K in D_n, K subset Gamma} eps_K h_K.
// Gamma must be a union of level-n intervals, else DomainError.
StepFun rademacher_on(int n, const IntervalCollection& Gamma,
                      const std::map<uint64_t, int>& eps, int depth);

// Conditional expectation with respect to a partition given as indicator step
// functions; partition must consist of 0/1 functions that are pairwise
// disjoint and cover [0,1), else DomainError.
StepFun cond_expect(const StepFun& f, const std::vector<StepFun>& partition);

// Equality of the weighted multisets of |values|.
bool equimeasurable(const StepFun& f, const StepFun& g);

// Indicator of the finite limsup: intersection over n <= n_max of the unions
// of the generations G_n(A). Generations beyond exhaustion contribute the
// empty set.
StepFun limsup_finite(const IntervalCollection& A, int n_max, int depth);

template <class T>
StepFunT<T> refine(const StepFunT<T>& f, int depth) {
  if (depth < f.depth) throw ResolutionError("cannot coarsen a step function");
  if (depth == f.depth) return f;
  StepFunT<T> out(depth, T(0));
  int shift = depth - f.depth;
  for (size_t t = 0; t < out.v.size(); t++) out.v[t] = f.v[t >> shift];
  return out;
}

template <class T>
StepFunT<T> synthesize(const ExpansionT<T>& e, int depth) {
  StepFunT<T> out(depth, e.cnst ? *e.cnst : T(0));
  for (const auto& [key, a] : e.coef) {
    DyadicInterval I = interval_from_iota(key);
    if (int(I.level) >= depth)
      throw ResolutionError("coefficient at level " + std::to_string(I.level) +
                            " needs depth > " + std::to_string(int(I.level)));
    size_t cells = size_t(1) << (depth - I.level - 1);
    size_t start = (size_t(2) * I.pos) * cells;
    for (size_t t = 0; t < cells; t++) {
      out.v[start + t] += a;
      out.v[start + cells + t] -= a;
    }
  }
  return out;
}

}  // namespace haardy

#endif
