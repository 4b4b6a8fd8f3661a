#include "haardy/stabilize.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace haardy {

static IntervalCollection subdivide_to(const IntervalCollection& c, int n) {
  IntervalCollection out;
  for (const auto& K : c) {
    if (int(K.level) > n)
      throw DomainError("cannot subdivide level " + std::to_string(K.level) +
                        " tile to coarser level " + std::to_string(n));
    uint64_t span = uint64_t(1) << (n - K.level);
    for (uint64_t t = 0; t < span; t++)
      out.push_back(make_interval(uint32_t(n), K.pos * span + t));
  }
  normalize_collection(out);
  return out;
}

static IntervalCollection coalesce_tiles(IntervalCollection c) {
  normalize_collection(c);
  bool changed = true;
  while (changed) {
    changed = false;
    IntervalCollection next;
    size_t i = 0;
    while (i < c.size()) {
      if (i + 1 < c.size() && c[i].level == c[i + 1].level && c[i].level > 0 &&
          c[i].pos % 2 == 0 && c[i + 1].pos == c[i].pos + 1) {
        next.push_back(make_interval(c[i].level - 1, c[i].pos / 2));
        changed = true;
        i += 2;
      } else {
        next.push_back(c[i]);
        i++;
      }
    }
    c = std::move(next);
    normalize_collection(c);
  }
  return c;
}

Rat gamma_sum(const HaarMultiplier& D, int n, const IntervalCollection& gamma) {
  IntervalCollection c = coalesce_tiles(gamma);
  Rat s = 0;
  Rat cell = dyadic_measure(uint32_t(n));
  for (const auto& G : c) {
    if (int(G.level) > n) continue;
    uint64_t span = uint64_t(1) << (n - G.level);
    for (uint64_t t = 0; t < span; t++)
      s += D.entry(iota(make_interval(uint32_t(n), G.pos * span + t))) * cell;
  }
  return s;
}

RandomizedSystem randomized_system(
    const std::vector<std::pair<uint64_t, int>>& freqs,
    const std::map<uint64_t, int>& theta, int depth) {
  if (freqs.empty()) throw ValidationError("no frequencies given");
  RandomizedSystem rs;
  rs.depth = depth;
  std::map<uint64_t, int> fmap;
  for (const auto& [k, n] : freqs) {
    if (!fmap.emplace(k, n).second)
      throw ValidationError("duplicate frequency for index " + std::to_string(k));
  }
  uint64_t m = fmap.rbegin()->first;
  if (fmap.size() != m || fmap.begin()->first != 1)
    throw ValidationError("realized indices must form the prefix 1.." +
                          std::to_string(fmap.size()));
  int last = -1;
  for (const auto& [k, n] : fmap) {
    if (n <= last)
      throw ValidationError("frequency at index " + std::to_string(k) +
                            " does not increase");
    if (n >= depth)
      throw ResolutionError("frequency " + std::to_string(n) +
                            " needs depth above " + std::to_string(depth));
    last = n;
    rs.index_set.push_back(k);
    rs.freq[k] = n;
  }
  for (const auto& [k, s] : theta) {
    if (s != 1 && s != -1)
      throw ValidationError("sign at member " + std::to_string(k) + " is not +-1");
    rs.theta[k] = s;
  }

  std::map<uint64_t, IntervalCollection> pieces;  // Gamma_I before subdividing
  pieces[1] = {make_interval(0, 0)};
  for (uint64_t I : rs.index_set) {
    auto pt = pieces.find(I);
    if (pt == pieces.end())
      throw ValidationError("index " + std::to_string(I) + " lacks its predecessor");
    IntervalCollection tiles = subdivide_to(pt->second, rs.freq.at(I));
    rs.gamma[I] = tiles;
    IntervalCollection plus, minus;
    for (const auto& K : tiles) {
      auto st = rs.theta.find(iota(K));
      int sg = st == rs.theta.end() ? 1 : st->second;
      rs.theta[iota(K)] = sg;
      (sg > 0 ? plus : minus).push_back(left_half(K));
      (sg > 0 ? minus : plus).push_back(right_half(K));
    }
    normalize_collection(plus);
    normalize_collection(minus);
    pieces[2 * I] = plus;
    pieces[2 * I + 1] = minus;
  }
  return rs;
}

FaithfulSystem as_faithful(const RandomizedSystem& rs) {
  FaithfulSystem sys;
  sys.depth = rs.depth;
  for (uint64_t I : rs.index_set) {
    const auto& tiles = rs.gamma.at(I);
    sys.blocks[I] = tiles;
    for (const auto& K : tiles) {
      auto st = rs.theta.find(iota(K));
      sys.signs[iota(K)] = st == rs.theta.end() ? 1 : st->second;
    }
    if (rs.freq.count(2 * I) || rs.freq.count(2 * I + 1)) sys.kappa[I] = 1;
  }
  return sys;
}

StepFun hhat(const RandomizedSystem& rs, uint64_t iota_key, int depth) {
  auto it = rs.gamma.find(iota_key);
  if (it == rs.gamma.end())
    throw DomainError("index " + std::to_string(iota_key) + " not realized");
  StepFun out(depth, Rat(0));
  for (const auto& K : it->second) {
    auto st = rs.theta.find(iota(K));
    int sg = st == rs.theta.end() ? 1 : st->second;
    StepFun h = haar(K, depth);
    for (size_t t = 0; t < h.v.size(); t++)
      if (h.v[t] != 0) out.v[t] += sg > 0 ? h.v[t] : -h.v[t];
  }
  return out;
}

ProbStats prob_stats_bruteforce(const HaarMultiplier& D, const RandomizedSystem& rs,
                                uint64_t iota_I) {
  auto gt = rs.gamma.find(iota_I);
  if (gt == rs.gamma.end())
    throw DomainError("index " + std::to_string(iota_I) + " not realized");
  if (!rs.freq.count(2 * iota_I) || !rs.freq.count(2 * iota_I + 1))
    throw DomainError("both children of index " + std::to_string(iota_I) +
                      " must carry frequencies");
  const IntervalCollection& tiles = gt->second;
  if (tiles.size() > 16)
    throw DomainError("brute force over " + std::to_string(tiles.size()) +
                      " free signs exceeds the budget");
  int np = rs.freq.at(2 * iota_I), nm = rs.freq.at(2 * iota_I + 1);

  ProbStats st;
  st.patterns = uint64_t(1) << tiles.size();

  // closed forms
  st.mean_plus = gamma_sum(D, np, tiles) / 2;
  st.mean_minus = gamma_sum(D, nm, tiles) / 2;
  st.var_plus = 0;
  st.var_minus = 0;
  std::vector<std::array<Rat, 4>> halves(tiles.size());  // S over J+/J- at np, nm
  for (size_t j = 0; j < tiles.size(); j++) {
    IntervalCollection L = {left_half(tiles[j])}, R = {right_half(tiles[j])};
    halves[j] = {gamma_sum(D, np, L), gamma_sum(D, np, R), gamma_sum(D, nm, L),
                 gamma_sum(D, nm, R)};
    Rat dp = halves[j][0] - halves[j][1];
    Rat dm = halves[j][2] - halves[j][3];
    st.var_plus += dp * dp / 4;
    st.var_minus += dm * dm / 4;
  }

  // brute force over every sign assignment on the tiles
  Rat sp = 0, spp = 0, sm = 0, smm = 0;
  for (uint64_t pat = 0; pat < st.patterns; pat++) {
    Rat xp = 0, xm = 0;
    for (size_t j = 0; j < tiles.size(); j++) {
      bool plus = (pat >> j) & 1;
      xp += plus ? halves[j][0] : halves[j][1];
      xm += plus ? halves[j][3] : halves[j][2];
    }
    sp += xp;
    spp += xp * xp;
    sm += xm;
    smm += xm * xm;
  }
  Rat n = Rat(long(st.patterns));
  st.brute_mean_plus = sp / n;
  st.brute_mean_minus = sm / n;
  st.brute_var_plus = spp / n - st.brute_mean_plus * st.brute_mean_plus;
  st.brute_var_minus = smm / n - st.brute_mean_minus * st.brute_mean_minus;
  st.match = st.brute_mean_plus == st.mean_plus &&
             st.brute_mean_minus == st.mean_minus &&
             st.brute_var_plus == st.var_plus && st.brute_var_minus == st.var_minus;

  Rat sup = multiplier_bound(D).indep;
  Rat gm = 0;
  for (const auto& K : tiles) gm += measure(K);
  int nI = int(tiles.empty() ? 0 : tiles[0].level);
  st.var_bound = sup * sup * dyadic_measure(uint32_t(nI)) * gm / 4;
  st.bound_ok = st.var_plus <= st.var_bound && st.var_minus <= st.var_bound;
  return st;
}

// Smallest frequency in (last, depth) whose Gamma sum lands within budget of
// the target; falls back to the best miss when none is admissible.
static std::pair<int, bool> pick_frequency(const HaarMultiplier& D,
                                           const IntervalCollection& gamma,
                                           const Rat& target, const Rat& budget,
                                           int last, int depth) {
  int best = -1;
  Rat best_dev;
  for (int n = last + 1; n < depth; n++) {
    Rat dev = rat_abs(gamma_sum(D, n, gamma) - target);
    if (dev <= budget) return {n, true};
    if (best < 0 || dev < best_dev) {
      best = n;
      best_dev = dev;
    }
  }
  if (best < 0)
    throw DomainError("frequency range exhausted: realized indices need more "
                      "levels than the depth allows");
  return {best, false};
}

StabilizeResult stabilize(const HaarMultiplier& D, std::optional<Rat> c_opt,
                          const std::map<uint64_t, Rat>& eta, int depth,
                          SignSearch mode) {
  if (eta.empty()) throw ValidationError("empty stabilization budget");
  std::vector<uint64_t> T;
  for (const auto& [k, v] : eta) {
    if (v < 0) throw ValidationError("negative budget at index " + std::to_string(k));
    T.push_back(k);
  }
  if (T.front() != 1 || T.back() != T.size())
    throw ValidationError("budgets must cover the index prefix 1..m");

  StabilizeResult res;
  if (c_opt) {
    res.c = *c_opt;
  } else {
    // levels >= depth are identically zero and would skew the tail cluster
    auto seq = char_sequence(D, std::max(D.depth - 1, 1));
    auto reps = cluster_estimate(seq, 1e-9);
    double last = seq.back().get_d();
    double pick = reps.front();
    for (double r : reps)
      if (std::abs(r - last) < std::abs(pick - last)) pick = r;
    res.c = rat_from_double(pick);
    res.note = "target inferred from the characteristic sequence tail";
  }

  RandomizedSystem rs;
  rs.depth = depth;
  rs.index_set = T;
  std::map<uint64_t, Rat> X;
  std::map<uint64_t, StabilizeEntry> ents;
  std::map<uint64_t, IntervalCollection> pieces;
  pieces[1] = {make_interval(0, 0)};
  int last_n = -1;

  auto realized = [&](uint64_t k) { return k <= T.size(); };

  for (uint64_t I : T) {
    Rat mI = measure(interval_from_iota(I));
    if (I == 1) {
      auto [n, adm] = pick_frequency(D, pieces.at(1), res.c, eta.at(1), -1, depth);
      last_n = n;
      rs.freq[1] = n;
      rs.gamma[1] = subdivide_to(pieces.at(1), n);
      X[1] = gamma_sum(D, n, rs.gamma.at(1));
      StabilizeEntry e;
      e.iota_key = 1;
      e.freq = n;
      e.dstab = X.at(1);
      e.deviation = rat_abs(X.at(1) - res.c);
      e.requested = eta.at(1);
      e.within_budget = e.deviation <= e.requested;
      e.freq_admissible = adm;
      ents[1] = e;
    }

    const IntervalCollection& tiles = rs.gamma.at(I);
    bool kid_p = realized(2 * I), kid_m = realized(2 * I + 1);
    if (!kid_p && !kid_m) {
      for (const auto& K : tiles) rs.theta.emplace(iota(K), 1);
      continue;
    }

    int np = -1, nm = -1;
    bool adm_p = true, adm_m = true;
    if (kid_p) {
      auto [n, adm] = pick_frequency(D, tiles, X.at(I), eta.at(2 * I) * mI / 4,
                                     last_n, depth);
      np = n;
      adm_p = adm;
      last_n = n;
    }
    if (kid_m) {
      auto [n, adm] = pick_frequency(D, tiles, X.at(I), eta.at(2 * I + 1) * mI / 4,
                                     last_n, depth);
      nm = n;
      adm_m = adm;
      last_n = n;
    }

    // per-tile half sums at the children's frequencies
    size_t m = tiles.size();
    std::vector<Rat> pl(m), pr(m), ml(m), mr(m);
    for (size_t j = 0; j < m; j++) {
      IntervalCollection L = {left_half(tiles[j])}, R = {right_half(tiles[j])};
      if (kid_p) {
        pl[j] = gamma_sum(D, np, L);
        pr[j] = gamma_sum(D, np, R);
      }
      if (kid_m) {
        ml[j] = gamma_sum(D, nm, L);
        mr[j] = gamma_sum(D, nm, R);
      }
    }
    Rat half_p = kid_p ? gamma_sum(D, np, tiles) / 2 : Rat(0);
    Rat half_m = kid_m ? gamma_sum(D, nm, tiles) / 2 : Rat(0);

    auto objective = [&](const std::vector<int>& sg) {
      Rat xp = 0, xm = 0;
      for (size_t j = 0; j < m; j++) {
        xp += sg[j] > 0 ? pl[j] : pr[j];
        xm += sg[j] > 0 ? mr[j] : ml[j];
      }
      Rat obj = 0;
      if (kid_p) obj = std::max(obj, rat_abs(xp - half_p));
      if (kid_m) obj = std::max(obj, rat_abs(xm - half_m));
      return obj;
    };

    std::vector<int> signs(m, 1);
    bool exhaustive = mode == SignSearch::Exhaustive ||
                      (mode == SignSearch::Auto && m <= 12);
    if (exhaustive) {
      if (m > 20)
        throw DomainError("exhaustive sign search over " + std::to_string(m) +
                          " free signs exceeds the budget");
      std::vector<int> cur(m, 1), best = cur;
      Rat best_obj = objective(cur);
      for (uint64_t pat = 1; pat < (uint64_t(1) << m); pat++) {
        for (size_t j = 0; j < m; j++) cur[j] = (pat >> j) & 1 ? -1 : 1;
        Rat obj = objective(cur);
        if (obj < best_obj) {
          best_obj = obj;
          best = cur;
        }
      }
      signs = best;
    } else {
      // conditional-expectation derandomization of the summed squared misses
      Rat rest_p = 0, rest_m = 0;  // mean contribution of unassigned tiles
      for (size_t j = 0; j < m; j++) {
        rest_p += (pl[j] + pr[j]) / 2;
        rest_m += (ml[j] + mr[j]) / 2;
      }
      Rat acc_p = 0, acc_m = 0;
      for (size_t j = 0; j < m; j++) {
        rest_p -= (pl[j] + pr[j]) / 2;
        rest_m -= (ml[j] + mr[j]) / 2;
        Rat score[2];
        for (int pick = 0; pick < 2; pick++) {
          int sg = pick == 0 ? 1 : -1;
          Rat xp = acc_p + (sg > 0 ? pl[j] : pr[j]) + rest_p;
          Rat xm = acc_m + (sg > 0 ? mr[j] : ml[j]) + rest_m;
          Rat s = 0;
          if (kid_p) s += (xp - half_p) * (xp - half_p);
          if (kid_m) s += (xm - half_m) * (xm - half_m);
          score[pick] = s;
        }
        signs[j] = score[1] < score[0] ? -1 : 1;
        acc_p += signs[j] > 0 ? pl[j] : pr[j];
        acc_m += signs[j] > 0 ? mr[j] : ml[j];
      }
    }

    IntervalCollection plus, minus;
    for (size_t j = 0; j < m; j++) {
      rs.theta[iota(tiles[j])] = signs[j];
      (signs[j] > 0 ? plus : minus).push_back(left_half(tiles[j]));
      (signs[j] > 0 ? minus : plus).push_back(right_half(tiles[j]));
    }
    normalize_collection(plus);
    normalize_collection(minus);
    pieces[2 * I] = plus;
    pieces[2 * I + 1] = minus;

    for (int side = 0; side < 2; side++) {
      uint64_t kid = 2 * I + side;
      if (!realized(kid)) continue;
      int n = side == 0 ? np : nm;
      rs.freq[kid] = n;
      rs.gamma[kid] = subdivide_to(pieces.at(kid), n);
      X[kid] = gamma_sum(D, n, rs.gamma.at(kid));
      StabilizeEntry e;
      e.iota_key = kid;
      e.freq = n;
      e.dstab = X.at(kid) / measure(interval_from_iota(kid));
      e.deviation = rat_abs(e.dstab - X.at(I) / mI);
      e.requested = eta.at(kid);
      e.within_budget = e.deviation <= e.requested;
      e.freq_admissible = side == 0 ? adm_p : adm_m;
      ents[kid] = e;
    }
  }

  res.system = rs;
  res.all_within_budget = true;
  for (const auto& [k, e] : ents) {
    res.dstab[k] = e.dstab;
    res.entries.push_back(e);
    res.all_within_budget = res.all_within_budget && e.within_budget;
  }
  res.root_deviation = ents.at(1).deviation;
  res.certificate = res.root_deviation;
  for (const auto& [k, e] : ents)
    if (k != 1) res.certificate += 2 * e.deviation;

  HatOperators hat = operators_hat(as_faithful(rs), depth);
  FactorizationWitness w;
  w.T = multiplier_matrix(D, depth - 1);
  w.A = hat.Ahat;
  w.B = hat.Bhat;
  OpMatrix S;
  S.depth = depth - 1;
  S.row_idx = T;
  S.col_idx = T;
  S.a.assign(T.size(), std::vector<Rat>(T.size(), Rat(0)));
  for (size_t i = 0; i < T.size(); i++) S.a[i][i] = res.dstab.at(T[i]);
  w.S = S;
  w.constant = 1;
  w.error = 0;
  w.projectional = true;
  w.note = "stabilized diagonal through the multiplier";
  res.witness = w;
  return res;
}

static OpMatrix scale_mat(const OpMatrix& m, const Rat& r) {
  OpMatrix out = m;
  for (auto& row : out.a)
    for (auto& v : row) v *= r;
  return out;
}

static Theorem3Branch identity_branch(const FactorizationWitness& diag_w,
                                      const Rat& scalar, const Rat& cert) {
  Theorem3Branch br;
  br.attempted = scalar != 0;
  if (!br.attempted) {
    br.note = "scalar is zero, nothing to factor through";
    return br;
  }
  Rat as = rat_abs(scalar);
  if (cert >= as) {
    br.note = "exactify impossible: certificate " + rat_str(cert) +
              " reaches |scalar| " + rat_str(as);
    return br;
  }
  FactorizationWitness w;
  w.A = scale_mat(diag_w.A, 1 / scalar);
  w.B = diag_w.B;
  w.T = diag_w.T;
  w.S = diag_w.S;
  for (size_t i = 0; i < w.S.rows(); i++) w.S.a[i][i] = 1;
  w.constant = 1 / as;
  w.error = cert / as;
  try {
    FactorizationWitness ex = witness_exactify(w, Rat(1));
    br.ok = true;
    br.constant = ex.constant;
    br.error = 0;
    br.witness = ex;
    br.note = "identity factors exactly";
  } catch (const DomainError& e) {
    br.note = e.what();
  }
  return br;
}

Theorem3Result verify_theorem3(const HaarMultiplier& D, std::optional<Rat> c,
                               const Rat& eta, int depth, SignSearch mode) {
  if (eta <= 0) throw DomainError("eta must be positive");
  uint64_t m = depth >= 3 ? std::min<uint64_t>(7, uint64_t(depth) - 2) : 1;
  std::map<uint64_t, Rat> sched;
  for (uint64_t k = 1; k <= m; k++) sched[k] = eta / 8 * dyadic_measure(uint32_t(k));

  Theorem3Result res;
  res.stab = stabilize(D, c, sched, depth, mode);
  res.eta = eta;
  res.certificate_ok = res.stab.certificate <= eta;
  const Rat& cert = res.stab.certificate;
  const Rat& cc = res.stab.c;

  res.diagonal.attempted = true;
  {
    FactorizationWitness w = res.stab.witness;
    for (size_t i = 0; i < w.S.rows(); i++) w.S.a[i][i] = cc;
    w.error = cert;
    w.note = "target-constant diagonal";
    res.diagonal.witness = w;
    res.diagonal.constant = 1;
    res.diagonal.error = cert;
    res.diagonal.ok = res.certificate_ok;
    res.diagonal.note = res.certificate_ok
                            ? "certificate within eta"
                            : "certificate " + rat_str(cert) + " exceeds eta";
  }

  FactorizationWitness diag_c = *res.diagonal.witness;
  res.identity = identity_branch(diag_c, cc, cert);

  FactorizationWitness diag_comp = witness_complement(diag_c);
  for (size_t i = 0; i < diag_comp.S.rows(); i++) diag_comp.S.a[i][i] = 1 - cc;
  res.complement = identity_branch(diag_comp, 1 - cc, cert);
  if (res.complement.ok)
    res.complement.note = "identity factors exactly through the complement";
  return res;
}

}  // namespace haardy
