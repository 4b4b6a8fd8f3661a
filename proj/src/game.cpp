#include "haardy/game.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace haardy {

static const double kSqrt2 = std::sqrt(2.0);

static double base_norm(const SpaceSpec& sp, const StepFun& f) {
  return ri_norm(sp, f).value;
}

// |B* cap S*| for two antichains of dyadic intervals
static Rat intersect_measure(const IntervalCollection& B,
                             const IntervalCollection& S) {
  Rat s = 0;
  for (const auto& L : B) {
    bool inside = false;
    for (const auto& M : S) {
      if (contains(M, L)) {
        s += measure(L);
        inside = true;
        break;
      }
    }
    if (inside) continue;
    for (const auto& M : S)
      if (contains(L, M) && !(L.level == M.level && L.pos == M.pos))
        s += measure(M);
  }
  return s;
}

static bool inside_region(const IntervalCollection& region, const DyadicInterval& L) {
  for (const auto& R : region)
    if (contains(R, L)) return true;
  return false;
}

static bool meets(const IntervalCollection& S, const DyadicInterval& L) {
  for (const auto& M : S)
    if (contains(L, M) || contains(M, L)) return true;
  return false;
}

namespace {

struct SideData {
  int side = 0;
  std::vector<IntervalCollection> gens;
  IntervalCollection S;
  Rat S_measure;
  int cutoff = -1;
};

// Per-turn extras supplied by the caller: adversary constraints or a custom
// sign rule. The constraint hook sees a candidate block before signs exist
// and must hold for every sign pattern.
struct TurnHooks {
  double eta = 0;
  std::function<bool(const IntervalCollection& B, const Rat& Bstar,
                     std::vector<PairingCheck>& precheck)>
      admit;
  std::function<std::map<uint64_t, int>(uint64_t node, const IntervalCollection& B)>
      signs;
  std::function<void(TurnRecord& rec, const FaithfulSystem& sys)> post;
};

}  // namespace

// The limsup surrogate is the deepest generation cover still holding measure
// at least 1/2 - rho; the side offering the taller admissible tower wins.
static SideData choose_side(const IntervalCollection& a1,
                            const IntervalCollection& a2, double rho) {
  Rat threshold = rat_from_double(0.5 - rho);
  auto finish = [&](int side, const IntervalCollection& A) {
    SideData d;
    d.side = side;
    d.gens = generations(A);
    for (int n = 0; n < int(d.gens.size()); n++) {
      Rat m = union_measure(d.gens[n]);
      if (m < threshold) break;
      d.cutoff = n;
      d.S = d.gens[n];
      d.S_measure = m;
    }
    return d;
  };
  SideData d1 = finish(1, a1);
  SideData d2 = finish(2, a2);
  if (d1.cutoff != d2.cutoff) return d1.cutoff > d2.cutoff ? d1 : d2;
  return d2.S_measure > d1.S_measure ? d2 : d1;
}

static GameTranscript build_transcript(const SpaceSpec& sp,
                                       const std::vector<uint64_t>& a2_keys,
                                       int depth, const BuildParams& params,
                                       const std::vector<TurnHooks>& hooks,
                                       bool hooks_limit) {
  GameTranscript t;
  t.depth = depth;
  t.a2 = a2_keys;

  std::unordered_set<uint64_t> a2set;
  for (uint64_t k : a2_keys) {
    DyadicInterval I = interval_from_iota(k);
    if (int(I.level) >= depth)
      throw ValidationError("partition member " + interval_key(I) +
                            " is below the resolution floor");
    a2set.insert(k);
  }
  IntervalCollection a1, a2;
  for (uint64_t k = 1; k < (uint64_t(1) << depth); k++)
    (a2set.count(k) ? a2 : a1).push_back(interval_from_iota(k));

  SideData side = choose_side(a1, a2, params.rho);
  t.side = side.side;
  t.limsup_measure = side.S_measure;
  if (side.S_measure < rat_from_double(0.5 - params.rho)) {
    t.partial = true;
    t.note = "neither side reaches limsup measure 1/2 - rho";
    return t;
  }
  std::unordered_set<uint64_t> Sset;
  for (const auto& M : side.S) Sset.insert(iota(M));

  t.system.depth = depth;
  std::map<uint64_t, IntervalCollection> region;
  region[1] = {make_interval(0, 0)};
  std::map<uint64_t, Rat> sched;  // per-node kappa schedule value

  size_t max_nodes = params.max_turns > 0 ? size_t(params.max_turns) : SIZE_MAX;
  if (hooks_limit) max_nodes = std::min(max_nodes, hooks.size());

  // generation indices increase along branches of the block tree, mirroring
  // the faithful-system recipe; the infinite construction orders them across
  // all turns, which no finite truncation can afford
  std::map<uint64_t, int> genof;
  for (uint64_t node = 1; node < (uint64_t(1) << depth); node++) {
    if (t.turns.size() >= max_nodes) break;
    size_t turn = t.turns.size();
    const TurnHooks* hk = turn < hooks.size() ? &hooks[turn] : nullptr;
    auto rt = region.find(node);
    if (rt == region.end()) {
      t.partial = true;
      t.note = "tree exhausted before the turn limit";
      break;
    }
    Rat kap = 1 - params.sigma_budget * dyadic_measure(uint32_t(turn + 1));
    Rat parent_floor = 0;
    if (node > 1) {
      Rat pb = union_measure(t.system.blocks.at(node >> 1));
      parent_floor = sched.at(node >> 1) * pb / 2;
    }

    IntervalCollection B;
    Rat Bstar;
    std::vector<PairingCheck> prechecks;
    int chosen = -1;
    int first = node == 1 ? 0 : genof.at(node >> 1) + 1;
    for (int n = first; n < int(side.gens.size()); n++) {
      IntervalCollection cand;
      for (const auto& L : side.gens[n])
        if (inside_region(rt->second, L) && meets(side.S, L)) cand.push_back(L);
      if (cand.empty()) continue;
      normalize_collection(cand);
      Rat bs = union_measure(cand);
      if (node > 1 && bs < parent_floor) continue;
      Rat in_S = intersect_measure(cand, side.S);
      if (2 * in_S < (1 + kap) * bs) continue;  // |B* cap S| >= (1 - (1-kap)/2)|B*|
      std::vector<PairingCheck> pc;
      if (hk && hk->admit && !hk->admit(cand, bs, pc)) continue;
      B = cand;
      Bstar = bs;
      prechecks = pc;
      chosen = n;
      break;
    }
    if (chosen < 0) {
      t.partial = true;
      t.note = "no admissible generation for index " + std::to_string(node);
      break;
    }
    genof[node] = chosen;
    sched[node] = kap;

    TurnRecord rec;
    rec.iota_key = node;
    rec.gen_index = chosen;
    rec.block = B;
    rec.eta = hk ? hk->eta : 0;
    std::map<uint64_t, int> eps;
    if (hk && hk->signs) eps = hk->signs(node, B);
    for (const auto& L : B) {
      auto it = eps.find(iota(L));
      int sg = it == eps.end() ? 1 : it->second;
      if (sg != 1 && sg != -1)
        throw ValidationError("sign at member " + interval_key(L) + " is not +-1");
      rec.eps[iota(L)] = sg;
    }

    DyadicInterval nodeI = interval_from_iota(node);
    double nh_node = base_norm(sp, haar(nodeI, depth));
    for (const auto& L : B) {
      double nh = base_norm(sp, haar(L, depth));
      rec.lambda.push_back(kSqrt2 * nh / nh_node);
      rec.mu.push_back(measure(L).get_d() * nh_node /
                       (kSqrt2 * Bstar.get_d() * nh));
      rec.lambda_mu.push_back(measure(L) / Bstar);
      rec.sum_lambda_mu += measure(L) / Bstar;
    }
    rec.checks = prechecks;

    t.system.blocks[node] = B;
    for (const auto& [k, sg] : rec.eps) t.system.signs[k] = sg;
    if (node > 1 && !t.system.kappa.count(node >> 1))
      t.system.kappa[node >> 1] = sched.at(node >> 1);

    IntervalCollection plus, minus;
    for (const auto& L : B) {
      if (rec.eps.at(iota(L)) > 0) {
        plus.push_back(left_half(L));
        minus.push_back(right_half(L));
      } else {
        plus.push_back(right_half(L));
        minus.push_back(left_half(L));
      }
    }
    normalize_collection(plus);
    normalize_collection(minus);
    region[2 * node] = plus;
    region[2 * node + 1] = minus;

    if (hk && hk->post) hk->post(rec, t.system);
    for (const auto& c : rec.checks) rec.flagged = rec.flagged || !c.met;
    t.turns.push_back(std::move(rec));
  }
  return t;
}

GameTranscript strat_supp_build(const SpaceSpec& sp,
                                const std::vector<uint64_t>& a2, int depth,
                                const BuildParams& params,
                                const SignOracle& oracle) {
  std::vector<TurnHooks> hooks;
  if (oracle) {
    TurnHooks hk;
    hk.signs = oracle;
    size_t n = params.max_turns > 0 ? size_t(params.max_turns)
                                    : (size_t(1) << depth) - 1;
    hooks.assign(n, hk);
  }
  return build_transcript(sp, a2, depth, params, hooks, false);
}

GameTranscript game_run(const SpaceSpec& sp, const AdversaryScript& adv,
                        int depth, const BuildParams& params) {
  std::vector<TurnHooks> hooks;
  for (size_t turn = 0; turn < adv.turns.size(); turn++) {
    const AdversaryTurn& at = adv.turns[turn];
    TurnHooks hk;
    hk.eta = at.eta;
    uint64_t node = turn + 1;  // full-prefix walk: turn t handles index t+1
    DyadicInterval nodeI = interval_from_iota(node);
    double nh_node = base_norm(sp, haar(nodeI, depth));

    std::vector<double> dlow(at.W.size());
    for (size_t i = 0; i < at.W.size(); i++)
      dlow[i] = dual_norm_lower(sp, at.W[i], 24, 1234 + turn).lower;
    std::vector<double> ynorm(at.G.size());
    for (size_t i = 0; i < at.G.size(); i++) ynorm[i] = base_norm(sp, at.G[i]);

    hk.admit = [&sp, at, depth, nh_node, dlow, ynorm](
                   const IntervalCollection& B, const Rat& Bstar,
                   std::vector<PairingCheck>& pc) {
      double bstar = Bstar.get_d();
      for (size_t i = 0; i < at.W.size(); i++) {
        double s = 0;
        for (const auto& L : B)
          s += std::abs(pairing(at.W[i], haar(L, depth)).get_d());
        double lhs = kSqrt2 * s / nh_node;  // bounds |<g, x_I>| for any signs
        double bound = at.eta * dlow[i];
        PairingCheck c;
        c.constraint = "W[" + std::to_string(i) + "]";
        c.value = lhs;
        c.bound = bound;
        c.met = lhs <= bound;
        pc.push_back(c);
        if (!c.met) return false;
      }
      for (size_t i = 0; i < at.G.size(); i++) {
        double s = 0;
        for (const auto& L : B)
          s += std::abs(pairing(haar(L, depth), at.G[i]).get_d());
        double lhs = nh_node * s / (kSqrt2 * bstar);  // bounds |<x*_I, y>|
        double bound = at.eta * ynorm[i];
        PairingCheck c;
        c.constraint = "G[" + std::to_string(i) + "]";
        c.value = lhs;
        c.bound = bound;
        c.met = lhs <= bound;
        pc.push_back(c);
        if (!c.met) return false;
      }
      return true;
    };

    hk.signs = [at](uint64_t, const IntervalCollection& B) {
      std::map<uint64_t, int> out;
      if (at.signs == "all-plus") {
        for (const auto& L : B) out[iota(L)] = 1;
      } else if (at.signs.rfind("random:", 0) == 0) {
        std::mt19937_64 rng(std::stoull(at.signs.substr(7)));
        for (const auto& L : B) out[iota(L)] = (rng() & 1) ? 1 : -1;
      } else if (at.signs == "explicit") {
        for (const auto& L : B) {
          auto it = at.explicit_signs.find(iota(L));
          out[iota(L)] = it == at.explicit_signs.end() ? 1 : it->second;
        }
      } else {
        throw ValidationError("unknown sign directive: " + at.signs);
      }
      return out;
    };

    // replace the sign-free bound by the realized pairing once signs exist
    hk.post = [&sp, at, depth, nh_node, dlow, ynorm](TurnRecord& rec,
                                                     const FaithfulSystem& sys) {
      Rat bstar = union_measure(rec.block);
      for (auto& c : rec.checks) {
        bool isW = c.constraint[0] == 'W';
        size_t idx = std::stoul(c.constraint.substr(2, c.constraint.size() - 3));
        Rat s = 0;
        const StepFun& f = isW ? at.W[idx] : at.G[idx];
        for (const auto& L : rec.block) {
          Rat p = pairing(f, haar(L, depth));
          s += rec.eps.at(iota(L)) > 0 ? p : -p;
        }
        double raw = std::abs(s.get_d());
        c.value = isW ? kSqrt2 * raw / nh_node
                      : nh_node * raw / (kSqrt2 * bstar.get_d());
        c.met = c.value <= c.bound + 1e-12;
      }
      (void)sys;
    };
    hooks.push_back(std::move(hk));
  }
  return build_transcript(sp, adv.a2, depth, params, hooks, true);
}

ImpartialReport impartial_check(const SpaceSpec& sp, const GameTranscript& t,
                                double C, int samples, uint64_t seed) {
  ImpartialReport rep;
  rep.bound = std::sqrt(C);
  rep.seed = seed;
  if (t.system.blocks.empty()) return rep;

  std::vector<uint64_t> nodes;
  std::vector<StepFunD> xs, es;
  for (const auto& [node, blk] : t.system.blocks) {
    (void)blk;
    nodes.push_back(node);
    DyadicInterval I = interval_from_iota(node);
    double nh = base_norm(sp, haar(I, t.depth));
    StepFun ht = htilde(t.system, node, t.depth);
    StepFunD x(t.depth, 0.0), e(t.depth, 0.0);
    StepFun hi = haar(I, t.depth);
    for (size_t c = 0; c < x.v.size(); c++) {
      x.v[c] = kSqrt2 * ht.v[c].get_d() / nh;
      e.v[c] = hi.v[c].get_d() / nh;
    }
    xs.push_back(x);
    es.push_back(e);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0, 1);
  double worst = 0;
  for (int s = 0; s < samples; s++) {
    StepFunD fx(t.depth, 0.0), fe(t.depth, 0.0);
    for (size_t i = 0; i < nodes.size(); i++) {
      double a = gauss(rng);
      for (size_t c = 0; c < fx.v.size(); c++) {
        fx.v[c] += a * xs[i].v[c];
        fe.v[c] += a * es[i].v[c];
      }
    }
    double nx = ri_norm_d(sp, fx), ne = ri_norm_d(sp, fe);
    if (nx <= 0 || ne <= 0) continue;
    double r = nx / ne;
    worst = std::max(worst, std::max(r, 1 / r));
    rep.samples++;
  }
  rep.worst_ratio = worst;
  rep.ok = worst <= rep.bound + 1e-9;
  return rep;
}

ReducePositiveResult reduce_positive(const SpaceSpec& sp, const OpMatrix& T,
                                     const Rat& delta, double gamma, int depth,
                                     const BuildParams& params) {
  if (delta <= 0) throw DomainError("delta must be positive");
  if (T.row_basis() != T.col_basis())
    throw DomainError("reduction needs a square operator on the Haar span");
  auto basis = T.col_basis();
  if (!basis.empty() && basis.front() == 0)
    throw DomainError("reduction excludes the constant slot");
  if (depth <= T.depth)
    throw DomainError("depth must exceed the operator depth");

  std::unordered_map<uint64_t, size_t> pos;
  for (size_t i = 0; i < basis.size(); i++) pos[basis[i]] = i;

  ReducePositiveResult res;
  std::vector<uint64_t> a2;
  for (size_t i = 0; i < basis.size(); i++) {
    Rat d = T.a[i][i];
    if (rat_abs(d) < delta)
      throw ValidationError("diagonal entry at " +
                            interval_key(interval_from_iota(basis[i])) + " is " +
                            rat_str(d) + ", below delta");
    if (d < 0) a2.push_back(basis[i]);
  }

  // sign convention: work with U = T on side 1 (positive diagonal), U = -T on
  // side 2, so the greedy form always targets >= delta
  auto Uent = [&](uint64_t r, uint64_t c, int side) {
    Rat v = T.a[pos.at(r)][pos.at(c)];
    return side == 2 ? -v : v;
  };

  std::vector<TurnHooks> hooks;
  size_t nturns = params.max_turns > 0 ? size_t(params.max_turns)
                                       : (size_t(1) << (T.depth + 1)) - 1;
  int side_hint = 0;
  TurnHooks hk;
  hk.signs = [&](uint64_t, const IntervalCollection& B) {
    std::map<uint64_t, int> out;
    std::vector<uint64_t> ks;
    for (const auto& L : B) ks.push_back(iota(L));
    std::vector<int> sg(ks.size(), 1);
    for (size_t j = 1; j < ks.size(); j++) {
      Rat cross = 0;
      for (size_t i = 0; i < j; i++) {
        Rat mi = measure(interval_from_iota(ks[i]));
        Rat mj = measure(interval_from_iota(ks[j]));
        cross += Rat(sg[i]) * (Uent(ks[i], ks[j], side_hint) * mi +
                               Uent(ks[j], ks[i], side_hint) * mj);
      }
      sg[j] = cross >= 0 ? 1 : -1;
    }
    for (size_t j = 0; j < ks.size(); j++) out[ks[j]] = sg[j];
    return out;
  };
  hooks.assign(nturns, hk);

  // blocks must stay inside the operator's own index set, so the game tree is
  // walked at the operator resolution; `depth` only guards the call site
  int bdepth = T.depth + 1;
  BuildParams bp = params;
  GameTranscript probe = build_transcript(sp, a2, bdepth, bp, {}, false);
  side_hint = probe.side;
  res.side = probe.side;
  res.transcript = build_transcript(sp, a2, bdepth, bp, hooks, false);
  res.transcript.note += res.side == 2 ? " (operator negated internally)" : "";

  if (res.transcript.system.blocks.empty()) {
    res.note = "no transcript: " + res.transcript.note;
    return res;
  }

  // keep the deepest fully populated tree prefix so S acts on a truncation
  int mlev = 0;
  while (true) {
    bool full = true;
    for (uint64_t k = uint64_t(1) << mlev; full && k < (uint64_t(2) << mlev); k++)
      full = res.transcript.system.blocks.count(k) > 0;
    if (!full) break;
    mlev++;
  }
  FaithfulSystem trunc;
  trunc.depth = res.transcript.system.depth;
  for (const auto& [k, blk] : res.transcript.system.blocks) {
    if (k >= (uint64_t(1) << mlev)) continue;
    trunc.blocks[k] = blk;
    for (const auto& L : blk)
      trunc.signs[iota(L)] = res.transcript.system.signs.at(iota(L));
    if (2 * k < (uint64_t(1) << mlev))
      trunc.kappa[k] = res.transcript.system.kappa.at(k);
  }

  SystemReport rep = validate(trunc);
  if (!rep.valid) {
    res.note = "built system invalid: " + rep.violations[0];
    return res;
  }
  KappaOperators ops = operators_kappa(sp, trunc, 32, 17, T.depth + 1);
  FactorizationWitness w;
  w.A = ops.A;
  w.B = ops.B;
  w.T = T;
  w.S = matmul(matmul(ops.A, T), ops.B);
  Rat cbound = (1 / ops.mu) * (1 + 3 * ops.sigma) / (1 - ops.sigma);
  w.constant = cbound;
  w.error = 0;
  w.projectional = ops.ab_identity;
  w.note = res.side == 2 ? "diagonal of S is <= -delta (negated side)"
                         : "diagonal of S is >= delta";
  res.witness = w;
  res.constant_bound = cbound.get_d();

  bool diag_ok = true;
  for (size_t i = 0; i < w.S.rows(); i++) {
    res.diag.push_back(w.S.a[i][i]);
    Rat v = res.side == 2 ? -w.S.a[i][i] : w.S.a[i][i];
    diag_ok = diag_ok && v >= delta;
  }
  res.ok = diag_ok && !res.transcript.partial &&
           res.constant_bound <= 2 + gamma + 1e-12;
  if (!diag_ok) res.note = "a diagonal pairing fell below delta";
  else if (res.transcript.partial) res.note = res.transcript.note;
  else if (!res.ok) res.note = "constant bound exceeds 2 + gamma";
  else res.note = "reduced: diagonal " +
                  std::string(res.side == 2 ? "<= -delta" : ">= delta") +
                  " with constant within 2 + gamma";
  return res;
}

}  // namespace haardy
