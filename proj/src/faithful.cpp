#include "haardy/faithful.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace haardy {

StepFun htilde(const FaithfulSystem& sys, uint64_t iota_key, int depth) {
  auto it = sys.blocks.find(iota_key);
  if (it == sys.blocks.end())
    throw DomainError("no block at index " + std::to_string(iota_key));
  StepFun out(depth, Rat(0));
  for (const auto& K : it->second) {
    auto st = sys.signs.find(iota(K));
    int eps = st == sys.signs.end() ? 1 : st->second;
    StepFun h = haar(K, depth);
    for (size_t t = 0; t < h.v.size(); t++)
      if (h.v[t] != 0) out.v[t] += eps > 0 ? h.v[t] : -h.v[t];
  }
  return out;
}

Rat block_measure(const FaithfulSystem& sys, uint64_t iota_key) {
  auto it = sys.blocks.find(iota_key);
  if (it == sys.blocks.end())
    throw DomainError("no block at index " + std::to_string(iota_key));
  return union_measure(it->second);
}

// Sign of htilde_I on a member L of a child block: +1, -1, or 0 when L is not
// inside a half of a parent-block member.
static int sign_on(const FaithfulSystem& sys,
                   const std::unordered_set<uint64_t>& parent_members,
                   const DyadicInterval& L) {
  uint64_t k = iota(L);
  uint64_t walk = k;
  while (walk >= 1) {
    if (parent_members.count(walk)) break;
    if (walk == 1) return 0;
    walk >>= 1;
  }
  if (walk == k) return 0;  // member equals a parent member, htilde not constant
  DyadicInterval K = interval_from_iota(walk);
  uint64_t child_of_K = k >> (L.level - K.level - 1);
  bool left = child_of_K == 2 * walk;
  auto st = sys.signs.find(walk);
  int eps = st == sys.signs.end() ? 1 : st->second;
  return left ? eps : -eps;
}

SystemReport validate(const FaithfulSystem& sys) {
  SystemReport rep;
  auto bad = [&](const std::string& msg) { rep.violations.push_back(msg); };

  if (sys.blocks.empty()) {
    bad("no blocks");
    return rep;
  }
  for (const auto& [k, blk] : sys.blocks) {
    if (k == 0) bad("index 0 is the constant slot, not a block index");
    if (k > 1 && !sys.blocks.count(k >> 1))
      bad("index " + std::to_string(k) + " lacks its predecessor");
    if (blk.empty()) bad("block " + std::to_string(k) + " is empty");
    if (!pairwise_disjoint(blk))
      bad("block " + std::to_string(k) + " has overlapping members");
    for (const auto& K : blk) {
      if (int(K.level) >= sys.depth)
        bad("member " + interval_key(K) + " is at or below the resolution floor");
      auto st = sys.signs.find(iota(K));
      if (st == sys.signs.end())
        bad("member " + interval_key(K) + " is unsigned");
      else if (st->second != 1 && st->second != -1)
        bad("member " + interval_key(K) + " has sign " + std::to_string(st->second));
    }
  }
  {
    std::unordered_set<uint64_t> seen;
    for (const auto& [k, blk] : sys.blocks)
      for (const auto& K : blk)
        if (!seen.insert(iota(K)).second)
          bad("member " + interval_key(K) + " appears in two blocks");
  }

  for (const auto& [k, blk] : sys.blocks) {
    bool has_child = sys.blocks.count(2 * k) || sys.blocks.count(2 * k + 1);
    auto kt = sys.kappa.find(k);
    if (has_child && kt == sys.kappa.end()) {
      bad("index " + std::to_string(k) + " has children but no kappa");
      continue;
    }
    if (!has_child) continue;
    Rat kap = kt->second;
    if (kap <= 0 || kap > 1)
      bad("kappa at index " + std::to_string(k) + " is " + rat_str(kap));
    std::unordered_set<uint64_t> members;
    for (const auto& K : blk) members.insert(iota(K));
    Rat parent_measure = union_measure(blk);
    for (int side = 0; side < 2; side++) {
      uint64_t ck = 2 * k + side;
      auto ct = sys.blocks.find(ck);
      if (ct == sys.blocks.end()) continue;
      int want = side == 0 ? 1 : -1;
      for (const auto& L : ct->second) {
        if (sign_on(sys, members, L) != want) {
          bad("member " + interval_key(L) + " of block " + std::to_string(ck) +
              " is not inside the sign-" + (want > 0 ? std::string("plus") : "minus") +
              " set of its predecessor");
        }
      }
      if (union_measure(ct->second) * 2 < kap * parent_measure)
        bad("block " + std::to_string(ck) + " is too small for kappa " +
            rat_str(kap));
    }
  }

  rep.sigma = 0;
  for (const auto& [k, kap] : sys.kappa) {
    (void)k;
    rep.sigma += 1 - kap;
  }
  rep.mu = sys.blocks.count(1) ? union_measure(sys.blocks.at(1)) : Rat(0);
  rep.valid = rep.violations.empty();

  if (rep.valid) {
    uint64_t maxk = sys.blocks.rbegin()->first;
    bool prefix = sys.blocks.size() == maxk && sys.blocks.begin()->first == 1;
    bool unit_kappa = true;
    for (const auto& [k, kap] : sys.kappa) {
      (void)k;
      unit_kappa = unit_kappa && kap == 1;
    }
    rep.faithful = prefix && unit_kappa && rep.mu == 1;
  }
  return rep;
}

FaithfulSystem build_from_generations(const IntervalCollection& Ahat,
                                      const std::map<uint64_t, int>& eps,
                                      int depth) {
  auto gens = generations(Ahat);
  if (gens.empty()) throw ValidationError("empty collection");
  for (size_t n = 0; n < gens.size(); n++) {
    if (!is_tiling(gens[n]))
      throw ValidationError("generation " + std::to_string(n) +
                            " does not tile the unit interval");
    for (const auto& K : gens[n])
      if (int(K.level) >= depth)
        throw ResolutionError("member " + interval_key(K) + " too deep for depth " +
                              std::to_string(depth));
  }

  FaithfulSystem sys;
  sys.depth = depth;
  auto sign_of = [&](const DyadicInterval& K) {
    auto it = eps.find(iota(K));
    return it == eps.end() ? 1 : it->second;
  };

  // region of each tree node, as a collection of halves of parent members
  std::map<uint64_t, IntervalCollection> region;
  region[1] = {make_interval(0, 0)};
  size_t levels = gens.size();
  for (size_t l = 0; l < levels; l++) {
    for (uint64_t k = uint64_t(1) << l; k < (uint64_t(1) << (l + 1)); k++) {
      const auto& reg = region.at(k);
      IntervalCollection blk;
      for (const auto& K : gens[l])
        for (const auto& R : reg)
          if (contains(R, K)) {
            blk.push_back(K);
            break;
          }
      normalize_collection(blk);
      sys.blocks[k] = blk;
      for (const auto& K : blk) sys.signs[iota(K)] = sign_of(K);
      if (l + 1 < levels) {
        sys.kappa[k] = 1;
        IntervalCollection plus, minus;
        for (const auto& K : blk) {
          if (sign_of(K) > 0) {
            plus.push_back(left_half(K));
            minus.push_back(right_half(K));
          } else {
            plus.push_back(right_half(K));
            minus.push_back(left_half(K));
          }
        }
        normalize_collection(plus);
        normalize_collection(minus);
        region[2 * k] = plus;
        region[2 * k + 1] = minus;
      }
    }
  }
  return sys;
}

// Largest dyadic tiles of J minus the given members (each inside J).
static void subtract_rec(const DyadicInterval& J,
                         const std::vector<DyadicInterval>& members,
                         IntervalCollection& out) {
  if (members.empty()) {
    out.push_back(J);
    return;
  }
  for (const auto& M : members)
    if (M == J) return;
  DyadicInterval L = left_half(J), R = right_half(J);
  std::vector<DyadicInterval> lm, rm;
  for (const auto& M : members) (contains(L, M) ? lm : rm).push_back(M);
  subtract_rec(L, lm, out);
  subtract_rec(R, rm, out);
}

static IntervalCollection coalesce(IntervalCollection c) {
  normalize_collection(c);
  std::unordered_set<uint64_t> set;
  for (const auto& K : c) set.insert(iota(K));
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = set.begin(); it != set.end(); ++it) {
      uint64_t k = *it;
      if (k <= 1) continue;
      if ((k % 2) == 0 && set.count(k + 1)) {
        set.erase(k);
        set.erase(k + 1);
        set.insert(k >> 1);
        changed = true;
        break;
      }
    }
  }
  IntervalCollection out;
  for (uint64_t k : set) out.push_back(interval_from_iota(k));
  normalize_collection(out);
  return out;
}

ExtensionResult extend_to_faithful(const FaithfulSystem& sys) {
  SystemReport rep = validate(sys);
  if (!rep.valid)
    throw ValidationError("cannot extend an invalid system: " + rep.violations[0]);

  ExtensionResult res;
  FaithfulSystem& ext = res.extended;
  ext.depth = sys.depth;
  uint64_t maxk = sys.blocks.rbegin()->first;
  IntervalCollection fill_all;

  std::map<uint64_t, IntervalCollection> region;
  region[1] = {make_interval(0, 0)};
  for (uint64_t k = 1; k <= maxk; k++) {
    const IntervalCollection& reg = region.at(k);
    IntervalCollection blk;
    auto bt = sys.blocks.find(k);
    if (bt != sys.blocks.end()) blk = bt->second;
    IntervalCollection gap;
    for (const auto& R : reg) {
      std::vector<DyadicInterval> inside;
      for (const auto& M : blk) {
        if (contains(R, M)) inside.push_back(M);
        else if (!disjoint(R, M))
          throw ValidationError("member " + interval_key(M) +
                                " straddles the region of index " +
                                std::to_string(k));
      }
      subtract_rec(R, inside, gap);
    }
    for (const auto& M : blk)
      if (std::none_of(reg.begin(), reg.end(),
                       [&](const DyadicInterval& R) { return contains(R, M); }))
        throw ValidationError("member " + interval_key(M) +
                              " escapes the region of index " + std::to_string(k));
    gap = coalesce(gap);
    for (const auto& G : gap) {
      if (int(G.level) >= sys.depth)
        throw ResolutionError("gap tile " + interval_key(G) +
                              " too deep for the system resolution");
      fill_all.push_back(G);
    }
    IntervalCollection full = blk;
    for (const auto& G : gap) full.push_back(G);
    normalize_collection(full);
    ext.blocks[k] = full;
    for (const auto& M : blk) ext.signs[iota(M)] = sys.signs.at(iota(M));
    for (const auto& G : gap) ext.signs[iota(G)] = 1;
    if (2 * k <= maxk || k < maxk) {
      // regions for both children; kappa once a child block exists
      IntervalCollection plus, minus;
      for (const auto& M : full) {
        int eps = ext.signs.at(iota(M));
        if (eps > 0) {
          plus.push_back(left_half(M));
          minus.push_back(right_half(M));
        } else {
          plus.push_back(right_half(M));
          minus.push_back(left_half(M));
        }
      }
      region[2 * k] = coalesce(plus);
      region[2 * k + 1] = coalesce(minus);
    }
  }
  for (uint64_t k = 1; k <= maxk; k++)
    if (2 * k <= maxk) ext.kappa[k] = 1;

  normalize_collection(fill_all);
  res.R.depth = sys.depth;
  uint64_t top = (uint64_t(1) << sys.depth) - 1;
  std::unordered_set<uint64_t> fills;
  for (const auto& F : fill_all) fills.insert(iota(F));
  std::vector<char> zero(top + 1, 0);
  for (uint64_t k = 1; k <= top; k++) {
    zero[k] = (k > 1 && zero[k >> 1]) || fills.count(k);
    res.R.entries[k] = zero[k] ? 0 : 1;
  }
  return res;
}

HatOperators operators_hat(const FaithfulSystem& sys, int depth) {
  SystemReport rep = validate(sys);
  if (!rep.valid)
    throw ValidationError("system invalid: " + rep.violations[0]);
  if (!rep.faithful)
    throw ValidationError("hat operators require a faithful system");

  HatOperators ops;
  for (const auto& [k, blk] : sys.blocks) {
    (void)blk;
    ops.index_set.push_back(k);
  }
  size_t nT = ops.index_set.size();
  int hdepth = depth - 1;  // coefficient levels 0..depth-1
  OpMatrix B;
  B.depth = hdepth;
  B.col_idx = ops.index_set;
  B.a.assign(B.rows(), std::vector<Rat>(nT, Rat(0)));
  OpMatrix A;
  A.depth = hdepth;
  A.row_idx = ops.index_set;
  A.a.assign(nT, std::vector<Rat>(A.cols(), Rat(0)));
  for (size_t j = 0; j < nT; j++) {
    uint64_t I = ops.index_set[j];
    Rat mI = measure(interval_from_iota(I));
    for (const auto& K : sys.blocks.at(I)) {
      uint64_t kk = iota(K);
      int eps = sys.signs.at(kk);
      B.a[kk - 1][j] = eps;
      A.a[j][kk - 1] = Rat(eps) * measure(K) / mI;
    }
  }
  ops.Bhat = std::move(B);
  ops.Ahat = std::move(A);
  return ops;
}

KappaOperators operators_kappa(const SpaceSpec& sp, const FaithfulSystem& sys,
                               int samples, uint64_t seed, int depth) {
  SystemReport rep = validate(sys);
  if (!rep.valid)
    throw ValidationError("system invalid: " + rep.violations[0]);
  if (rep.sigma >= 1)
    throw DomainError("sigma = " + rat_str(rep.sigma) + " >= 1");
  if (rep.mu <= 0) throw DomainError("root block has measure zero");

  KappaOperators ops;
  ops.sigma = rep.sigma;
  ops.mu = rep.mu;
  ExtensionResult er = extend_to_faithful(sys);
  ops.extension = er.extended;
  ops.R = er.R;
  for (const auto& [k, blk] : sys.blocks) {
    (void)blk;
    ops.index_set.push_back(k);
  }
  size_t nT = ops.index_set.size();

  HatOperators hat = operators_hat(er.extended, depth);
  OpMatrix Rmat = multiplier_matrix(er.R, depth - 1);

  // rows of the extended analysis operator restricted to the original indices
  OpMatrix Ares;
  Ares.depth = depth - 1;
  Ares.row_idx = ops.index_set;
  Ares.a.reserve(nT);
  {
    std::unordered_map<uint64_t, size_t> extpos;
    for (size_t r = 0; r < hat.index_set.size(); r++) extpos[hat.index_set[r]] = r;
    for (uint64_t I : ops.index_set) Ares.a.push_back(hat.Ahat.a.at(extpos.at(I)));
  }

  OpMatrix M;
  M.depth = depth - 1;
  M.row_idx = ops.index_set;
  M.col_idx = ops.index_set;
  M.a.assign(nT, std::vector<Rat>(nT, Rat(0)));
  for (size_t j = 0; j < nT; j++) {
    uint64_t I = ops.index_set[j];
    M.a[j][j] = measure(interval_from_iota(I)) / union_measure(sys.blocks.at(I));
  }
  ops.M = M;
  ops.A = matmul(M, matmul(Ares, Rmat));

  OpMatrix B;
  B.depth = depth - 1;
  B.col_idx = ops.index_set;
  B.a.assign(B.rows(), std::vector<Rat>(nT, Rat(0)));
  for (size_t j = 0; j < nT; j++)
    for (const auto& K : sys.blocks.at(ops.index_set[j]))
      B.a[iota(K) - 1][j] = sys.signs.at(iota(K));
  ops.B = std::move(B);

  ops.ab_identity = is_identity(matmul(ops.A, ops.B));
  double mu = ops.mu.get_d(), sigma = ops.sigma.get_d();
  ops.analytic_bound = (1.0 / mu) * (1 + 3 * sigma) / (1 - sigma);
  ops.sampled_A_lower = op_norm_lower(sp, ops.A, samples, seed).lower;
  ops.sampled_B_max_ratio = op_norm_lower(sp, ops.B, samples, seed ^ 0xb).lower;
  ops.sampled_A_within_bound = ops.sampled_A_lower <= ops.analytic_bound + 1e-9;
  ops.sampled_B_contractive = ops.sampled_B_max_ratio <= 1 + 1e-9;
  return ops;
}

}  // namespace haardy
