#ifndef HAARDY_FAITHFUL_HPP
#define HAARDY_FAITHFUL_HPP

#include <map>
#include <string>
#include <vector>

#include "haardy/operators.hpp"

namespace haardy {

// Block system htilde_I = sum_{K in B_I} eps_K h_K. Keys are iota values and
// must form a set closed under predecessor. kappa_I is recorded for every key
// with at least one child key present.
struct FaithfulSystem {
  int depth = 0;  // members live on levels < depth
  std::map<uint64_t, IntervalCollection> blocks;
  std::map<uint64_t, int> signs;   // iota(K) -> +-1, every member signed
  std::map<uint64_t, Rat> kappa;
};

StepFun htilde(const FaithfulSystem& sys, uint64_t iota_key, int depth);

// Union measure |B*_I|.
Rat block_measure(const FaithfulSystem& sys, uint64_t iota_key);

struct SystemReport {
  bool valid = false;
  bool faithful = false;  // full index prefix, kappa == 1, B*_root = [0,1)
  std::vector<std::string> violations;
  Rat sigma = Rat(0);  // sum over kappa keys of (1 - kappa_I)
  Rat mu = Rat(0);     // |B*_root|
};

// Exact structural validation: internal and cross-block disjointness, signed
// members, containment B*_{Ipm} inside {htilde_I = +-1}, and the measure
// inequality |B*_{Ipm}| >= kappa_I |B*_I| / 2.
SystemReport validate(const FaithfulSystem& sys);

// Builds the faithful system whose block at level n is drawn from generation
// n of Ahat. Every generation must tile [0,1); signs are keyed by member
// iota, missing keys default to +1.
FaithfulSystem build_from_generations(const IntervalCollection& Ahat,
                                      const std::map<uint64_t, int>& eps,
                                      int depth);

struct ExtensionResult {
  FaithfulSystem extended;
  HaarMultiplier R;  // stopping pattern, R htilde'_I = htilde_I
};

// Minimal-level deterministic gap filling to a faithful system, with the
// stopping multiplier that recovers the original images.
ExtensionResult extend_to_faithful(const FaithfulSystem& sys);

struct HatOperators {
  OpMatrix Bhat;  // h_I -> htilde_I, columns over the realized index set
  OpMatrix Ahat;  // x -> sum <htilde_I, x>/|I| h_I, rows over the index set
  std::vector<uint64_t> index_set;
};

// Requires a faithful system: Ahat Bhat is the exact identity on the realized
// span and both operators have norm one.
HatOperators operators_hat(const FaithfulSystem& sys, int depth);

struct KappaOperators {
  OpMatrix B;  // h_I -> htilde_I
  OpMatrix A;  // x -> sum <htilde_I, x>/|B*_I| h_I, equals M Ahat' R
  OpMatrix M;
  HaarMultiplier R;
  FaithfulSystem extension;
  std::vector<uint64_t> index_set;
  Rat mu = Rat(0);
  Rat sigma = Rat(0);
  double analytic_bound = 0;  // (1/mu)(1+3 sigma)/(1- sigma)
  double sampled_A_lower = 0;
  double sampled_B_max_ratio = 0;
  bool ab_identity = false;
  bool sampled_A_within_bound = false;
  bool sampled_B_contractive = false;
};

// Inverse pair for a kappa-faithful system with sigma < 1 (else DomainError):
// A B = identity exactly, ||B|| <= 1 sampled, ||A|| within the analytic bound.
KappaOperators operators_kappa(const SpaceSpec& sp, const FaithfulSystem& sys,
                               int samples, uint64_t seed, int depth);

}  // namespace haardy

#endif
