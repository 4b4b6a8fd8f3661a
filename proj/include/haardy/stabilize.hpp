#ifndef HAARDY_STABILIZE_HPP
#define HAARDY_STABILIZE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "haardy/faithful.hpp"

namespace haardy {

// Randomized block system: per realized interval a frequency n_I (strictly
// increasing along iota) and per frequency level signs theta. Gamma_root is
// [0,1); Gamma of a child is the +-1 set of the parent image. The image
// hhat_I is the signed Rademacher function of level n_I relative to Gamma_I.
struct RandomizedSystem {
  int depth = 0;
  std::vector<uint64_t> index_set;           // iota prefix, sorted
  std::map<uint64_t, int> freq;              // iota(I) -> n_I
  std::map<uint64_t, int> theta;             // iota(K) -> +-1, level(K) = some n_I
  std::map<uint64_t, IntervalCollection> gamma;  // iota(I) -> level-n_I tiles of Gamma_I
};

// Derives Gamma sets from frequencies and signs; validates monotonicity and
// depth. Missing theta keys default to +1.
RandomizedSystem randomized_system(const std::vector<std::pair<uint64_t, int>>& freqs,
                                   const std::map<uint64_t, int>& theta, int depth);

// View as a block system (always faithful when well-formed).
FaithfulSystem as_faithful(const RandomizedSystem& rs);

StepFun hhat(const RandomizedSystem& rs, uint64_t iota_key, int depth);

// sum_{K in D_n, K subset Gamma} d_K |K|.
Rat gamma_sum(const HaarMultiplier& D, int n, const IntervalCollection& gamma);

struct ProbStats {
  Rat mean_plus, mean_minus;   // closed-form conditional means
  Rat var_plus, var_minus;     // closed-form conditional variances
  Rat brute_mean_plus, brute_mean_minus;
  Rat brute_var_plus, brute_var_minus;
  Rat var_bound;               // (1/4) 2^-n_I sup|d|^2 |Gamma_I|
  uint64_t patterns = 0;
  bool match = false;          // brute force equals closed form exactly
  bool bound_ok = false;
};

// Conditional mean and variance of X_{Ipm} over the level-n_I signs, all
// other signs frozen to eps. Brute force enumerates every assignment on the
// level-n_I intervals inside Gamma_I; budget 2^|D_{n_I}| <= 2^16.
ProbStats prob_stats_bruteforce(const HaarMultiplier& D, const RandomizedSystem& rs,
                                uint64_t iota_I);

enum class SignSearch { Exhaustive, Greedy, Auto };

struct StabilizeEntry {
  uint64_t iota_key = 0;
  int freq = -1;
  Rat dstab;            // X_I / |I|
  Rat deviation;        // |dstab_I - dstab_pred(I)|, 0 for the root
  Rat requested;        // eta_I budget for this interval
  bool within_budget = false;
  bool freq_admissible = false;  // a frequency meeting the budget existed
};

struct StabilizeResult {
  RandomizedSystem system;
  std::map<uint64_t, Rat> dstab;
  std::vector<StabilizeEntry> entries;
  Rat c;                       // target constant
  Rat root_deviation;          // |dstab_root - c|
  Rat certificate;             // |c - dstab_root| + 2 sum |dstab_I - dstab_pred|
  bool all_within_budget = false;
  FactorizationWitness witness;  // diag(dstab) on the realized span through D
  std::string note;
};

// Builds a randomized system for D targeting constant c: frequencies chosen
// greedily (smallest admissible level where the Gamma sum meets the schedule),
// signs per interval by exhaustive search up to 12 free signs, greedy
// conditional-expectation derandomization beyond. Deviations exceeding the
// requested budget are flagged, never silently passed.
StabilizeResult stabilize(const HaarMultiplier& D, std::optional<Rat> c,
                          const std::map<uint64_t, Rat>& eta, int depth,
                          SignSearch mode = SignSearch::Auto);

struct Theorem3Branch {
  bool attempted = false;
  bool ok = false;
  Rat constant;
  Rat error;
  std::string note;
  std::optional<FactorizationWitness> witness;
};

struct Theorem3Result {
  StabilizeResult stab;
  Rat eta;
  bool certificate_ok = false;    // certificate <= eta
  Theorem3Branch diagonal;        // (i): c I ~ Ahat D Bhat within eta
  Theorem3Branch identity;        // (ii): exactified identity through D
  Theorem3Branch complement;      // (iii): better of c / 1-c branches
};

// Runs stabilize with the geometric eta-schedule summing below eta/8, checks
// the triple-norm certificate against eta, then derives the identity and
// complement factorization branches where the scalars admit them.
Theorem3Result verify_theorem3(const HaarMultiplier& D, std::optional<Rat> c,
                               const Rat& eta, int depth,
                               SignSearch mode = SignSearch::Auto);

}  // namespace haardy

#endif
