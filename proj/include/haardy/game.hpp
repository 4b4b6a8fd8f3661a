#ifndef HAARDY_GAME_HPP
#define HAARDY_GAME_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "haardy/stabilize.hpp"

namespace haardy {

// Finite stand-in for a cofinite constraint: a list of annihilated step
// functions with a tolerance. Distance checks are one-sided pairing bounds.
struct CofiniteConstraint {
  enum class Kind { AnnihilatedFunctionals, AnnihilatedVectors };
  Kind kind = Kind::AnnihilatedFunctionals;
  std::vector<StepFun> members;
  double tolerance = 0;
};

struct PairingCheck {
  std::string constraint;  // "W[k]" or "G[k]"
  double value = 0;        // |<g, x_I>| resp. |<x*_I, y>|
  double bound = 0;        // eta_I times the relevant norm bound
  bool met = false;
};

struct TurnRecord {
  uint64_t iota_key = 0;
  double eta = 0;
  int gen_index = -1;
  IntervalCollection block;
  std::map<uint64_t, int> eps;     // signs used for this block
  std::vector<double> lambda;      // per member, block order
  std::vector<double> mu;
  std::vector<Rat> lambda_mu;      // exact per-member products
  Rat sum_lambda_mu = Rat(0);      // exact; 1 for the supporting strategy
  std::vector<PairingCheck> checks;
  bool flagged = false;
};

struct GameTranscript {
  int depth = 0;
  std::vector<uint64_t> a2;  // iota keys of partition side 2; side 1 is the rest
  int side = 0;              // side the strategy plays on
  Rat limsup_measure = Rat(0);
  std::vector<TurnRecord> turns;
  FaithfulSystem system;
  bool partial = false;
  std::string note;
};

struct AdversaryTurn {
  double eta = 0.01;
  std::vector<StepFun> W;  // annihilated functionals constraining x_I
  std::vector<StepFun> G;  // annihilated vectors constraining x*_I
  std::string signs = "all-plus";  // "all-plus" | "random:<seed>" | "explicit"
  std::map<uint64_t, int> explicit_signs;
};

struct AdversaryScript {
  std::vector<uint64_t> a2;
  std::vector<AdversaryTurn> turns;
};

struct BuildParams {
  Rat sigma_budget = Rat(1, 100);  // total kappa deficiency across turns
  double rho = 1.0 / 64;           // admissible loss under the 1/2 threshold
  int max_turns = 0;               // 0: as many as the generations allow
};

using SignOracle =
    std::function<std::map<uint64_t, int>(uint64_t iota_key, const IntervalCollection&)>;

// Supporting-sequence construction without an adversary: picks the partition
// side whose finite limsup has measure >= 1/2 - rho (side 1 preferred),
// then walks generations in iota order maintaining the kappa schedule.
// An unattainable block-measure threshold ends the transcript (partial).
GameTranscript strat_supp_build(const SpaceSpec& sp,
                                const std::vector<uint64_t>& a2, int depth,
                                const BuildParams& params,
                                const SignOracle& oracle = {});

// Full game against a scripted adversary: per turn the adversary supplies
// eta, constraint lists and the signs; the strategy answers with a block,
// nonnegative weights with exact sum 1, and pairing checks against the
// per-turn thresholds. Depth exhaustion yields a partial transcript.
GameTranscript game_run(const SpaceSpec& sp, const AdversaryScript& adv,
                        int depth, const BuildParams& params);

struct ImpartialReport {
  double worst_ratio = 0;  // max over samples of max(r, 1/r)
  double bound = 0;        // sqrt(C)
  bool ok = false;
  int samples = 0;
  uint64_t seed = 0;
};

// Sampled impartial C-equivalence of the built vectors x_I = sqrt(2)
// htilde_I / ||h_I|| against the normalized Haar functions.
ImpartialReport impartial_check(const SpaceSpec& sp, const GameTranscript& t,
                                double C, int samples, uint64_t seed);

struct ReducePositiveResult {
  GameTranscript transcript;
  FactorizationWitness witness;  // S = A T B in raw Haar coordinates
  std::vector<Rat> diag;         // exact diagonal pairings of S, iota order
  int side = 0;                  // 1: diag >= delta, 2: diag <= -delta
  double constant_bound = 0;     // (1/mu)(1+3sigma)/(1-sigma)
  bool ok = false;
  std::string note;
};

// Reduction of an operator with delta-large diagonal to a diagonal-positive
// factor through itself: partitions by diagonal sign, plays the supporting
// strategy on the winning side, and picks block signs by greedy
// derandomization of the exact quadratic form <x*_I, T x_I>.
// Operators without |diagonal| >= delta are rejected (offending index named).
ReducePositiveResult reduce_positive(const SpaceSpec& sp, const OpMatrix& T,
                                     const Rat& delta, double gamma, int depth,
                                     const BuildParams& params);

}  // namespace haardy

#endif
