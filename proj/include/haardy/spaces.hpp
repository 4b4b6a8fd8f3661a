#ifndef HAARDY_SPACES_HPP
#define HAARDY_SPACES_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "haardy/haarfun.hpp"

namespace haardy {

struct OpMatrix;

enum class RMode { Constant, Independent };

// Rearrangement-invariant base space plus randomization mode.
struct SpaceSpec {
  enum class Base { Lp, LinfClosure, CustomGauge };
  Base base = Base::Lp;
  Rat p = Rat(2);  // Lp only; p >= 1
  RMode rmode = RMode::Constant;

  // CustomGauge: evaluated on |values| of a step function. Must be symmetric
  // in the cells, monotone, and normalized on the unit indicator; validated
  // on samples before first use.
  std::function<double(const StepFunD&)> gauge;
  std::string gauge_name;
};

SpaceSpec lp_space(const Rat& p, RMode m);
SpaceSpec linf_closure_space(RMode m);

// Norm evaluation result. The exact payload makes norm identities checkable
// in rational arithmetic: for Lp with integer p it holds the exact p-th power
// of the norm, for the sup-type base the exact maximum of |values|.
struct NormValue {
  double value = 0;
  enum class Exact { None, Ppow, Sup };
  Exact kind = Exact::None;
  std::optional<Rat> exact;
  unsigned long p_int = 0;                // set when kind == Ppow
  std::optional<double> mc_stderr;        // set when the MC fallback ran
};

bool norm_equal_exact(const NormValue& a, const NormValue& b);

struct HardyOpts {
  int cap = 20;          // max active signs per cell for exact enumeration
  int mc_samples = 4096; // Monte Carlo fallback budget
  uint64_t seed = 1;
};

NormValue ri_norm(const SpaceSpec& sp, const StepFun& f);
double ri_norm_d(const SpaceSpec& sp, const StepFunD& f);

// Norm of a Haar expansion in the randomized space: constant mode reduces to
// ri_norm of the synthesis; independent mode averages |sum eps_I a_I h_I|
// over sign patterns cell by cell (exact enumeration up to opts.cap active
// coefficients, seeded Monte Carlo beyond).
NormValue hardy_norm(const SpaceSpec& sp, const Expansion& e, int depth,
                     const HardyOpts& opts = {});
double hardy_norm_d(const SpaceSpec& sp, const ExpansionD& e, int depth,
                    const HardyOpts& opts = {});

// Exact integral pairings.
Rat pairing(const StepFun& f, const StepFun& g);
Rat pairing(const Expansion& f, const Expansion& g);

struct NormCertificate {
  double lower = 0;
  std::optional<double> upper;
  std::string method;
  uint64_t seed = 0;
  int samples = 0;
  std::string witness;
  std::optional<Rat> witness_pairing;      // exact <g, x*> at the best witness
  std::optional<NormValue> witness_norm;   // ||x*|| with exact payload
};

// Certified lower bound for the dual norm of g: max of <g,x>/||x|| over
// sampled and locally improved unit vectors, plus canonical witnesses (Haar
// functions, the sign pattern of g). Upper bound attached when a closed form
// exists (conjugate exponent, L1 for the sup-type base).
NormCertificate dual_norm_lower(const SpaceSpec& sp, const StepFun& g,
                                int samples, uint64_t seed);

// Sampled lower bound for the operator norm of a matrix over the Haar basis.
NormCertificate op_norm_lower(const SpaceSpec& sp, const OpMatrix& T,
                              int samples, uint64_t seed);

struct UpperTauReport {
  bool valid = false;           // block structure admissible
  std::string violation;
  double worst_ratio = 0;       // max over prefixes of lhs/rhs
  int worst_prefix = -1;
  std::vector<double> prefix_norms;
  std::vector<double> rhs_bounds;
  bool satisfied = false;       // worst_ratio <= 1 + tol
};

// Checks an upper tau-estimate with constant C on a disjointly supported,
// increasing block sequence: ||x_1 + ... + x_k|| <= C (sum ||x_j||^tau)^(1/tau)
// for every prefix. tau = nullopt means the sup form (tau = infinity).
UpperTauReport upper_tau_check(const SpaceSpec& sp,
                               const std::vector<Expansion>& blocks,
                               std::optional<Rat> tau, double C, int depth,
                               double tol);

struct GaugeValidation {
  bool ok = false;
  std::string reason;
};

// Samples the custom gauge for normalization, monotonicity and the
// L1 <= gauge <= Linf sandwich; failing gauges are refused by ri_norm.
GaugeValidation validate_gauge(const SpaceSpec& sp, int samples, uint64_t seed);

}  // namespace haardy

#endif
