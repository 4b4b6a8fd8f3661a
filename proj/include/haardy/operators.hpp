#ifndef HAARDY_OPERATORS_HPP
#define HAARDY_OPERATORS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "haardy/spaces.hpp"

namespace haardy {

// Diagonal operator on the Haar system: h_I -> d_I h_I. Missing entries are 0.
struct HaarMultiplier {
  int depth = 0;  // entries live on levels < depth
  std::map<uint64_t, Rat> entries;

  Rat entry(uint64_t iota_key) const;
};

// Dense matrix over iota-ordered Haar coefficients. The default bases are all
// intervals of level <= depth (iota 1 .. 2^(depth+1)-1), optionally preceded
// by the constant slot (iota 0). Explicit index lists restrict a side to a
// sub-basis; such matrices are honest rectangular maps between spans.
struct OpMatrix {
  int depth = 0;
  bool row_const = false;
  bool col_const = false;
  std::optional<std::vector<uint64_t>> row_idx;
  std::optional<std::vector<uint64_t>> col_idx;
  std::vector<std::vector<Rat>> a;  // row-major

  size_t rows() const;
  size_t cols() const;
  std::vector<uint64_t> row_basis() const;
  std::vector<uint64_t> col_basis() const;
};

OpMatrix zero_matrix(int depth, bool row_const, bool col_const);
OpMatrix identity_matrix(int depth, bool with_const);
OpMatrix identity_on(const std::vector<uint64_t>& idx, int depth);

Expansion apply(const OpMatrix& T, const Expansion& x);
OpMatrix matmul(const OpMatrix& A, const OpMatrix& B);
OpMatrix matadd(const OpMatrix& A, const OpMatrix& B);
OpMatrix matsub(const OpMatrix& A, const OpMatrix& B);
bool mat_equal(const OpMatrix& A, const OpMatrix& B);
bool is_identity(const OpMatrix& A);

// Exact Gauss-Jordan inverse; DomainError if singular or not square.
OpMatrix inverse(const OpMatrix& A);

// Rejects expansions with a nonzero constant coefficient (mean-zero scope).
Expansion multiplier_apply(const HaarMultiplier& D, const Expansion& x);
OpMatrix multiplier_matrix(const HaarMultiplier& D, int depth);

struct MultiplierBound {
  Rat triple;  // |d_root| + 2 sum_{I != root} |d_I - d_pred(I)|
  Rat indep;   // sup_I |d_I|
};

MultiplierBound multiplier_bound(const HaarMultiplier& D);

struct StoppingReport {
  bool valid_pattern = false;
  std::optional<DyadicInterval> offending;
  int samples = 0;
  double max_ratio = 0;
  bool contraction_ok = false;
};

// Validates the stopping pattern ({0,1} entries, zero set closed downward)
// and samples ||Dx||/||x|| <= 1 + tol.
StoppingReport stopping_multiplier(const SpaceSpec& sp, const HaarMultiplier& D,
                                   int samples, uint64_t seed, double tol,
                                   int depth);

// <r_n, D r_n> = sum_{K in D_n} d_K |K| for n = 0..n_max.
std::vector<Rat> char_sequence(const HaarMultiplier& D, int n_max);

// Cluster representatives of the tail (last half) of a sequence, grouping
// values within eps of a running cluster. Sorted ascending.
std::vector<double> cluster_estimate(const std::vector<Rat>& seq, double eps);

// Shift on span{h_I : inf I = 0}: a_I h_I -> a_I h_{I+}. Coefficients off the
// zero path are rejected; the deepest level needs headroom.
Expansion shift_W(const Expansion& x, int depth);
OpMatrix shift_W_matrix(int depth);

// Isomorphism onto the hyperplane: h_const -> h_root, zero-path h_I -> h_{I+},
// everything else fixed.
Expansion iso_S(const Expansion& x, int depth);
Expansion iso_S_inv(const Expansion& x, int depth);
OpMatrix iso_S_matrix(int depth);

// Coefficient projection onto span{h_I : inf I = 0}.
Expansion proj_P(const Expansion& x);
OpMatrix proj_P_matrix(int depth);

// Claim: S factors through T as S ~ A T B with ||A|| ||B|| <= constant and
// ||S - A T B|| <= error; projectional additionally claims A B = identity.
struct FactorizationWitness {
  OpMatrix A, B, S, T;
  Rat constant = Rat(1);
  Rat error = Rat(0);
  bool projectional = false;
  std::string note;
};

struct WitnessReport {
  bool ok = false;
  bool residual_ok = false;
  bool ab_identity = false;  // meaningful when projectional
  bool residual_exact_zero = false;
  double sampled_residual_lower = 0;
  int samples = 0;
};

WitnessReport witness_verify(const SpaceSpec& sp, const FactorizationWitness& w,
                             int samples, uint64_t seed, double tol);

// w1: S ~ A1 T1 B1, w2: T1 ~ A2 T2 B2  =>  S ~ (A1 A2) T2 (B2 B1),
// constant C1 C2, error eta1 + C1 eta2. Requires w1.T == w2.S.
FactorizationWitness witness_compose(const FactorizationWitness& w1,
                                     const FactorizationWitness& w2);

// Turns an approximate factorization of an invertible S into an exact one:
// Q = (S^-1 A T B)^-1, B' = B Q, constant C/(1 - error*S_inverse_bound),
// error 0. Requires error*S_inverse_bound < 1; singular Q is an error.
FactorizationWitness witness_exactify(const FactorizationWitness& w,
                                      const Rat& S_inverse_bound);

// For projectional witnesses: I - S factors through I - T with the same
// constant and error.
FactorizationWitness witness_complement(const FactorizationWitness& w);

}  // namespace haardy

#endif
