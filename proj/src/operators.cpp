#include "haardy/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

namespace haardy {

Rat HaarMultiplier::entry(uint64_t iota_key) const {
  auto it = entries.find(iota_key);
  return it == entries.end() ? Rat(0) : it->second;
}

static std::vector<uint64_t> default_basis(int depth, bool with_const) {
  std::vector<uint64_t> out;
  if (with_const) out.push_back(0);
  uint64_t top = (uint64_t(1) << (depth + 1)) - 1;
  for (uint64_t k = 1; k <= top; k++) out.push_back(k);
  return out;
}

size_t OpMatrix::rows() const {
  if (row_idx) return row_idx->size();
  return ((size_t(1) << (depth + 1)) - 1) + (row_const ? 1 : 0);
}

size_t OpMatrix::cols() const {
  if (col_idx) return col_idx->size();
  return ((size_t(1) << (depth + 1)) - 1) + (col_const ? 1 : 0);
}

std::vector<uint64_t> OpMatrix::row_basis() const {
  return row_idx ? *row_idx : default_basis(depth, row_const);
}

std::vector<uint64_t> OpMatrix::col_basis() const {
  return col_idx ? *col_idx : default_basis(depth, col_const);
}

OpMatrix zero_matrix(int depth, bool row_const, bool col_const) {
  OpMatrix m;
  m.depth = depth;
  m.row_const = row_const;
  m.col_const = col_const;
  m.a.assign(m.rows(), std::vector<Rat>(m.cols(), Rat(0)));
  return m;
}

OpMatrix identity_matrix(int depth, bool with_const) {
  OpMatrix m = zero_matrix(depth, with_const, with_const);
  for (size_t i = 0; i < m.rows(); i++) m.a[i][i] = 1;
  return m;
}

OpMatrix identity_on(const std::vector<uint64_t>& idx, int depth) {
  OpMatrix m;
  m.depth = depth;
  m.row_idx = idx;
  m.col_idx = idx;
  m.a.assign(idx.size(), std::vector<Rat>(idx.size(), Rat(0)));
  for (size_t i = 0; i < idx.size(); i++) m.a[i][i] = 1;
  return m;
}

Expansion apply(const OpMatrix& T, const Expansion& x) {
  auto cb = T.col_basis();
  std::unordered_map<uint64_t, size_t> pos;
  for (size_t c = 0; c < cb.size(); c++) pos[cb[c]] = c;
  std::vector<Rat> xv(cb.size(), Rat(0));
  if (x.cnst && *x.cnst != 0) {
    auto it = pos.find(0);
    if (it == pos.end())
      throw DomainError("constant component outside the operator's domain basis");
    xv[it->second] = *x.cnst;
  }
  for (const auto& [k, a] : x.coef) {
    if (a == 0) continue;
    auto it = pos.find(k);
    if (it == pos.end())
      throw DomainError("coefficient " + interval_key(interval_from_iota(k)) +
                        " outside the operator's domain basis");
    xv[it->second] = a;
  }
  auto rb = T.row_basis();
  Expansion out;
  for (size_t r = 0; r < rb.size(); r++) {
    Rat s = 0;
    for (size_t c = 0; c < cb.size(); c++) {
      if (T.a[r][c] == 0 || xv[c] == 0) continue;
      s += T.a[r][c] * xv[c];
    }
    if (s == 0) continue;
    if (rb[r] == 0) out.cnst = s;
    else out.coef[rb[r]] = s;
  }
  return out;
}

static void require_same_basis(const std::vector<uint64_t>& a,
                               const std::vector<uint64_t>& b,
                               const char* what) {
  if (a != b) throw DomainError(std::string("basis mismatch: ") + what);
}

static void require_storage(const OpMatrix& A, const char* what) {
  bool ok = A.a.size() == A.rows();
  for (size_t r = 0; ok && r < A.a.size(); r++) ok = A.a[r].size() == A.cols();
  if (!ok)
    throw DomainError(std::string("matrix storage does not match its basis: ") +
                      what);
}

OpMatrix matmul(const OpMatrix& A, const OpMatrix& B) {
  require_storage(A, "left factor");
  require_storage(B, "right factor");
  require_same_basis(A.col_basis(), B.row_basis(), "inner dimensions of a product");
  OpMatrix out;
  out.depth = std::max(A.depth, B.depth);
  out.row_const = A.row_const;
  out.col_const = B.col_const;
  out.row_idx = A.row_idx;
  out.col_idx = B.col_idx;
  size_t n = A.rows(), k = A.cols(), m = B.cols();
  out.a.assign(n, std::vector<Rat>(m, Rat(0)));
  for (size_t r = 0; r < n; r++) {
    for (size_t i = 0; i < k; i++) {
      const Rat& arv = A.a[r][i];
      if (arv == 0) continue;
      for (size_t c = 0; c < m; c++) {
        if (B.a[i][c] == 0) continue;
        out.a[r][c] += arv * B.a[i][c];
      }
    }
  }
  return out;
}

static OpMatrix combine(const OpMatrix& A, const OpMatrix& B, int sign) {
  require_storage(A, "left term");
  require_storage(B, "right term");
  require_same_basis(A.row_basis(), B.row_basis(), "rows of a sum");
  require_same_basis(A.col_basis(), B.col_basis(), "columns of a sum");
  OpMatrix out = A;
  for (size_t r = 0; r < out.rows(); r++)
    for (size_t c = 0; c < out.cols(); c++)
      out.a[r][c] = A.a[r][c] + (sign > 0 ? B.a[r][c] : -B.a[r][c]);
  return out;
}

OpMatrix matadd(const OpMatrix& A, const OpMatrix& B) { return combine(A, B, 1); }
OpMatrix matsub(const OpMatrix& A, const OpMatrix& B) { return combine(A, B, -1); }

bool mat_equal(const OpMatrix& A, const OpMatrix& B) {
  if (A.row_basis() != B.row_basis() || A.col_basis() != B.col_basis()) return false;
  return A.a == B.a;
}

bool is_identity(const OpMatrix& A) {
  if (A.row_basis() != A.col_basis()) return false;
  for (size_t r = 0; r < A.rows(); r++)
    for (size_t c = 0; c < A.cols(); c++)
      if (A.a[r][c] != (r == c ? 1 : 0)) return false;
  return true;
}

OpMatrix inverse(const OpMatrix& A) {
  if (A.rows() != A.cols()) throw DomainError("inverse of a non-square matrix");
  size_t n = A.rows();
  std::vector<std::vector<Rat>> m = A.a;
  std::vector<std::vector<Rat>> inv(n, std::vector<Rat>(n, Rat(0)));
  for (size_t i = 0; i < n; i++) inv[i][i] = 1;
  for (size_t col = 0; col < n; col++) {
    size_t piv = col;
    while (piv < n && m[piv][col] == 0) piv++;
    if (piv == n) throw DomainError("singular matrix");
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    Rat d = m[col][col];
    for (size_t c = 0; c < n; c++) {
      m[col][c] /= d;
      inv[col][c] /= d;
    }
    for (size_t r = 0; r < n; r++) {
      if (r == col || m[r][col] == 0) continue;
      Rat f = m[r][col];
      for (size_t c = 0; c < n; c++) {
        m[r][c] -= f * m[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  OpMatrix out;
  out.depth = A.depth;
  out.row_const = A.col_const;
  out.col_const = A.row_const;
  out.row_idx = A.col_idx;
  out.col_idx = A.row_idx;
  out.a = std::move(inv);
  return out;
}

Expansion multiplier_apply(const HaarMultiplier& D, const Expansion& x) {
  if (x.cnst && *x.cnst != 0)
    throw DomainError("multiplier acts on mean-zero expansions");
  Expansion out;
  for (const auto& [k, a] : x.coef) {
    Rat d = D.entry(k);
    if (d == 0 || a == 0) continue;
    out.coef[k] = d * a;
  }
  return out;
}

OpMatrix multiplier_matrix(const HaarMultiplier& D, int depth) {
  OpMatrix m = zero_matrix(depth, false, false);
  auto basis = m.row_basis();
  for (size_t i = 0; i < basis.size(); i++) m.a[i][i] = D.entry(basis[i]);
  return m;
}

MultiplierBound multiplier_bound(const HaarMultiplier& D) {
  MultiplierBound b;
  b.triple = rat_abs(D.entry(1));
  // jumps are summed over the represented index set only: levels < depth
  uint64_t top = (uint64_t(1) << D.depth) - 1;
  for (uint64_t k = 2; k <= top; k++)
    b.triple += 2 * rat_abs(D.entry(k) - D.entry(k >> 1));
  b.indep = 0;
  for (const auto& [k, v] : D.entries) {
    (void)k;
    b.indep = std::max(b.indep, rat_abs(v));
  }
  return b;
}

StoppingReport stopping_multiplier(const SpaceSpec& sp, const HaarMultiplier& D,
                                   int samples, uint64_t seed, double tol,
                                   int depth) {
  StoppingReport rep;
  rep.valid_pattern = true;
  for (const auto& [k, v] : D.entries) {
    if (v != 0 && v != 1) {
      rep.valid_pattern = false;
      rep.offending = interval_from_iota(k);
      break;
    }
    if (v == 1 && k != 1 && D.entry(k >> 1) != 1) {
      rep.valid_pattern = false;
      rep.offending = interval_from_iota(k);
      break;
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0, 1);
  uint64_t top = (uint64_t(1) << depth) - 1;
  double worst = 0;
  for (int s = 0; s < samples; s++) {
    ExpansionD x;
    int terms = 1 + int(rng() % 10);
    for (int t = 0; t < terms; t++) x.coef[1 + rng() % top] = gauss(rng);
    double nx = hardy_norm_d(sp, x, depth);
    if (nx <= 0) continue;
    ExpansionD dx;
    for (const auto& [k, a] : x.coef) {
      double d = D.entry(k).get_d();
      if (d != 0) dx.coef[k] = d * a;
    }
    double r = hardy_norm_d(sp, dx, depth) / nx;
    worst = std::max(worst, r);
    rep.samples++;
  }
  rep.max_ratio = worst;
  rep.contraction_ok = worst <= 1 + tol;
  return rep;
}

std::vector<Rat> char_sequence(const HaarMultiplier& D, int n_max) {
  std::vector<Rat> out;
  for (int n = 0; n <= n_max; n++) {
    Rat s = 0;
    for (uint64_t pos = 0; pos < (uint64_t(1) << n); pos++)
      s += D.entry(iota(make_interval(uint32_t(n), pos)));
    out.push_back(s * dyadic_measure(uint32_t(n)));
  }
  return out;
}

std::vector<double> cluster_estimate(const std::vector<Rat>& seq, double eps) {
  if (seq.empty()) return {};
  size_t start = seq.size() / 2;
  std::vector<double> tail;
  for (size_t i = start; i < seq.size(); i++) tail.push_back(seq[i].get_d());
  std::sort(tail.begin(), tail.end());
  std::vector<double> reps;
  size_t i = 0;
  while (i < tail.size()) {
    size_t j = i;
    double lo = tail[i], sum = 0;
    while (j < tail.size() && tail[j] - lo <= eps) {
      sum += tail[j];
      j++;
    }
    reps.push_back(sum / double(j - i));
    i = j;
  }
  return reps;
}

static bool on_zero_path(uint64_t k) {
  return (k & (k - 1)) == 0;  // iota of [0, 2^-l) is 2^l
}

Expansion shift_W(const Expansion& x, int depth) {
  if (x.cnst && *x.cnst != 0)
    throw DomainError("shift acts on the zero-path span, no constant part");
  Expansion out;
  for (const auto& [k, a] : x.coef) {
    if (a == 0) continue;
    if (!on_zero_path(k))
      throw DomainError("coefficient " + interval_key(interval_from_iota(k)) +
                        " is off the zero path");
    DyadicInterval I = interval_from_iota(k);
    if (int(I.level) + 1 >= depth)
      throw ResolutionError("shift needs headroom below level " +
                            std::to_string(depth));
    out.coef[iota(left_half(I))] = a;
  }
  return out;
}

OpMatrix shift_W_matrix(int depth) {
  if (depth < 2) throw DomainError("shift matrix needs depth >= 2");
  std::vector<uint64_t> cols, rows;
  for (int l = 0; l <= depth - 2; l++) cols.push_back(uint64_t(1) << l);
  for (int l = 1; l <= depth - 1; l++) rows.push_back(uint64_t(1) << l);
  OpMatrix m;
  m.depth = depth - 1;
  m.row_idx = rows;
  m.col_idx = cols;
  m.a.assign(rows.size(), std::vector<Rat>(cols.size(), Rat(0)));
  for (size_t c = 0; c < cols.size(); c++) m.a[c][c] = 1;  // rows[c] = 2*cols[c]
  return m;
}

Expansion iso_S(const Expansion& x, int depth) {
  Expansion out;
  if (x.cnst && *x.cnst != 0) out.coef[1] = *x.cnst;
  for (const auto& [k, a] : x.coef) {
    if (a == 0) continue;
    if (on_zero_path(k)) {
      DyadicInterval I = interval_from_iota(k);
      if (int(I.level) + 1 >= depth)
        throw ResolutionError("isomorphism needs headroom below level " +
                              std::to_string(depth));
      out.coef[iota(left_half(I))] += a;
    } else {
      out.coef[k] += a;
    }
  }
  for (auto it = out.coef.begin(); it != out.coef.end();)
    it = it->second == 0 ? out.coef.erase(it) : std::next(it);
  return out;
}

Expansion iso_S_inv(const Expansion& x, int depth) {
  if (x.cnst && *x.cnst != 0)
    throw DomainError("the hyperplane image has no constant part");
  Expansion out;
  for (const auto& [k, a] : x.coef) {
    if (a == 0) continue;
    if (on_zero_path(k)) {
      if (k == 1) {
        out.cnst = out.cnst ? *out.cnst + a : a;
      } else {
        out.coef[k >> 1] += a;
      }
    } else {
      if (int(interval_from_iota(k).level) >= depth)
        throw ResolutionError("coefficient beyond depth");
      out.coef[k] += a;
    }
  }
  for (auto it = out.coef.begin(); it != out.coef.end();)
    it = it->second == 0 ? out.coef.erase(it) : std::next(it);
  return out;
}

OpMatrix iso_S_matrix(int depth) {
  if (depth < 2) throw DomainError("isomorphism matrix needs depth >= 2");
  std::vector<uint64_t> cols, rows;
  cols.push_back(0);
  uint64_t top = (uint64_t(1) << depth) - 1;
  for (uint64_t k = 1; k <= top; k++) {
    if (on_zero_path(k) && k == (uint64_t(1) << (depth - 1))) continue;
    cols.push_back(k);
  }
  for (uint64_t k = 1; k <= top; k++) rows.push_back(k);
  OpMatrix m;
  m.depth = depth - 1;
  m.row_idx = rows;
  m.col_idx = cols;
  m.a.assign(rows.size(), std::vector<Rat>(cols.size(), Rat(0)));
  std::unordered_map<uint64_t, size_t> rpos;
  for (size_t r = 0; r < rows.size(); r++) rpos[rows[r]] = r;
  for (size_t c = 0; c < cols.size(); c++) {
    uint64_t k = cols[c];
    uint64_t target = k == 0 ? 1 : (on_zero_path(k) ? 2 * k : k);
    m.a[rpos[target]][c] = 1;
  }
  return m;
}

Expansion proj_P(const Expansion& x) {
  Expansion out;
  for (const auto& [k, a] : x.coef)
    if (on_zero_path(k) && a != 0) out.coef[k] = a;
  return out;
}

OpMatrix proj_P_matrix(int depth) {
  OpMatrix m = zero_matrix(depth - 1, false, false);
  auto basis = m.row_basis();
  for (size_t i = 0; i < basis.size(); i++)
    if (on_zero_path(basis[i])) m.a[i][i] = 1;
  return m;
}

WitnessReport witness_verify(const SpaceSpec& sp, const FactorizationWitness& w,
                             int samples, uint64_t seed, double tol) {
  WitnessReport rep;
  OpMatrix atb = matmul(matmul(w.A, w.T), w.B);
  OpMatrix res = matsub(w.S, atb);
  bool zero = true;
  for (const auto& row : res.a)
    for (const auto& v : row)
      if (v != 0) {
        zero = false;
        break;
      }
  rep.residual_exact_zero = zero;
  if (zero) {
    rep.residual_ok = true;
  } else {
    NormCertificate c = op_norm_lower(sp, res, samples, seed);
    rep.sampled_residual_lower = c.lower;
    rep.samples = samples;
    rep.residual_ok = c.lower <= w.error.get_d() + tol;
  }
  if (w.projectional) rep.ab_identity = is_identity(matmul(w.A, w.B));
  rep.ok = rep.residual_ok && (!w.projectional || rep.ab_identity);
  return rep;
}

FactorizationWitness witness_compose(const FactorizationWitness& w1,
                                     const FactorizationWitness& w2) {
  if (!mat_equal(w1.T, w2.S))
    throw ValidationError("composition requires the first witness's target to "
                          "match the second witness's source");
  FactorizationWitness out;
  out.A = matmul(w1.A, w2.A);
  out.B = matmul(w2.B, w1.B);
  out.S = w1.S;
  out.T = w2.T;
  out.constant = w1.constant * w2.constant;
  out.error = w1.error + w1.constant * w2.error;
  out.projectional = w1.projectional && w2.projectional;
  return out;
}

FactorizationWitness witness_exactify(const FactorizationWitness& w,
                                      const Rat& S_inverse_bound) {
  Rat slack = w.error * S_inverse_bound;
  if (slack >= 1)
    throw DomainError("exactify impossible: error * inverse bound = " +
                      rat_str(slack) + " >= 1");
  OpMatrix sinv = inverse(w.S);
  OpMatrix m = matmul(sinv, matmul(matmul(w.A, w.T), w.B));
  OpMatrix q = inverse(m);
  FactorizationWitness out;
  out.A = w.A;
  out.B = matmul(w.B, q);
  out.S = w.S;
  out.T = w.T;
  out.constant = w.constant / (1 - slack);
  out.error = 0;
  out.projectional = w.projectional && is_identity(matmul(out.A, out.B));
  out.note = "exactified";
  return out;
}

FactorizationWitness witness_complement(const FactorizationWitness& w) {
  if (!w.projectional)
    throw ValidationError("complement requires a projectional witness");
  if (w.S.row_basis() != w.S.col_basis() || w.T.row_basis() != w.T.col_basis())
    throw DomainError("complement requires square source and target");
  auto ident = [](const OpMatrix& m) {
    OpMatrix id = m;
    for (size_t r = 0; r < id.rows(); r++)
      for (size_t c = 0; c < id.cols(); c++) id.a[r][c] = r == c ? 1 : 0;
    return id;
  };
  FactorizationWitness out = w;
  out.S = matsub(ident(w.S), w.S);
  out.T = matsub(ident(w.T), w.T);
  out.note = "complement";
  return out;
}

}  // namespace haardy
