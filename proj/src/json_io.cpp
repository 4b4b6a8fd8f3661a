#include "haardy/json_io.hpp"

#include <fstream>
#include <sstream>

namespace haardy {

Json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw JsonError("cannot open " + path, path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    size_t byte = e.byte;
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < byte && i < text.size(); i++) {
      if (text[i] == '\n') {
        line++;
        col = 1;
      } else {
        col++;
      }
    }
    std::string loc = path + ":" + std::to_string(line) + ":" + std::to_string(col);
    throw JsonError(std::string(e.what()) + " at " + loc + " line " +
                        std::to_string(line),
                    loc);
  }
}

static const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object())
    throw JsonError(where + " must be an object", where);
  auto it = j.find(key);
  if (it == j.end())
    throw JsonError(where + " is missing '" + key + "'", where);
  return *it;
}

Rat rat_from_json(const Json& j, const std::string& where) {
  try {
    if (j.is_number_integer()) return Rat(std::to_string(j.get<int64_t>()), 10);
    if (j.is_number_unsigned()) return Rat(std::to_string(j.get<uint64_t>()), 10);
    if (j.is_number_float()) return rat_from_double(j.get<double>());
    if (j.is_string()) return rat_parse(j.get<std::string>());
  } catch (const std::exception& e) {
    throw JsonError(where + ": " + e.what(), where);
  }
  throw JsonError(where + " must be a number or a \"p/q\" string", where);
}

Json to_json(const Rat& x) {
  if (x.get_den() == 1 && x.get_num().fits_slong_p())
    return Json(int64_t(x.get_num().get_si()));
  double d = x.get_d();
  if (rat_from_double(d) == x) return Json(d);
  return Json(rat_str(x));
}

static uint64_t iota_from_json(const Json& j, const std::string& where) {
  try {
    if (j.is_number_unsigned() || j.is_number_integer()) {
      int64_t v = j.get<int64_t>();
      if (v < 0) throw JsonError(where + ": negative index", where);
      return uint64_t(v);
    }
    if (j.is_string()) {
      std::string s = j.get<std::string>();
      if (s == "const") return 0;
      return iota(interval_from_key(s));
    }
  } catch (const JsonError&) {
    throw;
  } catch (const std::exception& e) {
    throw JsonError(where + ": " + e.what(), where);
  }
  throw JsonError(where + " must be an index number or a \"level:pos\" key", where);
}

static std::string iota_key_str(uint64_t k) {
  return k == 0 ? "const" : interval_key(interval_from_iota(k));
}

Json to_json(const StepFun& f) {
  Json vals = Json::array();
  for (const auto& v : f.v) vals.push_back(to_json(v));
  return Json{{"depth", f.depth}, {"values", vals}};
}

StepFun stepfun_from_json(const Json& j, const std::string& where) {
  int depth = field(j, "depth", where).get<int>();
  if (depth < 0 || depth > 20)
    throw JsonError(where + ": depth " + std::to_string(depth) + " out of range",
                    where);
  const Json& vals = field(j, "values", where);
  if (!vals.is_array() || vals.size() != (size_t(1) << depth))
    throw JsonError(where + ": 'values' must hold exactly 2^depth entries", where);
  StepFun f(depth, Rat(0));
  for (size_t t = 0; t < vals.size(); t++)
    f.v[t] = rat_from_json(vals[t], where + ".values[" + std::to_string(t) + "]");
  return f;
}

Json to_json(const Expansion& e) {
  Json coeffs = Json::object();
  for (const auto& [k, a] : e.coef)
    coeffs[interval_key(interval_from_iota(k))] = to_json(a);
  Json out{{"coeffs", coeffs}};
  if (e.cnst) out["const"] = to_json(*e.cnst);
  return out;
}

Expansion expansion_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw JsonError(where + " must be an object", where);
  Expansion e;
  if (j.contains("coeffs")) {
    const Json& c = j.at("coeffs");
    if (!c.is_object())
      throw JsonError(where + ".coeffs must be an object", where);
    for (auto it = c.begin(); it != c.end(); ++it) {
      uint64_t k;
      try {
        k = iota(interval_from_key(it.key()));
      } catch (const std::exception& ex) {
        throw JsonError(where + ".coeffs key '" + it.key() + "': " + ex.what(),
                        where);
      }
      e.coef[k] = rat_from_json(it.value(), where + ".coeffs[" + it.key() + "]");
    }
  }
  if (j.contains("const")) e.cnst = rat_from_json(j.at("const"), where + ".const");
  return e;
}

Json to_json(const SpaceSpec& sp) {
  Json base;
  switch (sp.base) {
    case SpaceSpec::Base::Lp:
      base = Json{{"type", "Lp"}, {"p", to_json(sp.p)}};
      break;
    case SpaceSpec::Base::LinfClosure:
      base = Json{{"type", "LinfClosure"}};
      break;
    case SpaceSpec::Base::CustomGauge:
      base = Json{{"type", "CustomGauge"}, {"name", sp.gauge_name}};
      break;
  }
  return Json{{"base", base},
              {"rmode", sp.rmode == RMode::Independent ? "independent" : "constant"}};
}

SpaceSpec space_from_json(const Json& j, const std::string& where) {
  const Json& base = field(j, "base", where);
  std::string type = field(base, "type", where + ".base").get<std::string>();
  RMode rm = RMode::Constant;
  if (j.contains("rmode")) {
    std::string m = j.at("rmode").get<std::string>();
    if (m == "independent") rm = RMode::Independent;
    else if (m == "constant") rm = RMode::Constant;
    else throw JsonError(where + ": unknown rmode '" + m + "'", where);
  }
  if (type == "Lp") {
    Rat p = rat_from_json(field(base, "p", where + ".base"), where + ".base.p");
    if (p < 1) throw JsonError(where + ": p must be >= 1", where);
    return lp_space(p, rm);
  }
  if (type == "LinfClosure") return linf_closure_space(rm);
  throw JsonError(where + ": unknown base type '" + type + "'", where);
}

Json to_json(const HaarMultiplier& D) {
  Json entries = Json::object();
  for (const auto& [k, v] : D.entries)
    entries[interval_key(interval_from_iota(k))] = to_json(v);
  return Json{{"depth", D.depth}, {"entries", entries}};
}

HaarMultiplier multiplier_from_json(const Json& j, const std::string& where) {
  HaarMultiplier D;
  D.depth = field(j, "depth", where).get<int>();
  if (D.depth < 0 || D.depth > 24)
    throw JsonError(where + ": depth out of range", where);
  const Json& entries = field(j, "entries", where);
  if (!entries.is_object())
    throw JsonError(where + ".entries must be an object", where);
  for (auto it = entries.begin(); it != entries.end(); ++it) {
    DyadicInterval I;
    try {
      I = interval_from_key(it.key());
    } catch (const std::exception& ex) {
      throw JsonError(where + ".entries key '" + it.key() + "': " + ex.what(),
                      where);
    }
    if (int(I.level) >= D.depth)
      throw JsonError(where + ": entry " + it.key() + " is at level >= depth",
                      where);
    D.entries[iota(I)] =
        rat_from_json(it.value(), where + ".entries[" + it.key() + "]");
  }
  return D;
}

Json to_json(const OpMatrix& m) {
  Json rows = Json::array();
  for (const auto& r : m.a) {
    Json row = Json::array();
    for (const auto& v : r) row.push_back(to_json(v));
    rows.push_back(row);
  }
  Json out{{"depth", m.depth}, {"basis", "iota"}, {"rows", rows}};
  if (m.row_const) out["row_const"] = true;
  if (m.col_const) out["col_const"] = true;
  if (m.row_idx) {
    Json idx = Json::array();
    for (uint64_t k : *m.row_idx) idx.push_back(iota_key_str(k));
    out["row_index"] = idx;
  }
  if (m.col_idx) {
    Json idx = Json::array();
    for (uint64_t k : *m.col_idx) idx.push_back(iota_key_str(k));
    out["col_index"] = idx;
  }
  return out;
}

OpMatrix matrix_from_json(const Json& j, const std::string& where) {
  OpMatrix m;
  m.depth = field(j, "depth", where).get<int>();
  if (m.depth < 0 || m.depth > 12)
    throw JsonError(where + ": depth out of range for a dense matrix", where);
  if (j.contains("basis") && j.at("basis").get<std::string>() != "iota")
    throw JsonError(where + ": only the iota basis is supported", where);
  if (j.contains("row_const")) m.row_const = j.at("row_const").get<bool>();
  if (j.contains("col_const")) m.col_const = j.at("col_const").get<bool>();
  auto read_idx = [&](const char* key) -> std::optional<std::vector<uint64_t>> {
    if (!j.contains(key)) return std::nullopt;
    const Json& arr = j.at(key);
    if (!arr.is_array())
      throw JsonError(where + "." + key + " must be an array", where);
    std::vector<uint64_t> out;
    for (size_t i = 0; i < arr.size(); i++)
      out.push_back(
          iota_from_json(arr[i], where + "." + key + "[" + std::to_string(i) + "]"));
    return out;
  };
  m.row_idx = read_idx("row_index");
  m.col_idx = read_idx("col_index");
  const Json& rows = field(j, "rows", where);
  if (!rows.is_array() || rows.size() != m.rows())
    throw JsonError(where + ": 'rows' must hold " + std::to_string(m.rows()) +
                        " rows",
                    where);
  m.a.assign(m.rows(), std::vector<Rat>(m.cols(), Rat(0)));
  for (size_t r = 0; r < rows.size(); r++) {
    if (!rows[r].is_array() || rows[r].size() != m.cols())
      throw JsonError(where + ".rows[" + std::to_string(r) + "] must hold " +
                          std::to_string(m.cols()) + " entries",
                      where);
    for (size_t c = 0; c < m.cols(); c++)
      m.a[r][c] = rat_from_json(rows[r][c], where + ".rows[" + std::to_string(r) +
                                                "][" + std::to_string(c) + "]");
  }
  return m;
}

Json to_json(const FaithfulSystem& sys) {
  Json blocks = Json::object(), signs = Json::object(), kappa = Json::object();
  for (const auto& [k, blk] : sys.blocks) {
    Json arr = Json::array();
    for (const auto& K : blk) arr.push_back(interval_key(K));
    blocks[iota_key_str(k)] = arr;
  }
  for (const auto& [k, s] : sys.signs) signs[iota_key_str(k)] = s;
  for (const auto& [k, v] : sys.kappa) kappa[iota_key_str(k)] = to_json(v);
  return Json{{"depth", sys.depth},
              {"blocks", blocks},
              {"signs", signs},
              {"kappa", kappa}};
}

FaithfulSystem faithful_from_json(const Json& j, const std::string& where) {
  FaithfulSystem sys;
  sys.depth = field(j, "depth", where).get<int>();
  if (sys.depth < 1 || sys.depth > 20)
    throw JsonError(where + ": depth out of range", where);
  const Json& blocks = field(j, "blocks", where);
  if (!blocks.is_object())
    throw JsonError(where + ".blocks must be an object", where);
  for (auto it = blocks.begin(); it != blocks.end(); ++it) {
    uint64_t k = iota_from_json(Json(it.key()), where + ".blocks key");
    if (k == 0)
      throw JsonError(where + ": the constant slot cannot carry a block", where);
    if (!it.value().is_array())
      throw JsonError(where + ".blocks[" + it.key() + "] must be an array", where);
    IntervalCollection blk;
    for (const auto& e : it.value())
      blk.push_back(interval_from_iota(
          iota_from_json(e, where + ".blocks[" + it.key() + "] member")));
    normalize_collection(blk);
    sys.blocks[k] = blk;
  }
  if (j.contains("signs")) {
    const Json& signs = j.at("signs");
    if (!signs.is_object())
      throw JsonError(where + ".signs must be an object", where);
    for (auto it = signs.begin(); it != signs.end(); ++it) {
      int s = it.value().get<int>();
      sys.signs[iota_from_json(Json(it.key()), where + ".signs key")] = s;
    }
  }
  if (j.contains("kappa")) {
    const Json& kappa = j.at("kappa");
    if (!kappa.is_object())
      throw JsonError(where + ".kappa must be an object", where);
    for (auto it = kappa.begin(); it != kappa.end(); ++it)
      sys.kappa[iota_from_json(Json(it.key()), where + ".kappa key")] =
          rat_from_json(it.value(), where + ".kappa[" + it.key() + "]");
  }
  return sys;
}

Json to_json(const NormValue& v) {
  Json out{{"value", v.value}};
  switch (v.kind) {
    case NormValue::Exact::None:
      out["kind"] = "approx";
      break;
    case NormValue::Exact::Ppow:
      out["kind"] = "ppow";
      out["p"] = int64_t(v.p_int);
      break;
    case NormValue::Exact::Sup:
      out["kind"] = "sup";
      break;
  }
  if (v.exact) out["exact"] = to_json(*v.exact);
  if (v.mc_stderr) out["mc_stderr"] = *v.mc_stderr;
  return out;
}

Json to_json(const NormCertificate& c) {
  Json out{{"lower", c.lower},
           {"method", c.method},
           {"seed", c.seed},
           {"samples", c.samples}};
  if (c.upper) out["upper"] = *c.upper;
  if (!c.witness.empty()) out["witness"] = c.witness;
  if (c.witness_pairing) out["witness_pairing"] = to_json(*c.witness_pairing);
  if (c.witness_norm) out["witness_norm"] = to_json(*c.witness_norm);
  return out;
}

Json to_json(const FactorizationWitness& w) {
  Json out{{"A", to_json(w.A)},       {"B", to_json(w.B)},
           {"S", to_json(w.S)},       {"T", to_json(w.T)},
           {"constant", to_json(w.constant)}, {"error", to_json(w.error)},
           {"projectional", w.projectional}};
  if (!w.note.empty()) out["note"] = w.note;
  return out;
}

Json to_json(const WitnessReport& r) {
  return Json{{"ok", r.ok},
              {"residual_ok", r.residual_ok},
              {"ab_identity", r.ab_identity},
              {"residual_exact_zero", r.residual_exact_zero},
              {"sampled_residual_lower", r.sampled_residual_lower},
              {"samples", r.samples}};
}

Json to_json(const SystemReport& r) {
  return Json{{"valid", r.valid},       {"faithful", r.faithful},
              {"violations", r.violations}, {"sigma", to_json(r.sigma)},
              {"mu", to_json(r.mu)}};
}

Json to_json(const RandomizedSystem& rs) {
  Json freq = Json::object(), theta = Json::object(), gamma = Json::object();
  for (const auto& [k, n] : rs.freq) freq[iota_key_str(k)] = n;
  for (const auto& [k, s] : rs.theta) theta[iota_key_str(k)] = s;
  for (const auto& [k, tiles] : rs.gamma) {
    Json arr = Json::array();
    for (const auto& K : tiles) arr.push_back(interval_key(K));
    gamma[iota_key_str(k)] = arr;
  }
  Json idx = Json::array();
  for (uint64_t k : rs.index_set) idx.push_back(iota_key_str(k));
  return Json{{"depth", rs.depth}, {"index_set", idx},   {"freq", freq},
              {"theta", theta},    {"gamma", gamma}};
}

Json to_json(const StabilizeResult& r) {
  Json dstab = Json::object();
  for (const auto& [k, v] : r.dstab) dstab[iota_key_str(k)] = to_json(v);
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    entries.push_back(Json{{"index", iota_key_str(e.iota_key)},
                           {"freq", e.freq},
                           {"dstab", to_json(e.dstab)},
                           {"deviation", to_json(e.deviation)},
                           {"requested", to_json(e.requested)},
                           {"within_budget", e.within_budget},
                           {"freq_admissible", e.freq_admissible}});
  }
  Json out{{"c", to_json(r.c)},
           {"root_deviation", to_json(r.root_deviation)},
           {"certificate", to_json(r.certificate)},
           {"all_within_budget", r.all_within_budget},
           {"dstab", dstab},
           {"entries", entries},
           {"system", to_json(r.system)},
           {"witness", to_json(r.witness)}};
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

static Json branch_json(const Theorem3Branch& b) {
  Json out{{"attempted", b.attempted},
           {"ok", b.ok},
           {"constant", to_json(b.constant)},
           {"error", to_json(b.error)},
           {"note", b.note}};
  if (b.witness) out["witness"] = to_json(*b.witness);
  return out;
}

Json to_json(const Theorem3Result& r) {
  return Json{{"eta", to_json(r.eta)},
              {"certificate_ok", r.certificate_ok},
              {"stabilize", to_json(r.stab)},
              {"diagonal", branch_json(r.diagonal)},
              {"identity", branch_json(r.identity)},
              {"complement", branch_json(r.complement)}};
}

Json to_json(const ProbStats& s) {
  return Json{{"mean_plus", to_json(s.mean_plus)},
              {"mean_minus", to_json(s.mean_minus)},
              {"var_plus", to_json(s.var_plus)},
              {"var_minus", to_json(s.var_minus)},
              {"brute_mean_plus", to_json(s.brute_mean_plus)},
              {"brute_mean_minus", to_json(s.brute_mean_minus)},
              {"brute_var_plus", to_json(s.brute_var_plus)},
              {"brute_var_minus", to_json(s.brute_var_minus)},
              {"var_bound", to_json(s.var_bound)},
              {"patterns", s.patterns},
              {"match", s.match},
              {"bound_ok", s.bound_ok}};
}

Json to_json(const GameTranscript& t) {
  Json turns = Json::array();
  for (const auto& r : t.turns) {
    Json eps = Json::object();
    for (const auto& [k, s] : r.eps) eps[iota_key_str(k)] = s;
    Json block = Json::array();
    for (const auto& K : r.block) block.push_back(interval_key(K));
    Json lm = Json::array();
    for (const auto& v : r.lambda_mu) lm.push_back(to_json(v));
    Json checks = Json::array();
    for (const auto& c : r.checks)
      checks.push_back(Json{{"constraint", c.constraint},
                            {"value", c.value},
                            {"bound", c.bound},
                            {"met", c.met}});
    turns.push_back(Json{{"index", iota_key_str(r.iota_key)},
                         {"eta", r.eta},
                         {"generation", r.gen_index},
                         {"block", block},
                         {"eps", eps},
                         {"lambda", r.lambda},
                         {"mu", r.mu},
                         {"lambda_mu", lm},
                         {"sum_lambda_mu", to_json(r.sum_lambda_mu)},
                         {"checks", checks},
                         {"flagged", r.flagged}});
  }
  Json a2 = Json::array();
  for (uint64_t k : t.a2) a2.push_back(iota_key_str(k));
  Json out{{"depth", t.depth},
           {"a2", a2},
           {"side", t.side},
           {"limsup_measure", to_json(t.limsup_measure)},
           {"turns", turns},
           {"system", to_json(t.system)},
           {"partial", t.partial}};
  if (!t.note.empty()) out["note"] = t.note;
  return out;
}

Json to_json(const ImpartialReport& r) {
  return Json{{"worst_ratio", r.worst_ratio},
              {"bound", r.bound},
              {"ok", r.ok},
              {"samples", r.samples},
              {"seed", r.seed}};
}

Json to_json(const ReducePositiveResult& r) {
  Json diag = Json::array();
  for (const auto& v : r.diag) diag.push_back(to_json(v));
  return Json{{"transcript", to_json(r.transcript)},
              {"witness", to_json(r.witness)},
              {"diag", diag},
              {"side", r.side},
              {"constant_bound", r.constant_bound},
              {"ok", r.ok},
              {"note", r.note}};
}

Json to_json(const UpperTauReport& r) {
  Json out{{"valid", r.valid},
           {"worst_ratio", r.worst_ratio},
           {"worst_prefix", r.worst_prefix},
           {"prefix_norms", r.prefix_norms},
           {"rhs_bounds", r.rhs_bounds},
           {"satisfied", r.satisfied}};
  if (!r.violation.empty()) out["violation"] = r.violation;
  return out;
}

Json to_json(const StoppingReport& r) {
  Json out{{"valid_pattern", r.valid_pattern},
           {"samples", r.samples},
           {"max_ratio", r.max_ratio},
           {"contraction_ok", r.contraction_ok}};
  if (r.offending) out["offending"] = interval_key(*r.offending);
  return out;
}

AdversaryScript adversary_from_json(const Json& j, const std::string& where) {
  AdversaryScript adv;
  if (j.contains("a2")) {
    const Json& a2 = j.at("a2");
    if (!a2.is_array()) throw JsonError(where + ".a2 must be an array", where);
    for (size_t i = 0; i < a2.size(); i++)
      adv.a2.push_back(
          iota_from_json(a2[i], where + ".a2[" + std::to_string(i) + "]"));
  }
  const Json& turns = field(j, "turns", where);
  if (!turns.is_array()) throw JsonError(where + ".turns must be an array", where);
  for (size_t t = 0; t < turns.size(); t++) {
    std::string wt = where + ".turns[" + std::to_string(t) + "]";
    const Json& jt = turns[t];
    AdversaryTurn turn;
    if (jt.contains("eta")) turn.eta = jt.at("eta").get<double>();
    if (turn.eta <= 0) throw JsonError(wt + ": eta must be positive", wt);
    for (const char* key : {"W", "G"}) {
      if (!jt.contains(key)) continue;
      const Json& arr = jt.at(key);
      if (!arr.is_array())
        throw JsonError(wt + "." + key + " must be an array", wt);
      for (size_t i = 0; i < arr.size(); i++) {
        StepFun f = stepfun_from_json(
            arr[i], wt + "." + key + "[" + std::to_string(i) + "]");
        (std::string(key) == "W" ? turn.W : turn.G).push_back(f);
      }
    }
    if (jt.contains("signs")) {
      const Json& sg = jt.at("signs");
      if (sg.is_string()) {
        turn.signs = sg.get<std::string>();
      } else if (sg.is_object()) {
        turn.signs = "explicit";
        for (auto it = sg.begin(); it != sg.end(); ++it)
          turn.explicit_signs[iota_from_json(Json(it.key()), wt + ".signs key")] =
              it.value().get<int>();
      } else {
        throw JsonError(wt + ".signs must be a directive string or a map", wt);
      }
    }
    adv.turns.push_back(std::move(turn));
  }
  return adv;
}

}  // namespace haardy
