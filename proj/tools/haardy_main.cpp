#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "haardy/json_io.hpp"
#include "haardy/verify.hpp"

using namespace haardy;

namespace {

struct Cfg {
  int depth = 10;
  uint64_t seed = 1;
  int samples = 100;
  double tol = 1e-9;
  std::string out;
  std::string space_arg;
};

void check_depth(int depth) {
  if (depth < 1 || depth > 14)
    throw ValidationError("depth must be within 1..14, got " +
                          std::to_string(depth));
}

Json parse_text(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); i++) {
      if (text[i] == '\n') {
        line++;
        col = 1;
      } else {
        col++;
      }
    }
    std::string loc =
        where + ":" + std::to_string(line) + ":" + std::to_string(col);
    throw JsonError(std::string(e.what()) + " at " + loc + " line " +
                        std::to_string(line),
                    loc);
  }
}

Json load_arg(const std::string& arg, const std::string& where) {
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '['))
    return parse_text(arg, where);
  return load_json(arg);
}

SpaceSpec read_space(const std::string& arg, bool* given = nullptr) {
  if (arg.empty()) {
    if (given) *given = false;
    return lp_space(Rat(2), RMode::Constant);
  }
  if (given) *given = true;
  return space_from_json(load_arg(arg, "--space"), "--space");
}

void emit(const Json& j, const Cfg& cfg) {
  std::string s = j.dump(2);
  std::cout << s << "\n";
  if (!cfg.out.empty()) {
    std::ofstream f(cfg.out);
    if (!f) throw ValidationError("cannot write " + cfg.out);
    f << s << "\n";
  }
}

Json assertion_json(const Assertion& a) {
  return Json{{"anchor", a.anchor},     {"statement", a.statement},
              {"measured", a.measured}, {"bound", a.bound},
              {"pass", a.pass},         {"detail", a.detail}};
}

Json suite_json(const SuiteResult& s) {
  Json as = Json::array();
  for (const auto& a : s.assertions) as.push_back(assertion_json(a));
  return Json{{"suite", s.suite}, {"pass", s.pass}, {"assertions", as}};
}

std::map<uint64_t, Rat> eta_schedule(double eta, int depth) {
  uint64_t m = depth >= 3 ? std::min<uint64_t>(7, uint64_t(depth) - 2) : 1;
  std::map<uint64_t, Rat> sched;
  Rat e = rat_from_double(eta);
  for (uint64_t k = 1; k <= m; k++) sched[k] = e / 8 * dyadic_measure(uint32_t(k));
  return sched;
}

int g_exit = 0;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-depth Haar system toolkit"};
  app.require_subcommand(1);
  Cfg cfg;
  app.add_option("--depth", cfg.depth, "dyadic resolution, at most 14");
  app.add_option("--seed", cfg.seed, "seed for every randomized routine");
  app.add_option("--samples", cfg.samples, "sample count for randomized bounds");
  app.add_option("--tol", cfg.tol, "comparison tolerance");
  app.add_option("--out", cfg.out, "also write the report to this file");
  app.add_option("--space", cfg.space_arg, "space spec: JSON file or inline object");

  std::string input, matrix_arg, mult_arg, system_arg, script_arg, op_name;
  std::string c_arg, delta_arg, a2_arg, budgets_arg, mode_arg = "supporting";
  int nmax = 8;
  double eta = 0.05, gamma = 0.01, rho = 1.0 / 64;
  std::string sigma_budget = "1/100";
  int max_turns = 0;
  std::string suite;

  auto* cmd_norm = app.add_subcommand("norm", "norm of a coefficient expansion");
  cmd_norm->add_option("--input,--expansion", input, "expansion JSON file");
  auto* cmd_dual = app.add_subcommand("dualnorm", "dual-norm lower bound of a step function");
  cmd_dual->add_option("--input,--stepfun", input, "step function JSON file");
  auto* cmd_opn = app.add_subcommand("opnorm", "operator-norm lower bound");
  cmd_opn->add_option("--matrix", matrix_arg, "operator matrix JSON file");
  cmd_opn->add_option("--op", op_name, "built-in operator: iso_S | iso_S_inv | shift_W | proj_P");
  auto* cmd_char = app.add_subcommand("charseq", "characteristic sequence of a multiplier");
  cmd_char->add_option("--multiplier", mult_arg, "multiplier JSON file")->required();
  cmd_char->add_option("--nmax", nmax, "last level to evaluate");
  auto* cmd_mb = app.add_subcommand("multiplier-bound", "triple and sup norm bounds");
  cmd_mb->add_option("--multiplier", mult_arg, "multiplier JSON file")->required();

  auto* cmd_faithful = app.add_subcommand("faithful", "faithful system tools");
  cmd_faithful->require_subcommand(1);
  auto* f_validate = cmd_faithful->add_subcommand("validate", "structural checks");
  f_validate->add_option("--system", system_arg, "system JSON file")->required();
  auto* f_build = cmd_faithful->add_subcommand("build", "build from tiling generations");
  f_build->add_option("--input", input, "generations JSON file")->required();
  auto* f_extend = cmd_faithful->add_subcommand("extend", "fill gaps to a faithful system");
  f_extend->add_option("--system", system_arg, "system JSON file")->required();

  auto* cmd_stab = app.add_subcommand("stabilize", "stabilize a multiplier toward a constant");
  cmd_stab->add_option("--multiplier", mult_arg, "multiplier JSON file")->required();
  cmd_stab->add_option("--c", c_arg, "target constant (rational), inferred when absent");
  cmd_stab->add_option("--eta", eta, "total deviation budget");
  cmd_stab->add_option("--budgets", budgets_arg, "per-index budget JSON object");

  auto* cmd_verify = app.add_subcommand("verify", "run a named assertion suite");
  cmd_verify->add_option("--suite", suite, "suite name or 'all'")->required();
  cmd_verify->add_option("--multiplier", mult_arg, "multiplier for the stabilization suite");
  cmd_verify->add_option("--eta", eta, "budget for the stabilization suite");
  cmd_verify->add_option("--c", c_arg, "target constant for the stabilization suite");

  auto* cmd_game = app.add_subcommand("game", "run the block-selection game");
  cmd_game->add_option("--script", script_arg, "adversary script JSON file");
  cmd_game->add_option("--a2", a2_arg, "partition side 2 as a JSON array of indices");
  cmd_game->add_option("--sigma-budget", sigma_budget, "total kappa deficiency (rational)");
  cmd_game->add_option("--rho", rho, "limsup threshold slack");
  cmd_game->add_option("--max-turns", max_turns, "turn cap, 0 for as many as fit");

  auto* cmd_red = app.add_subcommand("reduce-positive", "diagonal-positive reduction");
  cmd_red->add_option("--matrix", matrix_arg, "operator matrix JSON file")->required();
  cmd_red->add_option("--delta", delta_arg, "diagonal threshold (rational)")->required();
  cmd_red->add_option("--gamma", gamma, "witness constant margin");
  cmd_red->add_option("--mode", mode_arg, "supporting | reproducible");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  for (auto* sub : cmd_faithful->get_subcommands({})) sub->fallthrough();

  cmd_norm->callback([&] {
    check_depth(cfg.depth);
    if (input.empty()) throw ValidationError("norm needs --input");
    SpaceSpec sp = read_space(cfg.space_arg);
    Json j = load_json(input);
    Json rep{{"command", "norm"}, {"depth", cfg.depth}, {"space", to_json(sp)}};
    if (j.is_object() && j.contains("values")) {
      StepFun f = stepfun_from_json(j, input);
      rep["result"] = to_json(ri_norm(sp, f));
    } else {
      Expansion e = expansion_from_json(j, input);
      rep["result"] = to_json(hardy_norm(sp, e, cfg.depth));
    }
    emit(rep, cfg);
  });

  cmd_dual->callback([&] {
    check_depth(cfg.depth);
    if (input.empty()) throw ValidationError("dualnorm needs --input");
    SpaceSpec sp = read_space(cfg.space_arg);
    StepFun g = stepfun_from_json(load_json(input), input);
    NormCertificate cert = dual_norm_lower(sp, g, cfg.samples, cfg.seed);
    emit(Json{{"command", "dualnorm"},
              {"space", to_json(sp)},
              {"result", to_json(cert)}},
         cfg);
  });

  cmd_opn->callback([&] {
    check_depth(cfg.depth);
    SpaceSpec sp = read_space(cfg.space_arg);
    OpMatrix M;
    if (!matrix_arg.empty()) {
      M = matrix_from_json(load_json(matrix_arg), matrix_arg);
    } else if (op_name == "iso_S") {
      M = iso_S_matrix(cfg.depth);
    } else if (op_name == "iso_S_inv") {
      M = inverse(iso_S_matrix(cfg.depth));
    } else if (op_name == "shift_W") {
      M = shift_W_matrix(cfg.depth);
    } else if (op_name == "proj_P") {
      M = proj_P_matrix(cfg.depth);
    } else {
      throw ValidationError("opnorm needs --matrix or a known --op, got '" +
                            op_name + "'");
    }
    NormCertificate cert = op_norm_lower(sp, M, cfg.samples, cfg.seed);
    emit(Json{{"command", "opnorm"},
              {"space", to_json(sp)},
              {"result", to_json(cert)}},
         cfg);
  });

  cmd_char->callback([&] {
    if (nmax < 0 || nmax > 24)
      throw ValidationError("nmax must be within 0..24");
    HaarMultiplier D = multiplier_from_json(load_json(mult_arg), mult_arg);
    auto seq = char_sequence(D, nmax);
    Json js = Json::array();
    for (const auto& v : seq) js.push_back(to_json(v));
    Json jc = Json::array();
    for (double c : cluster_estimate(seq, cfg.tol)) jc.push_back(c);
    emit(Json{{"command", "charseq"}, {"sequence", js}, {"clusters", jc}}, cfg);
  });

  cmd_mb->callback([&] {
    HaarMultiplier D = multiplier_from_json(load_json(mult_arg), mult_arg);
    MultiplierBound b = multiplier_bound(D);
    emit(Json{{"command", "multiplier-bound"},
              {"triple", to_json(b.triple)},
              {"indep", to_json(b.indep)}},
         cfg);
  });

  f_validate->callback([&] {
    FaithfulSystem sys = faithful_from_json(load_json(system_arg), system_arg);
    SystemReport rep = validate(sys);
    emit(Json{{"command", "faithful validate"}, {"report", to_json(rep)}}, cfg);
    if (!rep.valid) g_exit = 2;
  });

  f_build->callback([&] {
    Json j = load_json(input);
    if (!j.is_object() || !j.contains("intervals") || !j.contains("depth"))
      throw ValidationError(input + ": expected {depth, intervals, signs}");
    int depth = j["depth"].get<int>();
    check_depth(depth);
    IntervalCollection col;
    for (const auto& k : j["intervals"]) {
      if (k.is_string())
        col.push_back(interval_from_key(k.get<std::string>()));
      else
        col.push_back(interval_from_iota(k.get<uint64_t>()));
    }
    std::map<uint64_t, int> eps;
    if (j.contains("signs"))
      for (const auto& [key, v] : j["signs"].items())
        eps[key.find(':') != std::string::npos
                ? iota(interval_from_key(key))
                : std::stoull(key)] = v.get<int>();
    FaithfulSystem sys = build_from_generations(col, eps, depth);
    emit(Json{{"command", "faithful build"}, {"system", to_json(sys)}}, cfg);
  });

  f_extend->callback([&] {
    FaithfulSystem sys = faithful_from_json(load_json(system_arg), system_arg);
    ExtensionResult ext = extend_to_faithful(sys);
    emit(Json{{"command", "faithful extend"},
              {"extended", to_json(ext.extended)},
              {"stopping_multiplier", to_json(ext.R)}},
         cfg);
  });

  cmd_stab->callback([&] {
    check_depth(cfg.depth);
    HaarMultiplier D = multiplier_from_json(load_json(mult_arg), mult_arg);
    std::optional<Rat> c;
    if (!c_arg.empty()) c = rat_parse(c_arg);
    std::map<uint64_t, Rat> sched;
    if (!budgets_arg.empty()) {
      Json j = load_arg(budgets_arg, "--budgets");
      for (const auto& [key, v] : j.items())
        sched[std::stoull(key)] = rat_from_json(v, "--budgets." + key);
    } else {
      sched = eta_schedule(eta, cfg.depth);
    }
    StabilizeResult res = stabilize(D, c, sched, cfg.depth);
    emit(Json{{"command", "stabilize"}, {"result", to_json(res)}}, cfg);
  });

  cmd_verify->callback([&] {
    if (!mult_arg.empty()) {
      if (suite != "thm-3.6")
        throw ValidationError("--multiplier applies to the thm-3.6 suite only");
      check_depth(cfg.depth);
      HaarMultiplier D = multiplier_from_json(load_json(mult_arg), mult_arg);
      std::optional<Rat> c;
      if (!c_arg.empty()) c = rat_parse(c_arg);
      Theorem3Result res = verify_theorem3(D, c, rat_from_double(eta), cfg.depth);
      SuiteResult sr;
      sr.suite = suite;
      auto add = [&](const std::string& slug, const std::string& stmt,
                     double measured, double bound, bool pass,
                     const std::string& detail) {
        sr.assertions.push_back(
            Assertion{suite + "/" + slug, stmt, measured, bound, pass, detail});
      };
      add("certificate-within-eta", "certified deviation stays within the budget",
          res.stab.certificate.get_d(), res.eta.get_d(), res.certificate_ok,
          res.stab.note);
      add("diagonal-branch", "target-constant diagonal branch verifies",
          res.diagonal.ok ? 0 : 1, 0, res.diagonal.ok, res.diagonal.note);
      add("identity-branch", "identity factors exactly through the multiplier",
          res.identity.ok ? 0 : 1, 0, res.identity.ok, res.identity.note);
      add("complement-branch", "complement identity branch verifies",
          res.complement.ok ? 0 : 1, 0, res.complement.ok, res.complement.note);
      sr.pass = true;
      for (const auto& a : sr.assertions) sr.pass = sr.pass && a.pass;
      emit(Json{{"command", "verify"},
                {"suites", Json::array({suite_json(sr)})},
                {"pass", sr.pass},
                {"theorem3", to_json(res)}},
           cfg);
      if (!sr.pass) g_exit = 2;
      return;
    }
    VerifyConfig vc;
    vc.depth = app.count("--depth") ? cfg.depth : vc.depth;
    check_depth(vc.depth);
    vc.space = read_space(cfg.space_arg, &vc.space_given);
    vc.seed = cfg.seed;
    vc.samples = cfg.samples;
    vc.tol = cfg.tol;
    auto results = run_suites(suite, vc);
    Json js = Json::array();
    bool all = true;
    for (const auto& s : results) {
      js.push_back(suite_json(s));
      all = all && s.pass;
    }
    emit(Json{{"command", "verify"},
              {"depth", vc.depth},
              {"seed", vc.seed},
              {"samples", vc.samples},
              {"suites", js},
              {"pass", all}},
         cfg);
    if (!all) g_exit = 2;
  });

  cmd_game->callback([&] {
    check_depth(cfg.depth);
    SpaceSpec sp = read_space(cfg.space_arg);
    BuildParams params;
    params.sigma_budget = rat_parse(sigma_budget);
    params.rho = rho;
    params.max_turns = max_turns;
    GameTranscript t;
    if (!script_arg.empty()) {
      AdversaryScript adv = adversary_from_json(load_json(script_arg), script_arg);
      t = game_run(sp, adv, cfg.depth, params);
    } else {
      std::vector<uint64_t> a2;
      if (!a2_arg.empty())
        for (const auto& k : load_arg(a2_arg, "--a2"))
          a2.push_back(k.is_string() ? iota(interval_from_key(k.get<std::string>()))
                                     : k.get<uint64_t>());
      t = strat_supp_build(sp, a2, cfg.depth, params);
    }
    int flagged = 0;
    for (const auto& turn : t.turns) flagged += turn.flagged ? 1 : 0;
    emit(Json{{"command", "game"},
              {"summary",
               Json{{"turns", t.turns.size()},
                    {"flagged_turns", flagged},
                    {"limsup_measure", to_json(t.limsup_measure)},
                    {"partial", t.partial},
                    {"note", t.note}}},
              {"transcript", to_json(t)}},
         cfg);
    if (t.partial) g_exit = 3;
  });

  cmd_red->callback([&] {
    check_depth(cfg.depth);
    if (mode_arg != "supporting" && mode_arg != "reproducible")
      throw ValidationError("mode must be 'supporting' or 'reproducible', got '" +
                            mode_arg + "'");
    SpaceSpec sp = read_space(cfg.space_arg);
    OpMatrix T = matrix_from_json(load_json(matrix_arg), matrix_arg);
    Rat delta = rat_parse(delta_arg);
    BuildParams params;
    params.sigma_budget = rat_parse(sigma_budget);
    ReducePositiveResult res =
        reduce_positive(sp, T, delta, gamma, cfg.depth, params);
    emit(Json{{"command", "reduce-positive"},
              {"mode", mode_arg},
              {"result", to_json(res)}},
         cfg);
    if (res.transcript.partial) g_exit = 3;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const JsonError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return g_exit;
}
