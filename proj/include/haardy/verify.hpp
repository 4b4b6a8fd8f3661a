#ifndef HAARDY_VERIFY_HPP
#define HAARDY_VERIFY_HPP

#include <string>
#include <vector>

#include "haardy/game.hpp"

namespace haardy {

struct VerifyConfig {
  int depth = 6;
  SpaceSpec space = lp_space(Rat(2), RMode::Constant);
  bool space_given = false;  // when false, suites sweep their default spaces
  uint64_t seed = 1;
  int samples = 100;
  double tol = 1e-9;
};

struct Assertion {
  std::string anchor;     // suite token + behavior slug
  std::string statement;  // what was checked
  double measured = 0;
  double bound = 0;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<Assertion> assertions;
  bool pass = false;
};

// Stable suite identifiers accepted by the verify command.
std::vector<std::string> verify_suites();

// Runs one named suite ("all" runs every suite in order).
std::vector<SuiteResult> run_suites(const std::string& name, const VerifyConfig& cfg);

}  // namespace haardy

#endif
