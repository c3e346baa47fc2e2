#pragma once

// Run configuration and the verification suites behind the command line.

#include <optional>
#include <string>
#include <vector>

#include "qtheta/json_io.hpp"

namespace qtheta {

struct RunConfig {
  std::string theta;
  std::optional<IntMatrix2> g;
  cplx tau{0, 1};
  int epsilon_level = 0;
  unsigned max_grade = 2;
  double trunc_tol = 1e-14;
  std::string out_path;
};

// Keys as in RunConfig. g may be [a, b, c, d] or "a,b,c,d", tau {re, im},
// [re, im] or "re,im". Unknown keys are rejected.
RunConfig config_from_json(const Json& j);
IntMatrix2 parse_matrix(const std::string& text);
cplx parse_complex(const std::string& text);

// Throws DomainError on the first problem found.
void validate(const RunConfig& cfg);

// The supplied g, else find_generating_g at the configured epsilon, else the
// S_theta representative. source names which one was used.
IntMatrix2 resolve_g(const RunConfig& cfg, std::string* source = nullptr);

struct SuiteResult {
  Json report;
  bool pass = true;
  bool budget_exceeded = false;
};

// Suites: arith, torus, bimodule, rings, all.
SuiteResult run_suite(const RunConfig& cfg, const std::string& suite);

}  // namespace qtheta
