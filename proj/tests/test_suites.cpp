#include "doctest.h"
#include "qtheta/error.hpp"
#include "qtheta/suites.hpp"

using namespace qtheta;

TEST_CASE("config parsing and validation") {
  auto cfg = config_from_json(Json::parse(R"({"theta": "(-1+1*sqrt(21))/10", "g": "2,1,5,3", "tau": [0.5, 2]})"));
  CHECK(cfg.g == IntMatrix2{2, 1, 5, 3});
  CHECK(cfg.tau == cplx(0.5, 2));
  CHECK_NOTHROW(validate(cfg));
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"colour": 1})")), DomainError);
  CHECK_THROWS_AS(parse_matrix("1,2,3"), DomainError);
  CHECK_THROWS_AS(parse_complex("1,x"), DomainError);

  cfg.tau = {0, -1};
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg.tau = {0, 1};
  cfg.g = IntMatrix2{1, 1, 1, 0};
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg.g.reset();
  cfg.trunc_tol = 0;
  CHECK_THROWS_AS(validate(cfg), DomainError);
}

TEST_CASE("g resolution") {
  RunConfig cfg;
  cfg.theta = "(1+1*sqrt(5))/2";
  std::string src;
  auto g = resolve_g(cfg, &src);
  CHECK(src == "s_theta_representative");
  CHECK(in_S_theta(g, QuadraticIrrational::parse(cfg.theta)));
  cfg.theta = "(-1+1*sqrt(21))/10";
  CHECK(resolve_g(cfg, &src) == IntMatrix2{9, 5, 25, 14});
  CHECK(src == "find_generating_g");
}

TEST_CASE("arith and torus suites") {
  RunConfig cfg;
  cfg.theta = "(1+1*sqrt(5))/2";
  auto r = run_suite(cfg, "arith");
  CHECK(r.pass);
  CHECK_FALSE(r.budget_exceeded);
  CHECK(r.report["suites"]["arith"]["items"].size() == 7);
  cfg.theta = "(-1+1*sqrt(21))/10";
  cfg.g = IntMatrix2{2, 1, 5, 3};
  CHECK(run_suite(cfg, "torus").pass);
  CHECK_THROWS_AS(run_suite(cfg, "nope"), DomainError);
  // byte stable
  CHECK(dump_stable(run_suite(cfg, "arith").report) == dump_stable(run_suite(cfg, "arith").report));
}
