#include "doctest.h"
#include "qtheta/json_io.hpp"

using namespace qtheta;

namespace {
const QuadraticIrrational theta21 = QuadraticIrrational::parse("(-1+1*sqrt(21))/10");
}

TEST_CASE("stable dump") {
  Json j = {{"b", 0.1}, {"a", {1, 2.5}}, {"c", true}};
  CHECK(dump_stable(j, 0) == R"({"a":[1,2.5],"b":0.10000000000000001,"c":true})");
  CHECK(Json::parse(dump_stable(j)) == j);
}

TEST_CASE("round trips") {
  auto q = quadratic_from_json(Json::parse(dump_stable(to_json(theta21.value()))));
  CHECK(q == theta21);
  CHECK(to_json(theta21.value())["D"] == 21);

  IntMatrix2 big{BigInt("123456789012345678901234567890"), 1, 5, 3};
  CHECK(matrix_from_json(Json::parse(dump_stable(to_json(big)))) == big);

  auto x = TorusElement::from_terms(theta21, 1e-14, {{{2, -1}, {0.3, -1.0 / 3}}, {{-1, 4}, {1e-3, 0}}});
  auto y = torus_from_json(Json::parse(dump_stable(to_json(x))));
  CHECK(max_abs_diff(x, y) == 0);
  CHECK(dump_stable(to_json(x)) == dump_stable(to_json(y)));
  CHECK(to_json(x)["coeffs"][0]["m1"] == -1);

  auto G = make_geometry({2, 1, 5, 3}, theta21, {0, 1}, 1);
  HolomorphicVector v(G, {{1, 0}, {0, 2}, {0.5, 0.5}, {0, 0}, {-1, 0}});
  auto w = holomorphic_from_json(Json::parse(dump_stable(to_json(v))));
  CHECK(w.f == v.f);
  CHECK(w.geom->cn == 5);
}

TEST_CASE("reports") {
  RankReport r{"dimension_R", 1, 25, 25, 1e-3, true, false};
  auto j = to_json(r);
  CHECK(j["rank"] == 25);
  CHECK_FALSE(j.contains("untestable"));
  CHECK(to_json(ResidualReport{1, 1, 0, true})["pass"] == true);
}
