#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <Eigen/SVD>

#include "doctest.h"
#include "qtheta/error.hpp"
#include "qtheta/nctorus.hpp"

using namespace qtheta;

namespace {

const QuadraticIrrational theta21 = QuadraticIrrational::parse("(-1+1*sqrt(21))/10");
constexpr double kTol = 1e-14;

TorusElement random_element(std::mt19937& rng, int radius, double tol = kTol) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Term> t;
  for (int i = -radius; i <= radius; ++i)
    for (int j = -radius; j <= radius; ++j) t.push_back({{i, j}, {u(rng), u(rng)}});
  return TorusElement::from_terms(theta21, tol, t);
}

// Word in the letters U^{+-1}, V^{+-1}: 0 -> U, 1 -> V, with exponent sign.
struct Letter {
  int gen;
  int exp;
};

std::vector<Letter> word_of(Index2 m) {
  std::vector<Letter> w;
  for (int i = 0; i < std::abs(m.m1); ++i) w.push_back({0, m.m1 > 0 ? 1 : -1});
  for (int i = 0; i < std::abs(m.m2); ++i) w.push_back({1, m.m2 > 0 ? 1 : -1});
  return w;
}

// Bubble every V-letter to the right of every U-letter using V^a U^b = e(-theta a b) U^b V^a
// one adjacent swap at a time; returns the accumulated multiple k of theta and
// the normal-ordered exponent.
std::pair<std::int64_t, Index2> normal_order(std::vector<Letter> w) {
  std::int64_t k = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i].gen == 1 && w[i + 1].gen == 0) {
        k -= w[i].exp * w[i + 1].exp;
        std::swap(w[i], w[i + 1]);
        changed = true;
      }
  }
  Index2 m;
  for (auto l : w) (l.gen == 0 ? m.m1 : m.m2) += l.exp;
  return {k, m};
}

double coeff_err(cplx a, cplx b) { return std::abs(a - b); }

}  // namespace

TEST_CASE("phase evaluation keeps accuracy for large multiples") {
  PhaseEvaluator ph(theta21);
  HighFloat th = theta21.value().to_high();
  for (std::int64_t k : {1LL, -7LL, 12345LL, 1000000LL, -1000000LL, 987654321LL}) {
    HighFloat x = th * k;
    HighFloat f = x - boost::multiprecision::floor(x);
    CHECK(std::abs(ph.frac_theta(k) - f.convert_to<double>()) < 1e-15);
    HighFloat h = th * k / 2;
    HighFloat fh = h - boost::multiprecision::floor(h);
    CHECK(std::abs(ph.frac_half_theta(k) - fh.convert_to<double>()) < 1e-15);
  }
}

TEST_CASE("te_mul basics") {
  auto one = TorusElement::monomial(theta21, kTol, {0, 0});
  auto U = TorusElement::monomial(theta21, kTol, {1, 0});
  auto V = TorusElement::monomial(theta21, kTol, {0, 1});
  std::mt19937 rng(1);
  auto x = random_element(rng, 2);
  CHECK(max_abs_diff(te_mul(one, x), x) < 1e-15);
  CHECK(max_abs_diff(te_mul(x, one), x) < 1e-15);
  auto vu = te_mul(V, U);
  CHECK(vu.size() == 1);
  CHECK(coeff_err(vu.coeff({1, 1}), e(-theta21.to_double())) < 1e-15);
  auto uv = te_mul(U, V);
  CHECK(max_abs_diff(uv, te_scale(vu, e(theta21.to_double()))) < 1e-15);
  auto a = TorusElement::monomial(theta21, kTol, {2, 1});
  auto b = TorusElement::monomial(theta21, kTol, {1, 1});
  CHECK(coeff_err(te_mul(a, b).coeff({3, 2}), e(-theta21.to_double())) < 1e-15);
  auto other = TorusElement::monomial(QuadraticIrrational::parse("(1+1*sqrt(5))/2"), kTol, {0, 0});
  CHECK_THROWS_AS(te_mul(one, other), DomainError);
}

TEST_CASE("monomial products and adjoints agree with symbolic reordering") {
  PhaseEvaluator ph(theta21);
  for (int a1 = -4; a1 <= 4; ++a1)
    for (int a2 = -4; a2 <= 4; ++a2) {
      Index2 m{a1, a2};
      auto x = TorusElement::monomial(theta21, kTol, m);
      // adjoint: reverse the word and invert each letter
      auto w = word_of(m);
      std::reverse(w.begin(), w.end());
      for (auto& l : w) l.exp = -l.exp;
      auto [ka, ma] = normal_order(w);
      auto adj = te_adjoint(x);
      REQUIRE(adj.size() == 1);
      CHECK(adj.terms()[0].m == ma);
      CHECK(coeff_err(adj.terms()[0].a, ph.e_theta(ka)) < 1e-14);
      for (int b1 = -4; b1 <= 4; ++b1)
        for (int b2 = -4; b2 <= 4; ++b2) {
          Index2 n{b1, b2};
          auto wm = word_of(m);
          auto wn = word_of(n);
          wm.insert(wm.end(), wn.begin(), wn.end());
          auto [k, mn] = normal_order(wm);
          auto prod = te_mul(x, TorusElement::monomial(theta21, kTol, n));
          REQUIRE(prod.size() == 1);
          CHECK(prod.terms()[0].m == mn);
          CHECK(coeff_err(prod.terms()[0].a, ph.e_theta(k)) < 1e-14);
        }
    }
}

TEST_CASE("te_mul is associative and adjoint is an anti-homomorphic involution") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    auto x = random_element(rng, 3), y = random_element(rng, 3), z = random_element(rng, 3);
    CHECK(max_abs_diff(te_mul(te_mul(x, y), z), te_mul(x, te_mul(y, z))) < 1e-12);
    CHECK(max_abs_diff(te_adjoint(te_adjoint(x)), x) < 1e-14);
    CHECK(max_abs_diff(te_adjoint(te_mul(x, y)), te_mul(te_adjoint(y), te_adjoint(x))) < 1e-12);
  }
  auto one = TorusElement::monomial(theta21, kTol, {0, 0});
  CHECK(max_abs_diff(te_adjoint(one), one) == 0);
  auto U = TorusElement::monomial(theta21, kTol, {1, 0});
  CHECK(te_adjoint(U).coeff({-1, 0}) == cplx(1.0));
}

TEST_CASE("heisenberg action") {
  std::mt19937 rng(3);
  auto x = random_element(rng, 2);
  HeisenbergElement id;
  CHECK(max_abs_diff(heisenberg_act(id, x), x) < 1e-15);
  HeisenbergElement sc;
  sc.alpha = {0.3, -2.0};
  CHECK(max_abs_diff(heisenberg_act(sc, x), te_scale(x, sc.alpha)) < 1e-14);
  HeisenbergElement sh;
  sh.x = {cplx(0.3, 0.1), cplx(-0.2, 0.05)};
  auto U = TorusElement::monomial(theta21, kTol, {1, 0});
  CHECK(coeff_err(heisenberg_act(sh, U).coeff({1, 0}), e(sh.x[0])) < 1e-15);
  HeisenbergElement bad;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(heisenberg_act(bad, x), DomainError);

  // (alpha; x; m) followed by (alpha'; x'; -m) is proportional to the input
  // when x' = -x.
  HeisenbergElement h1{cplx(0.7, 0.2), {cplx(0.11, 0.02), cplx(-0.3, 0.01)}, {2, -1}, {0, 0}};
  HeisenbergElement h2{cplx(1.3, -0.4), {-cplx(0.11, 0.02), -cplx(-0.3, 0.01)}, {-2, 1}, {0, 0}};
  auto y = heisenberg_act(h2, heisenberg_act(h1, x));
  REQUIRE(y.size() == x.size());
  cplx ratio = y.terms()[0].a / x.terms()[0].a;
  for (std::size_t k = 0; k < x.size(); ++k) {
    CHECK(y.terms()[k].m == x.terms()[k].m);
    CHECK(coeff_err(y.terms()[k].a, ratio * x.terms()[k].a) < 1e-12);
  }
}

TEST_CASE("siegel_from_tau") {
  auto om = siegel_from_tau({0, 1});
  CHECK(coeff_err(om.o11(), {0, 0.5}) < 1e-16);
  CHECK(coeff_err(om.o12(), 0.0) < 1e-16);
  CHECK(coeff_err(om.o22(), {0, 0.5}) < 1e-16);
  om = siegel_from_tau({1, 1});
  CHECK(coeff_err(om.o11(), {0, 1.0}) < 1e-16);
  CHECK(coeff_err(om.o12(), {0, -0.5}) < 1e-16);
  CHECK(coeff_err(om.o22(), {0, 0.5}) < 1e-16);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-3, 3), v(0.1, 3);
  for (int i = 0; i < 50; ++i) {
    auto o = siegel_from_tau({u(rng), v(rng)});
    double det = o.o11().imag() * o.o22().imag() - o.o12().imag() * o.o12().imag();
    CHECK(std::abs(det - 0.25) < 1e-12);
    CHECK(o.im_eigenvalues()[0] > 0);
  }
  CHECK_THROWS_AS(siegel_from_tau({0, 0}), DomainError);
  CHECK_THROWS_AS(siegel_from_tau({1, -1}), DomainError);
  CHECK_THROWS_AS(Siegel2({0, -1}, 0.0, {0, 1}), DomainError);
}

TEST_CASE("multipliers and lattice cosets") {
  auto om = siegel_from_tau({0, 1});
  auto mult = build_multiplier({1, 0}, {0, 1}, om, theta21);
  CHECK(gamma_dimension(mult) == 1);
  CHECK(coeff_err(mult.gen_s.alpha, e(cplx(0, 0.25))) < 1e-16);
  CHECK(coeff_err(mult.gen_r.alpha, e(cplx(0, 0.25))) < 1e-16);
  CHECK(gamma_dimension(build_multiplier({5, 0}, {0, 5}, om, theta21)) == 25);
  CHECK_THROWS_AS(build_multiplier({1, 2}, {2, 4}, om, theta21), DomainError);

  // scalar is unchanged when A = (theta/2) J + Omega is used in place of Omega
  auto om2 = siegel_from_tau({0.4, 1.3});
  for (Index2 s : {Index2{1, 0}, Index2{2, 3}, Index2{-1, 4}}) {
    auto m2 = build_multiplier(s, {0, 7}, om2, theta21);
    Eigen::Matrix2cd A = om2.matrix();
    A(0, 1) += theta21.to_double() / 2;
    A(1, 0) -= theta21.to_double() / 2;
    Eigen::Vector2cd sv(double(s.m1), double(s.m2));
    cplx q = (sv.transpose() * A.transpose() * sv)(0, 0);
    CHECK(coeff_err(m2.gen_s.alpha, e(0.5 * q)) < 1e-12);
  }

  // brute-force coset count: points of a box modulo L, compared through
  // integrality of the solution of [s r] x = m - m'
  Index2 s{2, 1}, r{0, 3};
  Lattice2 L(s, r);
  CHECK(L.index() == 6);
  const std::int64_t det = s.m1 * r.m2 - s.m2 * r.m1;
  auto same_class = [&](Index2 a, Index2 b) {
    Index2 d = a - b;
    std::int64_t x = d.m1 * r.m2 - d.m2 * r.m1, y = s.m1 * d.m2 - s.m2 * d.m1;
    return x % det == 0 && y % det == 0;
  };
  std::vector<Index2> classes;
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j) {
      Index2 m{i, j};
      bool seen = false;
      for (auto c : classes) seen = seen || same_class(c, m);
      if (!seen) classes.push_back(m);
      CHECK(same_class(L.reduce(m), m));
    }
  CHECK(classes.size() == 6);
  std::set<Index2> reps;
  for (auto c : classes) reps.insert(L.reduce(c));
  CHECK(reps.size() == 6);
  CHECK(gamma_dimension(build_multiplier(s, r, om, theta21)) == 6);
}

TEST_CASE("theta series") {
  auto om = siegel_from_tau({0.3, 1.1});
  Lattice2 Z2({1, 0}, {0, 1});
  LatticeFunction zero(Z2);
  CHECK(theta_series(zero, om, theta21, kTol).is_zero());

  Lattice2 L2({2, 0}, {0, 2});
  LatticeFunction f(L2, [](Index2 m) { return cplx(1.0 + m.m1, 0.5 - m.m2); });
  auto th = theta_series(f, om, theta21, kTol);
  CHECK(coeff_err(th.coeff({0, 0}), f({0, 0})) < 1e-15);
  CHECK(coeff_err(th.coeff({1, 0}), f({1, 0}) * e(0.5 * om.o11())) < 1e-15);

  // truncation radius against direct summation at double radius
  const double lambda = om.im_eigenvalues()[0];
  const long M = gaussian_tail_radius(lambda, f.sup(), kTol, radius_budget());
  double outside = 0;
  for (long i = -2 * M; i <= 2 * M; ++i)
    for (long j = -2 * M; j <= 2 * M; ++j) {
      Index2 m{i, j};
      if (m.linf() <= M) continue;
      outside += std::abs(f(m) * e(om.half_quadratic(m)));
    }
  CHECK(outside < kTol);
  CHECK(th.terms().front().m.linf() <= M);
  CHECK_THROWS_AS(gaussian_tail_radius(1e-6, 1.0, 1e-14, 10), RadiusBudgetExceeded);
}

TEST_CASE("quantum theta series are fixed by their multipliers") {
  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  struct Case {
    Siegel2 omega;
    std::int64_t c;
  };
  // eps_1 = 5 theta + 3 for g = (2 1; 5 3)
  const double eps1 = 5 * theta21.to_double() + 3;
  std::vector<Case> cases;
  for (std::int64_t c : {1, 2, 5}) cases.push_back({siegel_from_tau({0, 1}), c});
  cases.push_back({siegel_from_tau({0.25, 0.9}), 2});
  cases.push_back({siegel_from_tau({0, 1}).scaled(1 / (5 * eps1)), 5});
  for (const auto& cs : cases) {
    auto mult = build_multiplier({cs.c, 0}, {0, cs.c}, cs.omega, theta21);
    for (int trial = 0; trial < 20; ++trial) {
      LatticeFunction f(mult.lattice, [&](Index2) { return cplx(nd(rng), nd(rng)); });
      double t = fixedness_truncation(mult, f.sup(), 1e-9);
      auto th = theta_series(f, cs.omega, theta21, t);
      auto rep = is_fixed_by(th, mult, 1e-9);
      CHECK(rep.fixed);
      CHECK(rep.residual() < 1e-9);
    }
  }
  auto mult = build_multiplier({1, 0}, {0, 1}, siegel_from_tau({0, 1}), theta21);
  auto U = TorusElement::monomial(theta21, kTol, {1, 0});
  CHECK_FALSE(is_fixed_by(U, mult, 1e-9).fixed);
  auto rep0 = is_fixed_by(TorusElement(theta21, kTol), mult, 1e-9);
  CHECK(rep0.fixed);
  CHECK(rep0.residual() == 0);
}

TEST_CASE("basis theta series are linearly independent") {
  auto om = siegel_from_tau({0.1, 1.0});
  for (std::int64_t c : {1, 2, 3}) {
    Lattice2 L({c, 0}, {0, c});
    auto reps = L.representatives();
    std::vector<TorusElement> basis;
    for (std::size_t k = 0; k < reps.size(); ++k) {
      LatticeFunction f(L);
      f.at_representative(k) = 1.0;
      basis.push_back(theta_series(f, om, theta21, kTol));
    }
    const int W = 3 * static_cast<int>(c);
    Eigen::MatrixXcd A(basis.size(), (2 * W + 1) * (2 * W + 1));
    for (std::size_t k = 0; k < basis.size(); ++k)
      for (int i = -W; i <= W; ++i)
        for (int j = -W; j <= W; ++j) A(k, (i + W) * (2 * W + 1) + j + W) = basis[k].coeff({i, j});
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    svd.setThreshold(1e-10);
    CHECK(svd.rank() == L.index());
  }
}
