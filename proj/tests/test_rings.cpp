#include <cmath>
#include <random>

#include "doctest.h"
#include "qtheta/rings.hpp"

using namespace qtheta;

namespace {

const QuadraticIrrational theta21 = QuadraticIrrational::parse("(-1+1*sqrt(21))/10");
const QuadraticIrrational theta5 = QuadraticIrrational::parse("(-1+1*sqrt(5))/6");
const QuadraticIrrational golden = QuadraticIrrational::parse("(-1+1*sqrt(5))/2");
const IntMatrix2 g253{2, 1, 5, 3};
const IntMatrix2 g295{2, 1, 9, 5};
const IntMatrix2 g112{1, 1, 1, 2};
const cplx tau{0.1, 1.0};

Eigen::MatrixXcd random_matrix(std::mt19937& rng, std::int64_t c) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd M(c, c);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = {nd(rng), nd(rng)};
  return M;
}

}  // namespace

TEST_CASE("rank helpers") {
  Eigen::MatrixXcd A(3, 3);
  A << 1, 2, 3, 2, 4, 6, 0, 1, 1;
  CHECK(numerical_rank(A) == 2);
  Eigen::MatrixXcd K = null_space(A);
  REQUIRE(K.cols() == 1);
  CHECK((A * K).norm() < 1e-12);
  CHECK(numerical_rank(Eigen::MatrixXcd::Zero(2, 4)) == 0);
  CHECK(null_space(Eigen::MatrixXcd::Zero(0, 3)).cols() == 3);
}

TEST_CASE("E basis and star table shape") {
  RingContext ctx(g253, theta21, tau);
  CHECK(e_basis(ctx, 1).size() == 5);
  CHECK(e_basis(ctx, 2).size() == 25);
  Eigen::MatrixXcd B = star_table(ctx, 1, 1);
  CHECK(B.rows() == 25);
  CHECK(B.cols() == 25);
  auto b = e_basis(ctx, 1);
  auto p = star(b[2], b[3]);
  for (std::int64_t q = 0; q < 25; ++q) CHECK(std::abs(B(q, 2 * 5 + 3) - p.f[q]) < 1e-15);
}

TEST_CASE("R view") {
  RingContext ctx(g253, theta21, tau);
  GeometryPtr G = ctx.geometry(1);
  CHECK(r_view({1, Eigen::MatrixXcd::Zero(5, 5)}, ctx).is_zero());
  auto id = r_view({1, Eigen::MatrixXcd::Identity(5, 5)}, ctx);
  CHECK(std::abs(id.coeff({0, 0}) - 5.0 / std::sqrt(2 * G->mu.imag())) < 1e-14);

  // matrix view against the sum of holomorphic inner products
  std::mt19937 rng(11);
  Eigen::MatrixXcd M = random_matrix(rng, 5);
  auto view = r_view_box({1, M}, ctx, 6, 1e-300);
  auto b = e_basis(ctx, 1);
  double worst = 0;
  for (long m1 = -6; m1 <= 6; ++m1)
    for (long m2 = -6; m2 <= 6; ++m2) {
      cplx s = 0.0;
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) s += M(i, j) * holo_inner_coefficient(b[i], b[j], {m1, m2});
      worst = std::max(worst, std::abs(view.coeff({m1, m2}) - s));
      CHECK(std::abs(r_view_coefficient({1, M}, ctx, {m1, m2}) - s) < 1e-12);
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("R product agrees with inner products of star products") {
  RingContext ctx(g253, theta21, tau);
  std::mt19937 rng(5);
  std::normal_distribution<double> nd;
  auto rvec = [&](const GeometryPtr& G) {
    std::vector<cplx> f(static_cast<std::size_t>(G->cn));
    for (auto& x : f) x = {nd(rng), nd(rng)};
    return HolomorphicVector(G, f);
  };
  GeometryPtr G1 = ctx.geometry(1);
  auto u1 = rvec(G1), w1 = rvec(G1), u2 = rvec(G1), w2 = rvec(G1);
  auto outer = [](const HolomorphicVector& u, const HolomorphicVector& w) {
    const auto c = static_cast<Eigen::Index>(u.f.size());
    Eigen::MatrixXcd M(c, c);
    for (Eigen::Index i = 0; i < c; ++i)
      for (Eigen::Index j = 0; j < c; ++j) M(i, j) = u.f[i] * std::conj(w.f[j]);
    return M;
  };
  RingElementR x{1, outer(u1, w1)}, y{1, outer(u2, w2)};
  RingElementR p = r_star(x, y, ctx);
  CHECK(p.n == 2);
  auto lhs = r_view_box(p, ctx, 8, 1e-300);
  auto rhs = holo_inner_box(star(u1, u2), star(w1, w2), 8, 1e-300);
  CHECK(max_abs_diff(lhs, rhs) < 1e-9 * std::max(1.0, rhs.max_abs()));

  RingElementR z{1, random_matrix(rng, 5)};
  auto a = r_star(r_star(x, y, ctx), z, ctx);
  auto b = r_star(x, r_star(y, z, ctx), ctx);
  CHECK(a.n == 3);
  CHECK((a.M - b.M).norm() < 1e-8 * a.M.norm());
}

TEST_CASE("dimension of R_n") {
  RingContext ctx(g253, theta21, tau);
  auto r1 = dimension_check_R(ctx, 1);
  CHECK(r1.rank == 25);
  CHECK(r1.pass);
  auto r2 = dimension_check_R(ctx, 2);
  CHECK(r2.rank == 625);
  CHECK(r2.pass);

  RingContext gold(g112, golden, tau);
  auto r = dimension_check_R(gold, 1);
  CHECK(r.expected == 1);
  CHECK(r.rank == 1);
}

TEST_CASE("generation of E") {
  RingContext ctx(g253, theta21, tau);
  auto reps = generation_check(ctx, RingKind::E, 3);
  REQUIRE(reps.size() == 2);
  CHECK(reps[0].rank == 25);
  CHECK(reps[0].pass);
  CHECK(reps[1].rank == 120);
  CHECK(reps[1].pass);

  // c_1 = 1 cannot generate c_2 = 3
  RingContext gold(g112, golden, tau);
  auto g = generation_check(gold, RingKind::E, 2);
  REQUIRE(g.size() == 1);
  CHECK(g[0].rank == 1);
  CHECK(g[0].expected == 3);
  CHECK_FALSE(g[0].pass);
}

TEST_CASE("generation of R") {
  RingContext ctx(g253, theta21, tau);
  auto reps = generation_check(ctx, RingKind::R, 3);
  REQUIRE(reps.size() == 2);
  CHECK(reps[0].rank == 625);
  CHECK(reps[0].pass);
  CHECK(reps[1].untestable);
}

TEST_CASE("quadraticity") {
  RingContext a(g253, theta21, tau);
  auto qa = quadraticity_check(a);
  CHECK(qa.dim_K2 == 0);
  CHECK(qa.dim_K3 == 5);
  CHECK_FALSE(qa.quadratic);

  RingContext b(g295, theta5, tau);
  auto qb = quadraticity_check(b);
  CHECK(qb.dim_K2 == 81 - 63);
  CHECK(qb.dim_K3 == 729 - 432);
  CHECK(qb.span_rank == qb.dim_K3);
  CHECK(qb.quadratic);
  CHECK(qb.spectral_gap > 1e4);
}

TEST_CASE("polishchuk predicate") {
  CHECK(polishchuk_predicate(g253, 0));
  CHECK_FALSE(polishchuk_predicate(g253, 1));
  CHECK(polishchuk_predicate(g295, 2));
  CHECK_FALSE(polishchuk_predicate(g295, 3));
  CHECK_FALSE(polishchuk_predicate(g112, 0));
}

TEST_CASE("quantum theta suite") {
  RingContext ctx(g253, theta21, tau);
  auto rep = quantum_theta_suite(ctx, 1, 1e-10);
  CHECK(rep.omega_in_siegel);
  CHECK(rep.stated.pass);
  CHECK(rep.twisted.pass);

  // bumping one coefficient breaks fixedness
  auto view = r_view({1, Eigen::MatrixXcd::Identity(5, 5)}, ctx, 1e-16);
  auto mult = stated_multiplier(ctx, 1);
  CHECK(is_fixed_by(view, mult, 1e-10).residual() < 1e-10);
  for (Index2 m : {Index2{0, 0}, Index2{1, -2}}) {
    auto bumped = te_add(view, TorusElement::monomial(theta21, 1e-16, m, 1e-3));
    CHECK(is_fixed_by(bumped, mult, 1e-10).residual() > 1e-4);
  }
}
