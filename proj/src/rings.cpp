#include "qtheta/rings.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include "qtheta/error.hpp"

namespace qtheta {

namespace {

std::int64_t mod(std::int64_t x, std::int64_t c) {
  std::int64_t r = x % c;
  return r < 0 ? r + c : r;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& A) {
  if (A.size() == 0) return {};
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
  return svd.singularValues();
}

long count_above(const Eigen::VectorXd& s, double rel_tol) {
  if (s.size() == 0 || s[0] == 0) return 0;
  long r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++r;
  return r;
}

// Orthonormal basis of the column span.
Eigen::MatrixXcd range_basis(const Eigen::MatrixXcd& A, double rel_tol = 1e-8) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU);
  const long r = count_above(svd.singularValues(), rel_tol);
  return svd.matrixU().leftCols(r);
}

Eigen::MatrixXcd unit_matrix(std::int64_t c, std::int64_t i, std::int64_t j) {
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(c, c);
  M(i, j) = 1.0;
  return M;
}

long rank_entry_limit() {
  const long b = radius_budget();
  return 64 * b * b;
}

}  // namespace

RingContext::RingContext(const IntMatrix2& g, const QuadraticIrrational& theta, cplx tau, double trunc_tol,
                         unsigned max_grade)
    : g_(g), theta_(theta), tau_(tau), trunc_tol_(trunc_tol) {
  if (!(trunc_tol > 0)) throw DomainError("trunc_tol must be positive");
  for (unsigned n = 1; n <= std::max(1u, max_grade); ++n) geoms_.push_back(make_geometry(g, theta, tau, n));
}

GeometryPtr RingContext::geometry(unsigned n) const {
  if (n == 0) throw DomainError("grades start at 1");
  if (n <= geoms_.size()) return geoms_[n - 1];
  return make_geometry(g_, theta_, tau_, n);
}

long numerical_rank(const Eigen::MatrixXcd& A, double rel_tol) { return count_above(singular_values(A), rel_tol); }

Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& A, double rel_tol) {
  const Eigen::Index n = A.cols();
  if (A.rows() == 0) return Eigen::MatrixXcd::Identity(n, n);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
  const long r = count_above(svd.singularValues(), rel_tol);
  return svd.matrixV().rightCols(n - r);
}

std::vector<HolomorphicVector> e_basis(const RingContext& ctx, unsigned n) {
  GeometryPtr G = ctx.geometry(n);
  std::vector<HolomorphicVector> out;
  for (std::int64_t k = 0; k < G->cn; ++k) out.push_back(HolomorphicVector::basis(G, k));
  return out;
}

Eigen::MatrixXcd star_table(const RingContext& ctx, unsigned n, unsigned m) {
  auto bn = e_basis(ctx, n), bm = e_basis(ctx, m);
  const std::int64_t cn = ctx.c(n), cm = ctx.c(m), cN = ctx.c(n + m);
  Eigen::MatrixXcd B(cN, cn * cm);
  for (std::int64_t i = 0; i < cn; ++i)
    for (std::int64_t k = 0; k < cm; ++k) {
      auto p = star(bn[i], bm[k]);
      for (std::int64_t q = 0; q < cN; ++q) B(q, i * cm + k) = p.f[q];
    }
  return B;
}

cplx r_view_coefficient(const RingElementR& x, const RingContext& ctx, Index2 m) {
  GeometryPtr G = ctx.geometry(x.n);
  const std::int64_t c = G->cn;
  cplx Q = 0.0;
  for (std::int64_t a = 0; a < c; ++a)
    Q += x.M(mod(a + G->an * m.m1, c), a) * e(double(mod(a * m.m2, c)) / double(c));
  if (Q == cplx(0.0)) return 0.0;
  return Q * holo_kernel(*G, m);
}

TorusElement r_view_box(const RingElementR& x, const RingContext& ctx, long radius, double trunc_tol) {
  GeometryPtr G = ctx.geometry(x.n);
  const std::int64_t c = G->cn;
  if (x.M.rows() != c || x.M.cols() != c) throw DomainError("ring element matrix has the wrong size");
  std::vector<Term> terms;
  std::vector<cplx> v(c), F(c);
  for (std::int64_t m1 = -radius; m1 <= radius; ++m1) {
    bool any = false;
    for (std::int64_t a = 0; a < c; ++a) {
      v[a] = x.M(mod(a + G->an * m1, c), a);
      any = any || v[a] != cplx(0.0);
    }
    if (!any) continue;
    // Q(m1, m2) depends on m2 mod c only
    for (std::int64_t r = 0; r < c; ++r) {
      cplx s = 0.0;
      for (std::int64_t a = 0; a < c; ++a)
        if (v[a] != cplx(0.0)) s += v[a] * e(double(mod(a * r, c)) / double(c));
      F[r] = s;
    }
    for (std::int64_t m2 = -radius; m2 <= radius; ++m2) {
      const cplx Q = F[mod(m2, c)];
      if (Q != cplx(0.0)) terms.push_back({{m1, m2}, Q * holo_kernel(*G, {m1, m2})});
    }
  }
  return TorusElement::from_terms(ctx.theta(), trunc_tol, std::move(terms));
}

TorusElement r_view(const RingElementR& x, const RingContext& ctx, std::optional<double> trunc_tol) {
  const double tol = trunc_tol.value_or(ctx.trunc_tol());
  GeometryPtr G = ctx.geometry(x.n);
  const double scale = x.M.cwiseAbs().sum() / std::sqrt(2 * G->mu.imag());
  if (scale == 0) return TorusElement(ctx.theta(), tol);
  const long R = gaussian_tail_radius(G->omega_n.im_eigenvalues()[0], scale, tol, radius_budget());
  return r_view_box(x, ctx, R, tol);
}

RingElementR r_star(const RingElementR& x, const RingElementR& y, const RingContext& ctx) {
  Eigen::MatrixXcd B = star_table(ctx, x.n, y.n);
  Eigen::MatrixXcd K = Eigen::kroneckerProduct(x.M, y.M);
  return {x.n + y.n, B * K * B.adjoint()};
}

RankReport dimension_check_R(const RingContext& ctx, unsigned n) {
  const std::int64_t c = ctx.c(n);
  const long r = static_cast<long>((c + 1) / 2);
  const long w = 2 * r + 1;
  Eigen::MatrixXcd A(c * c, w * w);
  for (std::int64_t i = 0; i < c; ++i)
    for (std::int64_t j = 0; j < c; ++j) {
      RingElementR x{n, unit_matrix(c, i, j)};
      for (long m1 = -r; m1 <= r; ++m1)
        for (long m2 = -r; m2 <= r; ++m2) A(i * c + j, (m1 + r) * w + m2 + r) = r_view_coefficient(x, ctx, {m1, m2});
    }
  Eigen::VectorXd s = singular_values(A);
  RankReport rep;
  rep.check = "dimension_R";
  rep.grade = n;
  rep.rank = count_above(s, 1e-8);
  rep.expected = c * c;
  rep.residual_max = rep.rank < s.size() ? s[rep.rank] / s[0] : 0.0;
  rep.pass = rep.rank == rep.expected;
  return rep;
}

namespace {

std::vector<RankReport> generation_E(const RingContext& ctx, unsigned N) {
  std::vector<RankReport> out;
  const std::int64_t c1 = ctx.c(1);
  auto b1 = e_basis(ctx, 1);
  Eigen::MatrixXcd span = Eigen::MatrixXcd::Identity(c1, c1);
  for (unsigned n = 2; n <= N; ++n) {
    RankReport rep;
    rep.check = "generation_E";
    rep.grade = n;
    rep.expected = ctx.c(n);
    const long products = static_cast<long>(c1 * span.cols());
    if (products * rep.expected > rank_entry_limit()) {
      rep.untestable = true;
      out.push_back(rep);
      for (unsigned k = n + 1; k <= N; ++k) out.push_back({"generation_E", k, 0, ctx.c(k), 0, false, true});
      return out;
    }
    GeometryPtr Gprev = ctx.geometry(n - 1);
    Eigen::MatrixXcd P(rep.expected, products);
    long col = 0;
    for (std::int64_t i = 0; i < c1; ++i)
      for (Eigen::Index s = 0; s < span.cols(); ++s, ++col) {
        std::vector<cplx> f(span.rows());
        for (Eigen::Index q = 0; q < span.rows(); ++q) f[q] = span(q, s);
        auto p = star(b1[i], HolomorphicVector(Gprev, f));
        for (std::int64_t q = 0; q < rep.expected; ++q) P(q, col) = p.f[q];
      }
    Eigen::VectorXd sv = singular_values(P);
    rep.rank = count_above(sv, 1e-8);
    rep.residual_max = rep.rank < sv.size() ? sv[rep.rank] / sv[0] : 0.0;
    rep.pass = rep.rank == rep.expected;
    out.push_back(rep);
    span = range_basis(P);
  }
  return out;
}

std::vector<RankReport> generation_R(const RingContext& ctx, unsigned N) {
  std::vector<RankReport> out;
  const std::int64_t c1 = ctx.c(1);
  // spanning set of the previous grade as flattened matrices (columns)
  Eigen::MatrixXcd span = Eigen::MatrixXcd::Identity(c1 * c1, c1 * c1);
  for (unsigned n = 2; n <= N; ++n) {
    RankReport rep;
    rep.check = "generation_R";
    rep.grade = n;
    const std::int64_t cn = ctx.c(n), cp = ctx.c(n - 1);
    rep.expected = cn * cn;
    const long r = static_cast<long>((cn + 1) / 2);
    const long w = 2 * r + 1;
    const long products = static_cast<long>(span.cols() * c1 * c1);
    if (products * w * w > rank_entry_limit()) {
      rep.untestable = true;
      out.push_back(rep);
      for (unsigned k = n + 1; k <= N; ++k)
        out.push_back({"generation_R", k, 0, ctx.c(k) * ctx.c(k), 0, false, true});
      return out;
    }
    const Eigen::MatrixXcd B = star_table(ctx, n - 1, 1);
    Eigen::MatrixXcd views(w * w, products);
    Eigen::MatrixXcd mats(cn * cn, products);
    long col = 0;
    for (Eigen::Index s = 0; s < span.cols(); ++s) {
      Eigen::MatrixXcd X = Eigen::Map<const Eigen::MatrixXcd>(span.col(s).data(), cp, cp);
      for (std::int64_t k = 0; k < c1; ++k)
        for (std::int64_t l = 0; l < c1; ++l, ++col) {
          RingElementR p{n, B * Eigen::kroneckerProduct(X, unit_matrix(c1, k, l)) * B.adjoint()};
          for (long m1 = -r; m1 <= r; ++m1)
            for (long m2 = -r; m2 <= r; ++m2) views((m1 + r) * w + m2 + r, col) = r_view_coefficient(p, ctx, {m1, m2});
          mats.col(col) = Eigen::Map<const Eigen::VectorXcd>(p.M.data(), cn * cn);
        }
    }
    Eigen::VectorXd sv = singular_values(views);
    rep.rank = count_above(sv, 1e-8);
    rep.residual_max = rep.rank < sv.size() ? sv[rep.rank] / sv[0] : 0.0;
    rep.pass = rep.rank == rep.expected;
    out.push_back(rep);
    span = range_basis(mats);
  }
  return out;
}

}  // namespace

std::vector<RankReport> generation_check(const RingContext& ctx, RingKind ring, unsigned N) {
  if (N < 2) return {};
  return ring == RingKind::E ? generation_E(ctx, N) : generation_R(ctx, N);
}

QuadraticityReport quadraticity_check(const RingContext& ctx) {
  const std::int64_t c1 = ctx.c(1);
  const Eigen::MatrixXcd B2 = star_table(ctx, 1, 1);
  const Eigen::MatrixXcd A21 = star_table(ctx, 2, 1);
  const Eigen::MatrixXcd I1 = Eigen::MatrixXcd::Identity(c1, c1);
  const Eigen::MatrixXcd K2 = null_space(B2);
  const Eigen::MatrixXcd T3 = A21 * Eigen::kroneckerProduct(B2, I1);

  QuadraticityReport rep;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(T3, Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  const long r = count_above(s, 1e-8);
  rep.dim_K2 = K2.cols();
  rep.dim_K3 = T3.cols() - r;
  if (r > 0) rep.spectral_gap = r < s.size() ? s[r - 1] / std::max(s[r], 1e-300) : INFINITY;
  if (rep.dim_K2 > 0) {
    Eigen::MatrixXcd S(c1 * c1 * c1, 2 * K2.cols() * c1);
    S << Eigen::kroneckerProduct(K2, I1), Eigen::kroneckerProduct(I1, K2);
    rep.span_rank = numerical_rank(S);
  }
  rep.quadratic = rep.span_rank == rep.dim_K3;
  return rep;
}

bool polishchuk_predicate(const IntMatrix2& g, int epsilon) { return g.c >= g.a + g.d + epsilon; }

Multiplier stated_multiplier(const RingContext& ctx, unsigned n) {
  GeometryPtr G = ctx.geometry(n);
  return build_multiplier({G->cn, 0}, {0, G->cn}, G->omega_n, ctx.theta());
}

Multiplier twisted_multiplier(const RingContext& ctx, unsigned n) {
  GeometryPtr G = ctx.geometry(n);
  const double shift = double(G->an) / (2.0 * double(G->cn));
  Siegel2 om(G->omega_n.o11(), G->omega_n.o12() + shift, G->omega_n.o22());
  return build_multiplier({G->cn, 0}, {0, G->cn}, om, ctx.theta());
}

namespace {

MultiplierFixedness check_all_pairs(const RingContext& ctx, unsigned n, const Multiplier& mult, double tol) {
  GeometryPtr G = ctx.geometry(n);
  const std::int64_t c = G->cn;
  const double t = fixedness_truncation(mult, 1 / std::sqrt(2 * G->mu.imag()), tol);
  MultiplierFixedness out;
  for (std::int64_t i = 0; i < c; ++i)
    for (std::int64_t j = 0; j < c; ++j) {
      auto view = r_view({n, unit_matrix(c, i, j)}, ctx, t);
      const double res = is_fixed_by(view, mult, tol).residual();
      if (res > out.residual_max || out.worst_i < 0) {
        out.residual_max = res;
        out.worst_i = static_cast<long>(i);
        out.worst_j = static_cast<long>(j);
      }
    }
  out.pass = out.residual_max < tol;
  return out;
}

}  // namespace

QuantumThetaReport quantum_theta_suite(const RingContext& ctx, unsigned n, double tol) {
  GeometryPtr G = ctx.geometry(n);
  QuantumThetaReport rep;
  rep.grade = n;
  rep.omega_in_siegel = G->omega_n.im_eigenvalues()[0] > 0;
  rep.stated = check_all_pairs(ctx, n, stated_multiplier(ctx, n), tol);
  rep.twisted = check_all_pairs(ctx, n, twisted_multiplier(ctx, n), tol);
  return rep;
}

}  // namespace qtheta
