#include "qtheta/bimodule.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <Eigen/Dense>

#include "qtheta/error.hpp"

namespace qtheta {

namespace {

constexpr double kTwoPi = 2 * kPi;
const cplx kI(0, 1);

std::int64_t mod(__int128 x, std::int64_t c) {
  __int128 r = x % c;
  if (r < 0) r += c;
  return static_cast<std::int64_t>(r);
}

// lw + 2 pi i z with the imaginary part kept in (-pi, pi].
cplx add_phase(cplx lw, cplx z) {
  cplx r = lw + kTwoPi * kI * z;
  return {r.real(), std::remainder(r.imag(), kTwoPi)};
}

// Translation x -> x - t.
void translate(GaussianTerm& t, double s) {
  t.lw = add_phase(t.lw, t.mu * (s * s / 2) - t.beta * s);
  t.beta -= t.mu * s;
}

// e(-r / c) with r an integer
void modulate(GaussianTerm& t, std::int64_t r, std::int64_t c, cplx dbeta) {
  t.lw = add_phase(t.lw, -double(r) / double(c));
  t.beta += dbeta;
}

struct Index2Hash {
  std::size_t operator()(const Index2& m) const {
    auto h = static_cast<std::uint64_t>(m.m1) * 0x9E3779B97F4A7C15ull;
    return static_cast<std::size_t>(h ^ (static_cast<std::uint64_t>(m.m2) + (h << 6) + (h >> 2)));
  }
};

void require_components(const GaussianVector& v, const ModuleGeometry& geom) {
  if (v.c != geom.cn)
    throw DomainError("vector has " + std::to_string(v.c) + " components, geometry needs " + std::to_string(geom.cn));
}

}  // namespace

GeometryPtr make_geometry(const IntMatrix2& g, const QuadraticIrrational& theta, cplx tau, unsigned n) {
  if (!(tau.imag() > 0)) throw DomainError("Im tau must be positive");
  if (auto why = s_theta_violation(g, theta)) throw DomainError("g not in S_theta: " + *why);
  PowerEntries pe = power_entries(g, theta, n);
  const double eps_d = pe.eps.to_double();
  const std::int64_t cn = to_int64(pe.c);
  const cplx mu = tau * double(cn) / eps_d;
  if (!(mu.imag() > 0)) throw Error("Im mu_n is not positive");
  Siegel2 omega = siegel_from_tau(tau);
  auto geom = std::make_shared<ModuleGeometry>(ModuleGeometry{
      g, theta, tau, n, pe.a, pe.b, pe.c, pe.d, pe.eps, to_int64(pe.a), to_int64(pe.b), cn, to_int64(pe.d), eps_d,
      mu, omega, omega.scaled(1.0 / (double(cn) * eps_d)), PhaseEvaluator(theta)});
  return geom;
}

bool same_family(const ModuleGeometry& x, const ModuleGeometry& y) {
  return x.g == y.g && x.theta == y.theta && x.tau == y.tau;
}

HolomorphicVector::HolomorphicVector(GeometryPtr geom_, std::vector<cplx> f_) : geom(std::move(geom_)), f(std::move(f_)) {
  if (static_cast<std::int64_t>(f.size()) != geom->cn)
    throw DomainError("holomorphic vector needs " + std::to_string(geom->cn) + " values, got " +
                      std::to_string(f.size()));
}

HolomorphicVector HolomorphicVector::basis(GeometryPtr geom, std::int64_t k) {
  std::vector<cplx> f(static_cast<std::size_t>(geom->cn), 0.0);
  f[static_cast<std::size_t>(mod(k, geom->cn))] = 1.0;
  return HolomorphicVector(std::move(geom), std::move(f));
}

cplx HolomorphicVector::operator[](std::int64_t alpha) const { return f[static_cast<std::size_t>(mod(alpha, geom->cn))]; }

double GaussianTerm::log_peak() const {
  return lw.real() + kPi * beta.imag() * beta.imag() / mu.imag();
}

cplx GaussianTerm::eval(double x) const { return std::exp(lw + kTwoPi * kI * (mu * (x * x / 2) + beta * x)); }

void GaussianVector::add(std::int64_t alpha, cplx w, cplx mu, cplx beta) {
  if (w == cplx(0.0)) return;
  add_log(alpha, std::log(w), mu, beta);
}

void GaussianVector::add_log(std::int64_t alpha, cplx lw, cplx mu, cplx beta) {
  if (!(mu.imag() > 0)) throw DomainError("Gaussian term needs Im mu > 0");
  terms.push_back({mod(alpha, c), lw, mu, beta});
}

void GaussianVector::prune(double tol) {
  const double l = std::log(tol);
  std::erase_if(terms, [&](const GaussianTerm& t) { return t.log_peak() < l; });
}

cplx GaussianVector::eval(double x, std::int64_t alpha) const {
  const std::int64_t a = mod(alpha, c);
  cplx s = 0.0;
  for (const auto& t : terms)
    if (t.alpha == a) s += t.eval(x);
  return s;
}

GaussianVector embed_holomorphic(const HolomorphicVector& v) {
  GaussianVector out(v.geom->cn);
  for (std::int64_t a = 0; a < v.geom->cn; ++a) out.add(a, v.f[static_cast<std::size_t>(a)], v.geom->mu, 0.0);
  return out;
}

GaussianTerm apply_generator(const GaussianTerm& t, const ModuleGeometry& geom, Generator which, std::int64_t k) {
  GaussianTerm r = t;
  const std::int64_t c = geom.cn;
  switch (which) {
    case Generator::U_right:
      translate(r, double(k) * geom.eps_d / double(c));
      r.alpha = mod(__int128(r.alpha) + k, c);
      break;
    case Generator::V_right:
      modulate(r, mod(__int128(k) * r.alpha * geom.dn, c), c, double(k));
      break;
    case Generator::Uprime_left:
      translate(r, double(k) / double(c));
      r.alpha = mod(__int128(r.alpha) + __int128(k) * geom.an, c);
      break;
    case Generator::Vprime_left:
      modulate(r, mod(__int128(k) * r.alpha, c), c, double(k) / geom.eps_d);
      break;
  }
  return r;
}

GaussianVector apply_generator(const GaussianVector& v, const ModuleGeometry& geom, Generator which, std::int64_t k) {
  require_components(v, geom);
  GaussianVector out(v.c);
  out.terms.reserve(v.terms.size());
  for (const auto& t : v.terms) out.terms.push_back(apply_generator(t, geom, which, k));
  return out;
}

GaussianTerm apply_monomial(const GaussianTerm& t, const ModuleGeometry& geom, Side side, Index2 k) {
  if (side == Side::left)
    return apply_generator(apply_generator(t, geom, Generator::Vprime_left, k.m2), geom, Generator::Uprime_left, k.m1);
  return apply_generator(apply_generator(t, geom, Generator::U_right, k.m1), geom, Generator::V_right, k.m2);
}

GaussianVector apply_monomial(const GaussianVector& v, const ModuleGeometry& geom, Side side, Index2 k) {
  require_components(v, geom);
  GaussianVector out(v.c);
  out.terms.reserve(v.terms.size());
  for (const auto& t : v.terms) out.terms.push_back(apply_monomial(t, geom, side, k));
  return out;
}

GaussianVector apply_torus(const GaussianVector& v, const ModuleGeometry& geom, const TorusElement& a, Side side) {
  require_components(v, geom);
  if (!(a.theta() == geom.theta)) throw DomainError("torus element and module use different theta");
  GaussianVector out(v.c);
  out.terms.reserve(v.terms.size() * a.size());
  for (const auto& at : a.terms()) {
    const cplx la = std::log(at.a);
    for (const auto& t : v.terms) {
      GaussianTerm r = apply_monomial(t, geom, side, at.m);
      r.lw += la;
      out.terms.push_back(r);
    }
  }
  return out;
}

cplx l2_pair_log(const GaussianTerm& s, const GaussianTerm& t) {
  const cplx A = s.mu - std::conj(t.mu);
  const cplx B = s.beta - std::conj(t.beta);
  return s.lw + std::conj(t.lw) + 0.5 * std::log(kI / A) - kI * kPi * B * B / A;
}

cplx l2_inner(const GaussianVector& v, const GaussianVector& w) {
  if (v.c != w.c) throw DomainError("L2 pairing of vectors with different component counts");
  cplx s = 0.0;
  for (const auto& a : v.terms)
    for (const auto& b : w.terms)
      if (a.alpha == b.alpha) s += std::exp(l2_pair_log(a, b));
  return s;
}

namespace {

// Sum over pairs (s in first, t in second) with matching component of
// <s, M_k t>, where M_k is the side's monomial.
cplx series_coefficient(const GaussianVector& first, const GaussianVector& second, const ModuleGeometry& geom,
                        Side side, Index2 k) {
  std::vector<std::vector<const GaussianTerm*>> bucket(static_cast<std::size_t>(first.c));
  for (const auto& s : first.terms) bucket[static_cast<std::size_t>(s.alpha)].push_back(&s);
  cplx sum = 0.0;
  for (const auto& t : second.terms) {
    GaussianTerm mt = apply_monomial(t, geom, side, k);
    for (const GaussianTerm* s : bucket[static_cast<std::size_t>(mt.alpha)]) sum += std::exp(l2_pair_log(*s, mt));
  }
  return sum;
}

struct Box {
  bool empty = true;
  std::int64_t k1lo = 0, k1hi = 0, k2lo = 0, k2hi = 0;
};

// log|<s, M_k t>| is an exact quadratic in k; fit it from six values and
// return the bounding box of {k : log|<s, M_k t>| >= level}.
Box pair_box(const GaussianTerm& s, const GaussianTerm& t, const ModuleGeometry& geom, Side side, double level) {
  auto q = [&](std::int64_t k1, std::int64_t k2) {
    return l2_pair_log(s, apply_monomial(t, geom, side, {k1, k2})).real();
  };
  const double q0 = q(0, 0), qp1 = q(1, 0), qm1 = q(-1, 0), qp2 = q(0, 1), qm2 = q(0, -1), q11 = q(1, 1);
  Eigen::Vector2d g((qp1 - qm1) / 2, (qp2 - qm2) / 2);
  Eigen::Matrix2d H;
  H(0, 0) = qp1 + qm1 - 2 * q0;
  H(1, 1) = qp2 + qm2 - 2 * q0;
  H(0, 1) = H(1, 0) = q11 - qp1 - qp2 + q0;
  if (!(H(0, 0) < 0) || !(H.determinant() > 0)) throw Error("Rieffel series does not decay in both directions");
  Eigen::Matrix2d Hinv = H.inverse();
  Eigen::Vector2d kstar = -Hinv * g;
  const double qmax = q0 + 0.5 * g.dot(kstar);
  Box b;
  if (qmax < level) return b;
  const double w1 = std::sqrt(2 * (qmax - level) * -Hinv(0, 0));
  const double w2 = std::sqrt(2 * (qmax - level) * -Hinv(1, 1));
  b.empty = false;
  b.k1lo = static_cast<std::int64_t>(std::floor(kstar[0] - w1));
  b.k1hi = static_cast<std::int64_t>(std::ceil(kstar[0] + w1));
  b.k2lo = static_cast<std::int64_t>(std::floor(kstar[1] - w2));
  b.k2hi = static_cast<std::int64_t>(std::ceil(kstar[1] + w2));
  return b;
}

}  // namespace

cplx rieffel_inner_coefficient(const GaussianVector& v, const GaussianVector& w, const ModuleGeometry& geom,
                               Side side, Index2 k) {
  require_components(v, geom);
  require_components(w, geom);
  if (side == Side::left) return series_coefficient(v, w, geom, side, k);
  return geom.eps_d * series_coefficient(w, v, geom, side, k);
}

TorusElement rieffel_inner(const GaussianVector& v, const GaussianVector& w, const ModuleGeometry& geom, Side side,
                           double trunc_tol) {
  require_components(v, geom);
  require_components(w, geom);
  const GaussianVector& first = side == Side::left ? v : w;
  const GaussianVector& second = side == Side::left ? w : v;
  const double prefactor = side == Side::left ? 1.0 : geom.eps_d;
  const std::size_t npairs = std::max<std::size_t>(1, first.terms.size() * second.terms.size());
  const double level = std::log(trunc_tol / (double(npairs) * prefactor));
  const std::int64_t c = geom.cn;
  // k1 must carry the component of t onto that of s: left k1 a = ds, right k1 = ds (mod c).
  const std::int64_t step_inv = side == Side::left ? mod(geom.dn, c) : 1;

  std::unordered_map<Index2, cplx, Index2Hash> acc;
  for (const auto& s : first.terms)
    for (const auto& t : second.terms) {
      Box b = pair_box(s, t, geom, side, level);
      if (b.empty) continue;
      const std::int64_t r = mod(__int128(s.alpha - t.alpha) * step_inv, c);
      std::int64_t k1 = b.k1lo + mod(__int128(r) - b.k1lo, c);
      for (; k1 <= b.k1hi; k1 += c)
        for (std::int64_t k2 = b.k2lo; k2 <= b.k2hi; ++k2) {
          GaussianTerm mt = apply_monomial(t, geom, side, {k1, k2});
          acc[{k1, k2}] += prefactor * std::exp(l2_pair_log(s, mt));
        }
    }
  std::vector<Term> terms;
  terms.reserve(acc.size());
  for (const auto& [m, a] : acc) terms.push_back({m, a});
  return TorusElement::from_terms(geom.theta, trunc_tol, std::move(terms));
}

namespace {

void require_same_geometry(const HolomorphicVector& v, const HolomorphicVector& w) {
  if (!same_family(*v.geom, *w.geom) || v.geom->n != w.geom->n)
    throw DomainError("holomorphic vectors live in different modules");
}

}  // namespace

cplx holo_inner_coefficient(const HolomorphicVector& v, const HolomorphicVector& w, Index2 m) {
  require_same_geometry(v, w);
  const ModuleGeometry& G = *v.geom;
  const std::int64_t c = G.cn;
  cplx Q = 0.0;
  for (std::int64_t a = 0; a < c; ++a)
    Q += v[mod(__int128(a) + __int128(G.an) * m.m1, c)] * std::conj(w.f[static_cast<std::size_t>(a)]) *
         e(double(mod(__int128(a) * m.m2, c)) / double(c));
  if (Q == cplx(0.0)) return 0.0;
  return Q * holo_kernel(G, m);
}

cplx holo_kernel(const ModuleGeometry& G, Index2 m) {
  const std::int64_t c = G.cn;
  const double twist = double(mod(__int128(G.an) * m.m1 * m.m2, 2 * c)) / double(2 * c);
  return e(G.omega_n.half_quadratic(m)) * G.phases.e_half_theta(-m.m1 * m.m2) * e(twist) / std::sqrt(2 * G.mu.imag());
}

TorusElement holo_inner_box(const HolomorphicVector& v, const HolomorphicVector& w, long radius, double trunc_tol) {
  require_same_geometry(v, w);
  std::vector<Term> terms;
  for (std::int64_t i = -radius; i <= radius; ++i)
    for (std::int64_t j = -radius; j <= radius; ++j) {
      cplx a = holo_inner_coefficient(v, w, {i, j});
      if (a != cplx(0.0)) terms.push_back({{i, j}, a});
    }
  return TorusElement::from_terms(v.geom->theta, trunc_tol, std::move(terms));
}

TorusElement holo_inner(const HolomorphicVector& v, const HolomorphicVector& w, double trunc_tol) {
  require_same_geometry(v, w);
  const ModuleGeometry& G = *v.geom;
  double nv = 0, nw = 0;
  for (auto x : v.f) nv += std::norm(x);
  for (auto x : w.f) nw += std::norm(x);
  // |Q(m)| <= |f|_2 |g|_2
  const double scale = std::sqrt(nv * nw) / std::sqrt(2 * G.mu.imag());
  if (scale == 0) return TorusElement(G.theta, trunc_tol);
  const long R = gaussian_tail_radius(G.omega_n.im_eigenvalues()[0], scale, trunc_tol, radius_budget());
  return holo_inner_box(v, w, R, trunc_tol);
}

HolomorphicVector star(const HolomorphicVector& u, const HolomorphicVector& v, double trunc_tol) {
  if (!same_family(*u.geom, *v.geom)) throw DomainError("star product of vectors from different families");
  const ModuleGeometry& Gn = *u.geom;
  const ModuleGeometry& Gm = *v.geom;
  GeometryPtr GN = make_geometry(Gn.g, Gn.theta, Gn.tau, Gn.n + Gm.n);
  const std::int64_t cn = Gn.cn, cm = Gm.cn, cN = GN->cn, dN = GN->dn;
  const cplx tau = Gn.tau;
  const double s = double(cN) / (double(cn) * double(cm));
  double su = 0, sv = 0;
  for (auto x : u.f) su = std::max(su, std::abs(x));
  for (auto x : v.f) sv = std::max(sv, std::abs(x));
  std::vector<cplx> out(static_cast<std::size_t>(cN), 0.0);
  if (su == 0 || sv == 0) return HolomorphicVector(GN, std::move(out));
  const double R = std::sqrt(std::max(0.0, std::log(4 * su * sv / trunc_tol)) / (kPi * tau.imag() * s)) + 1;

  auto value = [&](std::int64_t alpha) {
    const __int128 center_num = __int128(cm) * dN * alpha;  // q0 = center_num / cN
    const double q0 = double(center_num) / double(cN);
    const auto qlo = static_cast<std::int64_t>(std::floor(q0 - R));
    const auto qhi = static_cast<std::int64_t>(std::ceil(q0 + R));
    cplx sum = 0.0;
    for (std::int64_t q = qlo; q <= qhi; ++q) {
      const double D = double(__int128(q) * cN - center_num);  // cN (q - q0)
      const cplx expo = tau / 2.0 * (D * D / (double(cN) * double(cn) * double(cm)));
      sum += e(expo) * u[mod(__int128(Gn.an) * dN * alpha - q, cn)] * v[mod(__int128(Gm.an) * q, cm)];
    }
    return sum;
  };

  double worst = 0;
  for (std::int64_t a = 0; a < cN; ++a) {
    out[static_cast<std::size_t>(a)] = value(a);
    worst = std::max(worst, std::abs(value(a + cN) - out[static_cast<std::size_t>(a)]));
  }
  if (worst > 1e-10 * std::max(1.0, su * sv)) throw Error("star product is not periodic mod c_{n+m}");
  return HolomorphicVector(GN, std::move(out));
}

ResidualReport verify_imprimitivity(const GaussianVector& v, const GaussianVector& w, const GaussianVector& z,
                                    const ModuleGeometry& geom, double tol, double trunc_tol) {
  TorusElement left = rieffel_inner(v, w, geom, Side::left, trunc_tol);
  TorusElement right = rieffel_inner(w, z, geom, Side::right, trunc_tol);
  GaussianVector lhs = apply_torus(z, geom, left, Side::left);
  GaussianVector rhs = apply_torus(v, geom, right, Side::right);
  ResidualReport rep;
  for (double x : {-2.0, -1.0, 0.0, 0.37, 1.0, 2.0})
    for (std::int64_t a = 0; a < geom.cn; ++a) {
      const cplx l = lhs.eval(x, a), r = rhs.eval(x, a);
      rep.lhs_norm = std::max(rep.lhs_norm, std::abs(l));
      rep.rhs_norm = std::max(rep.rhs_norm, std::abs(r));
      rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(l - r));
    }
  rep.pass = rep.max_abs_diff < tol;
  return rep;
}

ResidualReport verify_tensor_compatibility(const HolomorphicVector& f1, const HolomorphicVector& s1,
                                           const HolomorphicVector& f2, const HolomorphicVector& s2, double tol,
                                           long window, double trunc_tol) {
  require_same_geometry(f1, s1);
  require_same_geometry(f2, s2);
  if (!same_family(*f1.geom, *f2.geom)) throw DomainError("tensor compatibility needs one family");
  HolomorphicVector lf = star(f1, f2);
  HolomorphicVector ls = star(s1, s2);
  TorusElement a = holo_inner(f2, s2, trunc_tol);
  GaussianVector b = apply_torus(embed_holomorphic(f1), *f1.geom, a, Side::right);
  GaussianVector e1 = embed_holomorphic(s1);
  ResidualReport rep;
  for (long i = -window; i <= window; ++i)
    for (long j = -window; j <= window; ++j) {
      const cplx l = holo_inner_coefficient(lf, ls, {i, j});
      const cplx r = rieffel_inner_coefficient(b, e1, *f1.geom, Side::left, {i, j});
      rep.lhs_norm = std::max(rep.lhs_norm, std::abs(l));
      rep.rhs_norm = std::max(rep.rhs_norm, std::abs(r));
      rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(l - r));
    }
  rep.pass = rep.max_abs_diff < tol;
  return rep;
}

}  // namespace qtheta
