#include "qtheta/nctorus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <unordered_map>

#include "qtheta/error.hpp"

namespace qtheta {

namespace {

struct Index2Hash {
  std::size_t operator()(const Index2& m) const {
    auto h = static_cast<std::uint64_t>(m.m1) * 0x9E3779B97F4A7C15ull;
    return static_cast<std::size_t>(h ^ (static_cast<std::uint64_t>(m.m2) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2)));
  }
};

using Accumulator = std::unordered_map<Index2, cplx, Index2Hash>;

std::vector<Term> drain(const Accumulator& acc) {
  std::vector<Term> out;
  out.reserve(acc.size());
  for (const auto& [m, a] : acc) out.push_back({m, a});
  return out;
}

std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& u, std::int64_t& v) {
  std::int64_t u0 = 1, v0 = 0, u1 = 0, v1 = 1;
  while (b != 0) {
    std::int64_t q = a / b;
    std::int64_t t = a - q * b;
    a = b;
    b = t;
    t = u0 - q * u1;
    u0 = u1;
    u1 = t;
    t = v0 - q * v1;
    v0 = v1;
    v1 = t;
  }
  if (a < 0) {
    a = -a;
    u0 = -u0;
    v0 = -v0;
  }
  u = u0;
  v = v0;
  return a;
}

std::int64_t floor_div(std::int64_t x, std::int64_t y) {
  std::int64_t q = x / y;
  if ((x % y != 0) && ((x < 0) != (y < 0))) --q;
  return q;
}

std::int64_t mod(std::int64_t x, std::int64_t y) { return x - floor_div(x, y) * y; }

}  // namespace

cplx e(double x) {
  double f = x - std::nearbyint(x);
  return {std::cos(2 * kPi * f), std::sin(2 * kPi * f)};
}

cplx e(cplx z) { return std::exp(-2 * kPi * z.imag()) * e(z.real()); }

PhaseEvaluator::PhaseEvaluator(const QuadraticIrrational& theta) : theta_(theta.value().to_double_double()) {
  half_ = {theta_.hi / 2, theta_.lo / 2};
}

double PhaseEvaluator::frac(const DoubleDouble& x, std::int64_t k) {
  const double kd = static_cast<double>(k);
  const double p = kd * x.hi;
  const double err = std::fma(kd, x.hi, -p);
  double t = (p - std::nearbyint(p)) + (err + kd * x.lo);
  return t - std::floor(t);
}

cplx PhaseEvaluator::e_theta(std::int64_t k) const { return e(frac_theta(k)); }
cplx PhaseEvaluator::e_half_theta(std::int64_t k) const { return e(frac_half_theta(k)); }

TorusElement::TorusElement(const QuadraticIrrational& theta, double trunc_tol)
    : theta_(theta), tol_(trunc_tol), phases_(theta) {
  if (!(trunc_tol > 0)) throw DomainError("trunc_tol must be positive");
}

TorusElement TorusElement::monomial(const QuadraticIrrational& theta, double trunc_tol, Index2 m, cplx a) {
  return from_terms(theta, trunc_tol, {{m, a}});
}

TorusElement TorusElement::from_terms(const QuadraticIrrational& theta, double trunc_tol, std::vector<Term> terms) {
  TorusElement x(theta, trunc_tol);
  std::sort(terms.begin(), terms.end(), [](const Term& p, const Term& q) { return p.m < q.m; });
  for (const auto& t : terms) {
    if (!x.terms_.empty() && x.terms_.back().m == t.m)
      x.terms_.back().a += t.a;
    else
      x.terms_.push_back(t);
  }
  std::erase_if(x.terms_, [&](const Term& t) { return !(std::abs(t.a) >= trunc_tol); });
  return x;
}

cplx TorusElement::coeff(Index2 m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m, [](const Term& t, Index2 k) { return t.m < k; });
  return (it != terms_.end() && it->m == m) ? it->a : cplx(0.0);
}

double TorusElement::max_abs() const {
  double r = 0;
  for (const auto& t : terms_) r = std::max(r, std::abs(t.a));
  return r;
}

TorusElement TorusElement::retruncated(double trunc_tol) const { return from_terms(theta_, trunc_tol, terms_); }

void require_compatible(const TorusElement& x, const TorusElement& y) {
  if (!(x.theta() == y.theta()))
    throw DomainError("torus elements over different theta: " + x.theta().to_string() + " vs " + y.theta().to_string());
  if (x.trunc_tol() != y.trunc_tol()) throw DomainError("torus elements with different trunc_tol");
}

TorusElement te_mul(const TorusElement& x, const TorusElement& y) {
  require_compatible(x, y);
  const auto& ph = x.phases();
  Accumulator acc;
  acc.reserve(x.size() * y.size());
  for (const auto& s : x.terms())
    for (const auto& t : y.terms()) acc[s.m + t.m] += s.a * t.a * ph.e_theta(-s.m.m2 * t.m.m1);
  return TorusElement::from_terms(x.theta(), x.trunc_tol(), drain(acc));
}

TorusElement te_adjoint(const TorusElement& x) {
  std::vector<Term> out;
  out.reserve(x.size());
  for (const auto& t : x.terms()) out.push_back({-t.m, std::conj(t.a) * x.phases().e_theta(-t.m.m1 * t.m.m2)});
  return TorusElement::from_terms(x.theta(), x.trunc_tol(), std::move(out));
}

TorusElement te_add(const TorusElement& x, const TorusElement& y) {
  require_compatible(x, y);
  std::vector<Term> all = x.terms();
  all.insert(all.end(), y.terms().begin(), y.terms().end());
  return TorusElement::from_terms(x.theta(), x.trunc_tol(), std::move(all));
}

TorusElement te_scale(const TorusElement& x, cplx s) {
  std::vector<Term> out = x.terms();
  for (auto& t : out) t.a *= s;
  return TorusElement::from_terms(x.theta(), x.trunc_tol(), std::move(out));
}

TorusElement te_sub(const TorusElement& x, const TorusElement& y) { return te_add(x, te_scale(y, -1.0)); }

double max_abs_diff(const TorusElement& x, const TorusElement& y) {
  const auto& a = x.terms();
  const auto& b = y.terms();
  std::size_t i = 0, j = 0;
  double r = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].m < b[j].m)) {
      r = std::max(r, std::abs(a[i++].a));
    } else if (i == a.size() || b[j].m < a[i].m) {
      r = std::max(r, std::abs(b[j++].a));
    } else {
      r = std::max(r, std::abs(a[i++].a - b[j++].a));
    }
  }
  return r;
}

TorusElement heisenberg_act(const HeisenbergElement& h, const TorusElement& a) {
  if (h.alpha == cplx(0.0)) throw DomainError("Heisenberg scalar must be nonzero");
  const auto& ph = a.phases();
  std::vector<Term> out;
  out.reserve(a.size());
  for (const auto& t : a.terms()) {
    const Index2 n = t.m;
    cplx w = h.alpha * t.a * e(double(n.m1) * h.x[0] + double(n.m2) * h.x[1]);
    w *= ph.e_half_theta(n.m1 * h.half_theta[0] + n.m2 * h.half_theta[1]);
    w *= ph.e_theta(-h.m.m2 * n.m1);
    out.push_back({h.m + n, w});
  }
  return TorusElement::from_terms(a.theta(), a.trunc_tol(), std::move(out));
}

Siegel2::Siegel2(cplx o11, cplx o12, cplx o22) : o11_(o11), o12_(o12), o22_(o22) {
  const double det = o11.imag() * o22.imag() - o12.imag() * o12.imag();
  if (!(o11.imag() > 0) || !(det > 0)) throw DomainError("Omega is not in the Siegel upper half-plane");
}

Eigen::Matrix2cd Siegel2::matrix() const {
  Eigen::Matrix2cd m;
  m << o11_, o12_, o12_, o22_;
  return m;
}

Eigen::Vector2d Siegel2::im_eigenvalues() const {
  const double a = o11_.imag(), b = o12_.imag(), c = o22_.imag();
  const double mean = (a + c) / 2;
  const double rad = std::hypot((a - c) / 2, b);
  return {mean - rad, mean + rad};
}

cplx Siegel2::half_quadratic(Index2 m) const {
  const double m1 = double(m.m1), m2 = double(m.m2);
  return 0.5 * (o11_ * (m1 * m1) + 2.0 * o12_ * (m1 * m2) + o22_ * (m2 * m2));
}

Siegel2 siegel_from_tau(cplx tau) {
  if (!(tau.imag() > 0)) throw DomainError("Im tau must be positive");
  const cplx s(0, 1 / (2 * tau.imag()));
  Siegel2 omega(s * std::norm(tau), -s * tau.real(), s);
  const double det_im = omega.o11().imag() * omega.o22().imag() - omega.o12().imag() * omega.o12().imag();
  if (std::abs(det_im - 0.25) > 1e-12 * (1 + std::abs(omega.o11().imag())))
    throw Error("det Im Omega != 1/4 for tau");
  return omega;
}

Lattice2::Lattice2(Index2 s, Index2 r) : s_(s), r_(r) {
  const std::int64_t det = s.m1 * r.m2 - s.m2 * r.m1;
  if (det == 0) throw DomainError("degenerate lattice basis");
  std::int64_t u, v;
  const std::int64_t g = ext_gcd(s.m1, r.m1, u, v);
  A_ = g;
  C_ = std::abs(det) / g;
  B_ = mod(u * s.m2 + v * r.m2, C_);
}

Index2 Lattice2::reduce(Index2 m) const {
  const std::int64_t k = floor_div(m.m1, A_);
  return {m.m1 - k * A_, mod(m.m2 - k * B_, C_)};
}

std::size_t Lattice2::coset_id(Index2 m) const {
  Index2 q = reduce(m);
  return static_cast<std::size_t>(q.m1 * C_ + q.m2);
}

std::vector<Index2> Lattice2::representatives() const {
  std::vector<Index2> out;
  for (std::int64_t i = 0; i < A_; ++i)
    for (std::int64_t j = 0; j < C_; ++j) out.push_back({i, j});
  return out;
}

LatticeFunction::LatticeFunction(Lattice2 lattice)
    : lattice_(lattice), values_(static_cast<std::size_t>(lattice.index()), 0.0) {}

LatticeFunction::LatticeFunction(Lattice2 lattice, const std::function<cplx(Index2)>& on_representatives)
    : LatticeFunction(lattice) {
  auto reps = lattice_.representatives();
  for (std::size_t k = 0; k < reps.size(); ++k) values_[k] = on_representatives(reps[k]);
}

double LatticeFunction::sup() const {
  double r = 0;
  for (const auto& v : values_) r = std::max(r, std::abs(v));
  return r;
}

namespace {

HeisenbergElement generator(Index2 s, const Siegel2& omega) {
  // s^t J s vanishes identically, so s^t A^t s = s^t Omega s.
  if (s.m1 * s.m2 - s.m2 * s.m1 != 0) throw Error("s^t J s != 0");
  HeisenbergElement h;
  h.alpha = e(omega.half_quadratic(s));
  h.x = {omega.o11() * double(s.m1) + omega.o12() * double(s.m2),
         omega.o12() * double(s.m1) + omega.o22() * double(s.m2)};
  h.half_theta = {s.m2, -s.m1};
  h.m = s;
  return h;
}

}  // namespace

Multiplier build_multiplier(Index2 s, Index2 r, const Siegel2& omega, const QuadraticIrrational& theta) {
  Lattice2 lattice(s, r);
  return Multiplier{lattice, omega, theta, generator(s, omega), generator(r, omega)};
}

std::int64_t gamma_dimension(const Multiplier& mult) { return mult.lattice.index(); }

long radius_budget() {
  if (const char* env = std::getenv("QTHETA_RADIUS_BUDGET")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
    throw DomainError(std::string("invalid QTHETA_RADIUS_BUDGET '") + env + "'");
  }
  return 256;
}

long gaussian_tail_radius(double lambda, double scale, double tol, long budget) {
  if (!(lambda > 0)) throw DomainError("quadratic form is not positive definite");
  if (scale == 0) return 0;
  const double peak = 1 / std::sqrt(2 * kPi * lambda);
  for (long M = 0; M <= budget; ++M) {
    double tail = 0;
    for (long j = M + 1;; ++j) {
      const double term = 8.0 * double(j) * std::exp(-kPi * lambda * double(j) * double(j));
      tail += term;
      if (double(j) > peak && term <= tail * 1e-17) break;
    }
    if (scale * tail < tol) return M;
  }
  throw RadiusBudgetExceeded("Gaussian tail radius exceeds the radius budget", budget + 1, budget);
}

TorusElement theta_series(const LatticeFunction& f, const Siegel2& omega, const QuadraticIrrational& theta,
                          double trunc_tol) {
  const double sup = f.sup();
  TorusElement zero(theta, trunc_tol);
  if (sup == 0) return zero;
  const long M = gaussian_tail_radius(omega.im_eigenvalues()[0], sup, trunc_tol, radius_budget());
  const auto& ph = zero.phases();
  std::vector<Term> terms;
  terms.reserve(static_cast<std::size_t>((2 * M + 1) * (2 * M + 1)));
  for (std::int64_t m1 = -M; m1 <= M; ++m1)
    for (std::int64_t m2 = -M; m2 <= M; ++m2) {
      const Index2 m{m1, m2};
      const cplx fm = f(m);
      if (fm == cplx(0.0)) continue;
      terms.push_back({m, fm * e(omega.half_quadratic(m)) * ph.e_half_theta(-m1 * m2)});
    }
  return TorusElement::from_terms(theta, trunc_tol, std::move(terms));
}

FixedReport is_fixed_by(const TorusElement& x, const Multiplier& mult, double tol) {
  FixedReport rep;
  rep.residual_s = max_abs_diff(heisenberg_act(mult.gen_s, x), x);
  rep.residual_r = max_abs_diff(heisenberg_act(mult.gen_r, x), x);
  rep.fixed = rep.residual_s < tol && rep.residual_r < tol;
  return rep;
}

double fixedness_truncation(const Multiplier& mult, double sup_f, double tol) {
  const auto ev = mult.omega.im_eigenvalues();
  const double lambda = ev[0], norm = ev[1];
  auto len = [](Index2 v) { return std::hypot(double(v.m1), double(v.m2)); };
  const double shift = std::max(len(mult.lattice.s()), len(mult.lattice.r()));
  const double target = std::log(tol / 10);
  const long budget = radius_budget();
  for (int k = 14; k <= 300; ++k) {
    const double t = std::pow(10.0, -k);
    const long M = gaussian_tail_radius(lambda, sup_f, t, budget);
    const double amplified = std::log(t) + 2 * kPi * std::sqrt(2.0) * double(M) * norm * shift;
    const double edge = M > shift ? std::log(sup_f) - kPi * lambda * (M - shift) * (M - shift) : 0.0;
    if (amplified <= target && edge <= target) return t;
  }
  throw RadiusBudgetExceeded("no truncation threshold within 1e-300 certifies fixedness", budget + 1, budget);
}

}  // namespace qtheta
