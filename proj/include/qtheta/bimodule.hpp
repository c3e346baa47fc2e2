#pragma once

// The bimodules E(g^n, theta) on Gaussian data: the four generator actions,
// L2 pairings, left/right Rieffel inner products, the holomorphic subspaces
// E_n, their star product and the closed-form inner product on E_n.

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "qtheta/nctorus.hpp"
#include "qtheta/qarith.hpp"

namespace qtheta {

struct ModuleGeometry {
  IntMatrix2 g;
  QuadraticIrrational theta;
  cplx tau;
  unsigned n;
  BigInt a, b, c, d;  // entries of g^n
  QuadraticNumber eps;  // c theta + d
  // Machine copies.
  std::int64_t an, bn, cn, dn;
  double eps_d;
  cplx mu;  // tau c / eps
  Siegel2 omega;  // from tau
  Siegel2 omega_n;  // omega / (c eps)
  PhaseEvaluator phases;
};

using GeometryPtr = std::shared_ptr<const ModuleGeometry>;

// Requires g in S_theta and Im tau > 0.
GeometryPtr make_geometry(const IntMatrix2& g, const QuadraticIrrational& theta, cplx tau, unsigned n);

// Same g, theta and tau.
bool same_family(const ModuleGeometry& x, const ModuleGeometry& y);

// f : Z/c_n -> C, standing for phi_f(x, alpha) = e(mu_n x^2 / 2) f(alpha).
struct HolomorphicVector {
  GeometryPtr geom;
  std::vector<cplx> f;

  HolomorphicVector(GeometryPtr geom, std::vector<cplx> f);
  static HolomorphicVector basis(GeometryPtr geom, std::int64_t k);
  cplx operator[](std::int64_t alpha) const;  // alpha taken mod c_n
};

// exp(lw) e(mu x^2 / 2 + beta x) on component alpha. The weight is kept as a
// logarithm so that long translations do not underflow.
struct GaussianTerm {
  std::int64_t alpha;
  cplx lw;
  cplx mu;
  cplx beta;

  cplx weight() const { return std::exp(lw); }
  // log of max_x |term(x)|
  double log_peak() const;
  cplx eval(double x) const;
};

struct GaussianVector {
  std::int64_t c = 1;
  std::vector<GaussianTerm> terms;

  GaussianVector() = default;
  explicit GaussianVector(std::int64_t c) : c(c) {}
  void add(std::int64_t alpha, cplx w, cplx mu, cplx beta);
  void add_log(std::int64_t alpha, cplx lw, cplx mu, cplx beta);
  // Drops terms whose peak magnitude is below tol.
  void prune(double tol);
  cplx eval(double x, std::int64_t alpha) const;
};

GaussianVector embed_holomorphic(const HolomorphicVector& v);

enum class Generator { U_right, V_right, Uprime_left, Vprime_left };
enum class Side { left, right };

// k-th power of one generator (k may be negative).
GaussianTerm apply_generator(const GaussianTerm& t, const ModuleGeometry& geom, Generator which, std::int64_t k = 1);
GaussianVector apply_generator(const GaussianVector& v, const ModuleGeometry& geom, Generator which,
                               std::int64_t k = 1);

// Left: U'^{k1} V'^{k2} t (V' first). Right: t U^{k1} V^{k2} (U first).
GaussianTerm apply_monomial(const GaussianTerm& t, const ModuleGeometry& geom, Side side, Index2 k);
GaussianVector apply_monomial(const GaussianVector& v, const ModuleGeometry& geom, Side side, Index2 k);

GaussianVector apply_torus(const GaussianVector& v, const ModuleGeometry& geom, const TorusElement& a, Side side);

// log of  int exp(lw1) e(mu1 x^2/2 + beta1 x) conj(exp(lw2) e(mu2 x^2/2 + beta2 x)) dx,
// ignoring components.
cplx l2_pair_log(const GaussianTerm& s, const GaussianTerm& t);

// sum_alpha int v(x, alpha) conj(w(x, alpha)) dx
cplx l2_inner(const GaussianVector& v, const GaussianVector& w);

// Left:  sum_k <v, U'^{k1}V'^{k2} w> U^{k1}V^{k2}.
// Right: (c theta + d) sum_k <w, v U^{k1}V^{k2}> U^{k1}V^{k2}.
// Every coefficient dropped by the truncation box is below trunc_tol.
TorusElement rieffel_inner(const GaussianVector& v, const GaussianVector& w, const ModuleGeometry& geom, Side side,
                           double trunc_tol);
cplx rieffel_inner_coefficient(const GaussianVector& v, const GaussianVector& w, const ModuleGeometry& geom,
                               Side side, Index2 k);

// Closed form of the left inner product on E_n:
//   coef(m) = Q(m) e(1/2 m^t Omega_n m) e(-theta/2 m1 m2) e(a_n m1 m2 / (2 c_n)) / sqrt(2 Im mu_n),
//   Q(m) = sum_alpha f(alpha + a_n m1) conj(g(alpha)) e(alpha m2 / c_n).
cplx holo_inner_coefficient(const HolomorphicVector& v, const HolomorphicVector& w, Index2 m);
// Everything in coef(m) except Q(m).
cplx holo_kernel(const ModuleGeometry& geom, Index2 m);
TorusElement holo_inner(const HolomorphicVector& v, const HolomorphicVector& w, double trunc_tol);
// Same coefficients on |m|_inf <= radius, zeros dropped only below trunc_tol.
TorusElement holo_inner_box(const HolomorphicVector& v, const HolomorphicVector& w, long radius, double trunc_tol);

// (u * v)(alpha) = sum_q e(tau/2 c_{n+m}/(c_n c_m) (q - c_m d_{n+m} alpha / c_{n+m})^2)
//                  u(a_n d_{n+m} alpha - q) v(a_m q).
// Throws Error if the values at alpha and alpha + c_{n+m} disagree.
HolomorphicVector star(const HolomorphicVector& u, const HolomorphicVector& v, double trunc_tol = 1e-16);

struct ResidualReport {
  double lhs_norm = 0;
  double rhs_norm = 0;
  double max_abs_diff = 0;
  bool pass = false;
};

// <v, w>_left z  against  v <w, z>_right, compared on x in {-2,-1,0,0.37,1,2}
// and every component.
ResidualReport verify_imprimitivity(const GaussianVector& v, const GaussianVector& w, const GaussianVector& z,
                                    const ModuleGeometry& geom, double tol, double trunc_tol = 1e-14);

// holo_inner(f1 * f2, s1 * s2)  against  left Rieffel product of f1 <f2, s2> with s1,
// coefficient-wise on |m|_inf <= window.
ResidualReport verify_tensor_compatibility(const HolomorphicVector& f1, const HolomorphicVector& s1,
                                           const HolomorphicVector& f2, const HolomorphicVector& s2, double tol,
                                           long window = 12, double trunc_tol = 1e-14);

}  // namespace qtheta
