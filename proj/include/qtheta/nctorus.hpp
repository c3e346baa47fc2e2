#pragma once

// Truncated elements of the quantum torus A_theta (UV = e(theta) VU), the
// Heisenberg action on them, multipliers L(L, Omega) and quantum theta series.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "qtheta/qarith.hpp"

namespace qtheta {

using cplx = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;

// e(x) = exp(2 pi i x); the real part of x is reduced mod 1 first.
cplx e(double x);
cplx e(cplx z);

struct Index2 {
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;

  friend auto operator<=>(const Index2&, const Index2&) = default;
  friend Index2 operator+(Index2 a, Index2 b) { return {a.m1 + b.m1, a.m2 + b.m2}; }
  friend Index2 operator-(Index2 a, Index2 b) { return {a.m1 - b.m1, a.m2 - b.m2}; }
  Index2 operator-() const { return {-m1, -m2}; }
  std::int64_t linf() const { return std::max(m1 < 0 ? -m1 : m1, m2 < 0 ? -m2 : m2); }
};

// e(k theta) and e(k theta / 2) with theta held as a double-double, so that
// k theta mod 1 keeps full double accuracy for |k| up to ~1e15.
class PhaseEvaluator {
 public:
  explicit PhaseEvaluator(const QuadraticIrrational& theta);

  double frac_theta(std::int64_t k) const { return frac(theta_, k); }
  double frac_half_theta(std::int64_t k) const { return frac(half_, k); }
  cplx e_theta(std::int64_t k) const;
  cplx e_half_theta(std::int64_t k) const;
  double theta() const { return theta_.hi; }

 private:
  static double frac(const DoubleDouble& x, std::int64_t k);
  DoubleDouble theta_;
  DoubleDouble half_;
};

struct Term {
  Index2 m;
  cplx a;
};

// Finitely supported sum of a_m U^{m1} V^{m2}. Terms are kept sorted by
// (m1, m2) and none has magnitude below trunc_tol.
class TorusElement {
 public:
  TorusElement(const QuadraticIrrational& theta, double trunc_tol);

  static TorusElement monomial(const QuadraticIrrational& theta, double trunc_tol, Index2 m, cplx a = 1.0);
  // Duplicated indices are summed.
  static TorusElement from_terms(const QuadraticIrrational& theta, double trunc_tol, std::vector<Term> terms);

  const QuadraticIrrational& theta() const { return theta_; }
  double trunc_tol() const { return tol_; }
  const PhaseEvaluator& phases() const { return phases_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  cplx coeff(Index2 m) const;
  double max_abs() const;
  // Same theta, new truncation threshold; drops terms below it.
  TorusElement retruncated(double trunc_tol) const;

 private:
  QuadraticIrrational theta_;
  double tol_;
  PhaseEvaluator phases_;
  std::vector<Term> terms_;
};

// Throws DomainError unless x and y share theta and trunc_tol.
void require_compatible(const TorusElement& x, const TorusElement& y);

TorusElement te_mul(const TorusElement& x, const TorusElement& y);
TorusElement te_adjoint(const TorusElement& x);
TorusElement te_add(const TorusElement& x, const TorusElement& y);
TorusElement te_sub(const TorusElement& x, const TorusElement& y);
TorusElement te_scale(const TorusElement& x, cplx s);

// Largest |x_m - y_m| over the union of supports.
double max_abs_diff(const TorusElement& x, const TorusElement& y);

// (alpha; x; m) acting by  a -> alpha U^{m1}V^{m2} sum_n e(n.x) a_n U^{n1}V^{n2}.
// The shift is x + (theta/2) * half_theta; the integer part is kept apart so
// the theta contribution is evaluated through the double-double phases.
struct HeisenbergElement {
  cplx alpha = 1.0;
  std::array<cplx, 2> x{};
  Index2 m;
  std::array<std::int64_t, 2> half_theta{};
};

TorusElement heisenberg_act(const HeisenbergElement& h, const TorusElement& a);

// Symmetric complex 2x2 matrix with positive definite imaginary part.
class Siegel2 {
 public:
  Siegel2(cplx o11, cplx o12, cplx o22);

  cplx o11() const { return o11_; }
  cplx o12() const { return o12_; }
  cplx o22() const { return o22_; }
  Eigen::Matrix2cd matrix() const;
  Eigen::Vector2d im_eigenvalues() const;  // ascending
  // 1/2 m^t Omega m
  cplx half_quadratic(Index2 m) const;
  Siegel2 scaled(cplx s) const { return Siegel2(s * o11_, s * o12_, s * o22_); }

 private:
  cplx o11_, o12_, o22_;
};

// (i / (2 Im tau)) (|tau|^2, -Re tau; -Re tau, 1)
Siegel2 siegel_from_tau(cplx tau);

// Rank-2 sublattice L of Z^2 in Hermite normal form: basis (A, B), (0, C) with
// A, C > 0 and 0 <= B < C. Coset representatives are [0, A) x [0, C).
class Lattice2 {
 public:
  Lattice2(Index2 s, Index2 r);

  Index2 s() const { return s_; }
  Index2 r() const { return r_; }
  std::int64_t index() const { return A_ * C_; }
  Index2 reduce(Index2 m) const;
  // Position of reduce(m) in representatives().
  std::size_t coset_id(Index2 m) const;
  std::vector<Index2> representatives() const;
  bool contains(Index2 m) const { return reduce(m) == Index2{}; }

 private:
  Index2 s_, r_;
  std::int64_t A_, B_, C_;
};

// L-periodic function Z^2 -> C stored on coset representatives.
class LatticeFunction {
 public:
  explicit LatticeFunction(Lattice2 lattice);
  LatticeFunction(Lattice2 lattice, const std::function<cplx(Index2)>& on_representatives);

  const Lattice2& lattice() const { return lattice_; }
  cplx operator()(Index2 m) const { return values_[lattice_.coset_id(m)]; }
  cplx& at_representative(std::size_t k) { return values_[k]; }
  const std::vector<cplx>& values() const { return values_; }
  double sup() const;

 private:
  Lattice2 lattice_;
  std::vector<cplx> values_;
};

struct Multiplier {
  Lattice2 lattice;
  Siegel2 omega;
  QuadraticIrrational theta;
  HeisenbergElement gen_s;
  HeisenbergElement gen_r;
};

// Generators (e(1/2 s^t A^t s); A s; s) with A = (theta/2) J + Omega,
// J = (0 1; -1 0). Theta[f](Omega) is fixed by the generator attached to s
// only up to the phase e(theta s1 s2 / 2), so exact fixedness needs s1 s2 = 0
// and r1 r2 = 0.
Multiplier build_multiplier(Index2 s, Index2 r, const Siegel2& omega, const QuadraticIrrational& theta);

std::int64_t gamma_dimension(const Multiplier& mult);

// QTHETA_RADIUS_BUDGET from the environment, default 256.
long radius_budget();

// Smallest M with scale * sum_{j > M} 8 j exp(-pi lambda j^2) < tol. This
// bounds the Gaussian tail over {|m|_inf > M} when lambda is the smallest
// eigenvalue of the quadratic form. Throws RadiusBudgetExceeded past budget.
long gaussian_tail_radius(double lambda, double scale, double tol, long budget);

// sum_{|m|_inf <= M} f(m) e(1/2 m^t Omega m) e(-theta/2 m1 m2) U^{m1}V^{m2}.
TorusElement theta_series(const LatticeFunction& f, const Siegel2& omega, const QuadraticIrrational& theta,
                          double trunc_tol);

struct FixedReport {
  bool fixed = false;
  double residual_s = 0.0;
  double residual_r = 0.0;
  double residual() const { return std::max(residual_s, residual_r); }
};

FixedReport is_fixed_by(const TorusElement& x, const Multiplier& mult, double tol);

// Truncation threshold for building an element whose fixedness under mult is
// to be checked at tolerance tol: the generators amplify dropped terms by up
// to exp(2 pi |n| |Im Omega| |s|), so the threshold must undercut that.
double fixedness_truncation(const Multiplier& mult, double sup_f, double tol);

}  // namespace qtheta
