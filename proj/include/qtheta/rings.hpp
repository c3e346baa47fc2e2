#pragma once

// The graded rings E = sum E_n (star product) and R = sum R_n of inner
// products, with rank-based dimension, generation and quadraticity checks.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtheta/bimodule.hpp"

namespace qtheta {

class RingContext {
 public:
  // Geometries for grades 1..max_grade are built up front.
  RingContext(const IntMatrix2& g, const QuadraticIrrational& theta, cplx tau, double trunc_tol = 1e-14,
              unsigned max_grade = 4);

  const IntMatrix2& g() const { return g_; }
  const QuadraticIrrational& theta() const { return theta_; }
  cplx tau() const { return tau_; }
  double trunc_tol() const { return trunc_tol_; }
  // Cached for n <= max_grade, built on demand otherwise.
  GeometryPtr geometry(unsigned n) const;
  std::int64_t c(unsigned n) const { return geometry(n)->cn; }

 private:
  IntMatrix2 g_;
  QuadraticIrrational theta_;
  cplx tau_;
  double trunc_tol_;
  std::vector<GeometryPtr> geoms_;
};

// sum_{ij} M_ij <phi_{e_i}, phi_{e_j}> in grade n.
struct RingElementR {
  unsigned n;
  Eigen::MatrixXcd M;
};

// Singular values above rel_tol times the largest.
long numerical_rank(const Eigen::MatrixXcd& A, double rel_tol = 1e-8);
// Orthonormal basis of the numerical null space of A.
Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& A, double rel_tol = 1e-8);

std::vector<HolomorphicVector> e_basis(const RingContext& ctx, unsigned n);

// Column i c_m + k holds the coefficients of e_i * e_k in grade n + m.
Eigen::MatrixXcd star_table(const RingContext& ctx, unsigned n, unsigned m);

// Coefficient of the torus view at index m.
cplx r_view_coefficient(const RingElementR& x, const RingContext& ctx, Index2 m);
TorusElement r_view_box(const RingElementR& x, const RingContext& ctx, long radius, double trunc_tol);
// Truncated at trunc_tol (the context value when omitted).
TorusElement r_view(const RingElementR& x, const RingContext& ctx, std::optional<double> trunc_tol = std::nullopt);

// P = B (M kron N) B^H with B = star_table(n, m).
RingElementR r_star(const RingElementR& x, const RingElementR& y, const RingContext& ctx);

struct RankReport {
  std::string check;
  unsigned grade = 0;
  long rank = 0;
  long expected = 0;
  double residual_max = 0;
  bool pass = false;
  bool untestable = false;
};

// Rank of the views of all <e_i, e_j> flattened on |m|_inf <= ceil(c_n / 2).
RankReport dimension_check_R(const RingContext& ctx, unsigned n);

enum class RingKind { E, R };

// One report per grade 2..N. A grade whose rank matrix would exceed
// 64 * radius_budget()^2 entries is reported untestable.
std::vector<RankReport> generation_check(const RingContext& ctx, RingKind ring, unsigned N = 3);

struct QuadraticityReport {
  long dim_K2 = 0;
  long dim_K3 = 0;
  long span_rank = 0;
  // Ratio of the smallest kept to the largest dropped singular value in the
  // K3 computation; small values mean the null space is ill conditioned.
  double spectral_gap = 0;
  bool quadratic = false;
};

QuadraticityReport quadraticity_check(const RingContext& ctx);

// c >= a + d + epsilon
bool polishchuk_predicate(const IntMatrix2& g, int epsilon);

struct MultiplierFixedness {
  double residual_max = 0;
  long worst_i = -1, worst_j = -1;
  bool pass = false;
};

struct QuantumThetaReport {
  unsigned grade = 0;
  bool omega_in_siegel = false;
  // L(c_n Z^2, Omega / (c_n eps_n))
  MultiplierFixedness stated;
  // L(c_n Z^2, Omega / (c_n eps_n) + (a_n / (2 c_n)) sigma_x)
  MultiplierFixedness twisted;
};

Multiplier stated_multiplier(const RingContext& ctx, unsigned n);
Multiplier twisted_multiplier(const RingContext& ctx, unsigned n);

// Views of every <e_i, e_j> in grade n against both multipliers. Each view is
// built at the truncation returned by fixedness_truncation.
QuantumThetaReport quantum_theta_suite(const RingContext& ctx, unsigned n, double tol);

}  // namespace qtheta
