#pragma once

// Exact arithmetic in real quadratic fields Q(sqrt(D)), periodic continued
// fractions of quadratic irrationals, and the integer data attached to a
// hyperbolic stabilizer g of theta (entries of g^n, eigenvalues c_n theta + d_n).

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace qtheta {

using BigInt = boost::multiprecision::cpp_int;
using HighFloat = boost::multiprecision::cpp_bin_float_50;

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2; about 32 significant digits.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;
};

// Narrowing conversion that throws instead of wrapping.
std::int64_t to_int64(const BigInt& x);

// Element (p + q*sqrt(D))/r of Q(sqrt(D)). Always kept in canonical form:
// r > 0, gcd(p, q, r) = 1, D squarefree and > 1. q may be zero (rational).
class QuadraticNumber {
 public:
  QuadraticNumber(BigInt p, BigInt q, BigInt r, std::int64_t D);

  static QuadraticNumber integer(const BigInt& n, std::int64_t D);
  static QuadraticNumber rational(const BigInt& num, const BigInt& den, std::int64_t D);

  // Grammar: "(p+q*sqrt(D))/r" or "(p-q*sqrt(D))/r", integer literals,
  // whitespace allowed between tokens.
  static QuadraticNumber parse(std::string_view text);

  const BigInt& p() const { return p_; }
  const BigInt& q() const { return q_; }
  const BigInt& r() const { return r_; }
  std::int64_t D() const { return D_; }

  bool is_rational() const { return q_ == 0; }
  bool is_zero() const { return p_ == 0 && q_ == 0; }
  int sign() const;

  QuadraticNumber conjugate() const;
  QuadraticNumber operator-() const;

  HighFloat to_high() const;
  double to_double() const;
  DoubleDouble to_double_double() const;
  std::string to_string() const;

  friend QuadraticNumber operator+(const QuadraticNumber& x, const QuadraticNumber& y);
  friend QuadraticNumber operator-(const QuadraticNumber& x, const QuadraticNumber& y);
  friend QuadraticNumber operator*(const QuadraticNumber& x, const QuadraticNumber& y);
  friend QuadraticNumber operator/(const QuadraticNumber& x, const QuadraticNumber& y);
  friend bool operator==(const QuadraticNumber& x, const QuadraticNumber& y);
  friend std::strong_ordering operator<=>(const QuadraticNumber& x, const QuadraticNumber& y);

 private:
  void canonicalize();

  BigInt p_;
  BigInt q_;
  BigInt r_;
  std::int64_t D_;
};

QuadraticNumber pow(const QuadraticNumber& x, unsigned n);

// Quadratic number with q != 0.
class QuadraticIrrational {
 public:
  explicit QuadraticIrrational(QuadraticNumber value);
  QuadraticIrrational(BigInt p, BigInt q, BigInt r, std::int64_t D)
      : QuadraticIrrational(QuadraticNumber(std::move(p), std::move(q), std::move(r), D)) {}

  static QuadraticIrrational parse(std::string_view text) {
    return QuadraticIrrational(QuadraticNumber::parse(text));
  }

  const QuadraticNumber& value() const { return value_; }
  operator const QuadraticNumber&() const { return value_; }  // NOLINT

  std::int64_t D() const { return value_.D(); }
  QuadraticIrrational conjugate() const { return QuadraticIrrational(value_.conjugate()); }
  double to_double() const { return value_.to_double(); }
  std::string to_string() const { return value_.to_string(); }

  friend bool operator==(const QuadraticIrrational& x, const QuadraticIrrational& y) {
    return x.value_ == y.value_;
  }

 private:
  QuadraticNumber value_;
};

struct IntMatrix2 {
  BigInt a = 1, b = 0, c = 0, d = 1;

  static IntMatrix2 identity() { return {}; }

  BigInt det() const { return a * d - b * c; }
  BigInt trace() const { return a + d; }
  bool is_plus_minus_identity() const;
  // Requires det = +-1.
  IntMatrix2 inverse() const;
  IntMatrix2 operator-() const { return {-a, -b, -c, -d}; }
  std::string to_string() const;

  friend IntMatrix2 operator*(const IntMatrix2& x, const IntMatrix2& y);
  friend bool operator==(const IntMatrix2&, const IntMatrix2&) = default;
};

IntMatrix2 pow(const IntMatrix2& g, unsigned n);

// (a x + b)/(c x + d); throws DomainError when c x + d = 0.
QuadraticNumber mobius_apply(const IntMatrix2& g, const QuadraticNumber& x);

struct ContinuedFraction {
  std::vector<BigInt> preperiod;
  std::vector<BigInt> period;
};

// Throws Error when no period is found within max_terms partial quotients.
ContinuedFraction continued_fraction_expand(const QuadraticIrrational& x, std::size_t max_terms = 10000);

// Value of [preperiod; period, period, ...]. The result lives in the field
// Q(sqrt(D')) where D' is the squarefree part of the period discriminant.
QuadraticNumber continued_fraction_value(const ContinuedFraction& cf);

// g in SL2(Z), g != +-1, with g x = x, built from one (or two) periods of the
// continued fraction of x.
IntMatrix2 stabilizer_matrix(const QuadraticIrrational& x);

// Name of the first S_theta condition that g violates, or nullopt if g is in S_theta.
std::optional<std::string> s_theta_violation(const IntMatrix2& g, const QuadraticIrrational& theta);
bool in_S_theta(const IntMatrix2& g, const QuadraticIrrational& theta);

// First of g, g^-1, -g, -g^-1 (g = stabilizer_matrix(theta)) that lies in S_theta.
IntMatrix2 s_theta_representative(const QuadraticIrrational& theta);

// (theta - theta')^2, a positive rational.
QuadraticNumber conjugate_gap_squared(const QuadraticIrrational& theta);

// Exact check of (a+d)^2 = c^2 (theta - theta')^2 + 4.
bool trace_gap_identity_holds(const IntMatrix2& g, const QuadraticIrrational& theta);

struct PowerEntries {
  unsigned n = 1;
  BigInt a, b, c, d;
  QuadraticNumber eps;  // c theta + d, the eigenvalue of g^n on (theta, 1)

  IntMatrix2 matrix() const { return {a, b, c, d}; }
};

// c_0 .. c_count via c_{k+1} = tr(g) c_k - c_{k-1}, c_0 = 0, c_1 = c.
std::vector<BigInt> c_sequence(const IntMatrix2& g, unsigned count);

// Requires g in S_theta. Cross-checks g^n against the recurrence and
// eps_n = eps_1^n; a mismatch throws Error.
PowerEntries power_entries(const IntMatrix2& g, const QuadraticIrrational& theta, unsigned n);

// Element of S_theta with c > a + d + epsilon, found by powering the
// S_theta representative. Throws DomainError when |theta - theta'| >= 1, in
// which case no such g exists.
IntMatrix2 find_generating_g(const QuadraticIrrational& theta, int epsilon);

}  // namespace qtheta
