#include "qtheta/qarith.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <regex>
#include <sstream>
#include <utility>

#include <boost/integer/common_factor_rt.hpp>

#include "qtheta/error.hpp"

namespace qtheta {

namespace {

BigInt big_abs(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

BigInt big_gcd(const BigInt& x, const BigInt& y) { return boost::multiprecision::gcd(big_abs(x), big_abs(y)); }

// floor(x / y) for y != 0.
BigInt floor_div(const BigInt& x, const BigInt& y) {
  BigInt q = x / y;
  if ((x % y != 0) && ((x < 0) != (y < 0))) q -= 1;
  return q;
}

int sgn(const BigInt& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

// Sign of p + q sqrt(D) for non-square D > 1.
int sign_pq(const BigInt& p, const BigInt& q, std::int64_t D) {
  int sp = sgn(p), sq = sgn(q);
  if (sq == 0) return sp;
  if (sp == 0 || sp == sq) return sq;
  BigInt lhs = p * p;
  BigInt rhs = q * q * D;
  return lhs > rhs ? sp : sq;
}

void require_same_field(const QuadraticNumber& x, const QuadraticNumber& y) {
  if (x.D() != y.D())
    throw DomainError("quadratic numbers from different fields: D = " + std::to_string(x.D()) + " and D = " +
                      std::to_string(y.D()));
}

BigInt parse_big(const std::string& s) {
  std::string t;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  if (t.empty() || t == "+" || t == "-") throw DomainError("malformed integer literal '" + s + "'");
  return BigInt(t);
}

}  // namespace

std::int64_t to_int64(const BigInt& x) {
  if (x > std::numeric_limits<std::int64_t>::max() || x < std::numeric_limits<std::int64_t>::min())
    throw DomainError("integer " + x.str() + " does not fit in 64 bits");
  return x.convert_to<std::int64_t>();
}

QuadraticNumber::QuadraticNumber(BigInt p, BigInt q, BigInt r, std::int64_t D)
    : p_(std::move(p)), q_(std::move(q)), r_(std::move(r)), D_(D) {
  canonicalize();
}

void QuadraticNumber::canonicalize() {
  if (r_ == 0) throw DomainError("zero denominator");
  if (D_ <= 1) throw DomainError("D must be > 1, got " + std::to_string(D_));
  for (std::int64_t k = 2; k * k <= D_; ++k) {
    while (D_ % (k * k) == 0) {
      D_ /= k * k;
      q_ *= k;
    }
  }
  if (D_ == 1) throw DomainError("D is a perfect square; not a quadratic field");
  if (r_ < 0) {
    p_ = -p_;
    q_ = -q_;
    r_ = -r_;
  }
  BigInt g = big_gcd(big_gcd(p_, q_), r_);
  if (g > 1) {
    p_ /= g;
    q_ /= g;
    r_ /= g;
  }
}

QuadraticNumber QuadraticNumber::integer(const BigInt& n, std::int64_t D) { return QuadraticNumber(n, 0, 1, D); }

QuadraticNumber QuadraticNumber::rational(const BigInt& num, const BigInt& den, std::int64_t D) {
  return QuadraticNumber(num, 0, den, D);
}

QuadraticNumber QuadraticNumber::parse(std::string_view text) {
  static const std::regex re(
      R"(^\s*\(\s*([+-]?\s*\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\s*\(\s*(\d+)\s*\)\s*\)\s*/\s*([+-]?\s*\d+)\s*$)");
  std::string s(text);
  std::smatch m;
  if (!std::regex_match(s, m, re))
    throw DomainError("cannot parse quadratic irrational '" + s + "'; expected (p+q*sqrt(D))/r");
  BigInt p = parse_big(m[1]);
  BigInt q = parse_big(m[3]);
  if (m[2] == "-") q = -q;
  BigInt D = parse_big(m[4]);
  BigInt r = parse_big(m[5]);
  return QuadraticNumber(p, q, r, to_int64(D));
}

int QuadraticNumber::sign() const { return sign_pq(p_, q_, D_); }

QuadraticNumber QuadraticNumber::conjugate() const { return QuadraticNumber(p_, -q_, r_, D_); }

QuadraticNumber QuadraticNumber::operator-() const { return QuadraticNumber(-p_, -q_, r_, D_); }

HighFloat QuadraticNumber::to_high() const {
  HighFloat s = boost::multiprecision::sqrt(HighFloat(D_));
  return (HighFloat(p_) + HighFloat(q_) * s) / HighFloat(r_);
}

double QuadraticNumber::to_double() const { return to_high().convert_to<double>(); }

DoubleDouble QuadraticNumber::to_double_double() const {
  HighFloat v = to_high();
  double hi = v.convert_to<double>();
  double lo = HighFloat(v - hi).convert_to<double>();
  return {hi, lo};
}

std::string QuadraticNumber::to_string() const {
  std::ostringstream os;
  os << "(" << p_ << (q_ < 0 ? "-" : "+") << big_abs(q_) << "*sqrt(" << D_ << "))/" << r_;
  return os.str();
}

QuadraticNumber operator+(const QuadraticNumber& x, const QuadraticNumber& y) {
  require_same_field(x, y);
  return QuadraticNumber(x.p_ * y.r_ + y.p_ * x.r_, x.q_ * y.r_ + y.q_ * x.r_, x.r_ * y.r_, x.D_);
}

QuadraticNumber operator-(const QuadraticNumber& x, const QuadraticNumber& y) { return x + (-y); }

QuadraticNumber operator*(const QuadraticNumber& x, const QuadraticNumber& y) {
  require_same_field(x, y);
  return QuadraticNumber(x.p_ * y.p_ + x.q_ * y.q_ * x.D_, x.p_ * y.q_ + x.q_ * y.p_, x.r_ * y.r_, x.D_);
}

QuadraticNumber operator/(const QuadraticNumber& x, const QuadraticNumber& y) {
  require_same_field(x, y);
  if (y.is_zero()) throw DomainError("division by zero");
  // x / y = x * conj(y) * r_y / (r_x * (p_y^2 - q_y^2 D))
  BigInt norm = y.p_ * y.p_ - y.q_ * y.q_ * y.D_;
  BigInt P = x.p_ * y.p_ - x.q_ * y.q_ * x.D_;
  BigInt Q = x.q_ * y.p_ - x.p_ * y.q_;
  return QuadraticNumber(P * y.r_, Q * y.r_, x.r_ * norm, x.D_);
}

bool operator==(const QuadraticNumber& x, const QuadraticNumber& y) {
  return x.D_ == y.D_ && x.p_ == y.p_ && x.q_ == y.q_ && x.r_ == y.r_;
}

std::strong_ordering operator<=>(const QuadraticNumber& x, const QuadraticNumber& y) {
  int s = (x - y).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

QuadraticNumber pow(const QuadraticNumber& x, unsigned n) {
  QuadraticNumber result = QuadraticNumber::integer(1, x.D());
  QuadraticNumber base = x;
  while (n) {
    if (n & 1u) result = result * base;
    base = base * base;
    n >>= 1u;
  }
  return result;
}

QuadraticIrrational::QuadraticIrrational(QuadraticNumber value) : value_(std::move(value)) {
  if (value_.is_rational()) throw DomainError("value " + value_.to_string() + " is rational");
}

bool IntMatrix2::is_plus_minus_identity() const {
  return b == 0 && c == 0 && ((a == 1 && d == 1) || (a == -1 && d == -1));
}

IntMatrix2 IntMatrix2::inverse() const {
  BigInt dt = det();
  if (dt != 1 && dt != -1) throw DomainError("matrix " + to_string() + " is not invertible over Z");
  return {d * dt, -b * dt, -c * dt, a * dt};
}

std::string IntMatrix2::to_string() const {
  std::ostringstream os;
  os << "(" << a << " " << b << "; " << c << " " << d << ")";
  return os.str();
}

IntMatrix2 operator*(const IntMatrix2& x, const IntMatrix2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

IntMatrix2 pow(const IntMatrix2& g, unsigned n) {
  IntMatrix2 result;
  IntMatrix2 base = g;
  while (n) {
    if (n & 1u) result = result * base;
    base = base * base;
    n >>= 1u;
  }
  return result;
}

QuadraticNumber mobius_apply(const IntMatrix2& g, const QuadraticNumber& x) {
  const std::int64_t D = x.D();
  QuadraticNumber den = QuadraticNumber::integer(g.c, D) * x + QuadraticNumber::integer(g.d, D);
  if (den.is_zero()) throw DomainError("pole: c x + d = 0");
  QuadraticNumber num = QuadraticNumber::integer(g.a, D) * x + QuadraticNumber::integer(g.b, D);
  return num / den;
}

ContinuedFraction continued_fraction_expand(const QuadraticIrrational& x, std::size_t max_terms) {
  const QuadraticNumber& v = x.value();
  // Write x = (P + sqrt(d)) / Q with Q | d - P^2.
  BigInt d = v.q() * v.q() * v.D();
  BigInt P = v.q() > 0 ? v.p() : BigInt(-v.p());
  BigInt Q = v.q() > 0 ? v.r() : BigInt(-v.r());
  if ((d - P * P) % Q != 0) {
    BigInt aq = big_abs(Q);
    P *= aq;
    d *= Q * Q;
    Q *= aq;
  }
  const BigInt s = boost::multiprecision::sqrt(d);

  std::vector<BigInt> terms;
  std::map<std::pair<BigInt, BigInt>, std::size_t> seen;
  for (std::size_t i = 0; i < max_terms; ++i) {
    auto [it, inserted] = seen.emplace(std::make_pair(P, Q), i);
    if (!inserted) {
      std::size_t j = it->second;
      ContinuedFraction cf;
      cf.preperiod.assign(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(j));
      cf.period.assign(terms.begin() + static_cast<std::ptrdiff_t>(j), terms.end());
      return cf;
    }
    BigInt a = Q > 0 ? floor_div(P + s, Q) : floor_div(-P - s - 1, -Q);
    terms.push_back(a);
    P = a * Q - P;
    Q = (d - P * P) / Q;
  }
  throw Error("continued fraction period not found within " + std::to_string(max_terms) + " terms");
}

namespace {

IntMatrix2 cf_product(const std::vector<BigInt>& terms) {
  IntMatrix2 m;
  for (const auto& a : terms) m = m * IntMatrix2{a, 1, 1, 0};
  return m;
}

}  // namespace

QuadraticNumber continued_fraction_value(const ContinuedFraction& cf) {
  if (cf.period.empty()) throw DomainError("empty period");
  // The purely periodic tail y solves y = M y, i.e. c y^2 + (d - a) y - b = 0.
  IntMatrix2 M = cf_product(cf.period);
  BigInt disc = (M.a - M.d) * (M.a - M.d) + 4 * M.b * M.c;
  BigInt k = 1;
  BigInt D = disc;
  for (BigInt f = 2; f * f <= D; ++f) {
    while (D % (f * f) == 0) {
      D /= f * f;
      k *= f;
    }
  }
  QuadraticNumber y(M.a - M.d, k, 2 * M.c, to_int64(D));
  return mobius_apply(cf_product(cf.preperiod), y);
}

IntMatrix2 stabilizer_matrix(const QuadraticIrrational& x) {
  ContinuedFraction cf = continued_fraction_expand(x);
  IntMatrix2 pre = cf_product(cf.preperiod);
  IntMatrix2 per = cf_product(cf.period);
  if (per.det() == -1) per = per * per;
  IntMatrix2 g = pre * per * pre.inverse();
  if (g.det() != 1 || g.is_plus_minus_identity() || mobius_apply(g, x) != x.value())
    throw Error("stabilizer construction failed for " + x.to_string());
  return g;
}

std::optional<std::string> s_theta_violation(const IntMatrix2& g, const QuadraticIrrational& theta) {
  if (g.det() != 1) return "det(g) = " + g.det().str() + " != 1";
  if (g.is_plus_minus_identity()) return std::string("g = +-1");
  if (mobius_apply(g, theta) != theta.value()) return "g theta != theta";
  if (g.trace() <= 0) return "tr(g) = " + g.trace().str() + " <= 0";
  if (g.c <= 0) return "c = " + g.c.str() + " <= 0";
  return std::nullopt;
}

bool in_S_theta(const IntMatrix2& g, const QuadraticIrrational& theta) { return !s_theta_violation(g, theta); }

IntMatrix2 s_theta_representative(const QuadraticIrrational& theta) {
  IntMatrix2 g = stabilizer_matrix(theta);
  IntMatrix2 gi = g.inverse();
  for (const IntMatrix2& h : {g, gi, IntMatrix2(-g), IntMatrix2(-gi)})
    if (in_S_theta(h, theta)) return h;
  throw Error("no sign/inverse of the stabilizer lies in S_theta for " + theta.to_string());
}

QuadraticNumber conjugate_gap_squared(const QuadraticIrrational& theta) {
  const QuadraticNumber& t = theta.value();
  return QuadraticNumber::rational(4 * t.q() * t.q() * t.D(), t.r() * t.r(), t.D());
}

bool trace_gap_identity_holds(const IntMatrix2& g, const QuadraticIrrational& theta) {
  const QuadraticNumber& t = theta.value();
  BigInt tr = g.trace();
  return tr * tr * t.r() * t.r() == g.c * g.c * 4 * t.q() * t.q() * t.D() + 4 * t.r() * t.r();
}

std::vector<BigInt> c_sequence(const IntMatrix2& g, unsigned count) {
  std::vector<BigInt> c{0};
  if (count >= 1) c.push_back(g.c);
  BigInt tr = g.trace();
  for (unsigned k = 1; k < count; ++k) c.push_back(tr * c[k] - c[k - 1]);
  return c;
}

PowerEntries power_entries(const IntMatrix2& g, const QuadraticIrrational& theta, unsigned n) {
  if (n == 0) throw DomainError("power_entries requires n >= 1");
  if (auto why = s_theta_violation(g, theta)) throw DomainError("g not in S_theta: " + *why);
  IntMatrix2 h = pow(g, n);
  if (c_sequence(g, n)[n] != h.c) throw Error("c_n from g^n disagrees with the recurrence");
  const std::int64_t D = theta.D();
  QuadraticNumber eps = QuadraticNumber::integer(h.c, D) * theta.value() + QuadraticNumber::integer(h.d, D);
  QuadraticNumber eps1 = QuadraticNumber::integer(g.c, D) * theta.value() + QuadraticNumber::integer(g.d, D);
  if (eps != pow(eps1, n)) throw Error("eps_n != eps_1^n");
  return {n, h.a, h.b, h.c, h.d, eps};
}

IntMatrix2 find_generating_g(const QuadraticIrrational& theta, int epsilon) {
  const QuadraticNumber& t = theta.value();
  if (4 * t.q() * t.q() * t.D() >= t.r() * t.r())
    throw DomainError("|theta - theta'| >= 1 for theta = " + theta.to_string() +
                      ": no g in S_theta with c >= a + d + epsilon exists");
  IntMatrix2 g = s_theta_representative(theta);
  IntMatrix2 h = g;
  for (int n = 1; n <= 256; ++n, h = h * g) {
    if (h.c > h.a + h.d + epsilon) {
      if (!trace_gap_identity_holds(h, theta)) throw Error("trace identity fails for " + h.to_string());
      return h;
    }
  }
  throw Error("bound c > a + d + epsilon not reached within 256 powers");
}

}  // namespace qtheta
