#include "qtheta/theta.hpp"

#include <cmath>

#include "qtheta/error.hpp"
#include "qtheta/nctorus.hpp"

namespace qtheta {

namespace {

double to_double(const Rational& r) { return double(r.numerator()) / double(r.denominator()); }

}  // namespace

long classical_theta_radius(std::complex<double> z, std::complex<double> t, double tol) {
  const double s = t.imag();
  if (!(s > 0)) throw DomainError("Im tau must be positive");
  const double b = std::abs(z.imag());
  long R = static_cast<long>(std::ceil(b / s + std::log(2.0) / (2 * kPi * s)));
  while (std::log(4.0) - kPi * s * double(R) * double(R) + 2 * kPi * b * double(R) >= std::log(tol)) ++R;
  return R;
}

std::complex<double> classical_theta_at_radius(const ThetaCharacteristic& ch, std::complex<double> z,
                                               std::complex<double> t, long radius) {
  if (!(t.imag() > 0)) throw DomainError("Im tau must be positive");
  const double a = to_double(ch.a);
  const double b = to_double(ch.b);
  const long lo = static_cast<long>(std::floor(-a - radius));
  const long hi = static_cast<long>(std::ceil(-a + radius));
  std::complex<double> sum = 0.0;
  for (long n = lo; n <= hi; ++n) {
    const double y = double(n) + a;
    if (std::abs(y) > double(radius)) continue;
    sum += e(0.5 * y * y * t + y * (z + b));
  }
  return sum;
}

std::complex<double> classical_theta(const ThetaCharacteristic& ch, std::complex<double> z, std::complex<double> t,
                                     double tol) {
  return classical_theta_at_radius(ch, z, t, classical_theta_radius(z, t, tol));
}

}  // namespace qtheta
