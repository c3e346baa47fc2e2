#pragma once

// Classical one-variable theta functions with rational characteristics,
//   theta[a; b](z, t) = sum_n e(1/2 (n + a)^2 t + (n + a)(z + b)).

#include <complex>
#include <cstdint>

#include <boost/rational.hpp>

namespace qtheta {

using Rational = boost::rational<std::int64_t>;

struct ThetaCharacteristic {
  Rational a;
  Rational b;
};

// Smallest R >= |Im z| / Im t + log(2) / (2 pi Im t) with 4 exp(-pi Im t R^2 + 2 pi |Im z| R) < tol.
// Past R successive terms shrink by at least half, so the two tails together
// stay below tol.
long classical_theta_radius(std::complex<double> z, std::complex<double> t, double tol);

// Sum over |n + a| <= radius.
std::complex<double> classical_theta_at_radius(const ThetaCharacteristic& ch, std::complex<double> z,
                                               std::complex<double> t, long radius);

std::complex<double> classical_theta(const ThetaCharacteristic& ch, std::complex<double> z, std::complex<double> t,
                                     double tol = 1e-15);

}  // namespace qtheta
