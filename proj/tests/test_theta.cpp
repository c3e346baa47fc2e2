#include <cmath>

#include "doctest.h"
#include "qtheta/error.hpp"
#include "qtheta/nctorus.hpp"
#include "qtheta/theta.hpp"

using namespace qtheta;

TEST_CASE("theta constant at tau = i") {
  ThetaCharacteristic zero{0, 0};
  double direct = 0;
  for (int n = -40; n <= 40; ++n) direct += std::exp(-kPi * n * n);
  auto v = classical_theta(zero, 0.0, {0, 1});
  CHECK(std::abs(v - direct) < 1e-15);
  CHECK(std::abs(v.real() - 1.0864348112) < 1e-10);
}

TEST_CASE("symmetries") {
  std::complex<double> t(0.3, 0.8);
  ThetaCharacteristic zero{0, 0};
  for (std::complex<double> z : {std::complex<double>(0.2, 0.1), std::complex<double>(-0.7, 0.4)}) {
    CHECK(std::abs(classical_theta(zero, z, t) - classical_theta(zero, -z, t)) < 1e-14);
    for (ThetaCharacteristic ch : {ThetaCharacteristic{Rational(1, 3), Rational(2, 5)},
                                   ThetaCharacteristic{Rational(-7, 25), 0}}) {
      auto lhs = classical_theta(ch, z + 1.0, t);
      auto rhs = e(double(ch.a.numerator()) / double(ch.a.denominator())) * classical_theta(ch, z, t);
      CHECK(std::abs(lhs - rhs) < 1e-13);
    }
  }
}

TEST_CASE("radius M against 2M") {
  for (std::complex<double> t : {std::complex<double>(0, 1), std::complex<double>(0.5, 0.05),
                                 std::complex<double>(-1.2, 3.0)})
    for (std::complex<double> z : {std::complex<double>(0, 0), std::complex<double>(0.3, -0.2)})
      for (ThetaCharacteristic ch : {ThetaCharacteristic{0, 0}, ThetaCharacteristic{Rational(14, 25), Rational(1, 2)}}) {
        const double tol = 1e-13;
        long M = classical_theta_radius(z, t, tol);
        auto a = classical_theta_at_radius(ch, z, t, M);
        auto b = classical_theta_at_radius(ch, z, t, 2 * M);
        CHECK(std::abs(a - b) < tol);
      }
  CHECK_THROWS_AS(classical_theta({0, 0}, 0.0, {1, 0}), DomainError);
}
