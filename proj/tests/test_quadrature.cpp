#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "burkholder/quadrature.hpp"

using namespace burkholder;

TEST(Integrate, Polynomials) {
  const auto r = quad::integrate([](double x) { return x * x * x - 2 * x + 1; }, -1.0, 3.0);
  EXPECT_NEAR(r.value, 20.0 - 8.0 + 4.0, 1e-12);
  EXPECT_TRUE(r.converged);
}

TEST(Integrate, Oscillatory) {
  const auto r = quad::integrate([](double x) { return std::sin(x); }, 0.0, 20.0 * std::numbers::pi);
  EXPECT_NEAR(r.value, 0.0, 1e-11);
}

TEST(Integrate, EndpointSingularity) {
  quad::Options o;
  o.abs_tol = 1e-10;
  const auto r = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, o);
  EXPECT_NEAR(r.value, 2.0, 1e-8);
}

TEST(Integrate, Kink) {
  const std::vector<double> breaks{-1.0, 0.3, 2.0};
  auto f = [](double x) { return std::abs(x - 0.3); };
  const auto r = quad::integrate_panels(f, breaks);
  EXPECT_NEAR(r.value, 0.5 * 1.3 * 1.3 + 0.5 * 1.7 * 1.7, 1e-13);
}

TEST(Integrate, ReversedInterval) {
  const auto a = quad::integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
  const auto b = quad::integrate([](double x) { return std::exp(x); }, 1.0, 0.0);
  EXPECT_NEAR(a.value, -b.value, 1e-14);
}

TEST(Integrate, RejectsNonFinite) {
  EXPECT_THROW(quad::integrate([](double) { return NAN; }, 0.0, 1.0), std::domain_error);
}

TEST(IntegrateLog, PowerLawOverDecades) {
  const auto r = quad::integrate_log([](double x) { return std::pow(x, -1.5); }, 1e-3, 1e6);
  const double exact = 2.0 * (std::pow(1e-3, -0.5) - std::pow(1e6, -0.5));
  EXPECT_NEAR(r.value, exact, 1e-10 * exact);
}

TEST(CircleMean, TrigonometricPolynomials) {
  EXPECT_NEAR(quad::circle_mean([](double t) { return std::cos(3 * t) + 2.0; }, 16), 2.0, 1e-15);
  EXPECT_NEAR(quad::circle_mean([](double t) { return std::pow(std::sin(t), 2); }, 16), 0.5, 1e-15);
  // exp(cos t) has mean I_0(1).
  EXPECT_NEAR(quad::circle_mean([](double t) { return std::exp(std::cos(t)); }, 64),
              std::cyl_bessel_i(0.0, 1.0), 1e-15);
}
