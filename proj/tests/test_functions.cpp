#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "burkholder/functions.hpp"
#include "burkholder/rng.hpp"

using namespace burkholder;

namespace {

WirtingerPair P(double a, double b) { return WirtingerPair::moduli(a, b); }

Complex random_complex(Rng& rng, double scale) {
  return std::polar(rng.uniform(0.0, scale), rng.angle());
}

}  // namespace

TEST(EvalL, BranchValues) {
  EXPECT_DOUBLE_EQ(eval_L(P(0, 0)), 0.0);
  EXPECT_NEAR(eval_L(P(0.5, 0.3)), 0.16, 1e-15);
  EXPECT_DOUBLE_EQ(eval_L(P(1, 1)), 1.0);
  EXPECT_NEAR(eval_L(P(0.6, 0.4)), 0.2, 1e-15);
  EXPECT_NEAR(eval_L(P(0.6 + 1e-12, 0.4)), 0.2, 1e-11);
}

TEST(EvalL, DependsOnlyOnModuli) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Complex z = random_complex(rng, 1.5), w = random_complex(rng, 1.5);
    EXPECT_DOUBLE_EQ(eval_L({z, w}), eval_L(P(std::abs(z), std::abs(w))));
  }
}

TEST(EvalL, RejectsNonFinite) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(eval_L({Complex(nan, 0), 0.0}), std::invalid_argument);
  EXPECT_THROW(eval_M({0.0, Complex(0, INFINITY)}), std::invalid_argument);
  EXPECT_THROW(eval_Phi({0.0, Complex(nan, 0)}, Exponent(3)), std::invalid_argument);
}

TEST(EvalM, Values) {
  EXPECT_DOUBLE_EQ(eval_M(P(0.5, 0.3)), 0.0);
  EXPECT_DOUBLE_EQ(eval_M(P(1, 1)), 1.0);
  EXPECT_DOUBLE_EQ(eval_M(P(2, 0)), -1.0);
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(0, 2), b = rng.uniform(0, 2);
    EXPECT_NEAR(eval_M(P(a, b)), eval_L(P(a, b)) - (a * a - b * b), 1e-14);
  }
}

TEST(ExponentTest, Constants) {
  const Exponent p2(2.0), p4(4.0), p15(1.5);
  EXPECT_DOUBLE_EQ(p2.pstar(), 2.0);
  EXPECT_DOUBLE_EQ(p2.alpha(), 1.0);
  EXPECT_DOUBLE_EQ(p4.pstar(), 4.0);
  EXPECT_NEAR(p4.alpha(), 27.0 / 16.0, 1e-15);
  EXPECT_DOUBLE_EQ(p15.pstar(), 3.0);
  EXPECT_DOUBLE_EQ(p15.conjugate(), 3.0);
  for (double p : {1.1, 1.7, 2.5, 6.0}) {
    const Exponent e(p);
    EXPECT_NEAR(e.pstar(), Exponent(e.conjugate()).pstar(), 1e-12);
    EXPECT_GE(e.pstar(), 2.0);
    EXPECT_GT(e.alpha(), 0.0);
  }
}

TEST(ExponentTest, RejectsInvalid) {
  EXPECT_THROW(Exponent(1.0), std::invalid_argument);
  EXPECT_THROW(Exponent(0.5), std::invalid_argument);
  EXPECT_THROW(Exponent{std::numeric_limits<double>::quiet_NaN()}, std::invalid_argument);
  EXPECT_THROW(Exponent{std::numeric_limits<double>::infinity()}, std::invalid_argument);
}

TEST(EvalPhi, Values) {
  EXPECT_NEAR(eval_Phi(P(3, 1), Exponent(2)), 8.0, 1e-14);
  EXPECT_NEAR(eval_Phi(P(1, 0), Exponent(3)), 8.0 / 3.0, 1e-15);
  for (double p : {1.2, 3.0, 7.0}) EXPECT_DOUBLE_EQ(eval_Phi(P(0, 0), Exponent(p)), 0.0);
  // Phi_p(0, w) = -alpha_p |w|^p.
  const Exponent p4(4.0);
  EXPECT_NEAR(eval_Phi(P(0, 1.3), p4), -p4.alpha() * std::pow(1.3, 4), 1e-13);
}

TEST(EvalPhi, CollapsesAtTwo) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(0, 3), b = rng.uniform(0, 3);
    EXPECT_NEAR(eval_Phi(P(a, b), Exponent(2)), a * a - b * b, 1e-13);
  }
}

TEST(EvalPhi, Homogeneous) {
  Rng rng(6);
  for (double p : {1.3, 2.7, 4.0}) {
    const Exponent e(p);
    for (int i = 0; i < 50; ++i) {
      const double a = rng.uniform(0, 2), b = rng.uniform(0, 2), t = rng.uniform(0.1, 5);
      const double lhs = eval_Phi(P(t * a, t * b), e);
      const double rhs = std::pow(t, p) * eval_Phi(P(a, b), e);
      EXPECT_NEAR(lhs, rhs, 1e-12 * (1 + std::abs(rhs)));
    }
  }
}

TEST(GradL, HandValues) {
  const auto g = grad_L(P(0.3, 0.2));
  EXPECT_NEAR(g[0], 0.6, 1e-15);
  EXPECT_NEAR(g[1], 0.0, 1e-15);
  EXPECT_NEAR(g[2], -0.4, 1e-15);
  EXPECT_NEAR(g[3], 0.0, 1e-15);
  const auto h = grad_L(P(2, 0));
  EXPECT_NEAR(h[0], 2.0, 1e-15);
  EXPECT_NEAR(h[1], 0.0, 1e-15);
  EXPECT_NEAR(h[2], 0.0, 1e-15);
  EXPECT_NEAR(h[3], 0.0, 1e-15);
}

TEST(GradL, MatchesFiniteDifferences) {
  Rng rng(7);
  const double h = 1e-6;
  int checked = 0;
  while (checked < 300) {
    const Complex z = random_complex(rng, 1.2), w = random_complex(rng, 1.2);
    const double s = std::abs(z) + std::abs(w);
    if (std::abs(s - 1.0) < 1e-3 || std::abs(z) < 1e-3) continue;
    const auto g = grad_L({z, w});
    const std::array<Complex, 4> dz{1.0, Complex(0, 1), 0.0, 0.0};
    const std::array<Complex, 4> dw{0.0, 0.0, 1.0, Complex(0, 1)};
    for (int k = 0; k < 4; ++k) {
      const double fd = (eval_L({z + h * dz[k], w + h * dw[k]}) -
                         eval_L({z - h * dz[k], w - h * dw[k]})) / (2 * h);
      EXPECT_NEAR(g[k], fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
    ++checked;
  }
}

TEST(MatrixToWirtinger, Examples) {
  const auto id = matrix_to_wirtinger({1, 0, 0, 1});
  EXPECT_EQ(id.z, Complex(1, 0));
  EXPECT_EQ(id.w, Complex(0, 0));
  const auto r1 = matrix_to_wirtinger({1, 0, 0, 0});
  EXPECT_EQ(r1.z, Complex(0.5, 0));
  EXPECT_EQ(r1.w, Complex(0.5, 0));
  const auto rot = matrix_to_wirtinger({0, -1, 1, 0});
  EXPECT_EQ(rot.z, Complex(0, 1));
  EXPECT_EQ(rot.w, Complex(0, 0));
}

TEST(MatrixToWirtinger, ActsAsTheLinearMap) {
  // A (x, y)^T must equal z h + w conj(h) for h = x + i y.
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const Mat2 A{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const auto [z, w] = matrix_to_wirtinger(A);
    const double x = rng.uniform(-1, 1), y = rng.uniform(-1, 1);
    const Complex h(x, y);
    const Complex image = z * h + w * std::conj(h);
    EXPECT_NEAR(image.real(), A.a * x + A.b * y, 1e-14);
    EXPECT_NEAR(image.imag(), A.c * x + A.d * y, 1e-14);
    EXPECT_NEAR(std::norm(z) - std::norm(w), A.det(), 1e-13);
  }
}

TEST(MatrixToWirtinger, RankOneHasEqualModuli) {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const double u0 = rng.uniform(-1, 1), u1 = rng.uniform(-1, 1);
    const double v0 = rng.uniform(-1, 1), v1 = rng.uniform(-1, 1);
    const auto [z, w] = matrix_to_wirtinger({u0 * v0, u0 * v1, u1 * v0, u1 * v1});
    EXPECT_NEAR(std::abs(z), std::abs(w), 1e-14);
  }
}

TEST(EvalL1, Examples) {
  EXPECT_DOUBLE_EQ(eval_L1({1, 0, 0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(eval_L1({0, 0, 0, 0}), 0.0);
  EXPECT_NEAR(eval_L1({3, 0, 0, 3}), 5.0, 1e-14);
  EXPECT_NEAR(eval_L1_det_form({3, 0, 0, 3}), 5.0, 1e-14);
  EXPECT_TRUE(in_E({1, 0, 0, 1}));
  EXPECT_FALSE(in_E({3, 0, 0, 3}));
}

TEST(EvalL1, DetFormAgrees) {
  Rng rng(10);
  for (int i = 0; i < 1000; ++i) {
    const double s = rng.log_uniform(0.05, 20);
    const Mat2 A{s * rng.uniform(-1, 1), s * rng.uniform(-1, 1), s * rng.uniform(-1, 1),
                 s * rng.uniform(-1, 1)};
    EXPECT_NEAR(eval_L1(A), eval_L1_det_form(A), 1e-12 * (1 + A.norm_sq()));
  }
}

TEST(EvalL1, RejectsNonFinite) {
  EXPECT_THROW(eval_L1({NAN, 0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(eval_L1_det_form({0, INFINITY, 0, 0}), std::invalid_argument);
}
