#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "burkholder/quadrature.hpp"
#include "burkholder/radial.hpp"

using namespace burkholder;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 2 pi int r L(|df|, |dbar f|) dr straight from g and g', segment by segment,
// with the tail cut where its contribution is negligible.
double radial_oracle_L(const StretchProfile& g) {
  auto integrand = [&](double r) {
    const double h = g.g(r) / r, d = g.gprime(r);
    return r * eval_L(WirtingerPair::moduli(0.5 * std::abs(d + h), 0.5 * std::abs(d - h)));
  };
  quad::Options o;
  o.abs_tol = 1e-13;
  double total = 0.0;
  const auto& sp = g.sampled_params();
  for (std::size_t k = 0; k + 1 < sp.radii.size(); ++k) {
    // Fine panels keep the kinks where |g'| + g/r crosses 1 local.
    std::vector<double> breaks{sp.radii[k]};
    const int n = 400;
    for (int j = 1; j < n; ++j) breaks.push_back(sp.radii[k] + (sp.radii[k + 1] - sp.radii[k]) * j / n);
    breaks.push_back(sp.radii[k + 1]);
    total += quad::integrate_panels(integrand, breaks, o).value;
  }
  const double rK = sp.radii.back();
  total += quad::integrate_log(integrand, rK, rK * 1e12, o).value;
  return kTwoPi * total;
}

StretchProfile spiky_profile() {
  return StretchProfile::sampled({0.0, 1.0, 1.1, 3.0}, {0.0, 1.0, 3.0, 0.5}, 0.5);
}

}  // namespace

TEST(StretchDerivatives, Identity) {
  const auto g = StretchProfile::power(1.0, 1.0, 1.0);
  for (double r : {0.1, 0.5, 0.99}) {
    const auto m = stretch_derivatives(g, r);
    EXPECT_NEAR(m.dz, 1.0, 1e-15);
    EXPECT_NEAR(m.dzbar, 0.0, 1e-15);
  }
  EXPECT_THROW(stretch_derivatives(g, 0.0), std::invalid_argument);
}

TEST(StretchDerivatives, PowerInterior) {
  const double c = 0.7, a = 0.4;
  const auto g = StretchProfile::power(c, a, 0.5);
  for (double r : {0.01, 0.3, 0.8}) {
    const auto m = stretch_derivatives(g, r);
    EXPECT_NEAR(m.dz, 0.5 * c * (a + 1) * std::pow(r, a - 1), 1e-13);
    EXPECT_NEAR(m.dzbar, 0.5 * c * (1 - a) * std::pow(r, a - 1), 1e-13);
  }
}

TEST(StretchDerivatives, FalphaProfile) {
  const double alpha = 0.2;
  const auto g = StretchProfile::power(1.0, 1.0 - 2 * alpha, 1.0);
  for (double r : {0.05, 0.5}) {
    const auto m = stretch_derivatives(g, r);
    EXPECT_NEAR(m.dz, (1 - alpha) * std::pow(r, -2 * alpha), 1e-13);
    EXPECT_NEAR(m.dzbar, alpha * std::pow(r, -2 * alpha), 1e-13);
  }
}

TEST(StretchDerivatives, SumIsMaxOfSlopes) {
  Rng rng(1);
  for (int i = 0; i < 30; ++i) {
    const auto g = random_sampled_profile(rng);
    for (int j = 0; j < 20; ++j) {
      const double r = rng.log_uniform(1e-3, 50);
      const auto m = stretch_derivatives(g, r);
      EXPECT_NEAR(m.dz + m.dzbar, std::max(g.g(r) / r, std::abs(g.gprime(r))),
                  1e-12 * (1 + m.dz + m.dzbar));
    }
  }
}

TEST(Profiles, Validation) {
  EXPECT_THROW(StretchProfile::power(0.0, 0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(StretchProfile::power(1.0, 1.5, 0.5), std::invalid_argument);
  EXPECT_THROW(StretchProfile::power(1.0, 0.5, 0.0), std::invalid_argument);
  EXPECT_THROW(StretchProfile::sampled({0.0}, {0.0}, 0.5), std::invalid_argument);
  EXPECT_THROW(StretchProfile::sampled({0.1, 1.0}, {0.0, 1.0}, 0.5), std::invalid_argument);
  EXPECT_THROW(StretchProfile::sampled({0.0, 1.0}, {0.2, 1.0}, 0.5), std::invalid_argument);
  EXPECT_THROW(StretchProfile::sampled({0.0, 1.0, 1.0}, {0.0, 1.0, 2.0}, 0.5), std::invalid_argument);
  EXPECT_THROW(StretchProfile::sampled({0.0, 1.0}, {0.0, -1.0}, 0.5), std::invalid_argument);
  EXPECT_THROW(StretchProfile::sampled({0.0, 1.0}, {0.0, 1.0}, 1.5), std::invalid_argument);
}

TEST(Profiles, SampledEvaluation) {
  const auto g = StretchProfile::sampled({0.0, 1.0, 2.0}, {0.0, 2.0, 1.0}, 0.5);
  EXPECT_DOUBLE_EQ(g.g(0.5), 1.0);
  EXPECT_DOUBLE_EQ(g.g(1.5), 1.5);
  EXPECT_DOUBLE_EQ(g.gprime(1.0), -1.0);
  EXPECT_NEAR(g.g(8.0), 1.0 * std::pow(2.0 / 8.0, 0.5), 1e-15);
}

TEST(Profiles, JsonRoundTrip) {
  Rng rng(2);
  for (int i = 0; i < 30; ++i) {
    const auto g = i % 2 ? random_power_profile(rng) : random_sampled_profile(rng);
    const auto h = profile_from_json(profile_to_json(g));
    ASSERT_EQ(h.is_power(), g.is_power());
    for (double r : {0.01, 0.7, 1.0, 3.3, 40.0}) {
      EXPECT_EQ(h.g(r), g.g(r));
      EXPECT_EQ(h.gprime(r), g.gprime(r));
    }
  }
  EXPECT_THROW(profile_from_json("{\"kind\": \"wavy\"}"), std::runtime_error);
  EXPECT_THROW(profile_from_json("[]"), std::runtime_error);
}

TEST(IsS1, PowerFamilyAndEqualityCase) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) EXPECT_TRUE(is_S1(random_power_profile(rng)).member);
  const auto eq = is_S1(StretchProfile::power(1.0, 1.0, 1.0));
  EXPECT_TRUE(eq.member);
  EXPECT_NEAR(eq.worst_margin, 0.0, 1e-12);
}

TEST(IsS1, SteepSegmentViolates) {
  const auto rep = is_S1(spiky_profile());
  EXPECT_FALSE(rep.member);
  EXPECT_GT(rep.worst_margin, 0.0);
  EXPECT_GE(rep.worst_radius, 1.0);
  EXPECT_LE(rep.worst_radius, 1.1);
}

TEST(IntegralL, TheoremOneExamples) {
  const auto half = StretchProfile::power(1.0, 0.5, 0.5);
  EXPECT_NEAR(integral_L_stretch(half), 0.0, 1e-10);
  EXPECT_NEAR(integral_L_stretch(half, IntegralMethod::quadrature), 0.0, 1e-6);
  for (double c : {0.1, 0.5, 1.0}) {
    const auto g = StretchProfile::power(c, 1.0, 1.0);
    EXPECT_NEAR(integral_L_stretch(g), 0.0, 1e-10);
    EXPECT_NEAR(integral_L_stretch(g, IntegralMethod::quadrature), 0.0, 1e-6);
  }
}

TEST(IntegralL, SampledMatchesRadialOracle) {
  Rng rng(4);
  for (int i = 0; i < 15; ++i) {
    const auto g = random_sampled_profile(rng, 0.3);
    const double cf = integral_L_stretch(g);
    const double oracle = radial_oracle_L(g);
    EXPECT_NEAR(cf, oracle, 1e-7 * (1 + std::abs(oracle)));
    EXPECT_NEAR(integral_L_stretch(g, IntegralMethod::quadrature), cf, 1e-8 * (1 + std::abs(cf)));
  }
  const auto spike = spiky_profile();
  EXPECT_NEAR(integral_L_stretch(spike), radial_oracle_L(spike), 1e-7);
}

TEST(IntegralL, TheoremTwoNonnegative) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) EXPECT_GE(integral_L_stretch(random_sampled_profile(rng)), -1e-8);
  EXPECT_GT(integral_L_stretch(spiky_profile()), 0.0);
}

TEST(IntegralPhi, TheoremOneIdentities) {
  Rng rng(6);
  const Exponent p15(1.5), p3(3.0);
  for (int i = 0; i < 50; ++i) {
    const auto g = random_power_profile(rng, 0.4, 0.4);
    EXPECT_NEAR(integral_Phi_stretch(g, p15, false), 0.0, 1e-6);
    EXPECT_NEAR(integral_Phi_stretch(g, p3, true), 0.0, 1e-6);
    EXPECT_NEAR(integral_Phi_stretch(g, p15, false, IntegralMethod::quadrature), 0.0, 1e-6);
    EXPECT_NEAR(integral_Phi_stretch(g, p3, true, IntegralMethod::quadrature), 0.0, 1e-6);
  }
}

TEST(IntegralPhi, SampledNonnegativeAndMethodsAgree) {
  Rng rng(7);
  for (int i = 0; i < 40; ++i) {
    const auto g = random_sampled_profile(rng, 0.4);
    for (double p : {1.5, 3.0}) {
      const double v = integral_Phi_stretch(g, Exponent(p), false);
      EXPECT_GE(v, -1e-8);
      const double q = integral_Phi_stretch(g, Exponent(p), false, IntegralMethod::quadrature);
      EXPECT_NEAR(v, q, 1e-8 * (1 + std::abs(v)));
    }
  }
}

TEST(IntegralPhi, WeightOneIsPlainIntegral) {
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    const auto g = i % 2 ? random_power_profile(rng, 0.4, 0.4) : random_sampled_profile(rng, 0.4);
    for (bool conj : {false, true}) {
      const Exponent p(2.5);
      const double a = integral_Phi_stretch(g, p, conj);
      const double b = integral_Phi_stretch_weighted(g, p, conj, [](double) { return 1.0; });
      EXPECT_NEAR(a, b, 1e-8 * (1 + std::abs(a)));
    }
  }
}

TEST(IntegralPhi, DivergentEnergyRejected) {
  const auto g = StretchProfile::power(1.0, 0.1, 0.5);
  EXPECT_FALSE(g.finite_energy(3.0));
  EXPECT_THROW(integral_Phi_stretch(g, Exponent(3.0), false), std::domain_error);
  const auto slow_tail = StretchProfile::power(1.0, 0.5, 0.1);
  EXPECT_FALSE(slow_tail.finite_energy(1.5));
  EXPECT_TRUE(slow_tail.finite_energy(3.0));
}

TEST(FindR, Examples) {
  EXPECT_DOUBLE_EQ(find_R(StretchProfile::power(1.0, 1.0, 1.0)), 1.0);
  EXPECT_NEAR(find_R(StretchProfile::power(0.5, 0.5, 0.5)), 0.25, 1e-15);
  EXPECT_EQ(find_R(StretchProfile::power(0.5, 1.0, 1.0)), 0.0);
  EXPECT_NEAR(find_R(StretchProfile::sampled({0.0, 1.0, 2.0}, {0.0, 3.0, 0.0}, 0.5)), 1.5, 1e-15);
}

TEST(Telescoping, AgreesWithQuadratureAndIsNonnegative) {
  Rng rng(9);
  int seen = 0;
  for (int i = 0; i < 60; ++i) {
    const auto g = random_sampled_profile(rng);
    const double R = find_R(g);
    for (const auto& iv : telescoping_intervals(g)) {
      ++seen;
      EXPECT_GE(iv.r1, R);
      EXPECT_GE(iv.telescoped, -1e-12);
      EXPECT_NEAR(iv.telescoped, iv.integral, 1e-9 * (1 + std::abs(iv.telescoped)));
      EXPECT_TRUE(iv.sign == 1 || iv.sign == -1);
    }
  }
  EXPECT_GT(seen, 10);
}

TEST(Falpha, ClosedFormMatchesQuadrature) {
  for (double p : {1.5, 3.0}) {
    const Exponent e(p);
    for (double alpha : {0.1, 0.2, 0.3}) {
      if (alpha * p >= 1) continue;
      const auto g = StretchProfile::power(1.0, 1.0 - 2 * alpha, 1.0);
      auto dz = [&](double r) { return r * std::pow(stretch_derivatives(g, r).dz, p); };
      auto dzbar = [&](double r) { return r * std::pow(stretch_derivatives(g, r).dzbar, p); };
      quad::Options o;
      o.abs_tol = 1e-13;
      // Inner pieces behave like r^{1 - 2 alpha p}; the cut at 1e-30 drops
      // less than 1e-30^{2 - 2 alpha p}.
      const double in_dz = quad::integrate_log(dz, 1e-60, 1.0, o).value;
      const double in_dzbar = quad::integrate_log(dzbar, 1e-60, 1.0, o).value;
      const double out_dzbar = quad::integrate_log(dzbar, 1.0, 1e12, o).value;
      const auto v = falpha_integrals(e, alpha);
      EXPECT_NEAR(v.dz, kTwoPi * in_dz, 1e-8 * v.dz);
      EXPECT_NEAR(v.dzbar, kTwoPi * (in_dzbar + out_dzbar), 1e-8 * v.dzbar);
    }
  }
}

TEST(Falpha, RatioSaturates) {
  const Exponent p3(3.0);
  double prev = 0.0;
  for (double alpha : {0.2, 0.3, 0.33, 0.333}) {
    const double r = falpha_ratio(p3, alpha);
    EXPECT_GT(r, prev);
    EXPECT_LT(r, 8.0);
    prev = r;
  }
  EXPECT_NEAR(falpha_ratio(p3, 1.0 / 3.0 - 1e-4), 8.0, 0.4);
  for (double alpha : {0.1, 0.25, 0.4}) EXPECT_NEAR(falpha_ratio(Exponent(2.0), alpha), 1.0, 1e-14);
  EXPECT_THROW(falpha_ratio(p3, 0.34), std::invalid_argument);
  EXPECT_THROW(falpha_ratio(p3, 0.0), std::invalid_argument);
}

TEST(RandomProfiles, Deterministic) {
  Rng a(10), b(10);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(profile_to_json(random_sampled_profile(a)), profile_to_json(random_sampled_profile(b)));
    EXPECT_EQ(profile_to_json(random_power_profile(a)), profile_to_json(random_power_profile(b)));
  }
}
