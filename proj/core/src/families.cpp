#include "burkholder/families.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "burkholder/quadrature.hpp"
#include "json.hpp"
#include "power_integral.hpp"

namespace burkholder {

using detail::power_integral;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex polar(double r, double theta) { return std::polar(r, theta); }

}  // namespace

Complex poly_eval(const Polynomial& c, Complex z) {
  Complex acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Complex poly_derivative(const Polynomial& c, Complex z) {
  Complex acc = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) acc = acc * z + static_cast<double>(j) * c[j];
  return acc;
}

Complex Theorem3Instance::eval(Complex z) const {
  if (std::abs(z) <= 1.0) return a * std::pow(z, k) + b * std::pow(std::conj(z), k);
  return a * std::pow(std::conj(z), -k) + b * std::pow(z, -k);
}

Complex HarmonicInstance::eval(Complex z) const {
  if (std::abs(z) > 1.0) z = 1.0 / std::conj(z);
  return poly_eval(g, z) + std::conj(poly_eval(h, z));
}

double theorem3_boundary_mismatch(const Theorem3Instance& f, int n) {
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const Complex z = polar(1.0, kTwoPi * j / n);
    const Complex inner = f.a * std::pow(z, f.k) + f.b * std::pow(std::conj(z), f.k);
    const Complex outer = f.a * std::pow(std::conj(z), -f.k) + f.b * std::pow(z, -f.k);
    worst = std::max(worst, std::abs(inner - outer));
  }
  return worst;
}

double harmonic_boundary_mismatch(const HarmonicInstance& f, int n) {
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const Complex z = polar(1.0, kTwoPi * j / n);
    const Complex inner = poly_eval(f.g, z) + std::conj(poly_eval(f.h, z));
    const Complex zeta = 1.0 / std::conj(z);
    const Complex outer = poly_eval(f.g, zeta) + std::conj(poly_eval(f.h, zeta));
    worst = std::max(worst, std::abs(inner - outer));
  }
  return worst;
}

namespace {

// Integral of r L(A r^m, B r^m) over [lo, hi].
double radial_L_power(double A, double B, double m, double lo, double hi) {
  const double S = A + B;
  auto inner = [&](double u, double v) {
    return u < v ? (A * A - B * B) * power_integral(2.0 * m + 1.0, u, v) : 0.0;
  };
  auto outer = [&](double u, double v) {
    return u < v ? 2.0 * A * power_integral(m + 1.0, u, v) - 0.5 * (v * v - u * u) : 0.0;
  };
  if (m == 0.0) return S <= 1.0 ? inner(lo, hi) : outer(lo, hi);
  const double rE = std::pow(S, -1.0 / m);
  const double cut = std::clamp(rE, lo, hi);
  return m > 0.0 ? inner(lo, cut) + outer(cut, hi) : outer(lo, cut) + inner(cut, hi);
}

}  // namespace

double theorem3_integral(Complex a, Complex b, int k) {
  if (k < 1) throw std::invalid_argument("theorem3_integral: k must be >= 1");
  const double A = std::abs(a), B = std::abs(b);
  if (A == 0.0 && B == 0.0) throw std::invalid_argument("theorem3_integral: a = b = 0");
  if (!std::isfinite(A) || !std::isfinite(B)) {
    throw std::invalid_argument("theorem3_integral: non-finite coefficient");
  }
  const double kk = k;
  const double in = radial_L_power(A * kk, B * kk, kk - 1.0, 0.0, 1.0);
  const double out = radial_L_power(B * kk, A * kk, -kk - 1.0, 1.0, INFINITY);
  return kTwoPi * (in + out);
}

double theorem3_integral(const Theorem3Instance& f) { return theorem3_integral(f.a, f.b, f.k); }

CircleMeans harmonic_circle_means(const HarmonicInstance& f, double p, double r, int angles) {
  double s1 = 0.0, s2 = 0.0;
  for (int j = 0; j < angles; ++j) {
    const Complex z = polar(r, kTwoPi * j / angles);
    const double gp = std::abs(poly_derivative(f.g, z));
    const double hp = std::abs(poly_derivative(f.h, z));
    const double w = std::pow(gp + hp, p - 1.0);
    s1 += gp * w;
    s2 += hp * w;
  }
  return {s1 / angles, s2 / angles};
}

MonotonicityReport check_circle_means_monotone(const HarmonicInstance& f, double p, int radii,
                                               int angles, double tolerance) {
  if (radii < 2) throw std::invalid_argument("check_circle_means_monotone: radii must be >= 2");
  MonotonicityReport report{true, 0.0};
  CircleMeans prev = harmonic_circle_means(f, p, 0.0, angles);
  for (int i = 1; i < radii; ++i) {
    const double r = static_cast<double>(i) / (radii - 1);
    const CircleMeans cur = harmonic_circle_means(f, p, r, angles);
    const double d1 = (prev.I1 - cur.I1) / std::max(1.0, prev.I1);
    const double d2 = (prev.I2 - cur.I2) / std::max(1.0, prev.I2);
    report.worst_drop = std::max({report.worst_drop, d1, d2});
    prev = cur;
  }
  report.nondecreasing = report.worst_drop <= tolerance;
  return report;
}

double harmonic_family_integral(const Polynomial& g, const Polynomial& h, const Exponent& p,
                                int angles) {
  if (!(p.p() > 2.0)) throw std::invalid_argument("harmonic_family_integral: needs p > 2");
  const HarmonicInstance f{g, h};
  const double q = p.p();
  auto integrand = [&](double r) {
    const CircleMeans m = harmonic_circle_means(f, q, r, angles);
    const double rho = std::pow(r, 2.0 * q - 4.0);
    return (((q - 1.0) - rho) * m.I1 + ((q - 1.0) * rho - 1.0) * m.I2) * r;
  };
  quad::Options opts;
  opts.abs_tol = 1e-13;
  opts.rel_tol = 1e-11;
  return p.alpha() * kTwoPi * quad::integrate(integrand, 0.0, 1.0, opts).value;
}

double composite_family_integral(const Polynomial& F, const StretchProfile& g, const Exponent& p,
                                 bool conjugate, int angles) {
  const double q = p.p();
  auto weight = [&](double r) {
    const double rho = g.g(r);
    return quad::circle_mean(
        [&](double theta) { return std::pow(std::abs(poly_derivative(F, polar(rho, theta))), q); },
        angles);
  };
  return integral_Phi_stretch_weighted(g, p, conjugate, weight);
}

double composite_family_integral(const CompositeInstance& f, const Exponent& p, int angles) {
  return composite_family_integral(f.F, f.g, p, f.conjugate, angles);
}

namespace {

Complex random_coefficient(Rng& rng, double lo, double hi) {
  return polar(rng.log_uniform(lo, hi), rng.angle());
}

Polynomial random_polynomial(Rng& rng, int degree) {
  Polynomial c(static_cast<std::size_t>(degree) + 1);
  for (auto& x : c) x = random_coefficient(rng, 0.05, 2.0);
  return c;
}

}  // namespace

Theorem3Instance random_theorem3_instance(Rng& rng, int max_k) {
  Theorem3Instance f;
  f.a = random_coefficient(rng, 0.05, 5.0);
  f.b = random_coefficient(rng, 0.05, 5.0);
  f.k = static_cast<int>(rng.integer(1, max_k));
  return f;
}

HarmonicInstance random_harmonic_instance(Rng& rng, int max_degree) {
  HarmonicInstance f;
  f.g = random_polynomial(rng, static_cast<int>(rng.integer(0, max_degree)));
  f.h = random_polynomial(rng, static_cast<int>(rng.integer(0, max_degree)));
  return f;
}

CompositeInstance random_composite_instance(Rng& rng) {
  Polynomial F = random_polynomial(rng, static_cast<int>(rng.integer(1, 3)));
  const bool power = rng.uniform() < 0.5;
  StretchProfile g = power ? random_power_profile(rng, 0.4, 0.4) : random_sampled_profile(rng, 0.4);
  const bool conjugate = rng.uniform() < 0.5;
  return {std::move(F), std::move(g), conjugate};
}

std::string polynomial_to_json(const Polynomial& c) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : c) j.push_back({x.real(), x.imag()});
  return j.dump();
}

Polynomial polynomial_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Polynomial c;
    for (const auto& x : j) c.emplace_back(x.at(0).get<double>(), x.at(1).get<double>());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("polynomial JSON: ") + e.what());
  }
}

}  // namespace burkholder
