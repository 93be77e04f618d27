#include "burkholder/identities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "burkholder/optimizer.hpp"
#include "burkholder/quadrature.hpp"

namespace burkholder {

namespace {

// Truncated ends of the t integrals are dropped once their analytic bound
// is below this fraction of the natural scale.
constexpr double kTruncation = 1e-15;

quad::Options identity_options(double scale) {
  quad::Options o;
  o.abs_tol = 1e-14 * scale;
  o.rel_tol = 1e-12;
  o.max_subdivisions = 8000;
  return o;
}

// Smallest t_lo = s 10^-k (k = 1, 2, ...) with bound(t_lo) <= target.
template <class Bound>
double lower_cut(double s, double target, Bound bound) {
  double t = 0.1 * s;
  while (bound(t) > target && t > 1e-300) t *= 0.1;
  return t;
}

}  // namespace

double IdentityCheck::relative_error() const {
  return std::abs(lhs - rhs) / std::max(std::abs(rhs), scale);
}

IdentityCheck check_identity_12a(Complex z, Complex w, double p) {
  if (!(p > 1.0 && p < 2.0)) throw std::invalid_argument("integral identity for 1 < p < 2 needs 1 < p < 2");
  const Exponent ex(p);
  const double a = std::abs(z), b = std::abs(w), s = a + b;
  if (s == 0.0) throw std::invalid_argument("integral identity for 1 < p < 2 needs (z, w) != (0, 0)");
  const double coef = 1.0 / (0.5 * p * (2.0 - p) * ex.alpha());
  const double scale = coef * ex.alpha() * std::pow(s, p);
  const double target = kTruncation * scale;

  // t < s: t^{p-1}(2a/t - 1); t > s: t^{p-3}(a^2 - b^2).
  const double t_lo = lower_cut(s, target, [&](double t) {
    return 2.0 * a * std::pow(t, p - 1.0) / (p - 1.0) + std::pow(t, p) / p;
  });
  double t_hi = 10.0 * s;
  while (std::abs(a * a - b * b) * std::pow(t_hi, p - 2.0) / (2.0 - p) > target && t_hi < 1e300) {
    t_hi *= 10.0;
  }
  auto integrand = [&](double t) {
    return std::pow(t, p - 1.0) * eval_L(WirtingerPair::moduli(a / t, b / t));
  };
  const auto opts = identity_options(scale);
  const double lhs = quad::integrate_log(integrand, t_lo, s, opts).value +
                     quad::integrate_log(integrand, s, t_hi, opts).value;
  return {lhs, coef * eval_Phi({z, w}, ex), scale};
}

IdentityCheck check_identity_12b(Complex z, Complex w, double p) {
  if (!(p > 2.0) || !std::isfinite(p)) throw std::invalid_argument("integral identity for p > 2 needs p > 2");
  const Exponent ex(p);
  const double a = std::abs(z), b = std::abs(w), s = a + b;
  if (s == 0.0) throw std::invalid_argument("integral identity for p > 2 needs (z, w) != (0, 0)");
  const double coef = 1.0 / (0.5 * p * (p - 1.0) * (p - 2.0) * ex.alpha());
  const double scale = coef * ex.alpha() * std::pow(s, p);

  // M(w/t, z/t) vanishes for t >= s; below s,
  // t^{p-1} M = (a^2 - b^2) t^{p-3} + 2 b t^{p-2} - t^{p-1}.
  const double t_lo = lower_cut(s, kTruncation * scale, [&](double t) {
    return std::abs(a * a - b * b) * std::pow(t, p - 2.0) / (p - 2.0) +
           2.0 * b * std::pow(t, p - 1.0) / (p - 1.0) + std::pow(t, p) / p;
  });
  auto integrand = [&](double t) {
    return std::pow(t, p - 1.0) * eval_M(WirtingerPair::moduli(b / t, a / t));
  };
  const double lhs = quad::integrate_log(integrand, t_lo, s, identity_options(scale)).value;
  return {lhs, coef * eval_Phi({z, w}, ex), scale};
}

double phi_upper_bound_gap(Complex z, Complex w, const Exponent& p) {
  const double a = std::abs(z), b = std::abs(w);
  return std::pow(p.pstar() - 1.0, p.p()) * std::pow(a, p.p()) - std::pow(b, p.p()) -
         eval_Phi({z, w}, p);
}

RankOneProbe random_rank_one_probe(Rng& rng) {
  RankOneProbe probe;
  probe.A = {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
             rng.uniform(-1.5, 1.5)};
  const double theta = rng.angle(), phi = rng.angle();
  const double s = rng.log_uniform(1e-2, 1e2);
  const double u0 = std::cos(theta), u1 = std::sin(theta);
  const double v0 = std::cos(phi), v1 = std::sin(phi);
  probe.B = {s * u0 * v0, s * u0 * v1, s * u1 * v0, s * u1 * v1};
  return probe;
}

double rank_one_closed_form(const RankOneProbe& probe, double t) {
  const auto [z1, z2] = matrix_to_wirtinger(probe.A);
  const auto [w1, w2] = matrix_to_wirtinger(probe.B);
  const Complex u1 = z1 + t * w1, u2 = z2 + t * w2;
  if (std::abs(u1) + std::abs(u2) < 1.0) {
    const double a = std::norm(z1) - std::norm(z2);
    const double b = 2.0 * (z1 * std::conj(w1) - z2 * std::conj(w2)).real();
    return a + b * t;
  }
  return 2.0 * std::abs(u1) - 1.0;
}

namespace {

void merge(RankOneReport& into, const RankOneReport& from) {
  into.trials += from.trials;
  into.midpoint_checks += from.midpoint_checks;
  into.violation_count += from.violation_count;
  for (const auto& v : from.violations) {
    if (into.violations.size() < 10) into.violations.push_back(v);
  }
  into.max_midpoint_excess = std::max(into.max_midpoint_excess, from.max_midpoint_excess);
  into.max_closed_form_discrepancy =
      std::max(into.max_closed_form_discrepancy, from.max_closed_form_discrepancy);
  into.max_det_form_discrepancy =
      std::max(into.max_det_form_discrepancy, from.max_det_form_discrepancy);
}

}  // namespace

RankOneReport probe_rank_one(const RankOneProbe& probe, std::span<const double> t_grid,
                             double tolerance) {
  RankOneReport report;
  report.trials = 1;
  auto g = [&probe](double t) { return eval_L1(probe.A + probe.B * t); };
  std::vector<double> values(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const Mat2 M = probe.A + probe.B * t_grid[i];
    values[i] = eval_L1(M);
    report.max_closed_form_discrepancy =
        std::max(report.max_closed_form_discrepancy,
                 std::abs(values[i] - rank_one_closed_form(probe, t_grid[i])));
    report.max_det_form_discrepancy =
        std::max(report.max_det_form_discrepancy, std::abs(values[i] - eval_L1_det_form(M)));
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    for (std::size_t j = i + 1; j < t_grid.size(); ++j) {
      const double tm = 0.5 * (t_grid[i] + t_grid[j]);
      const std::size_t k = (i + j) / 2;
      const double mid = (i + j) % 2 == 0 && t_grid[k] == tm ? values[k] : g(tm);
      const double excess = mid - 0.5 * (values[i] + values[j]);
      ++report.midpoint_checks;
      report.max_midpoint_excess = std::max(report.max_midpoint_excess, excess);
      if (excess > tolerance) {
        ++report.violation_count;
        if (report.violations.size() < 10) {
          report.violations.push_back({probe, t_grid[i], t_grid[j], excess});
        }
      }
    }
  }
  return report;
}

RankOneReport rank_one_convexity_test(int trials, std::uint64_t seed, double tolerance) {
  if (trials < 1) throw std::invalid_argument("rank_one_convexity_test: trials must be >= 1");
  const auto grid = linspace(-5.0, 5.0, 101);
  RankOneReport total;
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    merge(total, probe_rank_one(random_rank_one_probe(rng), grid, tolerance));
  }
  return total;
}

}  // namespace burkholder
