#include "burkholder/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "burkholder/quadrature.hpp"
#include "power_integral.hpp"
#include "json.hpp"

namespace burkholder {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Tolerances of the quadrature path. Caps are the closed-form remainders on
// [0, r_in] and [r_out, inf); cuts move outward until a cap is below
// kCapBound or the radius reaches the double-precision range limits.
constexpr double kAbsTol = 1e-11;
constexpr double kCapBound = 1e-12;
constexpr double kSmallestCut = 1e-290;
constexpr double kLargestCut = 1e290;

using detail::power_integral;

StretchModuli piece_moduli(const ProfilePiece& piece, double r) {
  const double h = piece.g(r) / r;
  const double gp = piece.gprime(r);
  return {0.5 * std::abs(gp + h), 0.5 * std::abs(gp - h)};
}

bool piece_in_E(const ProfilePiece& piece, double r) {
  return std::max(piece.g(r) / r, std::abs(piece.gprime(r))) > 1.0;
}

// Radii in (lo, hi) where max(g/r, |g'|) crosses 1.
std::vector<double> E_boundaries(const ProfilePiece& piece, double lo, double hi) {
  std::vector<double> out;
  double root = -1.0;
  if (piece.kind == ProfilePiece::Kind::power) {
    if (piece.coeff > 0.0 && piece.expo != 1.0) {
      root = std::pow(piece.coeff * std::max(1.0, std::abs(piece.expo)), 1.0 / (1.0 - piece.expo));
    }
  } else if (std::abs(piece.slope) <= 1.0 && piece.slope != 1.0) {
    root = piece.intercept / (1.0 - piece.slope);
  }
  if (root > lo && root < hi) out.push_back(root);
  return out;
}

// Radius where g' + g/r changes sign on a linear piece (the kink of |df|).
std::vector<double> linear_kinks(const ProfilePiece& piece, double lo, double hi) {
  std::vector<double> out;
  if (piece.kind == ProfilePiece::Kind::linear && piece.slope != 0.0) {
    const double r0 = -piece.intercept / (2.0 * piece.slope);
    if (r0 > lo && r0 < hi) out.push_back(r0);
  }
  return out;
}

std::vector<double> sorted_breaks(double lo, double hi, std::vector<double> inner) {
  inner.push_back(lo);
  inner.push_back(hi);
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  return inner;
}

double sample_point(double u, double v) {
  if (std::isinf(v)) return u > 0.0 ? 2.0 * u : 1.0;
  return 0.5 * (u + v);
}

// Integral of r G(r) on a sub-interval lying inside E.
double closed_L_in_E(const ProfilePiece& piece, double u, double v) {
  const double quad_term = 0.5 * (v * v - u * u);
  if (piece.kind == ProfilePiece::Kind::power) {
    // r G = k |e + 1| r^e - r
    const double lin = piece.coeff * std::abs(piece.expo + 1.0);
    return (lin == 0.0 ? 0.0 : lin * power_integral(piece.expo, u, v)) - quad_term;
  }
  // r G = |A + 2 s r| - r
  const double A = piece.intercept;
  const double s = piece.slope;
  double total = -quad_term;
  const auto cuts = sorted_breaks(u, v, linear_kinks(piece, u, v));
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const double sigma = (A + s * (a + b)) >= 0.0 ? 1.0 : -1.0;
    total += sigma * (A * (b - a) + s * (b * b - a * a));
  }
  return total;
}

// Exact integral of r L(df, dbar f) over [lo, hi] within one piece.
double closed_L_piece(const ProfilePiece& piece, double lo, double hi) {
  const auto cuts = sorted_breaks(lo, hi, E_boundaries(piece, lo, hi));
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double u = cuts[i], v = cuts[i + 1];
    if (piece_in_E(piece, sample_point(u, v))) {
      total += closed_L_in_E(piece, u, v);
    } else {
      // r G = g g'
      const double gv = piece.g(v), gu = piece.g(u);
      total += 0.5 * (gv * gv - gu * gu);
    }
  }
  return total;
}

// Exact integral of r Phi_p over [lo, hi] on a power piece.
double closed_Phi_power(const ProfilePiece& piece, const Exponent& p, bool conjugate, double lo,
                        double hi) {
  const double k = piece.coeff, e = piece.expo;
  StretchModuli unit{0.5 * std::abs(e + 1.0) * k, 0.5 * std::abs(e - 1.0) * k};
  if (conjugate) std::swap(unit.dz, unit.dzbar);
  const double phi0 = eval_Phi(unit.pair(), p);
  if (phi0 == 0.0) return 0.0;
  return phi0 * power_integral(p.p() * (e - 1.0) + 1.0, lo, hi);
}

quad::Options quad_options(double abs_tol) {
  quad::Options o;
  o.abs_tol = abs_tol;
  o.rel_tol = 1e-13;
  o.max_subdivisions = 8000;
  return o;
}

// Integral of `integrand` over [lo, hi] within one piece with the given
// interior breakpoints; power pieces are integrated in log r.
double quad_piece(const ProfilePiece& piece, const quad::Integrand& integrand, double lo,
                  double hi, std::vector<double> inner) {
  const auto cuts = sorted_breaks(lo, hi, std::move(inner));
  const auto opts = quad_options(kAbsTol / static_cast<double>(cuts.size()));
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const bool log_scale = piece.kind == ProfilePiece::Kind::power && cuts[i] > 0.0 &&
                           cuts[i + 1] / cuts[i] > 4.0;
    total += log_scale ? quad::integrate_log(integrand, cuts[i], cuts[i + 1], opts).value
                       : quad::integrate(integrand, cuts[i], cuts[i + 1], opts).value;
  }
  return total;
}

// Quadrature over a whole piece. Unbounded or singular ends of a power piece
// are cut where cap(0, r_in) resp. cap(r_out, inf) is negligible and the caps
// are added as `cap(...) * end_weight(cut)`.
double quad_piece_with_caps(const ProfilePiece& piece, const quad::Integrand& integrand,
                            const std::function<double(double, double)>& cap,
                            const std::function<double(double)>& end_weight,
                            const std::function<std::vector<double>(double, double)>& breaks) {
  double lo = piece.a, hi = piece.b;
  double total = 0.0;
  if (piece.kind == ProfilePiece::Kind::power && lo == 0.0) {
    double cut = std::min(1e-6 * hi, 1e-6);
    while (std::abs(cap(0.0, cut)) > kCapBound && cut > kSmallestCut) cut *= 1e-4;
    total += cap(0.0, cut) * end_weight(cut);
    lo = cut;
  }
  if (std::isinf(hi)) {
    double cut = std::max(1e6 * lo, 1e6);
    while (std::abs(cap(cut, kInf)) > kCapBound && cut < kLargestCut) cut *= 1e4;
    total += cap(cut, kInf) * end_weight(cut);
    hi = cut;
  }
  return total + quad_piece(piece, integrand, lo, hi, breaks(lo, hi));
}

void require_energy(const StretchProfile& g, double p) {
  if (!g.finite_energy(p)) {
    throw std::domain_error("stretch profile has divergent p-energy for p = " + std::to_string(p));
  }
}

}  // namespace

double ProfilePiece::g(double r) const {
  if (kind == Kind::power) return coeff == 0.0 ? 0.0 : coeff * std::pow(r, expo);
  return intercept + slope * r;
}

double ProfilePiece::gprime(double r) const {
  if (kind == Kind::power) return coeff == 0.0 ? 0.0 : coeff * expo * std::pow(r, expo - 1.0);
  return slope;
}

StretchProfile StretchProfile::power(double c, double alpha, double beta) {
  if (!(std::isfinite(c) && c > 0.0)) throw std::invalid_argument("power profile: need c > 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("power profile: need alpha in (0, 1]");
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("power profile: need beta in (0, 1]");
  StretchProfile out;
  out.params_ = PowerParams{c, alpha, beta};
  ProfilePiece inner{ProfilePiece::Kind::power, 0.0, 1.0};
  inner.coeff = c;
  inner.expo = alpha;
  ProfilePiece outer{ProfilePiece::Kind::power, 1.0, kInf};
  outer.coeff = c;
  outer.expo = -beta;
  out.pieces_ = {inner, outer};
  return out;
}

StretchProfile StretchProfile::sampled(std::vector<double> radii, std::vector<double> values,
                                       double tail_beta) {
  if (radii.size() < 2 || radii.size() != values.size()) {
    throw std::invalid_argument("sampled profile: need >= 2 knots and matching value count");
  }
  if (radii.front() != 0.0 || values.front() != 0.0) {
    throw std::invalid_argument("sampled profile: first knot must be (0, 0)");
  }
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!std::isfinite(radii[k]) || !std::isfinite(values[k]) || values[k] < 0.0) {
      throw std::invalid_argument("sampled profile: knots must be finite with values >= 0");
    }
    if (k > 0 && !(radii[k] > radii[k - 1])) {
      throw std::invalid_argument("sampled profile: radii must be strictly increasing");
    }
  }
  if (!(tail_beta > 0.0 && tail_beta <= 1.0)) {
    throw std::invalid_argument("sampled profile: need tail_beta in (0, 1]");
  }
  StretchProfile out;
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    ProfilePiece piece{ProfilePiece::Kind::linear, radii[k], radii[k + 1]};
    piece.slope = (values[k + 1] - values[k]) / (radii[k + 1] - radii[k]);
    piece.intercept = values[k] - piece.slope * radii[k];
    out.pieces_.push_back(piece);
  }
  ProfilePiece tail{ProfilePiece::Kind::power, radii.back(), kInf};
  tail.coeff = values.back() * std::pow(radii.back(), tail_beta);
  tail.expo = -tail_beta;
  out.pieces_.push_back(tail);
  out.params_ = SampledParams{std::move(radii), std::move(values), tail_beta};
  return out;
}

const ProfilePiece& StretchProfile::piece_at(double r) const {
  for (const auto& piece : pieces_) {
    if (r < piece.b) return piece;
  }
  return pieces_.back();
}

bool StretchProfile::finite_energy(double p) const {
  for (const auto& piece : pieces_) {
    if (piece.kind != ProfilePiece::Kind::power || piece.coeff == 0.0) continue;
    // r (r^{e-1})^p = r^{p(e-1)+1}
    const double e = p * (piece.expo - 1.0) + 2.0;
    if (piece.a == 0.0 && e <= 0.0) return false;
    if (std::isinf(piece.b) && e >= 0.0) return false;
  }
  return true;
}

StretchModuli stretch_derivatives(const StretchProfile& g, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("stretch_derivatives: need r > 0");
  return piece_moduli(g.piece_at(r), r);
}

S1Report is_S1(const StretchProfile& g) {
  S1Report report{true, -kInf, 0.0};
  auto consider = [&report](double margin, double r) {
    if (margin > report.worst_margin) {
      report.worst_margin = margin;
      report.worst_radius = r;
    }
  };
  // |g'| - g/r is monotone on every piece, so piece endpoints (one-sided
  // limits) bound it.
  for (const auto& piece : g.pieces()) {
    if (piece.kind == ProfilePiece::Kind::power) {
      // factor * r^{e-1} with e < 1: unbounded at 0, vanishing at infinity.
      const double factor = (std::abs(piece.expo) - 1.0) * piece.coeff;
      for (double r : {piece.a, piece.b}) {
        if (factor == 0.0 || std::isinf(r)) {
          consider(0.0, r);
        } else if (r == 0.0) {
          consider(std::copysign(kInf, factor), r);
        } else {
          consider(factor * std::pow(r, piece.expo - 1.0), r);
        }
      }
    } else {
      for (double r : {piece.a, piece.b}) {
        const double h = r == 0.0 ? piece.slope : piece.g(r) / r;  // intercept is 0 at r = 0
        consider(std::abs(piece.slope) - h, r);
      }
    }
  }
  report.member = report.worst_margin <= 1e-12;
  return report;
}

double integral_L_stretch(const StretchProfile& g, IntegralMethod method) {
  require_energy(g, 2.0);
  double total = 0.0;
  for (const auto& piece : g.pieces()) {
    if (method == IntegralMethod::closed_form) {
      total += closed_L_piece(piece, piece.a, piece.b);
      continue;
    }
    auto integrand = [&piece](double r) { return r * eval_L(piece_moduli(piece, r).pair()); };
    auto cap = [&piece](double lo, double hi) { return closed_L_piece(piece, lo, hi); };
    auto breaks = [&piece](double lo, double hi) {
      auto b = E_boundaries(piece, lo, hi);
      const auto k = linear_kinks(piece, lo, hi);
      b.insert(b.end(), k.begin(), k.end());
      return b;
    };
    total += quad_piece_with_caps(piece, integrand, cap, [](double) { return 1.0; }, breaks);
  }
  return kTwoPi * total;
}

namespace {

double phi_pieces(const StretchProfile& g, const Exponent& p, bool conjugate, bool closed,
                  const std::function<double(double)>& weight) {
  double total = 0.0;
  for (const auto& piece : g.pieces()) {
    auto integrand = [&](double r) {
      auto m = piece_moduli(piece, r);
      if (conjugate) std::swap(m.dz, m.dzbar);
      return r * eval_Phi(m.pair(), p) * weight(r);
    };
    if (piece.kind == ProfilePiece::Kind::power) {
      if (closed) {
        total += closed_Phi_power(piece, p, conjugate, piece.a, piece.b);
        continue;
      }
      auto cap = [&](double lo, double hi) { return closed_Phi_power(piece, p, conjugate, lo, hi); };
      total += quad_piece_with_caps(piece, integrand, cap, weight,
                                    [](double, double) { return std::vector<double>{}; });
    } else {
      total += quad_piece(piece, integrand, piece.a, piece.b, linear_kinks(piece, piece.a, piece.b));
    }
  }
  return kTwoPi * total;
}

}  // namespace

double integral_Phi_stretch(const StretchProfile& g, const Exponent& p, bool conjugate,
                            IntegralMethod method) {
  require_energy(g, p.p());
  return phi_pieces(g, p, conjugate, method == IntegralMethod::closed_form,
                    [](double) { return 1.0; });
}

double integral_Phi_stretch_weighted(const StretchProfile& g, const Exponent& p, bool conjugate,
                                     const std::function<double(double)>& weight) {
  require_energy(g, p.p());
  return phi_pieces(g, p, conjugate, false, weight);
}

double find_R(const StretchProfile& g) {
  double R = 0.0;
  for (const auto& piece : g.pieces()) {
    // sup of {r in [a, b] : g(r) >= r}, or nothing.
    double sup = -1.0;
    if (piece.kind == ProfilePiece::Kind::power) {
      if (piece.coeff > 0.0) {
        if (piece.expo == 1.0) {
          if (piece.coeff >= 1.0) sup = piece.b;
        } else {
          const double rho = std::pow(piece.coeff, 1.0 / (1.0 - piece.expo));
          if (rho >= piece.a) sup = std::min(piece.b, rho);
        }
      }
    } else {
      const double A = piece.intercept, s = piece.slope;
      if (s == 1.0) {
        if (A >= 0.0) sup = piece.b;
      } else if (s < 1.0) {
        const double rho = A / (1.0 - s);
        if (rho >= piece.a) sup = std::min(piece.b, rho);
      } else if (piece.g(piece.b) >= piece.b) {
        sup = piece.b;
      }
    }
    R = std::max(R, sup);
  }
  return R;
}

std::vector<TelescopingInterval> telescoping_intervals(const StretchProfile& g) {
  const double R = find_R(g);
  struct Raw {
    double r1, r2;
    int sign;
  };
  std::vector<Raw> raw;
  for (const auto& piece : g.pieces()) {
    double lo = std::max(piece.a, R), hi = piece.b;
    if (!(hi > lo)) continue;
    if (piece.kind == ProfilePiece::Kind::linear) {
      if (std::abs(piece.slope) > 1.0) raw.push_back({lo, hi, piece.slope > 0.0 ? 1 : -1});
      continue;
    }
    if (piece.coeff == 0.0 || piece.expo == 0.0) continue;
    // |g'| = k |e| r^{e-1} is nonincreasing for e <= 1.
    const double k = piece.coeff * std::abs(piece.expo);
    if (piece.expo == 1.0) {
      if (k > 1.0) raw.push_back({lo, hi, 1});
      continue;
    }
    hi = std::min(hi, std::pow(k, 1.0 / (1.0 - piece.expo)));
    if (hi > lo) raw.push_back({lo, hi, piece.expo > 0.0 ? 1 : -1});
  }
  std::vector<Raw> merged;
  for (const auto& r : raw) {
    if (!merged.empty() && merged.back().sign == r.sign && merged.back().r2 == r.r1) {
      merged.back().r2 = r.r2;
    } else {
      merged.push_back(r);
    }
  }
  std::vector<TelescopingInterval> out;
  for (const auto& m : merged) {
    if (std::isinf(m.r2)) throw std::domain_error("telescoping interval reaches infinity");
    const double s = m.sign;
    const double a1 = m.r1 - s * g.g(m.r1);
    const double a2 = m.r2 - s * g.g(m.r2);
    TelescopingInterval t{m.r1, m.r2, m.sign, 0.5 * (a1 * a1 - a2 * a2), 0.0};
    std::vector<double> cuts{m.r1};
    for (const auto& piece : g.pieces()) {
      if (piece.a > m.r1 && piece.a < m.r2) cuts.push_back(piece.a);
    }
    cuts.push_back(m.r2);
    auto integrand = [&g](double r) {
      const auto& piece = g.piece_at(r);
      return r * eval_L(piece_moduli(piece, r).pair()) - piece.g(r) * piece.gprime(r);
    };
    t.integral = quad::integrate_panels(integrand, cuts, quad_options(1e-12)).value;
    out.push_back(t);
  }
  return out;
}

FalphaIntegrals falpha_integrals(const Exponent& p, double alpha) {
  const double pp = p.p();
  if (!(alpha > 0.0 && alpha < 1.0 / pp)) {
    throw std::invalid_argument("falpha: need 0 < alpha < 1/p");
  }
  const double inner = 2.0 - 2.0 * alpha * pp;
  return {kTwoPi * std::pow(1.0 - alpha, pp) / inner,
          kTwoPi * (std::pow(alpha, pp) / inner + 1.0 / (2.0 * pp - 2.0))};
}

double falpha_ratio(const Exponent& p, double alpha) {
  const auto v = falpha_integrals(p, alpha);
  return v.dz / v.dzbar;
}

std::string profile_to_json(const StretchProfile& g) {
  nlohmann::json j;
  if (g.is_power()) {
    const auto& pp = g.power_params();
    j = {{"kind", "power"}, {"c", pp.c}, {"alpha", pp.alpha}, {"beta", pp.beta}};
  } else {
    const auto& sp = g.sampled_params();
    j = {{"kind", "sampled"}, {"radii", sp.radii}, {"values", sp.values}, {"tail_beta", sp.tail_beta}};
  }
  return j.dump();
}

StretchProfile profile_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "power") {
      return StretchProfile::power(j.at("c").get<double>(), j.at("alpha").get<double>(),
                                   j.at("beta").get<double>());
    }
    if (kind == "sampled") {
      return StretchProfile::sampled(j.at("radii").get<std::vector<double>>(),
                                     j.at("values").get<std::vector<double>>(),
                                     j.at("tail_beta").get<double>());
    }
    throw std::runtime_error("profile JSON: unknown kind \"" + kind + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("profile JSON: ") + e.what());
  }
}

StretchProfile random_power_profile(Rng& rng, double alpha_min, double beta_min) {
  const double c = rng.uniform(1e-3, 2.0);
  const double alpha = rng.uniform(alpha_min, 1.0);
  const double beta = rng.uniform(beta_min, 1.0);
  return StretchProfile::power(c, alpha, beta);
}

StretchProfile random_sampled_profile(Rng& rng, double tail_min) {
  const int segments = rng.integer(2, 12);
  const double scale = rng.log_uniform(0.2, 5.0);
  std::vector<double> radii{0.0}, values{0.0};
  for (int k = 0; k < segments; ++k) {
    radii.push_back(radii.back() + scale * rng.uniform(0.05, 1.0));
    values.push_back(rng.uniform() < 0.15 ? 0.0 : rng.uniform(0.0, 3.0 * scale));
  }
  return StretchProfile::sampled(std::move(radii), std::move(values), rng.uniform(tail_min, 1.0));
}

}  // namespace burkholder
