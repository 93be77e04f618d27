#pragma once

// Stretch functions f(z) = g(r) e^{i theta}.
//
// With h = g/r the Wirtinger derivatives have moduli
//   |df| = |g' + h| / 2,   |dbar f| = |g' - h| / 2,   |df| + |dbar f| = max(h, |g'|),
// so every integrand built from L or Phi_p is radial. A profile is stored as a
// list of analytic pieces (power laws and straight segments) and integrals
// are evaluated piece by piece, either in closed form or by adaptive
// quadrature with the branch switches of L as panel boundaries.

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "burkholder/functions.hpp"
#include "burkholder/rng.hpp"

namespace burkholder {

/// g(r) = c r^alpha on [0, 1], c r^-beta on [1, inf).
struct PowerParams {
  double c;
  double alpha;
  double beta;
};

/// Linear interpolation of (radii[k], values[k]) with radii[0] = 0 and
/// values[0] = 0, continued past the last knot r_K by g_K (r_K / r)^tail_beta.
struct SampledParams {
  std::vector<double> radii;
  std::vector<double> values;
  double tail_beta;
};

/// g restricted to [a, b] (b may be +inf): coeff * r^expo for a power piece,
/// intercept + slope * r for a linear piece.
struct ProfilePiece {
  enum class Kind { power, linear };
  Kind kind;
  double a;
  double b;
  double coeff = 0.0;
  double expo = 0.0;
  double intercept = 0.0;
  double slope = 0.0;

  double g(double r) const;
  double gprime(double r) const;
};

class StretchProfile {
 public:
  /// Requires c > 0 and alpha, beta in (0, 1].
  static StretchProfile power(double c, double alpha, double beta);
  /// Requires at least two knots, radii strictly increasing from 0, values
  /// nonnegative with values[0] = 0, and tail_beta in (0, 1].
  static StretchProfile sampled(std::vector<double> radii, std::vector<double> values,
                                double tail_beta);

  bool is_power() const { return std::holds_alternative<PowerParams>(params_); }
  const PowerParams& power_params() const { return std::get<PowerParams>(params_); }
  const SampledParams& sampled_params() const { return std::get<SampledParams>(params_); }

  std::span<const ProfilePiece> pieces() const { return pieces_; }
  /// Piece containing r, the right one at a knot.
  const ProfilePiece& piece_at(double r) const;

  double g(double r) const { return piece_at(r).g(r); }
  /// Right derivative at knots.
  double gprime(double r) const { return piece_at(r).gprime(r); }

  /// Whether the integral of (|g'|^p + (g/r)^p) r dr is finite.
  bool finite_energy(double p) const;

 private:
  StretchProfile() = default;
  std::variant<PowerParams, SampledParams> params_;
  std::vector<ProfilePiece> pieces_;
};

struct StretchModuli {
  double dz;     // |df|
  double dzbar;  // |dbar f|

  WirtingerPair pair() const { return WirtingerPair::moduli(dz, dzbar); }
};

/// Moduli of df and dbar f at radius r > 0 (phases are irrelevant to L, Phi_p).
StretchModuli stretch_derivatives(const StretchProfile& g, double r);

struct S1Report {
  bool member;
  /// sup of |g'| - g/r; <= 0 for members.
  double worst_margin;
  double worst_radius;
};

/// Membership in S1: |g'| <= g/r almost everywhere.
S1Report is_S1(const StretchProfile& g);

enum class IntegralMethod { closed_form, quadrature };

/// Integral over the plane of L(df, dbar f). Throws std::domain_error when the
/// Dirichlet energy diverges.
double integral_L_stretch(const StretchProfile& g,
                          IntegralMethod method = IntegralMethod::closed_form);

/// Integral of Phi_p(df, dbar f), or of Phi_p(dbar f, df) when conjugate is
/// set. Power pieces are exact in closed_form mode; straight segments always
/// use quadrature. Throws std::domain_error when the p-energy diverges.
double integral_Phi_stretch(const StretchProfile& g, const Exponent& p, bool conjugate,
                            IntegralMethod method = IntegralMethod::closed_form);

/// 2 pi times the integral of r Phi_p(moduli(r)) weight(r) dr for a bounded
/// weight. Near 0 and infinity the weight is frozen at the cut radius and the
/// rest of the power law is integrated exactly.
double integral_Phi_stretch_weighted(const StretchProfile& g, const Exponent& p, bool conjugate,
                                     const std::function<double(double)>& weight);

/// sup {r : g(r) >= r}, which is 0 when g < r on (0, inf).
double find_R(const StretchProfile& g);

/// A maximal interval of {r > R : g' > 1} (sign +1) or {r > R : g' < -1}
/// (sign -1), with 1/2 [(r1 -+ g(r1))^2 - (r2 -+ g(r2))^2] and the quadrature
/// value of the integral of (r G - g g') over it; the two agree.
struct TelescopingInterval {
  double r1;
  double r2;
  int sign;
  double telescoped;
  double integral;
};

std::vector<TelescopingInterval> telescoping_intervals(const StretchProfile& g);

/// Integrals of |df_a|^p and |dbar f_a|^p over the plane for
/// f_a(z) = z |z|^{-2a} inside the unit disk and 1/conj(z) outside.
struct FalphaIntegrals {
  double dz;
  double dzbar;
};

FalphaIntegrals falpha_integrals(const Exponent& p, double alpha);

/// Ratio of the two integrals; tends to (p - 1)^p as alpha -> 1/p.
/// Requires 0 < alpha < 1/p.
double falpha_ratio(const Exponent& p, double alpha);

std::string profile_to_json(const StretchProfile& g);
StretchProfile profile_from_json(std::string_view text);

/// c in (0, 2], alpha and beta in [alpha_min, 1].
StretchProfile random_power_profile(Rng& rng, double alpha_min = 0.02, double beta_min = 0.02);

/// Between 2 and 12 segments of random slope, including steep ones; the tail
/// exponent is in [tail_min, 1].
StretchProfile random_sampled_profile(Rng& rng, double tail_min = 0.05);

}  // namespace burkholder
