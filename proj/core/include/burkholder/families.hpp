#pragma once

// Closed families of maps glued across the unit circle.

#include <string>
#include <string_view>
#include <vector>

#include "burkholder/functions.hpp"
#include "burkholder/radial.hpp"
#include "burkholder/rng.hpp"

namespace burkholder {

/// Coefficients c[j] of z^j.
using Polynomial = std::vector<Complex>;

Complex poly_eval(const Polynomial& c, Complex z);
Complex poly_derivative(const Polynomial& c, Complex z);

/// f(z) = a z^k + b conj(z)^k for |z| <= 1 and a conj(z)^-k + b z^-k for |z| >= 1.
struct Theorem3Instance {
  Complex a;
  Complex b;
  int k;

  Complex eval(Complex z) const;
};

/// f = g + conj(h) in the unit disk and f(1/conj(z)) outside.
struct HarmonicInstance {
  Polynomial g;
  Polynomial h;

  Complex eval(Complex z) const;
};

/// F(f1) or conj(F(f1)) for the stretch function f1(z) = g(|z|) z / |z|.
struct CompositeInstance {
  Polynomial F;
  StretchProfile g;
  bool conjugate;
};

/// Largest |inner(z) - outer(z)| over n equispaced points of the unit circle,
/// with both formulas evaluated there.
double theorem3_boundary_mismatch(const Theorem3Instance& f, int n = 64);
double harmonic_boundary_mismatch(const HarmonicInstance& f, int n = 64);

/// Integral of L(df, dbar f) over the plane, in closed form. Requires
/// (a, b) != (0, 0) and k >= 1.
double theorem3_integral(Complex a, Complex b, int k);
double theorem3_integral(const Theorem3Instance& f);

struct CircleMeans {
  double I1;  // mean of |g'| (|g'| + |h'|)^{p-1}
  double I2;  // mean of |h'| (|g'| + |h'|)^{p-1}
};

CircleMeans harmonic_circle_means(const HarmonicInstance& f, double p, double r,
                                  int angles = 512);

struct MonotonicityReport {
  bool nondecreasing;
  /// Largest drop of I1 or I2 between consecutive radii, relative to max(1, I).
  double worst_drop;
};

/// I1 and I2 on `radii` equispaced points of [0, 1].
MonotonicityReport check_circle_means_monotone(const HarmonicInstance& f, double p,
                                               int radii = 65, int angles = 512,
                                               double tolerance = 1e-12);

/// Integral of Phi_p(df, dbar f) over the plane for p > 2, through the circle
/// means I1, I2 on |z| = r < 1.
double harmonic_family_integral(const Polynomial& g, const Polynomial& h, const Exponent& p,
                                int angles = 512);

/// Integral of Phi_p(df, dbar f) over the plane. Throws std::domain_error when
/// the p-energy of the stretch diverges.
double composite_family_integral(const Polynomial& F, const StretchProfile& g,
                                 const Exponent& p, bool conjugate, int angles = 512);
double composite_family_integral(const CompositeInstance& f, const Exponent& p,
                                 int angles = 512);

/// |a|, |b| log-uniform on [0.05, 5] with uniform phases; k uniform in [1, max_k].
Theorem3Instance random_theorem3_instance(Rng& rng, int max_k = 5);

/// Degrees uniform in [0, max_degree] for g and h, coefficients with modulus
/// log-uniform on [0.05, 2] and uniform phase.
HarmonicInstance random_harmonic_instance(Rng& rng, int max_degree = 4);

/// F of degree 1 to 3 and a power or sampled stretch. Power exponents and
/// sampled tails are drawn from [0.4, 1], so the p-energy is finite for
/// 10/7 < p < 10/3.
CompositeInstance random_composite_instance(Rng& rng);

std::string polynomial_to_json(const Polynomial& c);
Polynomial polynomial_from_json(std::string_view text);

}  // namespace burkholder
