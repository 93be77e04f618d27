#pragma once

// Pointwise identities of L, M and Phi_p, and rank-one convexity of L1.

#include <cstdint>
#include <span>
#include <vector>

#include "burkholder/functions.hpp"
#include "burkholder/rng.hpp"

namespace burkholder {

/// Both sides of an integral identity for Phi_p.
struct IdentityCheck {
  double lhs;    // quadrature
  double rhs;    // constant * Phi_p(z, w)
  double scale;  // constant * alpha_p * (|z| + |w|)^p, the natural size of rhs

  /// |lhs - rhs| / max(|rhs|, scale).
  double relative_error() const;
};

/// int_0^inf t^{p-1} L(z/t, w/t) dt  versus  beta_p Phi_p(z, w),
/// beta_p = (p (2 - p) alpha_p / 2)^{-1}, for 1 < p < 2.
IdentityCheck check_identity_12a(Complex z, Complex w, double p);

/// int_0^inf t^{p-1} M(w/t, z/t) dt  versus  gamma_p Phi_p(z, w),
/// gamma_p = (p (p - 1) (p - 2) alpha_p / 2)^{-1}, for p > 2.
IdentityCheck check_identity_12b(Complex z, Complex w, double p);

/// (p* - 1)^p |z|^p - |w|^p - Phi_p(z, w); nonnegative.
double phi_upper_bound_gap(Complex z, Complex w, const Exponent& p);

/// A matrix A and a rank-one direction B.
struct RankOneProbe {
  Mat2 A;
  Mat2 B;
};

/// A with entries uniform on [-1.5, 1.5]; B = s u v^T with u, v uniform on
/// the unit circle and s log-uniform on [1e-2, 1e2].
RankOneProbe random_rank_one_probe(Rng& rng);

/// g(t) = L1(A + tB) through alpha: with (z1, z2) = alpha(A), (w1, w2) = alpha(B),
/// g(t) = a + b t on I = {t : |z1 + t w1| + |z2 + t w2| < 1} where
/// a = |z1|^2 - |z2|^2 and b = 2 Re(z1 conj(w1) - z2 conj(w2)), and
/// g(t) = 2|z1 + t w1| - 1 off I. Valid when rank B <= 1.
double rank_one_closed_form(const RankOneProbe& probe, double t);

struct ConvexityViolation {
  RankOneProbe probe;
  double t1;
  double t2;
  double excess;  // g((t1+t2)/2) - (g(t1) + g(t2))/2
};

struct RankOneReport {
  int trials = 0;
  long midpoint_checks = 0;
  long violation_count = 0;
  std::vector<ConvexityViolation> violations;  // first few, for replay
  double max_midpoint_excess = -1e300;
  double max_closed_form_discrepancy = 0.0;
  double max_det_form_discrepancy = 0.0;
};

/// Midpoint convexity of t -> L1(A + tB) over all pairs of a sorted t grid,
/// with a violation when the excess exceeds tolerance.
RankOneReport probe_rank_one(const RankOneProbe& probe, std::span<const double> t_grid,
                             double tolerance = 1e-12);

/// `trials` probes drawn from stream derive_seed(seed, trial), each on 101
/// points of [-5, 5].
RankOneReport rank_one_convexity_test(int trials, std::uint64_t seed, double tolerance = 1e-12);

}  // namespace burkholder
