#pragma once

// Burkholder-type functions of a pair of Wirtinger derivatives.
//
// L(z, w) = |z|^2 - |w|^2        if |z| + |w| <= 1
//         = 2|z| - 1             otherwise
// M(z, w) = L(z, w) - (|z|^2 - |w|^2)
// Phi_p(z, w) = alpha_p ((p* - 1)|z| - |w|) (|z| + |w|)^(p - 1)
//
// together with the real 2x2 matrix picture L1 = L o alpha.

#include <array>
#include <complex>

namespace burkholder {

using Complex = std::complex<double>;

/// (z, w) standing for (df/dz, df/dzbar) at a point.
struct WirtingerPair {
  Complex z;
  Complex w;

  /// Pair of nonnegative reals; enough for every function here since they
  /// depend only on the moduli.
  static WirtingerPair moduli(double abs_z, double abs_w) {
    return {Complex(abs_z, 0.0), Complex(abs_w, 0.0)};
  }

  bool finite() const;
  WirtingerPair swapped() const { return {w, z}; }
};

/// Exponent p in (1, inf) with its derived constants.
class Exponent {
 public:
  /// Throws std::invalid_argument unless p > 1 and finite.
  explicit Exponent(double p);

  double p() const { return p_; }
  /// Hoelder conjugate p / (p - 1).
  double conjugate() const { return p_ / (p_ - 1.0); }
  /// max(p, p').
  double pstar() const { return pstar_; }
  /// p (1 - 1/p*)^(p - 1).
  double alpha() const { return alpha_; }

 private:
  double p_;
  double pstar_;
  double alpha_;
};

/// Real 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double det() const { return a * d - b * c; }
  double norm_sq() const { return a * a + b * b + c * c + d * d; }
  bool finite() const;

  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Mat2 operator*(double t) const { return {a * t, b * t, c * t, d * t}; }
};

/// The four real partials of L with respect to (Re z, Im z, Re w, Im w).
using Gradient4 = std::array<double, 4>;

// All evaluators throw std::invalid_argument on non-finite input.

double eval_L(const WirtingerPair& pair);
double eval_M(const WirtingerPair& pair);
double eval_Phi(const WirtingerPair& pair, const Exponent& p);

/// a.e. gradient of L. The closed set |z| + |w| <= 1 uses the quadratic
/// branch; in the outer region the z-part is zero at z = 0.
Gradient4 grad_L(const WirtingerPair& pair);

/// alpha(A) = (z1, z2) with z1 = ((a+d) + i(c-b))/2, z2 = ((a-d) + i(c+b))/2.
/// For A = grad f written as [[u_x, u_y], [v_x, v_y]] this is (df, dbar f).
WirtingerPair matrix_to_wirtinger(const Mat2& A);

/// L(alpha(A)).
double eval_L1(const Mat2& A);

/// Membership in E = {A : sqrt(|A|^2 + 2 det A) + sqrt(|A|^2 - 2 det A) <= 2}.
bool in_E(const Mat2& A);

/// L1 through the determinant description: det A on E, and
/// sqrt(|A|^2 + 2 det A) - 1 off E. Agrees with eval_L1.
double eval_L1_det_form(const Mat2& A);

}  // namespace burkholder
