#include "burkholder/functions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace burkholder {

namespace {

void require_finite(const WirtingerPair& pair, const char* who) {
  if (!pair.finite()) {
    throw std::invalid_argument(std::string(who) + ": non-finite Wirtinger pair");
  }
}

}  // namespace

bool WirtingerPair::finite() const {
  return std::isfinite(z.real()) && std::isfinite(z.imag()) && std::isfinite(w.real()) &&
         std::isfinite(w.imag());
}

Exponent::Exponent(double p) : p_(p) {
  if (!std::isfinite(p) || !(p > 1.0)) {
    throw std::invalid_argument("exponent p must be finite and > 1, got " + std::to_string(p));
  }
  pstar_ = std::max(p, p / (p - 1.0));
  alpha_ = p * std::pow(1.0 - 1.0 / pstar_, p - 1.0);
}

bool Mat2::finite() const {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
}

double eval_L(const WirtingerPair& pair) {
  require_finite(pair, "eval_L");
  const double az = std::abs(pair.z);
  const double aw = std::abs(pair.w);
  if (az + aw <= 1.0) return az * az - aw * aw;
  return 2.0 * az - 1.0;
}

double eval_M(const WirtingerPair& pair) {
  require_finite(pair, "eval_M");
  const double az = std::abs(pair.z);
  const double aw = std::abs(pair.w);
  if (az + aw <= 1.0) return 0.0;
  const double d = az - 1.0;
  return aw * aw - d * d;
}

double eval_Phi(const WirtingerPair& pair, const Exponent& p) {
  require_finite(pair, "eval_Phi");
  const double az = std::abs(pair.z);
  const double aw = std::abs(pair.w);
  const double s = az + aw;
  if (s == 0.0) return 0.0;
  return p.alpha() * ((p.pstar() - 1.0) * az - aw) * std::pow(s, p.p() - 1.0);
}

Gradient4 grad_L(const WirtingerPair& pair) {
  require_finite(pair, "grad_L");
  const double az = std::abs(pair.z);
  const double aw = std::abs(pair.w);
  if (az + aw <= 1.0) {
    return {2.0 * pair.z.real(), 2.0 * pair.z.imag(), -2.0 * pair.w.real(), -2.0 * pair.w.imag()};
  }
  if (az == 0.0) return {0.0, 0.0, 0.0, 0.0};
  return {2.0 * pair.z.real() / az, 2.0 * pair.z.imag() / az, 0.0, 0.0};
}

WirtingerPair matrix_to_wirtinger(const Mat2& A) {
  return {Complex(0.5 * (A.a + A.d), 0.5 * (A.c - A.b)),
          Complex(0.5 * (A.a - A.d), 0.5 * (A.c + A.b))};
}

double eval_L1(const Mat2& A) {
  if (!A.finite()) throw std::invalid_argument("eval_L1: non-finite matrix");
  return eval_L(matrix_to_wirtinger(A));
}

namespace {

// sqrt(|A|^2 +- 2 det A); clamped at zero against rounding.
double root_plus(const Mat2& A) { return std::sqrt(std::max(0.0, A.norm_sq() + 2.0 * A.det())); }
double root_minus(const Mat2& A) { return std::sqrt(std::max(0.0, A.norm_sq() - 2.0 * A.det())); }

}  // namespace

bool in_E(const Mat2& A) { return root_plus(A) + root_minus(A) <= 2.0; }

double eval_L1_det_form(const Mat2& A) {
  if (!A.finite()) throw std::invalid_argument("eval_L1_det_form: non-finite matrix");
  if (in_E(A)) return A.det();
  return root_plus(A) - 1.0;
}

}  // namespace burkholder
