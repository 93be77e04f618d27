#pragma once

// Globally adaptive 7/15-point Gauss-Kronrod quadrature.

#include <functional>
#include <span>

namespace burkholder::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct Options {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_subdivisions = 4000;
};

using Integrand = std::function<double(double)>;

/// Integral of f over the finite interval [a, b]. The interval is bisected
/// where the Kronrod error estimate is largest until the total estimate is
/// below max(abs_tol, rel_tol * |value|).
Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

/// Integral over consecutive panels [b0, b1], [b1, b2], ...; the breakpoints
/// must be sorted and finite. Each panel receives an equal share of abs_tol.
Result integrate_panels(const Integrand& f, std::span<const double> breakpoints,
                        const Options& opts = {});

/// Integral of f over [a, b] with 0 < a < b computed in the variable
/// s = log r, i.e. of f(e^s) e^s over [log a, log b]. Suited to power-law
/// integrands spread over many decades.
Result integrate_log(const Integrand& f, double a, double b, const Options& opts = {});

/// Periodic trapezoid rule: (1/n) sum_k f(2 pi k / n), the mean value of f on
/// the circle. Spectrally accurate for smooth periodic f.
double circle_mean(const std::function<double(double)>& f, int n);

}  // namespace burkholder::quad
