#pragma once

// Nonlinear conjugate gradient (Polak-Ribiere, clamped at zero, with periodic
// restarts) and the torus energy experiments built on it.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "burkholder/torus.hpp"

namespace burkholder {

struct CgOptions {
  int max_iterations = 1000;
  /// Stop when the gradient infinity norm falls below this.
  double gradient_tolerance = 1e-10;
  /// Stop when 2|f_new - f_old| <= tol (|f_new| + |f_old| + tiny), twice in a
  /// row, the second time along steepest descent.
  double function_tolerance = 1e-12;
  /// Fractional precision of the Brent line minimization.
  double line_search_tolerance = 1e-8;
  int restart_interval = 100;

  /// restart_interval = n, max_iterations = 20 n.
  static CgOptions for_dimension(std::size_t n);
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class Termination { gradient_small, function_stalled, iteration_cap };

std::string_view to_string(Termination t);
Termination termination_from_string(std::string_view s);

struct MinimizationResult {
  std::uint64_t start_seed = 0;
  int N = 0;
  double initial_value = 0.0;
  double final_value = 0.0;
  double final_gradient_norm = 0.0;  // infinity norm
  int iterations = 0;
  Termination termination = Termination::iteration_cap;
  double wall_time = 0.0;  // seconds
  long evaluations = 0;
  std::vector<double> x;  // final iterate
};

/// Raised when the objective or gradient turns non-finite.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, int iterate)
      : std::runtime_error(what + " (iterate " + std::to_string(iterate) + ")"), iterate_(iterate) {}
  int iterate() const { return iterate_; }

 private:
  int iterate_;
};

using Objective = std::function<double(std::span<const double>)>;
using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

MinimizationResult minimize_cg(const Objective& objective, const GradientFn& gradient,
                               std::vector<double> x0, const CgOptions& opts);

/// Max over coordinates of |g_i - d_i| / max(|g_i|, |d_i|, floor), where d is
/// the central difference with the given step and
/// floor = sqrt(eps) * max(1, |g|_inf, |d|_inf, |f(x)| / step).
double gradient_check(const Objective& objective, const GradientFn& gradient,
                      std::span<const double> x, double step);

/// Coordinates independent and uniform on [-amplitude, amplitude].
std::vector<double> random_start(const TorusGrid& grid, std::uint64_t seed, double amplitude);

/// One start of the torus experiment: minimize F_N from random_start(seed).
MinimizationResult minimize_energy(int N, std::uint64_t seed, double amplitude,
                                   const CgOptions& opts);

/// Options used by minimize_energy when none are given.
CgOptions default_energy_options(int N);

/// Start k uses seed derive_seed(master_seed, k). Results are in start order
/// and identical for every thread count. A NumericalError is rethrown with
/// the start index in its message.
std::vector<MinimizationResult> multistart(int N, int starts, std::uint64_t master_seed,
                                           double amplitude, const CgOptions& opts,
                                           int threads = 1);

struct RayProfile {
  std::vector<std::pair<double, double>> points;  // (t, h(t))
  /// Largest drop of h between consecutive t >= 0.
  double monotonicity_violation_positive = 0.0;
  /// Largest rise of h between consecutive t <= 0.
  double monotonicity_violation_negative = 0.0;
  /// t where the divided second difference changes sign.
  std::vector<double> second_difference_sign_changes;
  /// t where the divided second difference is negative.
  std::vector<double> concavity_witnesses;
};

/// h(t) = F_N(t * direction) on a sorted t grid, with monotonicity and
/// convexity diagnostics.
RayProfile ray_profile(const GridFunction& direction, std::span<const double> t_values);

/// n equispaced points on [lo, hi].
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace burkholder
