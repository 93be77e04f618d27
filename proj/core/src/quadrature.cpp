#include "burkholder/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <vector>

namespace burkholder::quad {

namespace {

// Kronrod nodes (positive half, descending) and weights for the 15-point rule;
// the even-indexed nodes form the embedded 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  const double value = kronrod * half;
  const double error = std::abs((kronrod - gauss) * half);
  if (!std::isfinite(value)) {
    throw std::domain_error("quadrature: non-finite integrand on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "]");
  }
  return {a, b, value, error};
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, const Options& opts) {
  Result out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  if (!(std::isfinite(a) && std::isfinite(b))) {
    throw std::invalid_argument("quadrature: interval endpoints must be finite");
  }
  std::priority_queue<Segment> heap;
  Segment first = gk15(f, a, b);
  heap.push(first);
  double total = first.value;
  double error = first.error;
  out.evaluations = 15;
  int subdivisions = 0;
  while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
         subdivisions < opts.max_subdivisions) {
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) break;  // interval exhausted in double precision
    heap.pop();
    Segment left = gk15(f, worst.a, mid);
    Segment right = gk15(f, mid, worst.b);
    out.evaluations += 30;
    ++subdivisions;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running totals.
  total = 0.0;
  error = 0.0;
  std::vector<Segment> segments;
  segments.reserve(heap.size());
  while (!heap.empty()) {
    segments.push_back(heap.top());
    heap.pop();
  }
  std::sort(segments.begin(), segments.end(),
            [](const Segment& l, const Segment& r) { return l.a < r.a; });
  for (const auto& s : segments) {
    total += s.value;
    error += s.error;
  }
  out.value = total;
  out.error = error;
  out.converged = error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  return out;
}

Result integrate_panels(const Integrand& f, std::span<const double> breakpoints,
                        const Options& opts) {
  Result out;
  out.converged = true;
  if (breakpoints.size() < 2) return out;
  Options panel = opts;
  panel.abs_tol = opts.abs_tol / static_cast<double>(breakpoints.size() - 1);
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] < breakpoints[i]) {
      throw std::invalid_argument("quadrature: breakpoints must be sorted");
    }
    const Result r = integrate(f, breakpoints[i], breakpoints[i + 1], panel);
    out.value += r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
  }
  return out;
}

Result integrate_log(const Integrand& f, double a, double b, const Options& opts) {
  if (!(a > 0.0 && b > a)) {
    if (a == b) return Result{0.0, 0.0, 0, true};
    throw std::invalid_argument("integrate_log: need 0 < a < b");
  }
  return integrate(
      [&f](double s) {
        const double r = std::exp(s);
        return f(r) * r;
      },
      std::log(a), std::log(b), opts);
}

double circle_mean(const std::function<double(double)>& f, int n) {
  if (n < 1) throw std::invalid_argument("circle_mean: need at least one node");
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += f(2.0 * std::numbers::pi * k / n);
  return sum / n;
}

}  // namespace burkholder::quad
