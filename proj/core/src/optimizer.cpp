#include "burkholder/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "burkholder/rng.hpp"

namespace burkholder {

CgOptions CgOptions::for_dimension(std::size_t n) {
  CgOptions o;
  o.restart_interval = static_cast<int>(std::max<std::size_t>(1, n));
  o.max_iterations = static_cast<int>(std::max<std::size_t>(1, 20 * n));
  return o;
}

void CgOptions::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(gradient_tolerance > 0.0)) throw std::invalid_argument("gradient_tolerance must be > 0");
  if (!(function_tolerance > 0.0)) throw std::invalid_argument("function_tolerance must be > 0");
  if (!(line_search_tolerance > 0.0)) {
    throw std::invalid_argument("line_search_tolerance must be > 0");
  }
  if (restart_interval < 1) throw std::invalid_argument("restart_interval must be >= 1");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::gradient_small:
      return "gradient-small";
    case Termination::function_stalled:
      return "function-stalled";
    case Termination::iteration_cap:
      return "iteration-cap";
  }
  return "unknown";
}

Termination termination_from_string(std::string_view s) {
  for (Termination t : {Termination::gradient_small, Termination::function_stalled,
                        Termination::iteration_cap}) {
    if (to_string(t) == s) return t;
  }
  throw std::invalid_argument("unknown termination reason: " + std::string(s));
}

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// One-dimensional minimization of phi(lambda) = f(x + lambda d) by bracketing
// followed by Brent's golden-section/parabolic search.
class LineSearch {
 public:
  LineSearch(const Objective& f, std::span<const double> x, std::span<const double> d,
             int iterate, long& evaluations)
      : f_(f), x_(x), d_(d), trial_(x.size()), iterate_(iterate), evaluations_(evaluations) {}

  double phi(double lambda) {
    for (std::size_t i = 0; i < x_.size(); ++i) trial_[i] = x_[i] + lambda * d_[i];
    const double v = f_(trial_);
    ++evaluations_;
    if (!std::isfinite(v)) throw NumericalError("non-finite objective in line search", iterate_);
    return v;
  }

  // Returns (lambda, phi(lambda)) with phi(lambda) <= f0 = phi(0).
  std::pair<double, double> minimize(double f0, double initial_step, double tol) {
    constexpr double kGold = 1.618034;
    constexpr double kGrowLimit = 100.0;
    constexpr double kTiny = 1e-20;
    constexpr int kMaxBracketSteps = 200;

    double ax = 0.0, bx = initial_step;
    double fa = f0, fb = phi(bx);
    if (fb > fa) {
      std::swap(ax, bx);
      std::swap(fa, fb);
    }
    double cx = bx + kGold * (bx - ax);
    double fc = phi(cx);
    int steps = 0;
    while (fb > fc && steps++ < kMaxBracketSteps) {
      const double r = (bx - ax) * (fb - fc);
      const double q = (bx - cx) * (fb - fa);
      const double denom = 2.0 * std::copysign(std::max(std::abs(q - r), kTiny), q - r);
      double u = bx - ((bx - cx) * q - (bx - ax) * r) / denom;
      const double ulim = bx + kGrowLimit * (cx - bx);
      double fu;
      if ((bx - u) * (u - cx) > 0.0) {
        fu = phi(u);
        if (fu < fc) {
          ax = bx;
          bx = u;
          fa = fb;
          fb = fu;
          break;
        }
        if (fu > fb) {
          cx = u;
          fc = fu;
          break;
        }
        u = cx + kGold * (cx - bx);
        fu = phi(u);
      } else if ((cx - u) * (u - ulim) > 0.0) {
        fu = phi(u);
        if (fu < fc) {
          bx = cx;
          cx = u;
          u = cx + kGold * (cx - bx);
          fb = fc;
          fc = fu;
          fu = phi(u);
        }
      } else if ((u - ulim) * (ulim - cx) >= 0.0) {
        u = ulim;
        fu = phi(u);
      } else {
        u = cx + kGold * (cx - bx);
        fu = phi(u);
      }
      ax = bx;
      bx = cx;
      cx = u;
      fa = fb;
      fb = fc;
      fc = fu;
    }
    if (fc < fb) {  // bracketing gave up while still descending
      bx = cx;
      fb = fc;
    }
    if (fb > f0) return {0.0, f0};
    return brent(ax, bx, cx, fb, tol);
  }

 private:
  std::pair<double, double> brent(double ax, double bx, double cx, double fbx, double tol) {
    constexpr double kCGold = 0.3819660112501051;
    constexpr double kZeps = 1e-15;
    constexpr int kMaxIter = 200;

    double a = std::min(ax, cx), b = std::max(ax, cx);
    double x = bx, w = bx, v = bx;
    double fx = fbx, fw = fbx, fv = fbx;
    double d = 0.0, e = 0.0;
    for (int iter = 0; iter < kMaxIter; ++iter) {
      const double xm = 0.5 * (a + b);
      const double tol1 = tol * std::abs(x) + kZeps;
      const double tol2 = 2.0 * tol1;
      if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
      bool golden = true;
      if (std::abs(e) > tol1) {
        const double r = (x - w) * (fx - fv);
        double q = (x - v) * (fx - fw);
        double p = (x - v) * q - (x - w) * r;
        q = 2.0 * (q - r);
        if (q > 0.0) p = -p;
        q = std::abs(q);
        const double etemp = e;
        e = d;
        if (!(std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (a - x) || p >= q * (b - x))) {
          d = p / q;
          const double u = x + d;
          if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
          golden = false;
        }
      }
      if (golden) {
        e = (x >= xm) ? a - x : b - x;
        d = kCGold * e;
      }
      const double u = (std::abs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
      const double fu = phi(u);
      if (fu <= fx) {
        if (u >= x) a = x; else b = x;
        v = w; fv = fw;
        w = x; fw = fx;
        x = u; fx = fu;
      } else {
        if (u < x) a = u; else b = u;
        if (fu <= fw || w == x) {
          v = w; fv = fw;
          w = u; fw = fu;
        } else if (fu <= fv || v == x || v == w) {
          v = u; fv = fu;
        }
      }
    }
    return {x, fx};
  }

  const Objective& f_;
  std::span<const double> x_;
  std::span<const double> d_;
  std::vector<double> trial_;
  int iterate_;
  long& evaluations_;
};

}  // namespace

MinimizationResult minimize_cg(const Objective& objective, const GradientFn& gradient,
                               std::vector<double> x0, const CgOptions& opts) {
  opts.validate();
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = x0.size();
  MinimizationResult res;
  for (double v : x0) {
    if (!std::isfinite(v)) throw NumericalError("non-finite starting point", 0);
  }
  std::vector<double> x = std::move(x0);
  std::vector<double> g(n), g_new(n), dir(n);

  auto eval_f = [&](int iterate) {
    const double v = objective(x);
    ++res.evaluations;
    if (!std::isfinite(v)) throw NumericalError("non-finite objective", iterate);
    return v;
  };
  auto eval_g = [&](std::span<double> out, int iterate) {
    gradient(x, out);
    for (double v : out) {
      if (!std::isfinite(v)) throw NumericalError("non-finite gradient", iterate);
    }
  };

  double fx = eval_f(0);
  res.initial_value = fx;
  eval_g(g, 0);
  for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];

  double step = 1.0;
  bool steepest = true;  // dir is -g
  int since_restart = 0;
  res.termination = Termination::iteration_cap;
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    if (inf_norm(g) < opts.gradient_tolerance) {
      res.termination = Termination::gradient_small;
      break;
    }
    LineSearch search(objective, x, dir, iter + 1, res.evaluations);
    const auto [lambda, f_new] = search.minimize(fx, step, opts.line_search_tolerance);

    const bool stalled = 2.0 * std::abs(f_new - fx) <=
                         opts.function_tolerance * (std::abs(f_new) + std::abs(fx) + 1e-300);
    if (f_new <= fx && lambda != 0.0) {
      for (std::size_t i = 0; i < n; ++i) x[i] += lambda * dir[i];
      step = std::abs(lambda);
      fx = f_new;
    }
    if (stalled) {
      if (steepest) {
        res.termination = Termination::function_stalled;
        ++iter;
        eval_g(g, iter);
        break;
      }
      // Retry once along steepest descent before giving up.
      eval_g(g, iter + 1);
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
      steepest = true;
      since_restart = 0;
      continue;
    }

    eval_g(g_new, iter + 1);
    ++since_restart;
    const double gg = dot(g, g);
    double beta = 0.0;
    if (gg > 0.0 && since_restart < opts.restart_interval) {
      double num = 0.0;
      for (std::size_t i = 0; i < n; ++i) num += g_new[i] * (g_new[i] - g[i]);
      beta = std::max(0.0, num / gg);
    }
    if (beta == 0.0) since_restart = 0;
    for (std::size_t i = 0; i < n; ++i) dir[i] = -g_new[i] + beta * dir[i];
    if (dot(dir, g_new) >= 0.0) {
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g_new[i];
      beta = 0.0;
      since_restart = 0;
    }
    steepest = beta == 0.0;
    std::swap(g, g_new);
  }
  if (iter >= opts.max_iterations && res.termination == Termination::iteration_cap &&
      inf_norm(g) < opts.gradient_tolerance) {
    res.termination = Termination::gradient_small;
  }
  res.iterations = std::min(iter, opts.max_iterations);
  res.final_value = fx;
  res.final_gradient_norm = inf_norm(g);
  res.x = std::move(x);
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return res;
}

double gradient_check(const Objective& objective, const GradientFn& gradient,
                      std::span<const double> x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("gradient_check: step must be > 0");
  const std::size_t n = x.size();
  std::vector<double> g(n), fd(n), probe(x.begin(), x.end());
  gradient(x, g);
  for (std::size_t i = 0; i < n; ++i) {
    probe[i] = x[i] + step;
    const double up = objective(probe);
    probe[i] = x[i] - step;
    const double down = objective(probe);
    probe[i] = x[i];
    fd[i] = (up - down) / (2.0 * step);
  }
  // Central differences carry rounding error near eps |f| / step, so
  // components far below that level are compared against it instead.
  const double f0 = std::abs(objective(x));
  const double floor = std::sqrt(std::numeric_limits<double>::epsilon()) *
                       std::max({1.0, inf_norm(g), inf_norm(fd), f0 / step});
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double denom = std::max({std::abs(g[i]), std::abs(fd[i]), floor});
    worst = std::max(worst, std::abs(g[i] - fd[i]) / denom);
  }
  return worst;
}

std::vector<double> random_start(const TorusGrid& grid, std::uint64_t seed, double amplitude) {
  Rng rng(seed);
  std::vector<double> x(grid.dimension());
  for (double& v : x) v = rng.uniform(-amplitude, amplitude);
  return x;
}

CgOptions default_energy_options(int N) {
  return CgOptions::for_dimension(TorusGrid(N).dimension());
}

MinimizationResult minimize_energy(int N, std::uint64_t seed, double amplitude,
                                   const CgOptions& opts) {
  const TorusGrid grid(N);
  auto f = [&grid](std::span<const double> x) { return energy_F(grid, x); };
  auto g = [&grid](std::span<const double> x, std::span<double> out) { grad_F(grid, x, out); };
  MinimizationResult r = minimize_cg(f, g, random_start(grid, seed, amplitude), opts);
  r.start_seed = seed;
  r.N = N;
  return r;
}

std::vector<MinimizationResult> multistart(int N, int starts, std::uint64_t master_seed,
                                           double amplitude, const CgOptions& opts,
                                           int threads) {
  if (starts < 1) throw std::invalid_argument("multistart: starts must be >= 1");
  opts.validate();
  TorusGrid grid(N);  // validates N
  std::vector<MinimizationResult> results(static_cast<std::size_t>(starts));
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  int failed_start = starts;

  auto worker = [&]() {
    for (int k = next++; k < starts; k = next++) {
      try {
        results[k] = minimize_energy(N, derive_seed(master_seed, static_cast<std::uint64_t>(k)),
                                     amplitude, opts);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (k < failed_start) {
          failed_start = k;
          first_error = std::current_exception();
        }
      }
    }
  };
  const int workers = std::clamp(threads, 1, starts);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (first_error) {
    try {
      std::rethrow_exception(first_error);
    } catch (const NumericalError& e) {
      throw NumericalError("start " + std::to_string(failed_start) + ": " + e.what(), e.iterate());
    }
  }
  return results;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) return {lo};
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[i] = lo + (hi - lo) * i / (n - 1);
  return t;
}

RayProfile ray_profile(const GridFunction& direction, std::span<const double> t_values) {
  RayProfile out;
  const auto x = direction.coefficients();
  std::vector<double> tx(x.size());
  double scale = 0.0;
  for (double t : t_values) {
    if (!std::isfinite(t)) throw std::invalid_argument("ray_profile: non-finite t");
    if (!out.points.empty() && t < out.points.back().first) {
      throw std::invalid_argument("ray_profile: t values must be sorted");
    }
    for (std::size_t i = 0; i < x.size(); ++i) tx[i] = t * x[i];
    const double h = energy_F(direction.grid(), tx);
    out.points.emplace_back(t, h);
    scale = std::max(scale, std::abs(h));
  }
  const auto& pts = out.points;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto [t0, h0] = pts[i];
    const auto [t1, h1] = pts[i + 1];
    if (t0 >= 0.0) {
      out.monotonicity_violation_positive = std::max(out.monotonicity_violation_positive, h0 - h1);
    }
    if (t1 <= 0.0) {
      out.monotonicity_violation_negative = std::max(out.monotonicity_violation_negative, h1 - h0);
    }
  }
  // Second differences below this are treated as zero.
  const double noise = 1e-9 * std::max(1.0, scale);
  int last_sign = 0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const double dl = pts[i].first - pts[i - 1].first;
    const double dr = pts[i + 1].first - pts[i].first;
    if (dl <= 0.0 || dr <= 0.0) continue;
    const double second = (pts[i + 1].second - pts[i].second) / dr -
                          (pts[i].second - pts[i - 1].second) / dl;
    int sign = 0;
    if (second > noise) sign = 1;
    if (second < -noise) sign = -1;
    if (sign < 0) out.concavity_witnesses.push_back(pts[i].first);
    if (sign != 0) {
      if (last_sign != 0 && sign != last_sign) out.second_difference_sign_changes.push_back(pts[i].first);
      last_sign = sign;
    }
  }
  return out;
}

}  // namespace burkholder
