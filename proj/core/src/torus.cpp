#include "burkholder/torus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace burkholder {

TorusGrid::TorusGrid(int N) : n_(N) {
  if (N < 2) throw std::invalid_argument("TorusGrid: N must be >= 2, got " + std::to_string(N));
}

std::array<std::pair<int, int>, 3> Triangle::corners() const {
  if (orientation == Orientation::plus) {
    return {{{m, n}, {m + 1, n}, {m, n + 1}}};
  }
  return {{{m, n}, {m - 1, n}, {m, n - 1}}};
}

std::vector<Triangle> triangulate(int N) {
  const TorusGrid grid(N);
  std::vector<Triangle> out;
  out.reserve(grid.triangles());
  for (Orientation o : {Orientation::plus, Orientation::minus}) {
    for (int m = 0; m < N; ++m) {
      for (int n = 0; n < N; ++n) out.push_back({o, m, n});
    }
  }
  return out;
}

GridFunction::GridFunction(TorusGrid grid) : grid_(grid), values_(grid.nodes()) {}

GridFunction::GridFunction(TorusGrid grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.nodes()) {
    throw std::invalid_argument("GridFunction: expected " + std::to_string(grid_.nodes()) +
                                " nodal values, got " + std::to_string(values_.size()));
  }
  for (const Complex& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::invalid_argument("GridFunction: non-finite nodal value");
    }
  }
}

GridFunction GridFunction::from_coefficients(TorusGrid grid, std::span<const double> x) {
  if (x.size() != grid.dimension()) {
    throw std::invalid_argument("GridFunction: expected " + std::to_string(grid.dimension()) +
                                " coefficients, got " + std::to_string(x.size()));
  }
  std::vector<Complex> values(grid.nodes());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = Complex(x[2 * k], x[2 * k + 1]);
  return GridFunction(grid, std::move(values));
}

std::vector<double> GridFunction::coefficients() const {
  std::vector<double> x(grid_.dimension());
  for (std::size_t k = 0; k < values_.size(); ++k) {
    x[2 * k] = values_[k].real();
    x[2 * k + 1] = values_[k].imag();
  }
  return x;
}

GridFunction GridFunction::conjugated() const {
  std::vector<Complex> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), [](Complex c) { return std::conj(c); });
  return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::scaled(double t) const {
  std::vector<Complex> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), [t](Complex c) { return t * c; });
  return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::shifted(int dm, int dn) const {
  GridFunction out(grid_);
  const int N = grid_.N();
  for (int m = 0; m < N; ++m) {
    for (int n = 0; n < N; ++n) out.at(m, n) = at(m + dm, n + dn);
  }
  return out;
}

namespace {

// Visits every triangle in triangulate() order with the flat indices of its
// three nodes and the constant partials (f_x, f_y).
template <class Visit>
void for_each_triangle(const TorusGrid& grid, std::span<const double> x, Visit&& visit) {
  if (x.size() != grid.dimension()) {
    throw std::invalid_argument("torus: coefficient vector has wrong length");
  }
  const int N = grid.N();
  const double scale = static_cast<double>(N);
  auto value = [&x](std::size_t k) { return Complex(x[2 * k], x[2 * k + 1]); };
  for (int m = 0; m < N; ++m) {
    for (int n = 0; n < N; ++n) {
      const std::size_t k0 = grid.node(m, n);
      const std::size_t k1 = grid.node(m + 1, n);
      const std::size_t k2 = grid.node(m, n + 1);
      const Complex f0 = value(k0);
      visit(Triangle{Orientation::plus, m, n}, k0, k1, k2, scale * (value(k1) - f0),
            scale * (value(k2) - f0));
    }
  }
  for (int m = 0; m < N; ++m) {
    for (int n = 0; n < N; ++n) {
      const std::size_t k0 = grid.node(m, n);
      const std::size_t k1 = grid.node(m - 1, n);
      const std::size_t k2 = grid.node(m, n - 1);
      const Complex f0 = value(k0);
      visit(Triangle{Orientation::minus, m, n}, k0, k1, k2, scale * (f0 - value(k1)),
            scale * (f0 - value(k2)));
    }
  }
}

constexpr Complex kI(0.0, 1.0);

WirtingerPair wirtinger(Complex fx, Complex fy) {
  return {0.5 * (fx - kI * fy), 0.5 * (fx + kI * fy)};
}

template <class Integrand>
double integrate_pairs(const GridFunction& f, Integrand&& integrand) {
  const auto x = f.coefficients();
  double sum = 0.0;
  for_each_triangle(f.grid(), x,
                    [&](const Triangle&, std::size_t, std::size_t, std::size_t, Complex fx,
                        Complex fy) { sum += integrand(wirtinger(fx, fy)); });
  return f.grid().triangle_area() * sum;
}

}  // namespace

TriangleDerivatives triangle_derivatives(const GridFunction& f) {
  TriangleDerivatives out;
  out.records.reserve(f.grid().triangles());
  const double area = f.grid().triangle_area();
  const auto x = f.coefficients();
  for_each_triangle(f.grid(), x,
                    [&](const Triangle& t, std::size_t, std::size_t, std::size_t, Complex fx,
                        Complex fy) { out.records.push_back({t, wirtinger(fx, fy), area}); });
  return out;
}

double energy_F(const TorusGrid& grid, std::span<const double> x) {
  double sum = 0.0;
  for_each_triangle(grid, x,
                    [&](const Triangle&, std::size_t, std::size_t, std::size_t, Complex fx,
                        Complex fy) { sum += eval_L(wirtinger(fx, fy)); });
  return grid.triangle_area() * sum;
}

double energy_F(const GridFunction& f) { return energy_F(f.grid(), f.coefficients()); }

double energy_F_swapped(const GridFunction& f) {
  return integrate_pairs(f, [](const WirtingerPair& w) { return eval_L(w.swapped()); });
}

void grad_F(const TorusGrid& grid, std::span<const double> x, std::span<double> out) {
  if (out.size() != grid.dimension()) {
    throw std::invalid_argument("grad_F: output has wrong length");
  }
  std::fill(out.begin(), out.end(), 0.0);
  const double weight = grid.triangle_area() * grid.N();
  for_each_triangle(grid, x, [&](const Triangle& t, std::size_t k0, std::size_t k1,
                                 std::size_t k2, Complex fx, Complex fy) {
    const Gradient4 g = grad_L(wirtinger(fx, fy));
    // Partials with respect to Re f_x, Im f_x, Re f_y, Im f_y.
    double da = 0.5 * (g[0] + g[2]) * weight;
    double db = 0.5 * (g[1] + g[3]) * weight;
    double dc = 0.5 * (g[3] - g[1]) * weight;
    double dd = 0.5 * (g[0] - g[2]) * weight;
    if (t.orientation == Orientation::minus) {
      da = -da;
      db = -db;
      dc = -dc;
      dd = -dd;
    }
    out[2 * k1] += da;
    out[2 * k1 + 1] += db;
    out[2 * k2] += dc;
    out[2 * k2 + 1] += dd;
    out[2 * k0] -= da + dc;
    out[2 * k0 + 1] -= db + dd;
  });
}

std::vector<double> grad_F(const GridFunction& f) {
  std::vector<double> out(f.grid().dimension());
  grad_F(f.grid(), f.coefficients(), out);
  return out;
}

double null_lagrangian(const GridFunction& f) {
  return integrate_pairs(f, [](const WirtingerPair& w) { return std::norm(w.z) - std::norm(w.w); });
}

double dirichlet_energy(const GridFunction& f) {
  return integrate_pairs(f, [](const WirtingerPair& w) { return std::norm(w.z) + std::norm(w.w); });
}

double energy_Phi(const GridFunction& f, const Exponent& p) {
  return integrate_pairs(f, [&p](const WirtingerPair& w) { return eval_Phi(w, p); });
}

double max_pair_modulus(const GridFunction& f) {
  double worst = 0.0;
  for (const auto& r : triangle_derivatives(f).records) {
    worst = std::max(worst, std::abs(r.pair.z) + std::abs(r.pair.w));
  }
  return worst;
}

}  // namespace burkholder
