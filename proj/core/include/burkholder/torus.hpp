#pragma once

// Piecewise-linear functions on the unit torus T^2 = [0,1)^2.
//
// Nodes sit at (p_m, p_n), p_k = frac(k/N). Each grid square is split into a
// lower triangle D+_{m,n} with corners (p_m,p_n), (p_{m+1},p_n), (p_m,p_{n+1})
// and an upper triangle D-_{m,n} with corners (p_m,p_n), (p_{m-1},p_n),
// (p_m,p_{n-1}). A function in P_N is fixed by its N^2 complex nodal values;
// the real coefficient vector is laid out row-major over (m, n) with the real
// part before the imaginary part of each node.

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "burkholder/functions.hpp"

namespace burkholder {

class TorusGrid {
 public:
  /// Throws std::invalid_argument for N < 2.
  explicit TorusGrid(int N);

  int N() const { return n_; }
  std::size_t nodes() const { return static_cast<std::size_t>(n_) * n_; }
  /// Length of the real coefficient vector, 2 N^2.
  std::size_t dimension() const { return 2 * nodes(); }
  std::size_t triangles() const { return 2 * nodes(); }
  double triangle_area() const { return 1.0 / static_cast<double>(triangles()); }

  int wrap(int k) const { return ((k % n_) + n_) % n_; }
  /// Flat node index of (m, n), indices taken mod N.
  std::size_t node(int m, int n) const {
    return static_cast<std::size_t>(wrap(m)) * n_ + static_cast<std::size_t>(wrap(n));
  }
  /// Fractional part of k/N.
  double position(int k) const { return static_cast<double>(wrap(k)) / n_; }

  bool operator==(const TorusGrid&) const = default;

 private:
  int n_;
};

enum class Orientation { plus, minus };

struct Triangle {
  Orientation orientation;
  int m;
  int n;

  /// Corner lattice points before reduction mod N; the first is (m, n).
  std::array<std::pair<int, int>, 3> corners() const;
};

/// The 2N^2 triangles: all D+ in row-major (m, n) order, then all D-.
std::vector<Triangle> triangulate(int N);

class GridFunction {
 public:
  /// Zero function.
  explicit GridFunction(TorusGrid grid);
  GridFunction(TorusGrid grid, std::vector<Complex> values);
  /// Inverse of coefficients(); length must be 2 N^2.
  static GridFunction from_coefficients(TorusGrid grid, std::span<const double> x);

  const TorusGrid& grid() const { return grid_; }
  std::span<const Complex> values() const { return values_; }
  Complex& at(int m, int n) { return values_[grid_.node(m, n)]; }
  Complex at(int m, int n) const { return values_[grid_.node(m, n)]; }

  std::vector<double> coefficients() const;

  GridFunction conjugated() const;
  GridFunction scaled(double t) const;
  /// g(m, n) = f(m + dm, n + dn).
  GridFunction shifted(int dm, int dn) const;

 private:
  TorusGrid grid_;
  std::vector<Complex> values_;
};

struct TriangleRecord {
  Triangle triangle;
  WirtingerPair pair;  // constant (df, dbar f) on the triangle
  double area;
};

struct TriangleDerivatives {
  std::vector<TriangleRecord> records;
};

/// Exact per-triangle Wirtinger derivatives of the piecewise-linear
/// interpolant. On D+: f_x = N (f_{m+1,n} - f_{m,n}), f_y = N (f_{m,n+1} - f_{m,n});
/// on D-: f_x = N (f_{m,n} - f_{m-1,n}), f_y = N (f_{m,n} - f_{m,n-1}).
TriangleDerivatives triangle_derivatives(const GridFunction& f);

/// F_N = integral over T^2 of L(df, dbar f). Exact (piecewise constant integrand).
double energy_F(const GridFunction& f);
double energy_F(const TorusGrid& grid, std::span<const double> x);

/// Same integral with the arguments of L interchanged, L(dbar f, df).
double energy_F_swapped(const GridFunction& f);

/// Gradient of F_N with respect to the real coefficient vector.
std::vector<double> grad_F(const GridFunction& f);
void grad_F(const TorusGrid& grid, std::span<const double> x, std::span<double> out);

/// Integral of |df|^2 - |dbar f|^2, i.e. of the Jacobian determinant; zero
/// for every periodic f.
double null_lagrangian(const GridFunction& f);

/// Integral of |df|^2 + |dbar f|^2.
double dirichlet_energy(const GridFunction& f);

/// Integral of Phi_p(df, dbar f).
double energy_Phi(const GridFunction& f, const Exponent& p);

/// Largest per-triangle |df| + |dbar f|.
double max_pair_modulus(const GridFunction& f);

}  // namespace burkholder
