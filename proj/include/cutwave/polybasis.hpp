// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <vector>

namespace cutwave
{

/// One-dimensional quadrature rule on the reference interval [-1, 1].
struct QuadratureRule1D
{
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

struct LegendreValue
{
  double value = 0.0;
  double derivative = 0.0;
};

/// Degree-p Legendre polynomial and its derivative via the three-term recurrence.
LegendreValue legendre_eval(int p, double xi);

/// Gauss-Lobatto-Legendre rule with p+1 nodes, exact up to degree 2p-1.
/// Interior nodes are the roots of P'_p, found by Newton iteration from
/// Chebyshev-Gauss-Lobatto guesses.
QuadratureRule1D gll_rule(int p);

/// n-point Gauss-Legendre rule, exact up to degree 2n-1.
QuadratureRule1D gauss_legendre_rule(int n);

/// Affinely maps a rule on [-1, 1] onto [a, b]; weights are scaled by (b - a) / 2.
QuadratureRule1D map_rule(const QuadratureRule1D& rule, double a, double b);

struct ShapeValues1D
{
  std::vector<double> values;
  std::vector<double> derivatives;
};

/// Lagrange interpolants on the GLL nodes of degree p, evaluated in barycentric form.
class SpectralBasis1D
{
public:
  explicit SpectralBasis1D(int p);

  int degree() const { return p_; }
  int size() const { return p_ + 1; }
  std::span<const double> nodes() const { return rule_.points; }
  const QuadratureRule1D& gll() const { return rule_; }

  /// Writes N_i(xi) and dN_i/dxi into the provided spans (length p+1 each).
  void eval(double xi, std::span<double> values, std::span<double> derivatives) const;
  ShapeValues1D eval(double xi) const;

private:
  int p_;
  QuadratureRule1D rule_;
  std::vector<double> bary_;
  // diff_[k * (p+1) + i] = dN_i/dxi at node k
  std::vector<double> diff_;
};

using Vec2 = std::array<double, 2>;

struct TensorShapeValues
{
  std::vector<double> values;
  std::vector<Vec2> gradients;  // reference-coordinate gradients
};

/// Tensor-product basis in d = 1 or 2 dimensions. Local functions are numbered
/// lexicographically with the first index running fastest.
class TensorBasis
{
public:
  TensorBasis(int dim, int p);

  int dim() const { return dim_; }
  int degree() const { return basis_.degree(); }
  int size() const { return size_; }
  const SpectralBasis1D& basis1d() const { return basis_; }

  int flat_index(int i1, int i2 = 0) const { return i1 + (degree() + 1) * i2; }
  std::array<int, 2> multi_index(int flat) const;

  /// Reference coordinates of local node `flat` (second component 0 in 1D).
  Vec2 node(int flat) const;

  void eval(const Vec2& xi, std::span<double> values, std::span<Vec2> gradients) const;
  TensorShapeValues eval(const Vec2& xi) const;

private:
  int dim_;
  SpectralBasis1D basis_;
  int size_;
};

}  // namespace cutwave
