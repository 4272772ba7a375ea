// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "cutwave/polybasis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cutwave
{

namespace
{

constexpr double kNewtonTolerance = 1e-15;
constexpr int kNewtonMaxIterations = 100;

// Newton iteration with a hard cap; an unconverged root is a defect.
template <typename Step>
double newton_root(double x, Step&& step, const char* what)
{
  for (int it = 0; it < kNewtonMaxIterations; ++it)
  {
    const double dx = step(x);
    x -= dx;
    if (std::abs(dx) <= kNewtonTolerance)
      return x;
  }
  // Roundoff can stall the last digit; accept that, but not a real failure.
  if (std::abs(step(x)) <= 1e-13)
    return x;
  throw std::runtime_error(std::string(what) + ": Newton iteration did not converge");
}

void symmetrize(QuadratureRule1D& rule)
{
  const std::size_t n = rule.size();
  for (std::size_t i = 0; i < n / 2; ++i)
  {
    const std::size_t j = n - 1 - i;
    const double x = 0.5 * (rule.points[j] - rule.points[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.points[i] = -x;
    rule.points[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1)
    rule.points[n / 2] = 0.0;
}

}  // namespace

LegendreValue legendre_eval(int p, double xi)
{
  if (p < 0)
    throw std::invalid_argument("legendre_eval: negative degree");
  if (p == 0)
    return {1.0, 0.0};

  double prev = 1.0;
  double cur = xi;
  double dprev = 0.0;
  double dcur = 1.0;
  for (int k = 2; k <= p; ++k)
  {
    const double next = ((2.0 * k - 1.0) * xi * cur - (k - 1.0) * prev) / k;
    // P'_k = P'_{k-2} + (2k - 1) P_{k-1}
    const double dnext = dprev + (2.0 * k - 1.0) * cur;
    prev = cur;
    cur = next;
    dprev = dcur;
    dcur = dnext;
  }
  return {cur, dcur};
}

QuadratureRule1D gll_rule(int p)
{
  if (p < 1)
    throw std::invalid_argument("gll_rule: degree must be >= 1");

  QuadratureRule1D rule;
  rule.points.resize(p + 1);
  rule.weights.resize(p + 1);
  rule.points.front() = -1.0;
  rule.points.back() = 1.0;

  const double pp1 = p * (p + 1.0);
  for (int j = 1; j < p; ++j)
  {
    const double guess = -std::cos(std::numbers::pi * j / p);
    rule.points[j] = newton_root(
        guess,
        [p, pp1](double x) {
          const auto [value, derivative] = legendre_eval(p, x);
          // Legendre ODE gives P''_p from P_p and P'_p.
          const double second = (2.0 * x * derivative - pp1 * value) / (1.0 - x * x);
          return derivative / second;
        },
        "gll_rule");
  }
  std::sort(rule.points.begin(), rule.points.end());
  for (int j = 0; j <= p; ++j)
  {
    const double value = legendre_eval(p, rule.points[j]).value;
    rule.weights[j] = 2.0 / (pp1 * value * value);
  }
  symmetrize(rule);
  return rule;
}

QuadratureRule1D gauss_legendre_rule(int n)
{
  if (n < 1)
    throw std::invalid_argument("gauss_legendre_rule: need at least one point");

  QuadratureRule1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i)
  {
    const double guess = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    const double x = newton_root(
        guess,
        [n](double x) {
          const auto [value, derivative] = legendre_eval(n, x);
          return value / derivative;
        },
        "gauss_legendre_rule");
    const double derivative = legendre_eval(n, x).derivative;
    rule.points[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * derivative * derivative);
  }
  std::vector<std::size_t> order(n);
  for (int i = 0; i < n; ++i)
    order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rule.points[a] < rule.points[b];
  });
  QuadratureRule1D sorted;
  for (auto i : order)
  {
    sorted.points.push_back(rule.points[i]);
    sorted.weights.push_back(rule.weights[i]);
  }
  symmetrize(sorted);
  return sorted;
}

QuadratureRule1D map_rule(const QuadratureRule1D& rule, double a, double b)
{
  QuadratureRule1D mapped;
  mapped.points.reserve(rule.size());
  mapped.weights.reserve(rule.size());
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < rule.size(); ++i)
  {
    mapped.points.push_back(a + half * (rule.points[i] + 1.0));
    mapped.weights.push_back(half * rule.weights[i]);
  }
  return mapped;
}

SpectralBasis1D::SpectralBasis1D(int p) : p_(p), rule_(gll_rule(p))
{
  const int n = p + 1;
  const auto& x = rule_.points;
  bary_.assign(n, 1.0);
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
      if (j != i)
        bary_[i] *= x[i] - x[j];
    bary_[i] = 1.0 / bary_[i];
  }

  diff_.assign(n * n, 0.0);
  for (int k = 0; k < n; ++k)
  {
    double diag = 0.0;
    for (int i = 0; i < n; ++i)
    {
      if (i == k)
        continue;
      const double d = (bary_[i] / bary_[k]) / (x[k] - x[i]);
      diff_[k * n + i] = d;
      diag -= d;
    }
    diff_[k * n + k] = diag;
  }
}

void SpectralBasis1D::eval(double xi, std::span<double> values, std::span<double> derivatives) const
{
  const int n = p_ + 1;
  const auto& x = rule_.points;

  int hit = -1;
  for (int k = 0; k < n; ++k)
    if (xi == x[k])
      hit = k;

  if (hit >= 0)
  {
    std::fill(values.begin(), values.begin() + n, 0.0);
    values[hit] = 1.0;
  }
  else
  {
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
    {
      values[i] = bary_[i] / (xi - x[i]);
      sum += values[i];
    }
    for (int i = 0; i < n; ++i)
      values[i] /= sum;
  }

  // dN_i/dxi has degree p-1, so interpolating its nodal values is exact.
  for (int i = 0; i < n; ++i)
  {
    double d = 0.0;
    for (int k = 0; k < n; ++k)
      d += values[k] * diff_[k * n + i];
    derivatives[i] = d;
  }
}

ShapeValues1D SpectralBasis1D::eval(double xi) const
{
  ShapeValues1D out;
  out.values.resize(p_ + 1);
  out.derivatives.resize(p_ + 1);
  eval(xi, out.values, out.derivatives);
  return out;
}

TensorBasis::TensorBasis(int dim, int p) : dim_(dim), basis_(p)
{
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("TensorBasis: only d = 1 and d = 2 are supported");
  size_ = dim == 1 ? p + 1 : (p + 1) * (p + 1);
}

std::array<int, 2> TensorBasis::multi_index(int flat) const
{
  const int n = degree() + 1;
  return {flat % n, flat / n};
}

Vec2 TensorBasis::node(int flat) const
{
  const auto [i1, i2] = multi_index(flat);
  const auto nodes = basis_.nodes();
  return {nodes[i1], dim_ == 2 ? nodes[i2] : 0.0};
}

void TensorBasis::eval(const Vec2& xi, std::span<double> values, std::span<Vec2> gradients) const
{
  const int n = degree() + 1;
  std::array<double, 32> v1{}, d1{}, v2{}, d2{};
  if (n > 32)
    throw std::invalid_argument("TensorBasis: degree too high");
  basis_.eval(xi[0], std::span(v1).first(n), std::span(d1).first(n));
  if (dim_ == 1)
  {
    for (int i = 0; i < n; ++i)
    {
      values[i] = v1[i];
      gradients[i] = {d1[i], 0.0};
    }
    return;
  }
  basis_.eval(xi[1], std::span(v2).first(n), std::span(d2).first(n));
  for (int i2 = 0; i2 < n; ++i2)
    for (int i1 = 0; i1 < n; ++i1)
    {
      const int k = i1 + n * i2;
      values[k] = v1[i1] * v2[i2];
      gradients[k] = {d1[i1] * v2[i2], v1[i1] * d2[i2]};
    }
}

TensorShapeValues TensorBasis::eval(const Vec2& xi) const
{
  TensorShapeValues out;
  out.values.resize(size_);
  out.gradients.resize(size_);
  eval(xi, out.values, out.gradients);
  return out;
}

}  // namespace cutwave
