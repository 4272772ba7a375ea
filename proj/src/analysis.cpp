// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "cutwave/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cutwave
{

std::vector<double> rod_reference_frequencies(double physical_length, double speed,
                                              BoundaryCondition bc, int count)
{
  if (count < 1)
    throw std::invalid_argument("rod_reference_frequencies: count must be positive");
  const double shift = bc == BoundaryCondition::Dirichlet ? 0.5 : 0.0;
  std::vector<double> out(count);
  for (int n = 0; n < count; ++n)
    out[n] = (n + shift) * std::numbers::pi * speed / physical_length;
  return out;
}

Vector system_eigenvalues(const GlobalSystem& system)
{
  return gen_sym_eigvals(Matrix(system.stiffness), system.mass.dense());
}

std::vector<SpectrumRow> spectrum_accuracy(const GlobalSystem& system, double physical_length,
                                           double speed, BoundaryCondition bc)
{
  const Vector lambda = system_eigenvalues(system);
  const int n = static_cast<int>(lambda.size());
  const auto ref = rod_reference_frequencies(physical_length, speed, bc, n);
  const int first = bc == BoundaryCondition::Neumann ? 1 : 0;

  std::vector<SpectrumRow> rows;
  for (int i = first; i < n; ++i)
  {
    SpectrumRow row;
    row.mode_index = i - first + 1;
    row.omega = std::sqrt(std::max(lambda(i), 0.0));
    row.omega_ref = ref[i];
    row.ratio = row.omega / row.omega_ref;
    rows.push_back(row);
  }
  return rows;
}

double max_ratio(const std::vector<SpectrumRow>& rows)
{
  double m = 0.0;
  for (const auto& r : rows)
    m = std::max(m, r.ratio);
  return m;
}

double l2_error(const DiscreteProblem& problem, const Vector& coefficients,
                const ScalarField& exact, int extra_points)
{
  const int points = problem.basis.degree() + 1 + extra_points;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < problem.elements.size(); ++i)
  {
    const auto& box = problem.elements[i].box;
    const double jac = box.jacobian();
    const auto q = problem.physical_quadrature(i, points);
    for (std::size_t k = 0; k < q.size(); ++k)
    {
      const double w = q.weights[k] * q.indicator[k] * jac;
      if (w == 0.0)
        continue;
      const double u = problem.evaluate(coefficients, i, q.points[k]);
      const double ue = exact(box.to_physical(q.points[k]));
      num += w * (u - ue) * (u - ue);
      den += w * ue * ue;
    }
  }
  if (!(den > 0.0))
    throw std::invalid_argument("l2_error: exact field vanishes on the domain");
  return std::sqrt(num / den);
}

double convergence_slope(const std::vector<double>& h, const std::vector<double>& error)
{
  if (h.size() != error.size() || h.size() < 2)
    throw std::invalid_argument("convergence_slope: need at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i)
  {
    const double x = std::log(h[i]);
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace cutwave
