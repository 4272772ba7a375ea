// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "cutwave/geometry.hpp"
#include "cutwave/model.hpp"

namespace cutwave
{

/// Neumann: n pi c / l_p; Dirichlet at l_p: (n + 1/2) pi c / l_p; n = 0, 1, ...
std::vector<double> rod_reference_frequencies(double physical_length, double speed,
                                              BoundaryCondition bc, int count);

struct SpectrumRow
{
  int mode_index = 0;  // 1-based over the compared modes
  double omega = 0.0;
  double omega_ref = 0.0;
  double ratio = 0.0;
};

/// Ascending eigenvalues of the dense pencil (K, M).
Vector system_eigenvalues(const GlobalSystem& system);

/// Pairs discrete and reference frequencies by sorted index. For Neumann the
/// zero mode is dropped from both lists.
std::vector<SpectrumRow> spectrum_accuracy(const GlobalSystem& system, double physical_length,
                                           double speed, BoundaryCondition bc);

double max_ratio(const std::vector<SpectrumRow>& rows);

/// Relative L2 error over the physical domain, integrated with
/// p + 1 + extra_points Gauss points per direction on every physical piece.
double l2_error(const DiscreteProblem& problem, const Vector& coefficients,
                const ScalarField& exact, int extra_points = 3);

/// Least-squares slope of log(error) against log(h).
double convergence_slope(const std::vector<double>& h, const std::vector<double>& error);

}  // namespace cutwave
