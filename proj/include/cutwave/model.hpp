// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "cutwave/assembly.hpp"
#include "cutwave/geometry.hpp"
#include "cutwave/stabilize.hpp"

namespace cutwave
{

struct DiscretizationOptions
{
  int p = 2;
  int n_el = 50;
  StabilizationConfig stabilization;
  NitscheConfig nitsche;
  /// Quadtree depth for cut arc elements.
  int depth = 6;
};

/// A fully assembled problem together with the data needed to post-process it.
struct DiscreteProblem
{
  TensorBasis basis{1, 1};
  CartesianMesh mesh;
  std::vector<ElementGeometry> elements;  // one per active element
  std::vector<double> penalties;          // Nitsche lambda_E per active element
  GlobalSystem system;
  double lambda_star = 0.0;
  std::vector<DeflationReport> reports;
  /// Smallest volume fraction among cut elements, 1 when nothing is cut.
  double cut_fraction = 1.0;
  /// Quadrature of E ∩ Ω for active element `index` with `points` per direction.
  std::function<CutQuadrature(std::size_t index, int points)> physical_quadrature;

  int dim() const { return basis.dim(); }
  /// Global coefficient vector interpolating `field` at the dof nodes.
  Vector interpolate(const ScalarField& field) const;
  /// Finite element field at a reference point of active element `index`.
  double evaluate(const Vector& coefficients, std::size_t index, const Vec2& xi) const;
};

DiscreteProblem build_rod_problem(const RodDomain& domain, const DiscretizationOptions& options);

/// Uniform mesh of [0, l_p] with the right boundary condition imposed strongly.
DiscreteProblem build_boundary_fitted_rod(const RodDomain& domain, int p, int n_el);

DiscreteProblem build_arc_problem(const ArcDomain& domain, const DiscretizationOptions& options);

/// Gaussian pulse 2 exp(-x^2 / (2 sigma^2)) with sigma = 0.05.
double rod_initial(const Vec2& x);
/// Round trip time 2 l_p / c.
double rod_final_time(const RodDomain& domain);

/// Circumferential pulse 2 exp(-(theta - pi/4)^2 / (2 (pi/40)^2)).
double arc_initial(const ArcDomain& domain, const Vec2& x);
/// pi/2 - 2 theta_Gamma.
double arc_final_time(const ArcDomain& domain);

}  // namespace cutwave
