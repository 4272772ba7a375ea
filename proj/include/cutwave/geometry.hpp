// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <numbers>
#include <vector>

#include "cutwave/polybasis.hpp"

namespace cutwave
{

enum class BoundaryCondition
{
  Neumann,
  Dirichlet
};

/// Immersed rod: physical part [0, physical_length] inside the extended domain
/// [0, length]. Homogeneous Neumann at x = 0.
struct RodDomain
{
  double length = 1.0;
  double physical_length = 0.9863;
  BoundaryCondition right_bc = BoundaryCondition::Neumann;

  void validate() const;
  bool contains(double x) const { return x >= 0.0 && x <= physical_length; }
};

/// Annular sector centred at (center, center) inside the square [0, length]^2:
/// inner_radius <= r <= outer_radius and end_angle <= theta <= pi/2 - end_angle.
/// The Dirichlet option applies to the two radial end faces only.
struct ArcDomain
{
  double length = 1.1;
  double center = 0.05;
  double inner_radius = 0.5;
  double outer_radius = 1.0;
  double end_angle = std::numbers::pi / 16.0;
  BoundaryCondition bc = BoundaryCondition::Neumann;

  void validate() const;
  double radius(const Vec2& x) const;
  double angle(const Vec2& x) const;
  bool contains(const Vec2& x) const;
};

enum class ElementClass
{
  Internal,
  Cut,
  Outside
};

const char* to_string(ElementClass cls);

/// Axis-aligned element with the affine map from [-1, 1]^d.
struct ElementBox
{
  int dim = 1;
  Vec2 lower{0.0, 0.0};
  Vec2 upper{1.0, 0.0};

  Vec2 size() const { return {upper[0] - lower[0], dim == 2 ? upper[1] - lower[1] : 0.0}; }
  double measure() const;
  /// Determinant of d(x)/d(xi).
  double jacobian() const;
  Vec2 to_physical(const Vec2& xi) const;
  Vec2 to_reference(const Vec2& x) const;
};

struct CartesianMesh
{
  int dim = 1;
  Vec2 extent{1.0, 0.0};
  std::array<int, 2> counts{1, 1};
  Vec2 element_size{1.0, 0.0};
  std::vector<ElementClass> classes;
  std::vector<int> active;  // element ids with class Internal or Cut, ascending

  int num_elements() const { return dim == 1 ? counts[0] : counts[0] * counts[1]; }
  std::array<int, 2> element_index(int e) const { return {e % counts[0], e / counts[0]}; }
  ElementBox box(int e) const;
};

/// Element quadrature in reference coordinates. Weights carry the reference
/// measure (a full element sums to 2^d); the FCM indicator is stored per point.
struct CutQuadrature
{
  int element = -1;
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::vector<double> indicator;
  /// |E ∩ Ω| / |E|
  double volume_fraction = 1.0;
  /// True when the points are the tensor GLL nodes (lumped mass).
  bool nodal = false;

  std::size_t size() const { return points.size(); }
};

enum class BoundaryKind
{
  NeumannPart,
  DirichletPart
};

/// Quadrature on one boundary piece Γ ∩ E. Points are in reference coordinates,
/// weights carry the physical surface measure.
struct BoundaryFacetQuadrature
{
  int element = -1;
  BoundaryKind kind = BoundaryKind::NeumannPart;
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::vector<Vec2> normals;

  double measure() const;
};

CartesianMesh make_rod_mesh(const RodDomain& domain, int n_el);
CartesianMesh make_arc_mesh(const ArcDomain& domain, int n_el, int p);

ElementClass classify(const RodDomain& domain, const ElementBox& box);
/// Sampling on a (p+4)^2 grid plus corners, combined with an analytic check
/// for boundary curves passing through the element.
ElementClass classify(const ArcDomain& domain, const ElementBox& box, int p);

/// Tensor GLL rule with indicator 1; the quadrature of internal elements.
CutQuadrature nodal_quadrature(int dim, int p);

/// Tensor Gauss-Legendre rule with `points` per direction and indicator 1.
CutQuadrature gauss_quadrature(int dim, int points);

/// Cut rod element: `points` Gauss-Legendre points on each side of the interface,
/// indicator 1 on the physical side and alpha on the fictitious side.
CutQuadrature rod_cut_quadrature(const RodDomain& domain, const ElementBox& box, int points,
                                 double alpha);

/// Arc element quadrature. Internal elements get the (points)^2 GLL rule.
/// Cut elements are subdivided as a quadtree down to `depth`; leaves fully inside
/// or outside get a tensor Gauss-Legendre rule, leaves still crossing the boundary
/// at full depth are split column-wise at the analytic boundary position.
CutQuadrature arc_cell_quadrature(const ArcDomain& domain, const ElementBox& box, ElementClass cls,
                                  int points, double alpha, int depth);

std::vector<BoundaryFacetQuadrature> boundary_quadrature(const RodDomain& domain,
                                                         const ElementBox& box);
/// Each boundary curve (two arcs, two radial faces) is clipped to the element and
/// sampled with a (p+2)-point Gauss-Legendre rule per piece.
std::vector<BoundaryFacetQuadrature> boundary_quadrature(const ArcDomain& domain,
                                                         const ElementBox& box, int p);

double wave_speed(const RodDomain& domain, const Vec2& x);
double wave_speed(const ArcDomain& domain, const Vec2& x);

}  // namespace cutwave
