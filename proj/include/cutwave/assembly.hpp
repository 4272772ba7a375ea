// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "cutwave/eigensolve.hpp"
#include "cutwave/geometry.hpp"
#include "cutwave/polybasis.hpp"

namespace cutwave
{

using ScalarField = std::function<double(const Vec2&)>;

struct MaterialField
{
  double density = 1.0;
  ScalarField speed;   // empty means c = 1
  ScalarField source;  // empty means f = 0
  double alpha = 1e-10;

  void validate() const;
  double speed_at(const Vec2& x) const { return speed ? speed(x) : 1.0; }
  /// rho c^2
  double modulus_at(const Vec2& x) const
  {
    const double c = speed_at(x);
    return density * c * c;
  }
};

enum class NitscheMode
{
  ComputedPenalty,
  FixedPenalty,
  PenaltyOnly
};

struct NitscheConfig
{
  NitscheMode mode = NitscheMode::ComputedPenalty;
  double penalty = 0.0;  // used by FixedPenalty and PenaltyOnly
  double g_dirichlet = 0.0;

  void validate() const;
  bool has_consistency_terms() const { return mode != NitscheMode::PenaltyOnly; }
};

struct ElementMatrices
{
  Matrix m;
  Matrix k;
  Vector f;
  bool is_lumped = false;
};

/// Everything needed to integrate one active element.
struct ElementGeometry
{
  int element = -1;
  ElementClass cls = ElementClass::Internal;
  ElementBox box;
  CutQuadrature quadrature;
  std::vector<BoundaryFacetQuadrature> facets;
};

/// Internal elements: lumped diagonal mass from the nodal rule. Cut elements:
/// consistent mass weighted by the FCM indicator.
Matrix element_mass(const ElementGeometry& geo, const TensorBasis& basis,
                    const MaterialField& material);

/// Volume stiffness plus the Nitsche terms on Dirichlet facets. Consistency
/// terms carry the local modulus rho c^2 so the weak form stays consistent for
/// graded materials; for rho c^2 = 1 they reduce to the plain normal derivative.
Matrix element_stiffness(const ElementGeometry& geo, const TensorBasis& basis,
                         const MaterialField& material, const NitscheConfig& nitsche,
                         double penalty);

struct PenaltyResult
{
  double value = 0.0;
  bool degenerate = false;  // A vanished, no penalty could be derived
};

/// Twice the largest eigenvalue of A mu = mu B with A the normal-flux matrix on
/// the Dirichlet part and B the stiffness on the physical part of the element.
/// The near-null space of B (eigenvalues below 1e-10 lambda_max(B)) is removed.
PenaltyResult nitsche_penalty(const ElementGeometry& geo, const TensorBasis& basis,
                              const MaterialField& material);

/// Penalty actually used on an element for the given configuration.
double element_penalty(const ElementGeometry& geo, const TensorBasis& basis,
                       const MaterialField& material, const NitscheConfig& nitsche);

Vector element_force(const ElementGeometry& geo, const TensorBasis& basis,
                     const MaterialField& material, const NitscheConfig& nitsche,
                     double penalty, double g_neumann = 0.0);

/// Local-to-global numbering over active elements. Constrained nodes map to -1.
struct DofMap
{
  std::vector<std::vector<int>> element_dofs;  // indexed like mesh.active
  std::vector<Vec2> coordinates;               // per global dof
  int n_dof = 0;
};

DofMap build_dof_map(const CartesianMesh& mesh, const TensorBasis& basis,
                     const std::function<bool(const Vec2&)>& constrained = {});

struct GlobalSystem
{
  MassOperator mass;
  SparseMatrix stiffness;
  Vector force;
  DofMap dofs;

  int n_dof() const { return dofs.n_dof; }
};

/// Lumped element masses go to the diagonal, all other element masses to the
/// sparse correction. Elements are added in list order.
GlobalSystem assemble(DofMap dofs, const std::vector<ElementMatrices>& elements);

}  // namespace cutwave
