// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "cutwave/eigensolve.hpp"

namespace cutwave
{

enum class StabilizationMode
{
  MS,
  EVS,
  GevsMass,
  GevsStiffness,
  GevsBoth
};

const char* to_string(StabilizationMode mode);
StabilizationMode parse_stabilization(const std::string& name);
bool is_gevs(StabilizationMode mode);

/// Which full-element mass scales the EVS term.
enum class EvsReference
{
  Lumped,
  Consistent
};

struct StabilizationConfig
{
  StabilizationMode mode = StabilizationMode::GevsMass;
  double alpha = 1e-10;
  double epsilon = 1e-2;
  double f_lambda = 1e-2;
  /// Zero means "derive from the full elements of the mesh".
  double lambda_star = 0.0;
  EvsReference evs_reference = EvsReference::Lumped;
  /// Also deflate uncut elements that carry weak Dirichlet terms.
  bool include_uncut_dirichlet = false;

  void validate() const;
};

struct DeflationReport
{
  int element = -1;
  int deflated = 0;
  double lambda_min_before = 0.0;
  double lambda_max_before = 0.0;
  double lambda_min_after = 0.0;
  double lambda_max_after = 0.0;
  std::vector<double> coefficients;  // c_i, or (c_i^k, c_i^m) pairs for GevsBoth
};

/// A + (lambda* - lambda_k) phi phi^T for a unit eigenvector phi.
Matrix deflate_standard(const Matrix& a, const Vector& phi, double lambda_k, double lambda_star);

enum class DeflationSide
{
  Left,
  Right,
  Both
};

struct Pencil
{
  Matrix a;
  Matrix b;
};

/// Moves the generalized eigenvalue lambda_k of a B-orthonormal eigenvector to
/// lambda_star by rank-one updates c B phi phi^T B on A, B or both.
/// Throws std::invalid_argument when the B update would give 1 + c_B <= 0.
Pencil deflate_generalized(const Matrix& a, const Matrix& b, const Vector& phi, double lambda_k,
                           double lambda_star, DeflationSide side);

/// m + eps max(m_full)/max(m_s0) m_s0 with m_s0 the projector onto the eigenvectors
/// of m below f_lambda lambda_max(m).
Matrix evs_mass(const Matrix& m, const Matrix& m_full, double epsilon, double f_lambda,
                DeflationReport* report = nullptr);

enum class GevsVariant
{
  Mass,
  Stiffness,
  Both
};

struct GevsResult
{
  Matrix k;
  Matrix m;
  DeflationReport report;
};

/// Deflates every eigenvalue of (k, m) above lambda_star onto lambda_star.
/// Eigenvalues within 1e-12 relative of lambda_star are left alone.
GevsResult gevs(const Matrix& k, const Matrix& m, double lambda_star, GevsVariant variant);

GevsVariant gevs_variant(StabilizationMode mode);

/// Largest eigenvalue of the full-element pencil (k_full, m_full).
double lambda_star_reference(const Matrix& k_full, const Matrix& m_full);

}  // namespace cutwave
