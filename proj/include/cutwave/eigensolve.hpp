// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace cutwave
{

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Raised when B of a generalized pencil is not numerically positive definite.
/// For cut elements this means the material stabilization alpha is too small.
class NotPositiveDefinite : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class Orthonormality
{
  Standard,
  BWeighted
};

struct EigenPairs
{
  Vector values;   // ascending
  Matrix vectors;  // column i belongs to values(i)
  Orthonormality orthonormality = Orthonormality::Standard;
};

/// Full spectrum of a dense symmetric matrix by cyclic Jacobi rotations.
/// Eigenvectors are normalized with their largest-magnitude entry positive.
EigenPairs sym_eig(const Matrix& a);

/// Symmetric-definite pencil A x = lambda B x via B = L L^T and
/// C = L^{-1} A L^{-T}. Returned vectors are B-orthonormal.
/// B is scaled to unit diagonal before the factorization; NotPositiveDefinite is
/// thrown when a pivot of the scaled matrix drops below 1e-14.
EigenPairs gen_sym_eig(const Matrix& a, const Matrix& b);

/// Eigenvalues only, ascending. Uses Jacobi for small pencils and a
/// tridiagonal QR solver for large ones.
Vector gen_sym_eigvals(const Matrix& a, const Matrix& b);

/// Mass operator: diagonal part plus a sparse symmetric correction.
struct MassOperator
{
  Vector diagonal;
  Eigen::SparseMatrix<double> correction;  // full symmetric storage, may be empty

  Eigen::Index size() const { return diagonal.size(); }
  bool is_diagonal() const { return correction.nonZeros() == 0; }
  Vector apply(const Vector& x) const;
  Matrix dense() const;
};

/// Factorization of a MassOperator reused across solves. Rows untouched by the
/// correction are solved by division; the coupled block by sparse LDL^T with
/// iterative refinement.
class MassSolver
{
public:
  explicit MassSolver(const MassOperator& mass);
  ~MassSolver();
  MassSolver(MassSolver&&) noexcept;
  MassSolver& operator=(MassSolver&&) noexcept;

  Vector solve(const Vector& b) const;
  void solve(const Vector& b, Vector& x) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// x with M x = b.
Vector spd_solve(const MassOperator& mass, const Vector& b);

struct MaxEigResult
{
  double value = 0.0;
  bool converged = true;
  int iterations = 0;
  bool dense = true;
};

enum class IterativeMethod
{
  Lanczos,
  Power
};

struct MaxEigOptions
{
  int dense_limit = 2000;
  double tolerance = 1e-10;
  int max_iterations = 100000;
  bool force_iterative = false;
  IterativeMethod method = IterativeMethod::Lanczos;
};

/// Largest eigenvalue of K x = lambda M x. Dense up to dense_limit unknowns,
/// above that M-orthogonal Lanczos (default) or power iteration on M^{-1} K.
MaxEigResult max_gen_eig(const SparseMatrix& k, const MassOperator& mass,
                         const MaxEigOptions& options = {});

}  // namespace cutwave
