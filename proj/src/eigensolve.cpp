// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "cutwave/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/SparseCholesky>

namespace cutwave
{

namespace
{

constexpr int kMaxSweeps = 100;
// Above this size the O(n^3)-per-sweep Jacobi method is replaced by
// Householder tridiagonalization + implicit QR.
constexpr Eigen::Index kJacobiLimit = 128;

void fix_signs(Matrix& v)
{
  for (Eigen::Index j = 0; j < v.cols(); ++j)
  {
    Eigen::Index imax = 0;
    v.col(j).cwiseAbs().maxCoeff(&imax);
    if (v(imax, j) < 0.0)
      v.col(j) *= -1.0;
  }
}

void sort_pairs(Vector& values, Matrix& vectors)
{
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
  Vector sv(n);
  Matrix svec(vectors.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i)
  {
    sv(i) = values(order[i]);
    svec.col(i) = vectors.col(order[i]);
  }
  values = std::move(sv);
  vectors = std::move(svec);
}

void jacobi(Matrix a, Vector& values, Matrix& vectors)
{
  const Eigen::Index n = a.rows();
  vectors = Matrix::Identity(n, n);
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep)
  {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q)
        off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= 1e-15 * scale)
      break;

    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q)
      {
        const double apq = a(p, q);
        if (apq == 0.0)
          continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k)
        {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k)
        {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k)
        {
          const double vkp = vectors(k, p);
          const double vkq = vectors(k, q);
          vectors(k, p) = c * vkp - s * vkq;
          vectors(k, q) = s * vkp + c * vkq;
        }
      }
  }
  if (sweep == kMaxSweeps)
    throw std::runtime_error("sym_eig: Jacobi iteration did not converge in 100 sweeps");
  values = a.diagonal();
}

void symmetric_solve(const Matrix& a, bool want_vectors, Vector& values, Matrix& vectors)
{
  if (a.rows() <= kJacobiLimit)
  {
    jacobi(a, values, vectors);
    sort_pairs(values, vectors);
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(
      a, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("sym_eig: tridiagonal QR did not converge");
  values = solver.eigenvalues();
  if (want_vectors)
    vectors = solver.eigenvectors();
}

// Symmetric-definite pencil reduced to standard form. B is first scaled to unit
// diagonal, S B S with S = diag(B)^{-1/2}, which leaves the eigenvalues unchanged
// and keeps the pivot test meaningful for badly graded cut-element matrices.
struct Reduction
{
  Vector scale;
  Eigen::LLT<Matrix> llt;
  Matrix c;
};

Reduction reduce_pencil(const Matrix& a, const Matrix& b)
{
  Reduction r;
  const Vector d = b.diagonal();
  if (!(d.array() > 0.0).all())
    throw NotPositiveDefinite("gen_sym_eig: B has a non-positive diagonal entry");
  r.scale = d.cwiseSqrt().cwiseInverse();
  const Matrix bs = r.scale.asDiagonal() * (0.5 * (b + b.transpose())) * r.scale.asDiagonal();
  const Matrix as = r.scale.asDiagonal() * (0.5 * (a + a.transpose())) * r.scale.asDiagonal();

  r.llt.compute(bs);
  if (r.llt.info() != Eigen::Success)
    throw NotPositiveDefinite("gen_sym_eig: B is not positive definite");
  const Matrix& l = r.llt.matrixLLT();
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    if (!(l(i, i) * l(i, i) > 1e-14))
      throw NotPositiveDefinite("gen_sym_eig: Cholesky pivot below 1e-14 * max diag(B)");

  const auto lower = r.llt.matrixL();
  Matrix c = lower.solve(as);
  c = lower.solve(c.transpose()).transpose();
  r.c = 0.5 * (c + c.transpose());
  return r;
}

}  // namespace

EigenPairs sym_eig(const Matrix& a)
{
  if (a.rows() != a.cols())
    throw std::invalid_argument("sym_eig: matrix must be square");
  EigenPairs out;
  symmetric_solve(0.5 * (a + a.transpose()), true, out.values, out.vectors);
  fix_signs(out.vectors);
  out.orthonormality = Orthonormality::Standard;
  return out;
}

EigenPairs gen_sym_eig(const Matrix& a, const Matrix& b)
{
  if (a.rows() != b.rows() || a.rows() != a.cols() || b.rows() != b.cols())
    throw std::invalid_argument("gen_sym_eig: shape mismatch");
  const auto r = reduce_pencil(a, b);
  EigenPairs out;
  Matrix y;
  symmetric_solve(r.c, true, out.values, y);
  out.vectors = r.scale.asDiagonal() * Matrix(r.llt.matrixU().solve(y));
  fix_signs(out.vectors);
  out.orthonormality = Orthonormality::BWeighted;
  return out;
}

Vector gen_sym_eigvals(const Matrix& a, const Matrix& b)
{
  if (a.rows() != b.rows() || a.rows() != a.cols() || b.rows() != b.cols())
    throw std::invalid_argument("gen_sym_eigvals: shape mismatch");
  const auto r = reduce_pencil(a, b);
  Vector values;
  Matrix unused;
  symmetric_solve(r.c, false, values, unused);
  std::sort(values.begin(), values.end());
  return values;
}

Vector MassOperator::apply(const Vector& x) const
{
  Vector y = diagonal.cwiseProduct(x);
  if (!is_diagonal())
    y += correction * x;
  return y;
}

Matrix MassOperator::dense() const
{
  Matrix m = Matrix(correction);
  if (m.rows() == 0)
    m = Matrix::Zero(size(), size());
  m.diagonal() += diagonal;
  return m;
}

struct MassSolver::Impl
{
  const MassOperator* mass = nullptr;
  Vector inv_diag;
  std::vector<int> block;  // global ids of coupled rows
  Eigen::SparseMatrix<double> block_matrix;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Vector block_rhs, block_x;
};

MassSolver::MassSolver(const MassOperator& mass) : impl_(std::make_unique<Impl>())
{
  impl_->mass = &mass;
  const Eigen::Index n = mass.size();
  impl_->inv_diag = mass.diagonal.cwiseInverse();
  if (mass.is_diagonal())
  {
    if ((mass.diagonal.array() <= 0.0).any())
      throw NotPositiveDefinite("MassSolver: non-positive diagonal mass entry");
    return;
  }

  std::vector<int> local(n, -1);
  for (int col = 0; col < mass.correction.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(mass.correction, col); it; ++it)
      if (local[it.row()] < 0)
        local[it.row()] = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (local[i] == 0)
    {
      local[i] = static_cast<int>(impl_->block.size());
      impl_->block.push_back(static_cast<int>(i));
    }
    else if (mass.diagonal(i) <= 0.0)
      throw NotPositiveDefinite("MassSolver: non-positive diagonal mass entry");

  const auto nb = static_cast<Eigen::Index>(impl_->block.size());
  std::vector<Eigen::Triplet<double>> trip;
  for (int col = 0; col < mass.correction.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(mass.correction, col); it; ++it)
      trip.emplace_back(local[it.row()], local[it.col()], it.value());
  for (Eigen::Index i = 0; i < nb; ++i)
    trip.emplace_back(i, i, mass.diagonal(impl_->block[i]));
  impl_->block_matrix.resize(nb, nb);
  impl_->block_matrix.setFromTriplets(trip.begin(), trip.end());
  impl_->ldlt.compute(impl_->block_matrix);
  if (impl_->ldlt.info() != Eigen::Success || (impl_->ldlt.vectorD().array() <= 0.0).any())
    throw NotPositiveDefinite("MassSolver: mass matrix is not positive definite");
  impl_->block_rhs.resize(nb);
  impl_->block_x.resize(nb);
}

MassSolver::~MassSolver() = default;
MassSolver::MassSolver(MassSolver&&) noexcept = default;
MassSolver& MassSolver::operator=(MassSolver&&) noexcept = default;

void MassSolver::solve(const Vector& b, Vector& x) const
{
  x = b.cwiseProduct(impl_->inv_diag);
  if (impl_->block.empty())
    return;
  auto& rhs = impl_->block_rhs;
  auto& bx = impl_->block_x;
  for (std::size_t i = 0; i < impl_->block.size(); ++i)
    rhs(i) = b(impl_->block[i]);
  bx = impl_->ldlt.solve(rhs);
  // Two refinement sweeps on the coupled block.
  for (int sweep = 0; sweep < 2; ++sweep)
  {
    const Vector r = rhs - impl_->block_matrix * bx;
    bx += impl_->ldlt.solve(r);
  }
  for (std::size_t i = 0; i < impl_->block.size(); ++i)
    x(impl_->block[i]) = bx(i);
}

Vector MassSolver::solve(const Vector& b) const
{
  Vector x;
  solve(b, x);
  return x;
}

Vector spd_solve(const MassOperator& mass, const Vector& b)
{
  return MassSolver(mass).solve(b);
}

namespace
{

Vector start_vector(Eigen::Index n)
{
  // Deterministic start vector with content in every mode.
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = 1.0 + 0.5 * std::sin(1.0 + 7.3 * static_cast<double>(i));
  return v;
}

MaxEigResult power_iteration(const SparseMatrix& k, const MassOperator& mass,
                             const MassSolver& solver, const MaxEigOptions& options)
{
  MaxEigResult result;
  result.dense = false;
  Vector v = start_vector(k.rows());
  v /= std::sqrt(v.dot(mass.apply(v)));

  double lambda = 0.0;
  Vector kv, w;
  for (int it = 1; it <= options.max_iterations; ++it)
  {
    kv = k * v;
    const double rq = v.dot(kv);  // v is M-normalized
    solver.solve(kv, w);
    const double norm = std::sqrt(w.dot(mass.apply(w)));
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw std::runtime_error("max_gen_eig: power iteration broke down");
    // M-norm of the residual M^{-1} K v - rq v
    const Vector r = w - rq * v;
    const double residual = std::sqrt(std::max(r.dot(mass.apply(r)), 0.0));
    v = w / norm;
    result.iterations = it;
    if (it > 1 && std::abs(rq - lambda) <= options.tolerance * std::abs(rq) &&
        residual <= options.tolerance * std::abs(rq))
    {
      result.value = rq;
      return result;
    }
    lambda = rq;
  }
  result.value = lambda;
  result.converged = false;
  return result;
}

// Lanczos on M^{-1} K in the M inner product with full reorthogonalization,
// restarted from the leading Ritz vector when the basis is full.
MaxEigResult lanczos(const SparseMatrix& k, const MassOperator& mass, const MassSolver& solver,
                     const MaxEigOptions& options)
{
  const Eigen::Index n = k.rows();
  const Eigen::Index m = std::min<Eigen::Index>(n, 150);
  const double residual_tol = std::sqrt(options.tolerance);

  MaxEigResult result;
  result.dense = false;
  Matrix q(n, m);
  Matrix mq(n, m);  // M q_j
  Vector v = start_vector(n);
  double previous = 0.0;
  Vector w, kw;

  while (result.iterations < options.max_iterations)
  {
    std::vector<double> alpha, beta;
    v /= std::sqrt(v.dot(mass.apply(v)));
    Eigen::Index j = 0;
    Vector ritz;
    double theta = 0.0;
    for (; j < m && result.iterations < options.max_iterations; ++j)
    {
      q.col(j) = v;
      mq.col(j) = mass.apply(v);
      kw = k * v;
      alpha.push_back(v.dot(kw));
      solver.solve(kw, w);
      // Two passes of Gram-Schmidt against the whole basis.
      for (int pass = 0; pass < 2; ++pass)
      {
        const Vector coeff = mq.leftCols(j + 1).transpose() * w;
        w.noalias() -= q.leftCols(j + 1) * coeff;
      }
      const double b = std::sqrt(std::max(w.dot(mass.apply(w)), 0.0));
      ++result.iterations;

      const Eigen::Index size = j + 1;
      Matrix t = Matrix::Zero(size, size);
      for (Eigen::Index i = 0; i < size; ++i)
      {
        t(i, i) = alpha[i];
        if (i + 1 < size)
          t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Matrix> tri(t);
      theta = tri.eigenvalues()(size - 1);
      ritz = tri.eigenvectors().col(size - 1);
      const double residual = std::abs(b * ritz(size - 1));
      const bool settled = std::abs(theta - previous) <= options.tolerance * std::abs(theta);
      previous = theta;
      if (residual <= options.tolerance * std::abs(theta) ||
          (settled && residual <= residual_tol * std::abs(theta)) || !(b > 0.0) ||
          size == n)
      {
        result.value = theta;
        return result;
      }
      beta.push_back(b);
      v = w / b;
    }
    // Restart from the current leading Ritz vector.
    v = q.leftCols(j) * ritz.head(j);
    result.value = theta;
  }
  result.converged = false;
  return result;
}

}  // namespace

MaxEigResult max_gen_eig(const SparseMatrix& k, const MassOperator& mass,
                         const MaxEigOptions& options)
{
  const Eigen::Index n = k.rows();
  if (n != mass.size())
    throw std::invalid_argument("max_gen_eig: size mismatch");

  MaxEigResult result;
  if (n <= options.dense_limit && !options.force_iterative)
  {
    const Vector values = gen_sym_eigvals(Matrix(k), mass.dense());
    result.value = values(n - 1);
    return result;
  }

  const MassSolver solver(mass);
  if (options.method == IterativeMethod::Power)
    return power_iteration(k, mass, solver, options);
  return lanczos(k, mass, solver, options);
}

}  // namespace cutwave
