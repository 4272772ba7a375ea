// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "cutwave/eigensolve.hpp"
#include "cutwave/model.hpp"
#include "doctest.h"

using namespace cutwave;

namespace
{

Matrix random_spd(int n, std::mt19937_64& rng, double shift = 0.1)
{
  std::normal_distribution<double> g;
  Matrix x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      x(i, j) = g(rng);
  return x * x.transpose() + shift * Matrix::Identity(n, n);
}

// Reduction through an explicit inverse of the Cholesky factor and Eigen's
// symmetric solver; shares no code with gen_sym_eig.
Vector naive_pencil_values(const Matrix& a, const Matrix& b)
{
  const Matrix l = Eigen::LLT<Matrix>(b).matrixL();
  const Matrix li = l.inverse();
  const Matrix c = li * a * li.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (c + c.transpose()));
  return es.eigenvalues();
}

MassOperator diagonal_mass(const Vector& d)
{
  MassOperator m;
  m.diagonal = d;
  m.correction.resize(d.size(), d.size());
  return m;
}

SparseMatrix sparse(const Matrix& a)
{
  return a.sparseView();
}

}  // namespace

TEST_CASE("sym_eig examples")
{
  Matrix a = Vector(Eigen::Vector3d(3, 1, 2)).asDiagonal();
  auto e = sym_eig(a);
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(2.0));
  CHECK(e.values(2) == doctest::Approx(3.0));
  CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(2, 1)) == doctest::Approx(1.0));

  Matrix b(2, 2);
  b << 2, 1, 1, 2;
  e = sym_eig(b);
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(3.0));

  e = sym_eig(Matrix::Identity(5, 5));
  for (int i = 0; i < 5; ++i)
    CHECK(e.values(i) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig vectors are orthonormal with the sign convention")
{
  std::mt19937_64 rng(3);
  for (int n : {3, 7, 12, 40, 150})
  {
    const Matrix a = random_spd(n, rng) - 2.0 * Matrix::Identity(n, n);
    const auto e = sym_eig(a);
    CHECK((e.vectors.transpose() * e.vectors - Matrix::Identity(n, n)).norm() < 1e-10);
    CHECK((a * e.vectors - e.vectors * e.values.asDiagonal()).norm() < 1e-9 * a.norm());
    for (int i = 0; i + 1 < n; ++i)
      CHECK(e.values(i) <= e.values(i + 1));
    for (int j = 0; j < n; ++j)
    {
      Eigen::Index k;
      e.vectors.col(j).cwiseAbs().maxCoeff(&k);
      CHECK(e.vectors(k, j) > 0.0);
    }
  }
}

TEST_CASE("gen_sym_eig examples")
{
  Matrix a = Vector(Eigen::Vector2d(4, 9)).asDiagonal();
  auto e = gen_sym_eig(a, Matrix::Identity(2, 2));
  CHECK(e.values(0) == doctest::Approx(4.0));
  CHECK(e.values(1) == doctest::Approx(9.0));
  CHECK(e.orthonormality == Orthonormality::BWeighted);

  std::mt19937_64 rng(17);
  const Matrix k = random_spd(6, rng);
  e = gen_sym_eig(k, 2.0 * k);
  for (int i = 0; i < 6; ++i)
    CHECK(e.values(i) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("gen_sym_eig against an independent reduction")
{
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 10; ++trial)
  {
    const int n = 8;
    const Matrix a = random_spd(n, rng);
    const Matrix b = random_spd(n, rng);
    const auto e = gen_sym_eig(a, b);
    const Vector oracle = naive_pencil_values(a, b);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(e.values(i) - oracle(i)) <= 1e-9 * std::abs(oracle(n - 1)));

    // B-orthonormality, residuals and reconstruction
    const Matrix& phi = e.vectors;
    CHECK((phi.transpose() * b * phi - Matrix::Identity(n, n)).norm() < 1e-9);
    for (int i = 0; i < n; ++i)
      CHECK((a * phi.col(i) - e.values(i) * b * phi.col(i)).norm() <= 1e-9 * a.norm());
    const Matrix rebuilt = b * phi * e.values.asDiagonal() * phi.transpose() * b;
    CHECK((rebuilt - a).norm() <= 1e-8 * a.norm());

    const Vector values_only = gen_sym_eigvals(a, b);
    CHECK((values_only - e.values).norm() <= 1e-9 * e.values.norm());
  }
}

TEST_CASE("gen_sym_eig under congruence")
{
  std::mt19937_64 rng(99);
  const int n = 7;
  const Matrix a = random_spd(n, rng);
  const Matrix b = random_spd(n, rng);
  const Matrix s = random_spd(n, rng, 1.0);
  const Vector v1 = gen_sym_eig(a, b).values;
  const Vector v2 = gen_sym_eig(s.transpose() * a * s, s.transpose() * b * s).values;
  for (int i = 0; i < n; ++i)
    CHECK(v2(i) == doctest::Approx(v1(i)).epsilon(1e-9));
}

TEST_CASE("gen_sym_eig handles badly scaled definite pencils")
{
  // diagonal spread of 1e16 but definite
  Matrix b = Vector(Eigen::Vector3d(4e9, 1.0, 1e-7)).asDiagonal();
  b(0, 1) = b(1, 0) = 1e3;
  Matrix a = Matrix::Identity(3, 3);
  const auto e = gen_sym_eig(a, b);
  CHECK((e.vectors.transpose() * b * e.vectors - Matrix::Identity(3, 3)).norm() < 1e-8);
  CHECK(e.values(2) == doctest::Approx(1e7).epsilon(1e-6));
}

TEST_CASE("gen_sym_eig rejects a singular B")
{
  Matrix b = Matrix::Zero(2, 2);
  b(0, 0) = 1.0;
  CHECK_THROWS_AS(gen_sym_eig(Matrix::Identity(2, 2), b), NotPositiveDefinite);
  Matrix c(2, 2);
  c << 1, 1, 1, 1;
  CHECK_THROWS_AS(gen_sym_eigvals(Matrix::Identity(2, 2), c), NotPositiveDefinite);
}

TEST_CASE("max_gen_eig small examples")
{
  Matrix k(2, 2);
  const double h = 0.1;
  k << 1, -1, -1, 1;
  k /= h;
  const auto m = diagonal_mass(Vector::Constant(2, h / 2));
  auto r = max_gen_eig(sparse(k), m);
  CHECK(r.dense);
  CHECK(r.value == doctest::Approx(4.0 / (h * h)).epsilon(1e-12));

  std::mt19937_64 rng(4);
  const Matrix km = random_spd(5, rng);
  MassOperator mm;
  mm.diagonal = Vector::Zero(5);
  mm.correction = km.sparseView();
  CHECK(max_gen_eig(sparse(km), mm).value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("max_gen_eig dense and iterative paths agree on the rod")
{
  for (auto bc : {BoundaryCondition::Neumann, BoundaryCondition::Dirichlet})
  {
    RodDomain rod;
    rod.right_bc = bc;
    DiscretizationOptions opt;
    const auto prob = build_rod_problem(rod, opt);
    REQUIRE(prob.system.n_dof() == 101);
    const auto dense = max_gen_eig(prob.system.stiffness, prob.system.mass);
    CHECK(dense.dense);
    for (auto method : {IterativeMethod::Lanczos, IterativeMethod::Power})
    {
      MaxEigOptions it;
      it.force_iterative = true;
      it.method = method;
      const auto iter = max_gen_eig(prob.system.stiffness, prob.system.mass, it);
      CHECK_FALSE(iter.dense);
      CHECK(iter.converged);
      CHECK(std::abs(iter.value - dense.value) <= 1e-8 * dense.value);
    }
  }
}

TEST_CASE("max_gen_eig iterative path on an unstabilized cut rod")
{
  // MS with a stiff outlier: spectrum far from uniform
  RodDomain rod;
  rod.right_bc = BoundaryCondition::Dirichlet;
  DiscretizationOptions opt;
  opt.stabilization.mode = StabilizationMode::MS;
  const auto prob = build_rod_problem(rod, opt);
  MaxEigOptions it;
  it.force_iterative = true;
  const auto dense = max_gen_eig(prob.system.stiffness, prob.system.mass);
  const auto iter = max_gen_eig(prob.system.stiffness, prob.system.mass, it);
  CHECK(std::abs(iter.value - dense.value) <= 1e-8 * dense.value);
}

TEST_CASE("max_gen_eig is monotone under SPD additions")
{
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial)
  {
    const int n = 9;
    const Matrix k = random_spd(n, rng);
    const Matrix extra = random_spd(n, rng, 0.0);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    Vector d(n);
    for (int i = 0; i < n; ++i)
      d(i) = u(rng);
    const auto m = diagonal_mass(d);
    const double before = max_gen_eig(sparse(k), m).value;
    const double after = max_gen_eig(sparse(Matrix(k + extra)), m).value;
    CHECK(after >= before * (1 - 1e-12));
  }
}

TEST_CASE("spd_solve")
{
  const Vector d = Eigen::Vector3d(2, 4, 8);
  const Vector b = Eigen::Vector3d(1, 1, 1);
  const Vector x = spd_solve(diagonal_mass(d), b);
  CHECK(x(0) == doctest::Approx(0.5));
  CHECK(x(2) == doctest::Approx(0.125));
  CHECK((spd_solve(diagonal_mass(Vector::Ones(3)), b) - b).norm() == 0.0);

  for (auto bc : {BoundaryCondition::Neumann, BoundaryCondition::Dirichlet})
    for (auto mode : {StabilizationMode::MS, StabilizationMode::GevsMass})
    {
      RodDomain rod;
      rod.right_bc = bc;
      DiscretizationOptions opt;
      opt.stabilization.mode = mode;
      const auto prob = build_rod_problem(rod, opt);
      CHECK_FALSE(prob.system.mass.is_diagonal());
      std::mt19937_64 rng(12);
      std::normal_distribution<double> g;
      Vector rhs(prob.system.n_dof());
      for (auto& v : rhs)
        v = g(rng);
      const Vector sol = spd_solve(prob.system.mass, rhs);
      CHECK((prob.system.mass.apply(sol) - rhs).norm() <= 1e-12 * rhs.norm());
    }
}

TEST_CASE("mass operator dense form")
{
  MassOperator m = diagonal_mass(Eigen::Vector2d(1, 2));
  std::vector<Eigen::Triplet<double>> t{{0, 1, 0.5}, {1, 0, 0.5}};
  m.correction.setFromTriplets(t.begin(), t.end());
  Matrix expected(2, 2);
  expected << 1, 0.5, 0.5, 2;
  CHECK((m.dense() - expected).norm() == 0.0);
  CHECK((m.apply(Eigen::Vector2d(1, 1)) - Vector(Eigen::Vector2d(1.5, 2.5))).norm() < 1e-15);
}
