// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "cutwave/assembly.hpp"
#include "cutwave/model.hpp"
#include "doctest.h"

using namespace cutwave;

namespace
{

ElementGeometry rod_element(double a, double b, const CutQuadrature& q)
{
  ElementGeometry geo;
  geo.element = 0;
  geo.box.dim = 1;
  geo.box.lower = {a, 0.0};
  geo.box.upper = {b, 0.0};
  geo.quadrature = q;
  return geo;
}

BoundaryFacetQuadrature dirichlet_point(double xi)
{
  BoundaryFacetQuadrature f;
  f.kind = BoundaryKind::DirichletPart;
  f.points = {{xi, 0.0}};
  f.weights = {1.0};
  f.normals = {{1.0, 0.0}};
  return f;
}

ElementGeometry cut_rod_element(double chi, int p, double alpha, bool dirichlet)
{
  RodDomain rod;
  rod.physical_length = 0.95 + chi * 0.05;
  rod.right_bc = dirichlet ? BoundaryCondition::Dirichlet : BoundaryCondition::Neumann;
  ElementGeometry geo = rod_element(0.95, 1.0, {});
  geo.cls = ElementClass::Cut;
  geo.quadrature = rod_cut_quadrature(rod, geo.box, p + 1, alpha);
  geo.facets = boundary_quadrature(rod, geo.box);
  return geo;
}

}  // namespace

TEST_CASE("lumped internal mass")
{
  TensorBasis basis(1, 2);
  MaterialField mat;
  const auto geo = rod_element(0.5, 0.52, nodal_quadrature(1, 2));
  const Matrix m = element_mass(geo, basis, mat);
  CHECK(m(0, 0) == doctest::Approx(0.01 / 3));
  CHECK(m(1, 1) == doctest::Approx(0.04 / 3));
  CHECK(m(2, 2) == doctest::Approx(0.01 / 3));
  CHECK(m(0, 1) == 0.0);
}

TEST_CASE("lumped mass equals row sums of the consistent mass")
{
  MaterialField mat;
  mat.density = 2.5;
  for (int dim : {1, 2})
    for (int p = 1; p <= 5; ++p)
    {
      TensorBasis basis(dim, p);
      auto geo = rod_element(0.0, 0.3, nodal_quadrature(dim, p));
      geo.box.dim = dim;
      geo.box.upper = {0.3, dim == 2 ? 0.2 : 0.0};
      const Matrix lumped = element_mass(geo, basis, mat);
      geo.quadrature = gauss_quadrature(dim, p + 1);
      const Matrix consistent = element_mass(geo, basis, mat);
      const Vector rows = consistent.rowwise().sum();
      for (int i = 0; i < basis.size(); ++i)
        CHECK(std::abs(rows(i) - lumped(i, i)) <= 1e-10 * lumped(i, i));
    }
}

TEST_CASE("cut mass limits")
{
  TensorBasis basis(1, 2);
  MaterialField mat;
  // alpha = 1: the cut rule reproduces the full consistent mass
  const auto geo = cut_rod_element(0.3, 2, 1.0, false);
  const Matrix cut = element_mass(geo, basis, mat);
  auto full = geo;
  full.quadrature = gauss_quadrature(1, 3);
  CHECK((cut - element_mass(full, basis, mat)).norm() <= 1e-14);

  // vanishing physical part and alpha
  const auto tiny = cut_rod_element(1e-12, 2, 1e-14, false);
  CHECK(element_mass(tiny, basis, mat).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("linear stiffness")
{
  TensorBasis basis(1, 1);
  MaterialField mat;
  const double h = 0.125;
  const auto geo = rod_element(0.25, 0.25 + h, gauss_quadrature(1, 2));
  const Matrix k = element_stiffness(geo, basis, mat, {}, 0.0);
  CHECK(k(0, 0) == doctest::Approx(1 / h));
  CHECK(k(0, 1) == doctest::Approx(-1 / h));
  CHECK(k(1, 1) == doctest::Approx(1 / h));
}

TEST_CASE("neumann cut stiffness annihilates constants")
{
  for (int p = 1; p <= 4; ++p)
  {
    TensorBasis basis(1, p);
    const auto geo = cut_rod_element(0.2, p, 1e-10, false);
    const Matrix k = element_stiffness(geo, basis, {}, {}, 0.0);
    const Vector rows = k.rowwise().sum();
    CHECK(rows.cwiseAbs().maxCoeff() <= 1e-12 * k.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("penalty term at the interface point")
{
  TensorBasis basis(1, 3);
  const auto geo = cut_rod_element(0.315, 3, 1e-10, true);
  REQUIRE(geo.facets.size() == 1);
  const double xi = geo.facets[0].points[0][0];
  CHECK(xi == doctest::Approx(2 * 0.315 - 1));

  NitscheConfig penalty_only{NitscheMode::PenaltyOnly, 1e3, 0.0};
  auto no_facets = geo;
  no_facets.facets.clear();
  const Matrix diff = element_stiffness(geo, basis, {}, penalty_only, 1e3) -
                      element_stiffness(no_facets, basis, {}, penalty_only, 1e3);
  const auto n = basis.basis1d().eval(xi).values;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(diff(i, j) == doctest::Approx(1e3 * n[i] * n[j]).epsilon(1e-12));
}

TEST_CASE("nitsche penalty of a full linear element")
{
  TensorBasis basis(1, 1);
  const double h = 0.05;
  auto geo = rod_element(1.0 - h, 1.0, gauss_quadrature(1, 2));
  geo.facets = {dirichlet_point(1.0)};
  const auto r = nitsche_penalty(geo, basis, {});
  CHECK_FALSE(r.degenerate);
  CHECK(r.value == doctest::Approx(2 / h).epsilon(1e-12));

  // the penalty keeps the assembled element stiffness positive semi-definite
  const Matrix k = element_stiffness(geo, basis, {}, {}, r.value);
  CHECK(sym_eig(k).values(0) >= -1e-10 * k.norm());
}

TEST_CASE("nitsche penalty grows as the physical part shrinks")
{
  for (int p = 1; p <= 4; ++p)
  {
    TensorBasis basis(1, p);
    double previous = 0.0;
    for (double chi : {1e-1, 1e-2, 1e-3, 1e-4})
    {
      const auto r = nitsche_penalty(cut_rod_element(chi, p, 1e-10, true), basis, {});
      CHECK(r.value > previous);
      previous = r.value;
    }
  }
}

TEST_CASE("nitsche penalty without dirichlet content")
{
  TensorBasis basis(1, 2);
  const auto geo = cut_rod_element(0.4, 2, 1e-10, false);
  const auto r = nitsche_penalty(geo, basis, {});
  CHECK(r.degenerate);
  CHECK(r.value == 0.0);
  CHECK(element_penalty(geo, basis, {}, {}) == 0.0);
  NitscheConfig fixed{NitscheMode::FixedPenalty, 5.0, 0.0};
  CHECK(element_penalty(cut_rod_element(0.4, 2, 1e-10, true), basis, {}, fixed) == 5.0);
}

TEST_CASE("element force")
{
  TensorBasis basis(1, 2);
  const auto geo = cut_rod_element(0.5, 2, 1e-10, true);
  CHECK(element_force(geo, basis, {}, {}, 10.0).norm() == 0.0);

  MaterialField unit_source;
  unit_source.source = [](const Vec2&) { return 1.0; };
  const auto full = rod_element(0.0, 0.2, nodal_quadrature(1, 2));
  const Vector f = element_force(full, basis, unit_source, {}, 0.0);
  CHECK(f(0) == doctest::Approx(0.1 / 3));
  CHECK(f(1) == doctest::Approx(0.4 / 3));
  CHECK(f(2) == doctest::Approx(0.1 / 3));

  NitscheConfig pen{NitscheMode::PenaltyOnly, 7.0, 1.0};
  const Vector g = element_force(geo, basis, {}, pen, 7.0);
  const auto n = basis.basis1d().eval(0.0).values;
  for (int i = 0; i < 3; ++i)
    CHECK(g(i) == doctest::Approx(7.0 * n[i]));
}

TEST_CASE("assembled rod system")
{
  RodDomain rod;
  DiscretizationOptions opt;
  opt.stabilization.mode = StabilizationMode::MS;
  opt.stabilization.alpha = 1e-5;
  const auto prob = build_rod_problem(rod, opt);
  CHECK(prob.system.n_dof() == 101);
  CHECK_FALSE(prob.system.mass.is_diagonal());

  // shared node of two internal elements carries both lumped contributions
  const double h = 0.02;
  CHECK(prob.system.mass.diagonal(2) == doctest::Approx(2 * h / 6));

  const double total = prob.system.mass.dense().sum();
  CHECK(total == doctest::Approx(0.9863 + 1e-5 * 0.0137).epsilon(1e-12));

  RodDomain fitted;
  fitted.physical_length = 1.0;
  const auto all_internal = build_rod_problem(fitted, opt);
  CHECK(all_internal.system.mass.is_diagonal());
}

TEST_CASE("patch test on an all-internal mesh")
{
  RodDomain rod;
  rod.physical_length = 1.0;
  DiscretizationOptions opt;
  opt.p = 3;
  opt.n_el = 10;
  const auto prob = build_rod_problem(rod, opt);
  const auto& coords = prob.system.dofs.coordinates;
  Vector u(prob.system.n_dof());
  for (int i = 0; i < u.size(); ++i)
    u(i) = 0.7 + 2.0 * coords[i][0];
  const Vector r = prob.system.stiffness * u;
  for (int i = 0; i < u.size(); ++i)
    if (coords[i][0] > 1e-12 && coords[i][0] < 1.0 - 1e-12)
      CHECK(std::abs(r(i)) <= 1e-10 * 2.0 * opt.n_el);
}

TEST_CASE("assembled stiffness with nitsche is positive semi-definite")
{
  for (int p = 1; p <= 4; ++p)
  {
    RodDomain rod;
    rod.right_bc = BoundaryCondition::Dirichlet;
    DiscretizationOptions opt;
    opt.p = p;
    opt.n_el = 20;
    opt.stabilization.mode = StabilizationMode::MS;
    const auto prob = build_rod_problem(rod, opt);
    const Matrix k(prob.system.stiffness);
    CHECK((k - k.transpose()).norm() <= 1e-12 * k.norm());
    const auto e = sym_eig(k);
    CHECK(e.values(0) >= -1e-10 * e.values(e.values.size() - 1));
  }
}

TEST_CASE("dof map on a 2d mesh")
{
  ArcDomain arc;
  const auto mesh = make_arc_mesh(arc, 8, 2);
  TensorBasis basis(2, 2);
  const auto dofs = build_dof_map(mesh, basis);
  CHECK(dofs.element_dofs.size() == mesh.active.size());
  CHECK(dofs.coordinates.size() == static_cast<std::size_t>(dofs.n_dof));
  // neighbouring elements share an edge of p + 1 nodes
  int shared_pairs = 0;
  for (std::size_t a = 0; a < mesh.active.size(); ++a)
    for (std::size_t b = a + 1; b < mesh.active.size(); ++b)
    {
      int common = 0;
      for (int i : dofs.element_dofs[a])
        for (int j : dofs.element_dofs[b])
          common += i == j ? 1 : 0;
      CHECK((common == 0 || common == 1 || common == 3));
      shared_pairs += common == 3 ? 1 : 0;
    }
  CHECK(shared_pairs > 0);
}

TEST_CASE("invalid configurations")
{
  MaterialField mat;
  mat.alpha = 0.0;
  CHECK_THROWS(mat.validate());
  NitscheConfig fixed{NitscheMode::FixedPenalty, 0.0, 0.0};
  CHECK_THROWS(fixed.validate());
  CHECK_THROWS(assemble(DofMap{}, std::vector<ElementMatrices>(1)));
}
