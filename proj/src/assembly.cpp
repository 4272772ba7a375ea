// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "cutwave/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cutwave
{

namespace
{

struct PointShape
{
  Vector values;
  Matrix grads;  // n x dim, physical coordinates
};

Vec2 inverse_scale(const ElementBox& box)
{
  const Vec2 s = box.size();
  return {2.0 / s[0], box.dim == 2 ? 2.0 / s[1] : 0.0};
}

PointShape shape_at(const TensorBasis& basis, const ElementBox& box, const Vec2& xi)
{
  const int n = basis.size();
  const int dim = basis.dim();
  std::vector<double> values(n);
  std::vector<Vec2> grads(n);
  basis.eval(xi, values, grads);
  const Vec2 scale = inverse_scale(box);
  PointShape out;
  out.values = Eigen::Map<Vector>(values.data(), n);
  out.grads.resize(n, dim);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k)
      out.grads(i, k) = grads[i][k] * scale[k];
  return out;
}

Vector normal_derivative(const PointShape& s, const Vec2& normal)
{
  Vector dn = s.grads.col(0) * normal[0];
  if (s.grads.cols() == 2)
    dn += s.grads.col(1) * normal[1];
  return dn;
}

bool has_dirichlet(const ElementGeometry& geo)
{
  return std::any_of(geo.facets.begin(), geo.facets.end(), [](const auto& f) {
    return f.kind == BoundaryKind::DirichletPart;
  });
}

}  // namespace

void MaterialField::validate() const
{
  if (!(density > 0.0))
    throw std::invalid_argument("material: density must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("material: alpha must lie in (0, 1]");
}

void NitscheConfig::validate() const
{
  if (mode != NitscheMode::ComputedPenalty && !(penalty > 0.0))
    throw std::invalid_argument("nitsche: a fixed penalty must be positive");
}

Matrix element_mass(const ElementGeometry& geo, const TensorBasis& basis,
                    const MaterialField& material)
{
  const int n = basis.size();
  const double jac = geo.box.jacobian();
  const auto& q = geo.quadrature;
  Matrix m = Matrix::Zero(n, n);

  if (q.nodal)
  {
    // Nodal GLL quadrature: N_i(x_q) = delta_iq.
    for (std::size_t k = 0; k < q.size(); ++k)
      m(k, k) = material.density * q.weights[k] * q.indicator[k] * jac;
    return m;
  }

  std::vector<double> values(n);
  std::vector<Vec2> grads(n);
  for (std::size_t k = 0; k < q.size(); ++k)
  {
    basis.eval(q.points[k], values, grads);
    const double w = material.density * q.weights[k] * q.indicator[k] * jac;
    const Eigen::Map<Vector> v(values.data(), n);
    m.noalias() += w * v * v.transpose();
  }
  return 0.5 * (m + m.transpose());
}

Matrix element_stiffness(const ElementGeometry& geo, const TensorBasis& basis,
                         const MaterialField& material, const NitscheConfig& nitsche,
                         double penalty)
{
  const int n = basis.size();
  const double jac = geo.box.jacobian();
  const auto& q = geo.quadrature;
  Matrix k = Matrix::Zero(n, n);

  for (std::size_t i = 0; i < q.size(); ++i)
  {
    const Vec2 x = geo.box.to_physical(q.points[i]);
    const auto s = shape_at(basis, geo.box, q.points[i]);
    const double w = q.weights[i] * q.indicator[i] * jac * material.modulus_at(x);
    k.noalias() += w * s.grads * s.grads.transpose();
  }

  for (const auto& facet : geo.facets)
  {
    if (facet.kind != BoundaryKind::DirichletPart)
      continue;
    for (std::size_t i = 0; i < facet.points.size(); ++i)
    {
      const Vec2 x = geo.box.to_physical(facet.points[i]);
      const auto s = shape_at(basis, geo.box, facet.points[i]);
      const double w = facet.weights[i];
      if (nitsche.has_consistency_terms())
      {
        const Vector dn = normal_derivative(s, facet.normals[i]);
        const double kappa = material.modulus_at(x);
        k.noalias() -= w * kappa * (dn * s.values.transpose() + s.values * dn.transpose());
      }
      k.noalias() += w * penalty * s.values * s.values.transpose();
    }
  }
  return 0.5 * (k + k.transpose());
}

PenaltyResult nitsche_penalty(const ElementGeometry& geo, const TensorBasis& basis,
                              const MaterialField& material)
{
  const int n = basis.size();
  const double jac = geo.box.jacobian();
  Matrix a = Matrix::Zero(n, n);
  Matrix b = Matrix::Zero(n, n);

  for (const auto& facet : geo.facets)
  {
    if (facet.kind != BoundaryKind::DirichletPart)
      continue;
    for (std::size_t i = 0; i < facet.points.size(); ++i)
    {
      const Vec2 x = geo.box.to_physical(facet.points[i]);
      const auto s = shape_at(basis, geo.box, facet.points[i]);
      const Vector dn = normal_derivative(s, facet.normals[i]);
      const double kappa = material.modulus_at(x);
      a.noalias() += facet.weights[i] * kappa * kappa * dn * dn.transpose();
    }
  }

  const auto& q = geo.quadrature;
  for (std::size_t i = 0; i < q.size(); ++i)
  {
    if (q.indicator[i] != 1.0)
      continue;  // physical part only
    const Vec2 x = geo.box.to_physical(q.points[i]);
    const auto s = shape_at(basis, geo.box, q.points[i]);
    b.noalias() += q.weights[i] * jac * material.modulus_at(x) * s.grads * s.grads.transpose();
  }

  PenaltyResult result;
  if (a.cwiseAbs().maxCoeff() == 0.0)
  {
    result.degenerate = true;
    return result;
  }

  const auto bb = sym_eig(b);
  const double bmax = bb.values(n - 1);
  if (!(bmax > 0.0))
  {
    result.degenerate = true;
    return result;
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (bb.values(i) > 1e-10 * bmax)
      keep.push_back(i);
  // Basis of the retained subspace scaled so the reduced B is the identity.
  Matrix v(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    v.col(j) = bb.vectors.col(keep[j]) / std::sqrt(bb.values(keep[j]));
  const Matrix reduced = v.transpose() * a * v;
  const auto mu = sym_eig(reduced);
  result.value = 2.0 * mu.values(mu.values.size() - 1);
  if (!(result.value > 0.0))
  {
    result.value = 0.0;
    result.degenerate = true;
  }
  return result;
}

double element_penalty(const ElementGeometry& geo, const TensorBasis& basis,
                       const MaterialField& material, const NitscheConfig& nitsche)
{
  if (!has_dirichlet(geo))
    return 0.0;
  if (nitsche.mode == NitscheMode::ComputedPenalty)
    return nitsche_penalty(geo, basis, material).value;
  return nitsche.penalty;
}

Vector element_force(const ElementGeometry& geo, const TensorBasis& basis,
                     const MaterialField& material, const NitscheConfig& nitsche,
                     double penalty, double g_neumann)
{
  const int n = basis.size();
  const double jac = geo.box.jacobian();
  Vector f = Vector::Zero(n);

  if (material.source)
  {
    const auto& q = geo.quadrature;
    for (std::size_t i = 0; i < q.size(); ++i)
    {
      if (q.indicator[i] != 1.0)
        continue;
      const Vec2 x = geo.box.to_physical(q.points[i]);
      const auto s = shape_at(basis, geo.box, q.points[i]);
      f += q.weights[i] * jac * material.source(x) * s.values;
    }
  }

  for (const auto& facet : geo.facets)
  {
    for (std::size_t i = 0; i < facet.points.size(); ++i)
    {
      const auto s = shape_at(basis, geo.box, facet.points[i]);
      const double w = facet.weights[i];
      if (facet.kind == BoundaryKind::NeumannPart)
      {
        f += w * g_neumann * s.values;
        continue;
      }
      const double g = nitsche.g_dirichlet;
      if (nitsche.has_consistency_terms())
      {
        const Vec2 x = geo.box.to_physical(facet.points[i]);
        f -= w * g * material.modulus_at(x) * normal_derivative(s, facet.normals[i]);
      }
      f += w * penalty * g * s.values;
    }
  }
  return f;
}

DofMap build_dof_map(const CartesianMesh& mesh, const TensorBasis& basis,
                     const std::function<bool(const Vec2&)>& constrained)
{
  const int p = basis.degree();
  const int nx = mesh.counts[0] * p + 1;
  const int ny = mesh.dim == 2 ? mesh.counts[1] * p + 1 : 1;
  std::vector<int> grid(static_cast<std::size_t>(nx) * ny, -2);  // -2 unseen

  DofMap map;
  map.element_dofs.reserve(mesh.active.size());
  for (int e : mesh.active)
  {
    const auto [ex, ey] = mesh.element_index(e);
    const ElementBox box = mesh.box(e);
    std::vector<int> local(basis.size());
    for (int a = 0; a < basis.size(); ++a)
    {
      const auto [i1, i2] = basis.multi_index(a);
      const int gx = ex * p + i1;
      const int gy = mesh.dim == 2 ? ey * p + i2 : 0;
      int& slot = grid[static_cast<std::size_t>(gy) * nx + gx];
      if (slot == -2)
      {
        const Vec2 x = box.to_physical(basis.node(a));
        if (constrained && constrained(x))
          slot = -1;
        else
        {
          slot = map.n_dof++;
          map.coordinates.push_back(x);
        }
      }
      local[a] = slot;
    }
    map.element_dofs.push_back(std::move(local));
  }
  return map;
}

GlobalSystem assemble(DofMap dofs, const std::vector<ElementMatrices>& elements)
{
  if (elements.size() != dofs.element_dofs.size())
    throw std::invalid_argument("assemble: element count does not match the dof map");
  const int n = dofs.n_dof;

  GlobalSystem sys;
  sys.mass.diagonal = Vector::Zero(n);
  sys.force = Vector::Zero(n);
  std::vector<Eigen::Triplet<double>> k_trip;
  std::vector<Eigen::Triplet<double>> m_trip;

  for (std::size_t e = 0; e < elements.size(); ++e)
  {
    const auto& em = elements[e];
    const auto& map = dofs.element_dofs[e];
    const int ne = static_cast<int>(map.size());
    for (int a = 0; a < ne; ++a)
    {
      const int ga = map[a];
      if (ga < 0)
        continue;
      if (ga >= n)
        throw std::out_of_range("assemble: dof index out of range");
      sys.force(ga) += em.f(a);
      for (int b = 0; b < ne; ++b)
      {
        const int gb = map[b];
        if (gb < 0)
          continue;
        if (em.k(a, b) != 0.0)
          k_trip.emplace_back(ga, gb, em.k(a, b));
        if (em.is_lumped)
        {
          if (a == b)
            sys.mass.diagonal(ga) += em.m(a, a);
        }
        else if (em.m(a, b) != 0.0)
          m_trip.emplace_back(ga, gb, em.m(a, b));
      }
    }
  }
  sys.stiffness.resize(n, n);
  sys.stiffness.setFromTriplets(k_trip.begin(), k_trip.end());
  sys.mass.correction.resize(n, n);
  sys.mass.correction.setFromTriplets(m_trip.begin(), m_trip.end());
  sys.dofs = std::move(dofs);
  return sys;
}

}  // namespace cutwave
