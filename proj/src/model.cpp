// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "cutwave/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cutwave
{

namespace
{

// Element matrices of the same box treated as uncut, with lumped or consistent mass.
ElementMatrices full_element(const ElementBox& box, const TensorBasis& basis,
                             const MaterialField& material, bool lumped)
{
  ElementGeometry geo;
  geo.box = box;
  geo.cls = ElementClass::Internal;
  geo.quadrature = nodal_quadrature(basis.dim(), basis.degree());
  ElementMatrices em;
  em.k = element_stiffness(geo, basis, material, NitscheConfig{}, 0.0);
  if (!lumped)
    geo.quadrature = gauss_quadrature(basis.dim(), basis.degree() + 1);
  em.m = element_mass(geo, basis, material);
  em.is_lumped = lumped;
  return em;
}

bool has_dirichlet(const ElementGeometry& geo)
{
  return std::any_of(geo.facets.begin(), geo.facets.end(), [](const auto& f) {
    return f.kind == BoundaryKind::DirichletPart;
  });
}

// Computes element matrices, applies the stabilization and assembles.
void finish(DiscreteProblem& prob, const MaterialField& material, const DiscretizationOptions& opt,
            const std::function<bool(const Vec2&)>& constrained)
{
  const auto& stab = opt.stabilization;
  const auto& basis = prob.basis;
  const std::size_t n_active = prob.elements.size();

  std::vector<ElementMatrices> mats(n_active);
  prob.penalties.assign(n_active, 0.0);
  prob.cut_fraction = 1.0;
  for (std::size_t i = 0; i < n_active; ++i)
  {
    const auto& geo = prob.elements[i];
    const double penalty = element_penalty(geo, basis, material, opt.nitsche);
    prob.penalties[i] = penalty;
    mats[i].m = element_mass(geo, basis, material);
    mats[i].k = element_stiffness(geo, basis, material, opt.nitsche, penalty);
    mats[i].f = element_force(geo, basis, material, opt.nitsche, penalty);
    mats[i].is_lumped = geo.quadrature.nodal;
    if (geo.cls == ElementClass::Cut)
      prob.cut_fraction = std::min(prob.cut_fraction, geo.quadrature.volume_fraction);
  }

  // lambda*: largest eigenvalue over the uncut elements of the mesh.
  prob.lambda_star = stab.lambda_star;
  if (prob.lambda_star <= 0.0)
  {
    for (std::size_t i = 0; i < n_active; ++i)
    {
      const auto& geo = prob.elements[i];
      if (geo.cls != ElementClass::Internal)
        continue;
      const Matrix& k = has_dirichlet(geo) ? full_element(geo.box, basis, material, true).k
                                           : mats[i].k;
      prob.lambda_star = std::max(prob.lambda_star, lambda_star_reference(k, mats[i].m));
    }
    if (prob.lambda_star <= 0.0)
    {
      // No uncut element in the mesh: use the cut boxes as if they were full.
      for (std::size_t i = 0; i < n_active; ++i)
      {
        const auto full = full_element(prob.elements[i].box, basis, material, true);
        prob.lambda_star = std::max(prob.lambda_star, lambda_star_reference(full.k, full.m));
      }
    }
  }

  for (std::size_t i = 0; i < n_active; ++i)
  {
    const auto& geo = prob.elements[i];
    const bool target = geo.cls == ElementClass::Cut ||
                        (stab.include_uncut_dirichlet && has_dirichlet(geo));
    if (!target || stab.mode == StabilizationMode::MS)
      continue;

    DeflationReport report;
    if (stab.mode == StabilizationMode::EVS)
    {
      const auto full =
          full_element(geo.box, basis, material, stab.evs_reference == EvsReference::Lumped);
      mats[i].m = evs_mass(mats[i].m, full.m, stab.epsilon, stab.f_lambda, &report);
    }
    else
    {
      auto result = gevs(mats[i].k, mats[i].m, prob.lambda_star, gevs_variant(stab.mode));
      mats[i].k = std::move(result.k);
      mats[i].m = std::move(result.m);
      report = std::move(result.report);
    }
    mats[i].is_lumped = false;
    report.element = geo.element;
    prob.reports.push_back(std::move(report));
  }

  prob.system = assemble(build_dof_map(prob.mesh, basis, constrained), mats);
}

}  // namespace

Vector DiscreteProblem::interpolate(const ScalarField& field) const
{
  const auto& coords = system.dofs.coordinates;
  Vector v(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = field(coords[i]);
  return v;
}

double DiscreteProblem::evaluate(const Vector& coefficients, std::size_t index,
                                 const Vec2& xi) const
{
  const int n = basis.size();
  std::vector<double> values(n);
  std::vector<Vec2> grads(n);
  basis.eval(xi, values, grads);
  const auto& map = system.dofs.element_dofs[index];
  double u = 0.0;
  for (int a = 0; a < n; ++a)
    if (map[a] >= 0)
      u += values[a] * coefficients(map[a]);
  return u;
}

DiscreteProblem build_rod_problem(const RodDomain& domain, const DiscretizationOptions& opt)
{
  domain.validate();
  opt.stabilization.validate();
  opt.nitsche.validate();
  if (opt.p < 1 || opt.n_el < 1)
    throw std::invalid_argument("rod: p and n_el must be positive");

  MaterialField material;
  material.alpha = opt.stabilization.alpha;

  DiscreteProblem prob;
  prob.basis = TensorBasis(1, opt.p);
  prob.mesh = make_rod_mesh(domain, opt.n_el);
  for (int e : prob.mesh.active)
  {
    ElementGeometry geo;
    geo.element = e;
    geo.box = prob.mesh.box(e);
    geo.cls = prob.mesh.classes[e];
    if (geo.cls == ElementClass::Cut)
    {
      geo.quadrature = rod_cut_quadrature(domain, geo.box, opt.p + 1, material.alpha);
      geo.facets = boundary_quadrature(domain, geo.box);
    }
    else
      geo.quadrature = nodal_quadrature(1, opt.p);
    geo.quadrature.element = e;
    prob.elements.push_back(std::move(geo));
  }

  prob.physical_quadrature = [domain, boxes = prob.elements](std::size_t index, int points) {
    const auto& geo = boxes[index];
    auto q = geo.cls == ElementClass::Cut ? rod_cut_quadrature(domain, geo.box, points, 0.0)
                                          : gauss_quadrature(1, points);
    return q;
  };

  finish(prob, material, opt, {});
  return prob;
}

DiscreteProblem build_boundary_fitted_rod(const RodDomain& domain, int p, int n_el)
{
  domain.validate();
  RodDomain fitted = domain;
  fitted.length = domain.physical_length;

  DiscretizationOptions opt;
  opt.p = p;
  opt.n_el = n_el;
  opt.stabilization.mode = StabilizationMode::MS;

  MaterialField material;
  DiscreteProblem prob;
  prob.basis = TensorBasis(1, p);
  prob.mesh = make_rod_mesh(fitted, n_el);
  for (int e : prob.mesh.active)
  {
    ElementGeometry geo;
    geo.element = e;
    geo.box = prob.mesh.box(e);
    geo.cls = ElementClass::Internal;
    geo.quadrature = nodal_quadrature(1, p);
    prob.elements.push_back(std::move(geo));
  }
  prob.physical_quadrature = [](std::size_t, int points) { return gauss_quadrature(1, points); };

  const double lp = domain.physical_length;
  const double tol = 1e-12 * lp;
  std::function<bool(const Vec2&)> constrained;
  if (domain.right_bc == BoundaryCondition::Dirichlet)
    constrained = [lp, tol](const Vec2& x) { return std::abs(x[0] - lp) <= tol; };
  finish(prob, material, opt, constrained);
  return prob;
}

DiscreteProblem build_arc_problem(const ArcDomain& domain, const DiscretizationOptions& opt)
{
  domain.validate();
  opt.stabilization.validate();
  opt.nitsche.validate();
  if (opt.p < 1 || opt.n_el < 1 || opt.depth < 0)
    throw std::invalid_argument("arc: p, n_el must be positive and depth non-negative");

  MaterialField material;
  material.alpha = opt.stabilization.alpha;
  material.speed = [domain](const Vec2& x) { return wave_speed(domain, x); };

  DiscreteProblem prob;
  prob.basis = TensorBasis(2, opt.p);
  prob.mesh = make_arc_mesh(domain, opt.n_el, opt.p);
  for (int e : prob.mesh.active)
  {
    ElementGeometry geo;
    geo.element = e;
    geo.box = prob.mesh.box(e);
    geo.cls = prob.mesh.classes[e];
    geo.quadrature =
        arc_cell_quadrature(domain, geo.box, geo.cls, opt.p + 1, material.alpha, opt.depth);
    if (geo.cls == ElementClass::Cut)
      geo.facets = boundary_quadrature(domain, geo.box, opt.p);
    geo.quadrature.element = e;
    prob.elements.push_back(std::move(geo));
  }

  const int depth = opt.depth;
  prob.physical_quadrature = [domain, boxes = prob.elements, depth](std::size_t index,
                                                                    int points) {
    const auto& geo = boxes[index];
    if (geo.cls != ElementClass::Cut)
      return gauss_quadrature(2, points);
    auto all = arc_cell_quadrature(domain, geo.box, geo.cls, points, 0.0, depth);
    CutQuadrature q;
    q.element = geo.element;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (all.indicator[i] > 0.0)
      {
        q.points.push_back(all.points[i]);
        q.weights.push_back(all.weights[i]);
        q.indicator.push_back(1.0);
      }
    q.volume_fraction = all.volume_fraction;
    return q;
  };

  finish(prob, material, opt, {});
  return prob;
}

double rod_initial(const Vec2& x)
{
  constexpr double sigma = 0.05;
  return 2.0 * std::exp(-x[0] * x[0] / (2.0 * sigma * sigma));
}

double rod_final_time(const RodDomain& domain)
{
  return 2.0 * domain.physical_length;
}

double arc_initial(const ArcDomain& domain, const Vec2& x)
{
  constexpr double theta0 = std::numbers::pi / 4.0;
  constexpr double sigma = std::numbers::pi / 40.0;
  const double theta = std::atan2(x[1] - domain.center, x[0] - domain.center);
  const double d = theta - theta0;
  return 2.0 * std::exp(-d * d / (2.0 * sigma * sigma));
}

double arc_final_time(const ArcDomain& domain)
{
  return std::numbers::pi / 2.0 - 2.0 * domain.end_angle;
}

}  // namespace cutwave
