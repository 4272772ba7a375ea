// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "cutwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cutwave
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Rect
{
  double x0, x1, y0, y1;
};

Rect rect_of(const ElementBox& box)
{
  return {box.lower[0], box.upper[0], box.lower[1], box.upper[1]};
}

// Interval tests for a rectangle against the annular sector.
enum class RectState
{
  Inside,
  Outside,
  Unknown
};

RectState rect_state(const ArcDomain& dom, const Rect& r)
{
  const double d = dom.center;
  if (r.x1 <= d || r.y1 <= d)
    return RectState::Outside;

  const double cx = std::clamp(d, r.x0, r.x1);
  const double cy = std::clamp(d, r.y0, r.y1);
  const double rmin = std::hypot(cx - d, cy - d);
  const double fx = std::max(std::abs(r.x0 - d), std::abs(r.x1 - d));
  const double fy = std::max(std::abs(r.y0 - d), std::abs(r.y1 - d));
  const double rmax = std::hypot(fx, fy);
  if (rmax <= dom.inner_radius || rmin >= dom.outer_radius)
    return RectState::Outside;

  const bool has_center = r.x0 <= d && d <= r.x1 && r.y0 <= d && d <= r.y1;
  if (has_center)
    return RectState::Unknown;

  double amin = kInf;
  double amax = -kInf;
  for (double x : {r.x0, r.x1})
    for (double y : {r.y0, r.y1})
    {
      const double a = std::atan2(y - d, x - d);
      amin = std::min(amin, a);
      amax = std::max(amax, a);
    }
  const double lo = dom.end_angle;
  const double hi = 0.5 * std::numbers::pi - dom.end_angle;
  if (amax <= lo || amin >= hi)
    return RectState::Outside;

  if (rmin >= dom.inner_radius && rmax <= dom.outer_radius && amin >= lo && amax <= hi)
    return RectState::Inside;
  return RectState::Unknown;
}

// Physical y-interval of the column x = const (empty when lo >= hi).
std::pair<double, double> column_interval(const ArcDomain& dom, double x, double y0, double y1)
{
  const double d = dom.center;
  const double X = x - d;
  if (X <= 0.0)
    return {y1, y0};
  const double t = std::tan(dom.end_angle);
  double lo = std::max(y0, d + t * X);
  double hi = std::min(y1, d + X / t);
  if (X < dom.inner_radius)
    lo = std::max(lo, d + std::sqrt(dom.inner_radius * dom.inner_radius - X * X));
  if (X >= dom.outer_radius)
    return {y1, y0};
  hi = std::min(hi, d + std::sqrt(dom.outer_radius * dom.outer_radius - X * X));
  return {lo, hi};
}

// x-positions inside (x0, x1) where the active column bound switches.
std::vector<double> column_breakpoints(const ArcDomain& dom, const Rect& r)
{
  const double d = dom.center;
  const double s = std::sin(dom.end_angle);
  const double c = std::cos(dom.end_angle);
  const double t = s / c;
  const double ri = dom.inner_radius;
  const double ro = dom.outer_radius;

  std::vector<double> X{0.0, ri * c, ri * s, ro * c, ro * s};
  for (double y : {r.y0, r.y1})
  {
    const double Y = y - d;
    X.push_back(Y / t);
    X.push_back(Y * t);
    if (std::abs(Y) < ri)
      X.push_back(std::sqrt(ri * ri - Y * Y));
    if (std::abs(Y) < ro)
      X.push_back(std::sqrt(ro * ro - Y * Y));
  }
  std::vector<double> out{r.x0, r.x1};
  for (double v : X)
  {
    const double x = d + v;
    if (x > r.x0 && x < r.x1)
      out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void push_point(CutQuadrature& q, const ElementBox& box, const Vec2& x, double w, double ind)
{
  q.points.push_back(box.to_reference(x));
  q.weights.push_back(w / box.jacobian());
  q.indicator.push_back(ind);
}

void tensor_leaf(CutQuadrature& q, const ElementBox& box, const Rect& r,
                 const QuadratureRule1D& rule, double ind)
{
  const auto rx = map_rule(rule, r.x0, r.x1);
  const auto ry = map_rule(rule, r.y0, r.y1);
  for (std::size_t j = 0; j < ry.size(); ++j)
    for (std::size_t i = 0; i < rx.size(); ++i)
      push_point(q, box, {rx.points[i], ry.points[j]}, rx.weights[i] * ry.weights[j], ind);
}

void column_leaf(CutQuadrature& q, const ArcDomain& dom, const ElementBox& box, const Rect& r,
                 const QuadratureRule1D& rule, double alpha)
{
  const auto breaks = column_breakpoints(dom, r);
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b)
  {
    const auto rx = map_rule(rule, breaks[b], breaks[b + 1]);
    for (std::size_t i = 0; i < rx.size(); ++i)
    {
      const double x = rx.points[i];
      const auto [lo, hi] = column_interval(dom, x, r.y0, r.y1);
      auto segment = [&](double a, double c, double ind) {
        if (c <= a)
          return;
        const auto ry = map_rule(rule, a, c);
        for (std::size_t j = 0; j < ry.size(); ++j)
          push_point(q, box, {x, ry.points[j]}, rx.weights[i] * ry.weights[j], ind);
      };
      if (hi > lo)
      {
        segment(r.y0, lo, alpha);
        segment(lo, hi, 1.0);
        segment(hi, r.y1, alpha);
      }
      else
      {
        segment(r.y0, r.y1, alpha);
      }
    }
  }
}

void subdivide(CutQuadrature& q, const ArcDomain& dom, const ElementBox& box, const Rect& r,
               const QuadratureRule1D& rule, double alpha, int depth)
{
  const auto state = rect_state(dom, r);
  if (state == RectState::Inside)
    return tensor_leaf(q, box, r, rule, 1.0);
  if (state == RectState::Outside)
    return tensor_leaf(q, box, r, rule, alpha);
  if (depth == 0)
    return column_leaf(q, dom, box, r, rule, alpha);

  const double xm = 0.5 * (r.x0 + r.x1);
  const double ym = 0.5 * (r.y0 + r.y1);
  subdivide(q, dom, box, {r.x0, xm, r.y0, ym}, rule, alpha, depth - 1);
  subdivide(q, dom, box, {xm, r.x1, r.y0, ym}, rule, alpha, depth - 1);
  subdivide(q, dom, box, {r.x0, xm, ym, r.y1}, rule, alpha, depth - 1);
  subdivide(q, dom, box, {xm, r.x1, ym, r.y1}, rule, alpha, depth - 1);
}

bool inside_closed(const Rect& r, double x, double y)
{
  constexpr double eps = 1e-14;
  return x >= r.x0 - eps && x <= r.x1 + eps && y >= r.y0 - eps && y <= r.y1 + eps;
}

bool inside_open(const Rect& r, double x, double y)
{
  return x > r.x0 && x < r.x1 && y > r.y0 && y < r.y1;
}

// Parameter intervals [t0, t1] of a circular arc (radius R, angles in [a0, a1])
// lying inside the rectangle.
std::vector<std::pair<double, double>> clip_arc(const ArcDomain& dom, const Rect& r, double R,
                                                double a0, double a1)
{
  const double d = dom.center;
  std::vector<double> cuts{a0, a1};
  for (double x : {r.x0, r.x1})
  {
    const double c = (x - d) / R;
    if (std::abs(c) <= 1.0)
      cuts.push_back(std::acos(c));
  }
  for (double y : {r.y0, r.y1})
  {
    const double s = (y - d) / R;
    if (std::abs(s) <= 1.0)
      cuts.push_back(std::asin(s));
  }
  std::vector<double> sorted;
  for (double a : cuts)
    if (a >= a0 && a <= a1)
      sorted.push_back(a);
  std::sort(sorted.begin(), sorted.end());

  std::vector<std::pair<double, double>> pieces;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
  {
    const double t0 = sorted[i];
    const double t1 = sorted[i + 1];
    if (t1 - t0 <= 1e-14)
      continue;
    const double tm = 0.5 * (t0 + t1);
    if (inside_closed(r, d + R * std::cos(tm), d + R * std::sin(tm)))
    {
      if (!pieces.empty() && std::abs(pieces.back().second - t0) < 1e-14)
        pieces.back().second = t1;
      else
        pieces.emplace_back(t0, t1);
    }
  }
  return pieces;
}

// Radius interval of the ray at angle phi lying inside the rectangle.
std::pair<double, double> clip_ray(const ArcDomain& dom, const Rect& r, double phi)
{
  const double d = dom.center;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  double lo = dom.inner_radius;
  double hi = dom.outer_radius;
  lo = std::max(lo, (r.x0 - d) / c);
  hi = std::min(hi, (r.x1 - d) / c);
  lo = std::max(lo, (r.y0 - d) / s);
  hi = std::min(hi, (r.y1 - d) / s);
  return {lo, hi};
}

}  // namespace

void RodDomain::validate() const
{
  if (!(physical_length > 0.0 && physical_length <= length))
    throw std::invalid_argument("RodDomain: need 0 < l_p <= l");
}

void ArcDomain::validate() const
{
  if (!(inner_radius >= 0.0 && inner_radius < outer_radius))
    throw std::invalid_argument("ArcDomain: need 0 <= r_i < r_o");
  if (!(end_angle > 0.0 && end_angle < 0.25 * std::numbers::pi))
    throw std::invalid_argument("ArcDomain: need 0 < theta_gamma < pi/4");
  const double reach = center + outer_radius;
  const double low = center + inner_radius * std::sin(end_angle);
  if (center < 0.0 || reach > length || low < 0.0)
    throw std::invalid_argument("ArcDomain: sector does not fit into [0, l]^2");
}

double ArcDomain::radius(const Vec2& x) const
{
  return std::hypot(x[0] - center, x[1] - center);
}

double ArcDomain::angle(const Vec2& x) const
{
  return std::atan2(x[1] - center, x[0] - center);
}

bool ArcDomain::contains(const Vec2& x) const
{
  const double r = radius(x);
  if (r < inner_radius || r > outer_radius || r == 0.0)
    return false;
  const double a = angle(x);
  return a >= end_angle && a <= 0.5 * std::numbers::pi - end_angle;
}

const char* to_string(ElementClass cls)
{
  switch (cls)
  {
  case ElementClass::Internal:
    return "internal";
  case ElementClass::Cut:
    return "cut";
  case ElementClass::Outside:
    return "outside";
  }
  return "?";
}

double ElementBox::measure() const
{
  const auto s = size();
  return dim == 1 ? s[0] : s[0] * s[1];
}

double ElementBox::jacobian() const
{
  return dim == 1 ? 0.5 * measure() : 0.25 * measure();
}

Vec2 ElementBox::to_physical(const Vec2& xi) const
{
  Vec2 x{0.0, 0.0};
  for (int k = 0; k < dim; ++k)
    x[k] = lower[k] + 0.5 * (xi[k] + 1.0) * (upper[k] - lower[k]);
  return x;
}

Vec2 ElementBox::to_reference(const Vec2& x) const
{
  Vec2 xi{0.0, 0.0};
  for (int k = 0; k < dim; ++k)
    xi[k] = 2.0 * (x[k] - lower[k]) / (upper[k] - lower[k]) - 1.0;
  return xi;
}

double BoundaryFacetQuadrature::measure() const
{
  double sum = 0.0;
  for (double w : weights)
    sum += w;
  return sum;
}

ElementBox CartesianMesh::box(int e) const
{
  ElementBox b;
  b.dim = dim;
  const auto idx = element_index(e);
  for (int k = 0; k < dim; ++k)
  {
    b.lower[k] = idx[k] * element_size[k];
    b.upper[k] = idx[k] + 1 == counts[k] ? extent[k] : (idx[k] + 1) * element_size[k];
  }
  if (dim == 1)
  {
    b.lower[1] = b.upper[1] = 0.0;
  }
  return b;
}

CartesianMesh make_rod_mesh(const RodDomain& domain, int n_el)
{
  domain.validate();
  if (n_el < 1)
    throw std::invalid_argument("make_rod_mesh: need at least one element");
  CartesianMesh mesh;
  mesh.dim = 1;
  mesh.extent = {domain.length, 0.0};
  mesh.counts = {n_el, 1};
  mesh.element_size = {domain.length / n_el, 0.0};
  for (int e = 0; e < n_el; ++e)
  {
    mesh.classes.push_back(classify(domain, mesh.box(e)));
    if (mesh.classes.back() != ElementClass::Outside)
      mesh.active.push_back(e);
  }
  return mesh;
}

CartesianMesh make_arc_mesh(const ArcDomain& domain, int n_el, int p)
{
  domain.validate();
  if (n_el < 1)
    throw std::invalid_argument("make_arc_mesh: need at least one element per direction");
  CartesianMesh mesh;
  mesh.dim = 2;
  mesh.extent = {domain.length, domain.length};
  mesh.counts = {n_el, n_el};
  mesh.element_size = {domain.length / n_el, domain.length / n_el};
  for (int e = 0; e < mesh.num_elements(); ++e)
  {
    mesh.classes.push_back(classify(domain, mesh.box(e), p));
    if (mesh.classes.back() != ElementClass::Outside)
      mesh.active.push_back(e);
  }
  return mesh;
}

ElementClass classify(const RodDomain& domain, const ElementBox& box)
{
  if (box.upper[0] <= domain.physical_length)
    return ElementClass::Internal;
  if (box.lower[0] >= domain.physical_length)
    return ElementClass::Outside;
  return ElementClass::Cut;
}

ElementClass classify(const ArcDomain& domain, const ElementBox& box, int p)
{
  const Rect r = rect_of(box);

  // Boundary curves crossing the element interior always make it cut.
  for (const auto& facet : boundary_quadrature(domain, box, p))
    for (const auto& xi : facet.points)
    {
      const Vec2 x = box.to_physical(xi);
      if (inside_open(r, x[0], x[1]))
        return ElementClass::Cut;
    }

  int inside = 0;
  int total = 0;
  auto sample = [&](double x, double y) {
    inside += domain.contains({x, y}) ? 1 : 0;
    ++total;
  };
  for (double x : {r.x0, r.x1})
    for (double y : {r.y0, r.y1})
      sample(x, y);
  const int n = p + 4;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      sample(r.x0 + (i + 0.5) / n * (r.x1 - r.x0), r.y0 + (j + 0.5) / n * (r.y1 - r.y0));

  if (inside == total)
    return ElementClass::Internal;
  if (inside == 0)
    return ElementClass::Outside;
  return ElementClass::Cut;
}

CutQuadrature nodal_quadrature(int dim, int p)
{
  const auto rule = gll_rule(p);
  CutQuadrature q;
  q.nodal = true;
  const int n = p + 1;
  const int ny = dim == 2 ? n : 1;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < n; ++i)
    {
      q.points.push_back({rule.points[i], dim == 2 ? rule.points[j] : 0.0});
      q.weights.push_back(rule.weights[i] * (dim == 2 ? rule.weights[j] : 1.0));
      q.indicator.push_back(1.0);
    }
  return q;
}

CutQuadrature gauss_quadrature(int dim, int points)
{
  const auto rule = gauss_legendre_rule(points);
  CutQuadrature q;
  const int ny = dim == 2 ? points : 1;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < points; ++i)
    {
      q.points.push_back({rule.points[i], dim == 2 ? rule.points[j] : 0.0});
      q.weights.push_back(rule.weights[i] * (dim == 2 ? rule.weights[j] : 1.0));
      q.indicator.push_back(1.0);
    }
  return q;
}

CutQuadrature rod_cut_quadrature(const RodDomain& domain, const ElementBox& box, int points,
                                 double alpha)
{
  const auto rule = gauss_legendre_rule(points);
  CutQuadrature q;
  const double a = box.lower[0];
  const double b = box.upper[0];
  const double lp = std::clamp(domain.physical_length, a, b);
  q.volume_fraction = (lp - a) / (b - a);

  auto part = [&](double from, double to, double ind) {
    if (to <= from)
      return;
    const auto mapped = map_rule(rule, from, to);
    for (std::size_t i = 0; i < mapped.size(); ++i)
      push_point(q, box, {mapped.points[i], 0.0}, mapped.weights[i], ind);
  };
  part(a, lp, 1.0);
  part(lp, b, alpha);
  return q;
}

CutQuadrature arc_cell_quadrature(const ArcDomain& domain, const ElementBox& box, ElementClass cls,
                                  int points, double alpha, int depth)
{
  if (cls == ElementClass::Internal)
  {
    auto q = nodal_quadrature(2, points - 1);
    q.volume_fraction = 1.0;
    return q;
  }
  CutQuadrature q;
  const auto rule = gauss_legendre_rule(points);
  subdivide(q, domain, box, rect_of(box), rule, alpha, depth);

  double inside = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
  {
    total += q.weights[i];
    if (q.indicator[i] == 1.0)
      inside += q.weights[i];
  }
  // with alpha == 1 the indicator cannot tell the parts apart
  q.volume_fraction = alpha == 1.0 ? 1.0 : inside / total;
  return q;
}

std::vector<BoundaryFacetQuadrature> boundary_quadrature(const RodDomain& domain,
                                                         const ElementBox& box)
{
  const double lp = domain.physical_length;
  if (!(box.lower[0] < lp && lp <= box.upper[0]))
    return {};
  BoundaryFacetQuadrature facet;
  facet.kind = domain.right_bc == BoundaryCondition::Dirichlet ? BoundaryKind::DirichletPart
                                                               : BoundaryKind::NeumannPart;
  facet.points.push_back(box.to_reference({lp, 0.0}));
  facet.weights.push_back(1.0);
  facet.normals.push_back({1.0, 0.0});
  return {facet};
}

std::vector<BoundaryFacetQuadrature> boundary_quadrature(const ArcDomain& domain,
                                                         const ElementBox& box, int p)
{
  const Rect r = rect_of(box);
  const auto rule = gauss_legendre_rule(p + 2);
  const double d = domain.center;
  const double a0 = domain.end_angle;
  const double a1 = 0.5 * std::numbers::pi - domain.end_angle;
  std::vector<BoundaryFacetQuadrature> out;

  auto arc = [&](double R, double sign) {
    if (R <= 0.0)
      return;
    for (const auto& [t0, t1] : clip_arc(domain, r, R, a0, a1))
    {
      BoundaryFacetQuadrature f;
      f.kind = BoundaryKind::NeumannPart;
      const auto mapped = map_rule(rule, t0, t1);
      for (std::size_t i = 0; i < mapped.size(); ++i)
      {
        const double t = mapped.points[i];
        const Vec2 n{std::cos(t), std::sin(t)};
        f.points.push_back(box.to_reference({d + R * n[0], d + R * n[1]}));
        f.weights.push_back(R * mapped.weights[i]);
        f.normals.push_back({sign * n[0], sign * n[1]});
      }
      out.push_back(std::move(f));
    }
  };
  arc(domain.outer_radius, 1.0);
  arc(domain.inner_radius, -1.0);

  const auto face_kind = domain.bc == BoundaryCondition::Dirichlet ? BoundaryKind::DirichletPart
                                                                    : BoundaryKind::NeumannPart;
  auto face = [&](double phi, const Vec2& normal) {
    const auto [lo, hi] = clip_ray(domain, r, phi);
    if (hi - lo <= 1e-14)
      return;
    BoundaryFacetQuadrature f;
    f.kind = face_kind;
    const auto mapped = map_rule(rule, lo, hi);
    for (std::size_t i = 0; i < mapped.size(); ++i)
    {
      const double rr = mapped.points[i];
      f.points.push_back(box.to_reference({d + rr * std::cos(phi), d + rr * std::sin(phi)}));
      f.weights.push_back(mapped.weights[i]);
      f.normals.push_back(normal);
    }
    out.push_back(std::move(f));
  };
  face(a0, {std::sin(a0), -std::cos(a0)});
  face(a1, {-std::sin(a1), std::cos(a1)});
  return out;
}

double wave_speed(const RodDomain&, const Vec2&)
{
  return 1.0;
}

double wave_speed(const ArcDomain& domain, const Vec2& x)
{
  return domain.radius(x) / domain.outer_radius;
}

}  // namespace cutwave
