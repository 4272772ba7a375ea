// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "cutwave/stabilize.hpp"

#include <stdexcept>

namespace cutwave
{

namespace
{

constexpr double kTieTolerance = 1e-12;

}  // namespace

const char* to_string(StabilizationMode mode)
{
  switch (mode)
  {
  case StabilizationMode::MS:
    return "ms";
  case StabilizationMode::EVS:
    return "evs";
  case StabilizationMode::GevsMass:
    return "gevs-mass";
  case StabilizationMode::GevsStiffness:
    return "gevs-stiffness";
  case StabilizationMode::GevsBoth:
    return "gevs-both";
  }
  return "?";
}

StabilizationMode parse_stabilization(const std::string& name)
{
  for (auto mode : {StabilizationMode::MS, StabilizationMode::EVS, StabilizationMode::GevsMass,
                    StabilizationMode::GevsStiffness, StabilizationMode::GevsBoth})
    if (name == to_string(mode))
      return mode;
  if (name == "gevs")
    return StabilizationMode::GevsMass;
  throw std::invalid_argument("unknown stabilization '" + name + "'");
}

bool is_gevs(StabilizationMode mode)
{
  return mode == StabilizationMode::GevsMass || mode == StabilizationMode::GevsStiffness ||
         mode == StabilizationMode::GevsBoth;
}

void StabilizationConfig::validate() const
{
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("stabilization: alpha must lie in (0, 1]");
  if (mode == StabilizationMode::EVS)
  {
    if (!(f_lambda > 0.0 && f_lambda < 1.0))
      throw std::invalid_argument("stabilization: f_lambda must lie in (0, 1)");
    if (!(epsilon >= 0.0))
      throw std::invalid_argument("stabilization: epsilon must be non-negative");
  }
  if (lambda_star < 0.0)
    throw std::invalid_argument("stabilization: lambda_star must be positive");
}

GevsVariant gevs_variant(StabilizationMode mode)
{
  switch (mode)
  {
  case StabilizationMode::GevsMass:
    return GevsVariant::Mass;
  case StabilizationMode::GevsStiffness:
    return GevsVariant::Stiffness;
  case StabilizationMode::GevsBoth:
    return GevsVariant::Both;
  default:
    throw std::invalid_argument("gevs_variant: not a GEVS mode");
  }
}

Matrix deflate_standard(const Matrix& a, const Vector& phi, double lambda_k, double lambda_star)
{
  return a + (lambda_star - lambda_k) * phi * phi.transpose();
}

Pencil deflate_generalized(const Matrix& a, const Matrix& b, const Vector& phi, double lambda_k,
                           double lambda_star, DeflationSide side)
{
  const Vector bphi = b * phi;
  const Matrix update = bphi * bphi.transpose();
  Pencil out{a, b};
  switch (side)
  {
  case DeflationSide::Left:
    out.a += (lambda_star - lambda_k) * update;
    break;
  case DeflationSide::Right:
  {
    const double c = lambda_k / lambda_star - 1.0;
    if (!(1.0 + c > 0.0))
      throw std::invalid_argument("deflate_generalized: B update would lose definiteness");
    out.b += c * update;
    break;
  }
  case DeflationSide::Both:
  {
    const double ca = 0.5 * (lambda_star - lambda_k);
    const double cb = (lambda_k + ca - lambda_star) / lambda_star;
    if (!(1.0 + cb > 0.0))
      throw std::invalid_argument("deflate_generalized: B update would lose definiteness");
    out.a += ca * update;
    out.b += cb * update;
    break;
  }
  }
  return out;
}

Matrix evs_mass(const Matrix& m, const Matrix& m_full, double epsilon, double f_lambda,
                DeflationReport* report)
{
  const auto eig = sym_eig(m);
  const Eigen::Index n = m.rows();
  const double lmax = eig.values(n - 1);

  Matrix ms0 = Matrix::Zero(n, n);
  int count = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (eig.values(i) < f_lambda * lmax)
    {
      ms0 += eig.vectors.col(i) * eig.vectors.col(i).transpose();
      ++count;
    }

  Matrix out = m;
  double scale = 0.0;
  if (count > 0)
  {
    scale = epsilon * m_full.maxCoeff() / ms0.maxCoeff();
    out += scale * ms0;
  }
  if (report)
  {
    report->deflated = count;
    report->lambda_min_before = eig.values(0);
    report->lambda_max_before = lmax;
    report->coefficients.assign(count, scale);
    const auto after = sym_eig(out).values;
    report->lambda_min_after = after(0);
    report->lambda_max_after = after(n - 1);
  }
  return 0.5 * (out + out.transpose());
}

GevsResult gevs(const Matrix& k, const Matrix& m, double lambda_star, GevsVariant variant)
{
  if (!(lambda_star > 0.0))
    throw std::invalid_argument("gevs: lambda_star must be positive");
  const auto eig = gen_sym_eig(k, m);
  const Eigen::Index n = k.rows();

  GevsResult out{k, m, {}};
  out.report.lambda_min_before = eig.values(0);
  out.report.lambda_max_before = eig.values(n - 1);

  for (Eigen::Index i = 0; i < n; ++i)
  {
    const double lambda = eig.values(i);
    if (!(lambda > lambda_star * (1.0 + kTieTolerance)))
      continue;
    const Vector mphi = m * eig.vectors.col(i);
    const Matrix update = mphi * mphi.transpose();
    switch (variant)
    {
    case GevsVariant::Mass:
    {
      const double c = lambda / lambda_star - 1.0;
      out.m += c * update;
      out.report.coefficients.push_back(c);
      break;
    }
    case GevsVariant::Stiffness:
    {
      const double c = lambda_star - lambda;
      out.k += c * update;
      out.report.coefficients.push_back(c);
      break;
    }
    case GevsVariant::Both:
    {
      const double ck = 0.5 * (lambda_star - lambda);
      const double cm = (lambda + ck - lambda_star) / lambda_star;
      out.k += ck * update;
      out.m += cm * update;
      out.report.coefficients.push_back(ck);
      out.report.coefficients.push_back(cm);
      break;
    }
    }
    ++out.report.deflated;
  }

  out.k = (0.5 * (out.k + out.k.transpose())).eval();
  out.m = (0.5 * (out.m + out.m.transpose())).eval();
  if (out.report.deflated > 0)
  {
    const Vector after = gen_sym_eigvals(out.k, out.m);
    out.report.lambda_min_after = after(0);
    out.report.lambda_max_after = after(n - 1);
  }
  else
  {
    out.report.lambda_min_after = out.report.lambda_min_before;
    out.report.lambda_max_after = out.report.lambda_max_before;
  }
  return out;
}

double lambda_star_reference(const Matrix& k_full, const Matrix& m_full)
{
  const Vector values = gen_sym_eigvals(k_full, m_full);
  return values(values.size() - 1);
}

}  // namespace cutwave
