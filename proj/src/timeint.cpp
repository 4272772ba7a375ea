// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "cutwave/timeint.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cutwave
{

double critical_dt(double lambda_max)
{
  if (!(lambda_max > 0.0))
    throw std::runtime_error("critical_dt: lambda_max must be positive");
  return 2.0 / std::sqrt(lambda_max);
}

double critical_dt(const GlobalSystem& system, const MaxEigOptions& options)
{
  const auto result = max_gen_eig(system.stiffness, system.mass, options);
  return critical_dt(result.value);
}

CdmState initialize(const GlobalSystem& system, const MassSolver& solver, const Vector& psi0,
                    const Vector& v0, double dt)
{
  if (!(dt > 0.0))
    throw std::invalid_argument("initialize: dt must be positive");
  CdmState state;
  state.dt = dt;
  state.current = psi0;
  const Vector accel = solver.solve(system.force - system.stiffness * psi0);
  state.previous = psi0 - dt * v0 + 0.5 * dt * dt * accel;
  return state;
}

bool cdm_step(CdmState& state, const GlobalSystem& system, const MassSolver& solver,
              CdmWorkspace& work)
{
  work.rhs.noalias() = system.force - system.stiffness * state.current;
  solver.solve(work.rhs, work.accel);
  const double dt2 = state.dt * state.dt;
  // previous <- 2 current - previous + dt^2 a, then swap roles
  state.previous = 2.0 * state.current - state.previous + dt2 * work.accel;
  state.current.swap(state.previous);
  ++state.step;
  state.time = static_cast<double>(state.step) * state.dt;
  return state.current.allFinite();
}

double discrete_energy(const CdmState& state, const GlobalSystem& system)
{
  const Vector v = (state.current - state.previous) / state.dt;
  const double kinetic = 0.5 * v.dot(system.mass.apply(v));
  const double potential = 0.5 * state.current.dot(system.stiffness * state.previous);
  return kinetic + potential;
}

RunResult run(const GlobalSystem& system, const Vector& psi0, const Vector& v0, double dt,
              std::int64_t n_steps, const RunOptions& options)
{
  if (n_steps < 0)
    throw std::invalid_argument("run: negative step count");
  if (options.dt_crit > 0.0 && !(dt < options.dt_crit))
  {
    std::ostringstream msg;
    msg << "run: dt = " << dt << " is not below the critical step " << options.dt_crit;
    throw std::invalid_argument(msg.str());
  }

  RunResult result;
  if (n_steps == 0)
  {
    result.final = psi0;
    return result;
  }

  const MassSolver solver(system.mass);
  CdmState state = initialize(system, solver, psi0, v0, dt);
  CdmWorkspace work;
  if (options.track_energy)
    result.energy_initial = discrete_energy(state, system);

  for (std::int64_t k = 0; k < n_steps; ++k)
  {
    if (!cdm_step(state, system, solver, work))
    {
      result.aborted = true;
      result.abort_step = state.step;
      break;
    }
    if (options.trace_interval > 0 && state.step % options.trace_interval == 0)
      result.max_abs_trace.push_back(state.current.cwiseAbs().maxCoeff());
    if (options.track_energy)
    {
      const double e = discrete_energy(state, system);
      const double scale = std::abs(result.energy_initial);
      if (scale > 0.0)
        result.energy_drift = std::max(result.energy_drift, std::abs(e - result.energy_initial) / scale);
    }
  }
  result.final = std::move(state.current);
  return result;
}

}  // namespace cutwave
