// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "cutwave/assembly.hpp"
#include "cutwave/eigensolve.hpp"

namespace cutwave
{

struct CdmState
{
  Vector current;   // Psi_k
  Vector previous;  // Psi_{k-1}
  std::int64_t step = 0;
  double dt = 0.0;
  double time = 0.0;
};

/// 2 / sqrt(lambda_max(K, M)).
double critical_dt(const GlobalSystem& system, const MaxEigOptions& options = {});
double critical_dt(double lambda_max);

/// Psi_{-1} from a second-order Taylor expansion around t = 0.
CdmState initialize(const GlobalSystem& system, const MassSolver& solver, const Vector& psi0,
                    const Vector& v0, double dt);

/// Work vectors reused across steps.
struct CdmWorkspace
{
  Vector rhs;
  Vector accel;
};

/// One central difference step. Returns false when the new state is not finite.
bool cdm_step(CdmState& state, const GlobalSystem& system, const MassSolver& solver,
              CdmWorkspace& work);

/// Discrete energy 1/2 v^T M v + 1/2 Psi_k^T K Psi_{k-1}, v = (Psi_k - Psi_{k-1}) / dt,
/// exactly conserved by the scheme when F = 0.
double discrete_energy(const CdmState& state, const GlobalSystem& system);

struct RunOptions
{
  /// Record max |Psi| every this many steps (0 disables the trace).
  std::int64_t trace_interval = 0;
  bool track_energy = false;
  /// Require dt < dt_crit when dt_crit > 0 is supplied.
  double dt_crit = 0.0;
};

struct RunResult
{
  Vector final;
  bool aborted = false;
  std::int64_t abort_step = -1;
  std::vector<double> max_abs_trace;
  double energy_initial = 0.0;
  /// max_k |E_k - E_0| / |E_0|
  double energy_drift = 0.0;
};

RunResult run(const GlobalSystem& system, const Vector& psi0, const Vector& v0, double dt,
              std::int64_t n_steps, const RunOptions& options = {});

}  // namespace cutwave
