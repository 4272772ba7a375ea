// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cutwave/config.hpp"
#include "cutwave/eigensolve.hpp"
#include "cutwave/geometry.hpp"
#include "cutwave/model.hpp"

namespace cutwave
{

enum class Experiment
{
  RodSpectrum,
  RodConvergence,
  RodCutSweep,
  ArcConvergence
};

const char* to_string(Experiment e);
/// Accepts the subcommand names rod-spectrum, rod-convergence, rod-cutsweep, arc-convergence.
Experiment parse_experiment(const std::string& name);

const char* to_string(BoundaryCondition bc);
BoundaryCondition parse_bc(const std::string& name);

/// One discretization variant of a study, written as `fitted`, `ms:<alpha>`,
/// `evs:<epsilon>`, `gevs-mass`, `gevs-stiffness` or `gevs-both`.
struct Variant
{
  bool fitted = false;
  StabilizationMode mode = StabilizationMode::GevsMass;
  /// alpha for MS, epsilon for EVS; unused otherwise.
  double value = 0.0;

  std::string label() const;
  /// Parameter column of the CSV files, e.g. `alpha=1e-10`.
  std::string param(double alpha) const;
};

Variant parse_variant(const std::string& text);

struct ExperimentConfig
{
  Experiment experiment = Experiment::RodSpectrum;
  std::vector<BoundaryCondition> bcs{BoundaryCondition::Neumann, BoundaryCondition::Dirichlet};
  std::vector<Variant> variants;
  std::vector<int> degrees;
  std::vector<int> n_el;

  /// Mild material stabilization used by EVS and GEVS.
  double alpha = 1e-10;
  double f_lambda = 1e-2;
  EvsReference evs_reference = EvsReference::Lumped;
  NitscheConfig nitsche;
  int depth = 6;

  std::int64_t n_steps = 100000;
  /// Reduced steps: ceil(T / (fast_fraction dt_crit)), at least fast_min_steps.
  bool fast = false;
  double fast_fraction = 0.5;
  std::int64_t fast_min_steps = 0;

  RodDomain rod;
  ArcDomain arc;

  int sweep_count = 15;
  double sweep_min = 1e-8;
  double sweep_max = 1e-1;
  int sweep_n_el = 20;

  std::string out_dir = ".";
  int threads = 0;  // 0: hardware concurrency
  std::uint64_t seed = 20240917;
  bool dump_field = false;
  MaxEigOptions max_eig;

  /// Study defaults before any file or command line values are applied.
  static ExperimentConfig defaults(Experiment experiment);

  /// Reads every recognised key; unknown keys raise ConfigError.
  void apply(const KeyValueConfig& values);
  void validate() const;

  StabilizationConfig stabilization_for(const Variant& v) const;
};

/// Logarithmically spaced cut fractions from sweep_max down to sweep_min.
std::vector<double> sweep_fractions(const ExperimentConfig& config);

struct SpectrumRecord
{
  std::string experiment;
  std::string bc;
  std::string stabilization;
  std::string param;
  int p = 0;
  int n_el = 0;
  int mode_index = 0;
  double omega = 0.0;
  double omega_ref = 0.0;
  double ratio = 0.0;
};

struct ResultRow
{
  std::string experiment;
  std::string bc;
  std::string stabilization;
  std::string param;
  int p = 0;
  int n_el = 0;
  double cut_fraction = 1.0;
  double dt_crit = 0.0;
  /// NaN when no time integration was performed.
  double l2_error = 0.0;
  std::int64_t n_steps = 0;
  double wall_seconds = 0.0;
  /// ok, dt_only, unstable, diverged or failed.
  std::string status = "ok";

  bool succeeded() const { return status == "ok" || status == "dt_only"; }
};

struct ExperimentOutput
{
  std::vector<SpectrumRecord> spectrum;
  std::vector<ResultRow> results;
  /// Cells that did not complete, with a reason.
  std::vector<std::string> failures;
};

ExperimentOutput run_rod_spectrum(const ExperimentConfig& config);
ExperimentOutput run_rod_convergence(const ExperimentConfig& config);
ExperimentOutput run_rod_cutsweep(const ExperimentConfig& config);
ExperimentOutput run_arc_convergence(const ExperimentConfig& config);
ExperimentOutput run_experiment(const ExperimentConfig& config);

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumRecord>& rows);
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);

/// Log-log least-squares slopes of error against 1/n_el per (bc, stabilization, param, p),
/// over successful rows with a finite error.
struct SlopeSummary
{
  std::string bc;
  std::string stabilization;
  std::string param;
  int p = 0;
  double slope = 0.0;
  int points = 0;
};
std::vector<SlopeSummary> convergence_slopes(const std::vector<ResultRow>& rows);

/// Runs `config`, writes CSV files into config.out_dir and a short summary to `log`.
/// Returns 0 when every cell succeeded and 2 otherwise.
int execute(const ExperimentConfig& config, std::ostream& log);

/// Quick internal consistency checks (quadrature, deflation, CDM). Returns 0 when all pass.
int selftest(std::uint64_t seed, std::ostream& log);

}  // namespace cutwave
