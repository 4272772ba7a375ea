// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "cutwave/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "cutwave/analysis.hpp"
#include "cutwave/timeint.hpp"

namespace cutwave
{

namespace
{

std::string lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string format_number(double v)
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.14e", v);
  return buf;
}

std::string short_number(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// A cell produces its rows independently of every other cell.
struct CellOutput
{
  std::vector<SpectrumRecord> spectrum;
  std::vector<ResultRow> results;
  std::string failure;
};

using Cell = std::function<CellOutput()>;

// Runs the cells on a small pool; output order follows the cell order.
std::vector<CellOutput> run_cells(const std::vector<Cell>& cells, int threads)
{
  std::vector<CellOutput> out(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < cells.size(); i = next++)
      out[i] = cells[i]();
  };
  int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n = std::clamp(n, 1, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));
  if (n == 1)
  {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < n; ++t)
    pool.emplace_back(worker);
  for (auto& t : pool)
    t.join();
  return out;
}

ExperimentOutput collect(std::vector<CellOutput> cells)
{
  ExperimentOutput out;
  for (auto& c : cells)
  {
    out.spectrum.insert(out.spectrum.end(), c.spectrum.begin(), c.spectrum.end());
    out.results.insert(out.results.end(), c.results.begin(), c.results.end());
    if (!c.failure.empty())
      out.failures.push_back(c.failure);
  }
  return out;
}

std::string cell_name(const ResultRow& row)
{
  std::ostringstream s;
  s << row.experiment << " bc=" << row.bc << " " << row.stabilization << " " << row.param
    << " p=" << row.p << " n_el=" << row.n_el;
  if (row.experiment == "rod-cutsweep")
    s << " chi=" << short_number(row.cut_fraction);
  return s.str();
}

void dump_field(const ExperimentConfig& config, const DiscreteProblem& problem, const Vector& psi,
                const ResultRow& row, int tag)
{
  std::ostringstream name;
  name << "field_" << row.experiment << "_" << row.bc << "_" << row.stabilization << "_p" << row.p
       << "_n" << row.n_el;
  if (tag >= 0)
    name << "_c" << tag;
  name << ".csv";
  std::ofstream out(std::filesystem::path(config.out_dir) / name.str());
  const auto& coords = problem.system.dofs.coordinates;
  out << (problem.dim() == 2 ? "x,y,psi\n" : "x,psi\n");
  for (std::size_t i = 0; i < coords.size(); ++i)
  {
    out << format_number(coords[i][0]) << ",";
    if (problem.dim() == 2)
      out << format_number(coords[i][1]) << ",";
    out << format_number(psi(static_cast<Eigen::Index>(i))) << "\n";
  }
}

// Shared time-integration part of the rod and arc studies.
struct TransientSetup
{
  const DiscreteProblem* problem = nullptr;
  ScalarField initial;
  ScalarField exact;
  double final_time = 0.0;
  bool dt_only = false;
  int dump_tag = -1;
};

void transient_cell(const ExperimentConfig& config, const TransientSetup& setup, ResultRow& row,
                    CellOutput& out, std::chrono::steady_clock::time_point t0)
{
  const auto& problem = *setup.problem;
  row.cut_fraction = problem.cut_fraction;
  const auto eig = max_gen_eig(problem.system.stiffness, problem.system.mass, config.max_eig);
  row.dt_crit = critical_dt(eig.value);
  row.l2_error = std::numeric_limits<double>::quiet_NaN();

  if (setup.dt_only)
  {
    row.status = "dt_only";
    row.wall_seconds = seconds_since(t0);
    return;
  }

  std::int64_t steps = config.n_steps;
  if (config.fast)
  {
    const double target = config.fast_fraction * row.dt_crit;
    steps = std::max<std::int64_t>(config.fast_min_steps,
                                   static_cast<std::int64_t>(std::ceil(setup.final_time / target)));
  }
  row.n_steps = steps;
  const double dt = setup.final_time / static_cast<double>(steps);
  if (!(dt < row.dt_crit))
  {
    row.status = "unstable";
    row.wall_seconds = seconds_since(t0);
    out.failure = cell_name(row) + ": dt = " + short_number(dt) + " exceeds dt_crit = " +
                  short_number(row.dt_crit);
    return;
  }

  const Vector psi0 = problem.interpolate(setup.initial);
  const Vector v0 = Vector::Zero(problem.system.n_dof());
  const auto result = run(problem.system, psi0, v0, dt, steps);
  if (result.aborted)
  {
    row.status = "diverged";
    row.wall_seconds = seconds_since(t0);
    out.failure = cell_name(row) + ": non-finite state at step " + std::to_string(result.abort_step);
    return;
  }
  row.l2_error = l2_error(problem, result.final, setup.exact);
  if (config.dump_field)
    dump_field(config, problem, result.final, row, setup.dump_tag);
  row.wall_seconds = seconds_since(t0);
}

// Wraps a cell body so that exceptions become a failed row.
CellOutput guarded(ResultRow row, const std::function<void(ResultRow&, CellOutput&)>& body)
{
  CellOutput out;
  const auto t0 = std::chrono::steady_clock::now();
  try
  {
    body(row, out);
  }
  catch (const std::exception& e)
  {
    row.status = "failed";
    row.dt_crit = std::numeric_limits<double>::quiet_NaN();
    row.l2_error = std::numeric_limits<double>::quiet_NaN();
    row.wall_seconds = seconds_since(t0);
    out.failure = cell_name(row) + ": " + e.what();
  }
  out.results.push_back(row);
  return out;
}

ResultRow base_row(const ExperimentConfig& config, BoundaryCondition bc, const Variant& v, int p,
                   int n_el)
{
  ResultRow row;
  row.experiment = to_string(config.experiment);
  row.bc = to_string(bc);
  row.stabilization = v.label();
  row.param = v.param(config.alpha);
  row.p = p;
  row.n_el = n_el;
  return row;
}

double sign_for(BoundaryCondition bc)
{
  return bc == BoundaryCondition::Dirichlet ? -1.0 : 1.0;
}

DiscreteProblem build_rod(const ExperimentConfig& config, const RodDomain& domain,
                          const Variant& v, int p, int n_el)
{
  if (v.fitted)
    return build_boundary_fitted_rod(domain, p, n_el);
  DiscretizationOptions opt;
  opt.p = p;
  opt.n_el = n_el;
  opt.stabilization = config.stabilization_for(v);
  opt.nitsche = config.nitsche;
  return build_rod_problem(domain, opt);
}

}  // namespace

const char* to_string(Experiment e)
{
  switch (e)
  {
  case Experiment::RodSpectrum:
    return "rod-spectrum";
  case Experiment::RodConvergence:
    return "rod-convergence";
  case Experiment::RodCutSweep:
    return "rod-cutsweep";
  case Experiment::ArcConvergence:
    return "arc-convergence";
  }
  return "?";
}

Experiment parse_experiment(const std::string& name)
{
  for (auto e : {Experiment::RodSpectrum, Experiment::RodConvergence, Experiment::RodCutSweep,
                 Experiment::ArcConvergence})
    if (name == to_string(e))
      return e;
  throw ConfigError("unknown experiment '" + name + "'");
}

const char* to_string(BoundaryCondition bc)
{
  return bc == BoundaryCondition::Neumann ? "neumann" : "dirichlet";
}

BoundaryCondition parse_bc(const std::string& name)
{
  const auto s = lower(name);
  if (s == "neumann")
    return BoundaryCondition::Neumann;
  if (s == "dirichlet")
    return BoundaryCondition::Dirichlet;
  throw ConfigError("unknown boundary condition '" + name + "'");
}

std::string Variant::label() const
{
  return fitted ? "fitted" : to_string(mode);
}

std::string Variant::param(double alpha) const
{
  if (fitted)
    return "none";
  switch (mode)
  {
  case StabilizationMode::MS:
    return "alpha=" + short_number(value);
  case StabilizationMode::EVS:
    return "eps=" + short_number(value);
  default:
    return "alpha=" + short_number(alpha);
  }
}

Variant parse_variant(const std::string& text)
{
  Variant v;
  const auto s = lower(trim(text));
  if (s == "fitted")
  {
    v.fitted = true;
    return v;
  }
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  try
  {
    v.mode = parse_stabilization(head);
  }
  catch (const std::exception&)
  {
    throw ConfigError("unknown variant '" + text + "'");
  }
  const bool needs_value = v.mode == StabilizationMode::MS || v.mode == StabilizationMode::EVS;
  if (needs_value != (colon != std::string::npos))
    throw ConfigError("variant '" + text + "': " +
                      (needs_value ? "ms and evs need a value, e.g. ms:1e-5"
                                   : "gevs variants take no value"));
  if (needs_value)
    v.value = parse_double(s.substr(colon + 1), "variants");
  return v;
}

ExperimentConfig ExperimentConfig::defaults(Experiment experiment)
{
  ExperimentConfig c;
  c.experiment = experiment;
  auto variants = [&](std::initializer_list<const char*> names) {
    c.variants.clear();
    for (const char* n : names)
      c.variants.push_back(parse_variant(n));
  };
  switch (experiment)
  {
  case Experiment::RodSpectrum:
    variants({"fitted", "ms:1e-1", "ms:1e-5", "ms:1e-10", "evs:1e-2", "evs:1e-4", "gevs-mass",
              "gevs-stiffness", "gevs-both"});
    c.degrees = {2};
    c.n_el = {50};
    break;
  case Experiment::RodConvergence:
    variants({"gevs-mass", "fitted"});
    c.degrees = {1, 2, 3, 4};
    c.n_el = {10, 20, 40, 80};
    c.n_steps = 100000;
    break;
  case Experiment::RodCutSweep:
    variants({"ms:1e-10", "gevs-mass"});
    c.degrees = {1, 2, 3, 4};
    c.n_el = {20};
    c.n_steps = 2000000;
    break;
  case Experiment::ArcConvergence:
    variants({"ms:1e-10", "gevs-mass"});
    c.degrees = {1, 2, 3, 4};
    c.n_el = {4, 8, 16, 32};
    c.n_steps = 1000000;
    c.nitsche.mode = NitscheMode::FixedPenalty;
    c.nitsche.penalty = 1e7;
    break;
  }
  return c;
}

void ExperimentConfig::apply(const KeyValueConfig& values)
{
  if (values.has("bcs"))
  {
    bcs.clear();
    for (const auto& s : values.get_list("bcs", {}))
      bcs.push_back(parse_bc(s));
  }
  if (values.has("variants"))
  {
    variants.clear();
    for (const auto& s : values.get_list("variants", {}))
      variants.push_back(parse_variant(s));
  }
  degrees = values.get_int_list("degrees", degrees);
  n_el = values.get_int_list("n_el", n_el);

  alpha = values.get_double("alpha", alpha);
  f_lambda = values.get_double("f_lambda", f_lambda);
  if (values.has("evs_reference"))
  {
    const auto s = lower(values.get_string("evs_reference", ""));
    if (s == "lumped")
      evs_reference = EvsReference::Lumped;
    else if (s == "consistent")
      evs_reference = EvsReference::Consistent;
    else
      throw ConfigError("evs_reference must be lumped or consistent");
  }
  if (values.has("nitsche"))
  {
    const auto s = lower(values.get_string("nitsche", ""));
    if (s == "computed")
      nitsche.mode = NitscheMode::ComputedPenalty;
    else if (s == "fixed")
      nitsche.mode = NitscheMode::FixedPenalty;
    else if (s == "penalty-only")
      nitsche.mode = NitscheMode::PenaltyOnly;
    else
      throw ConfigError("nitsche must be computed, fixed or penalty-only");
  }
  nitsche.penalty = values.get_double("penalty", nitsche.penalty);
  depth = static_cast<int>(values.get_int("depth", depth));

  n_steps = values.get_int("n_steps", n_steps);
  fast = values.get_bool("fast", fast);
  fast_fraction = values.get_double("fast_fraction", fast_fraction);
  fast_min_steps = values.get_int("fast_min_steps", fast_min_steps);

  rod.length = values.get_double("rod.length", rod.length);
  rod.physical_length = values.get_double("rod.physical_length", rod.physical_length);
  arc.length = values.get_double("arc.length", arc.length);
  arc.center = values.get_double("arc.center", arc.center);
  arc.inner_radius = values.get_double("arc.inner_radius", arc.inner_radius);
  arc.outer_radius = values.get_double("arc.outer_radius", arc.outer_radius);
  arc.end_angle = values.get_double("arc.end_angle", arc.end_angle);

  sweep_count = static_cast<int>(values.get_int("sweep.count", sweep_count));
  sweep_min = values.get_double("sweep.min", sweep_min);
  sweep_max = values.get_double("sweep.max", sweep_max);
  sweep_n_el = static_cast<int>(values.get_int("sweep.n_el", sweep_n_el));

  out_dir = values.get_string("out", out_dir);
  threads = static_cast<int>(values.get_int("threads", threads));
  seed = static_cast<std::uint64_t>(values.get_int("seed", static_cast<long long>(seed)));
  dump_field = values.get_bool("dump_field", dump_field);

  max_eig.dense_limit = static_cast<int>(values.get_int("eig.dense_limit", max_eig.dense_limit));
  max_eig.tolerance = values.get_double("eig.tolerance", max_eig.tolerance);
  if (values.has("eig.method"))
  {
    const auto s = lower(values.get_string("eig.method", ""));
    if (s == "lanczos")
      max_eig.method = IterativeMethod::Lanczos;
    else if (s == "power")
      max_eig.method = IterativeMethod::Power;
    else
      throw ConfigError("eig.method must be lanczos or power");
  }

  const auto unknown = values.unused_keys();
  if (!unknown.empty())
  {
    std::string msg = "unknown configuration key";
    msg += unknown.size() > 1 ? "s:" : ":";
    for (const auto& k : unknown)
      msg += " " + k;
    throw ConfigError(msg);
  }
}

void ExperimentConfig::validate() const
{
  std::vector<std::string> errors;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok)
      errors.push_back(msg);
  };
  check(!bcs.empty(), "bcs must not be empty");
  check(!variants.empty(), "variants must not be empty");
  check(!degrees.empty(), "degrees must not be empty");
  check(!n_el.empty(), "n_el must not be empty");
  for (int p : degrees)
    check(p >= 1 && p <= 10, "degree " + std::to_string(p) + " outside 1..10");
  for (int n : n_el)
    check(n >= 1, "n_el entries must be positive");
  check(n_steps >= 1, "n_steps must be at least 1");
  check(fast_fraction > 0.0 && fast_fraction < 1.0, "fast_fraction must lie in (0, 1)");
  check(fast_min_steps >= 0, "fast_min_steps must not be negative");
  check(depth >= 0 && depth <= 12, "depth must lie in 0..12");
  check(sweep_count >= 2, "sweep.count must be at least 2");
  check(sweep_min > 0.0 && sweep_min < sweep_max && sweep_max < 1.0,
        "sweep bounds must satisfy 0 < sweep.min < sweep.max < 1");
  check(sweep_n_el >= 2, "sweep.n_el must be at least 2");
  check(threads >= 0, "threads must not be negative");
  check(max_eig.dense_limit >= 0, "eig.dense_limit must not be negative");
  check(max_eig.tolerance > 0.0, "eig.tolerance must be positive");

  auto guard = [&](const std::function<void()>& f) {
    try
    {
      f();
    }
    catch (const std::exception& e)
    {
      errors.push_back(e.what());
    }
  };
  guard([&] { rod.validate(); });
  guard([&] { arc.validate(); });
  guard([&] { nitsche.validate(); });
  for (const auto& v : variants)
    if (!v.fitted)
      guard([&] { stabilization_for(v).validate(); });
  for (const auto& v : variants)
    if (v.fitted && experiment != Experiment::RodSpectrum &&
        experiment != Experiment::RodConvergence)
      errors.push_back("the fitted variant is only available for rod-spectrum and rod-convergence");

  if (!errors.empty())
  {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors)
      msg += "\n  " + e;
    throw ConfigError(msg);
  }
}

StabilizationConfig ExperimentConfig::stabilization_for(const Variant& v) const
{
  StabilizationConfig s;
  s.mode = v.mode;
  s.alpha = v.mode == StabilizationMode::MS ? v.value : alpha;
  if (v.mode == StabilizationMode::EVS)
    s.epsilon = v.value;
  s.f_lambda = f_lambda;
  s.evs_reference = evs_reference;
  return s;
}

std::vector<double> sweep_fractions(const ExperimentConfig& config)
{
  std::vector<double> out(config.sweep_count);
  const double a = std::log10(config.sweep_max);
  const double b = std::log10(config.sweep_min);
  for (int i = 0; i < config.sweep_count; ++i)
    out[i] = std::pow(10.0, a + (b - a) * i / (config.sweep_count - 1));
  return out;
}

ExperimentOutput run_rod_spectrum(const ExperimentConfig& config)
{
  std::vector<Cell> cells;
  for (auto bc : config.bcs)
    for (const auto& v : config.variants)
      for (int p : config.degrees)
        for (int n : config.n_el)
          cells.push_back([&config, bc, v, p, n]() {
            CellOutput out;
            try
            {
              RodDomain domain = config.rod;
              domain.right_bc = bc;
              const auto problem = build_rod(config, domain, v, p, n);
              const auto rows =
                  spectrum_accuracy(problem.system, domain.physical_length, 1.0, bc);
              for (const auto& r : rows)
              {
                SpectrumRecord rec;
                rec.experiment = to_string(config.experiment);
                rec.bc = to_string(bc);
                rec.stabilization = v.label();
                rec.param = v.param(config.alpha);
                rec.p = p;
                rec.n_el = n;
                rec.mode_index = r.mode_index;
                rec.omega = r.omega;
                rec.omega_ref = r.omega_ref;
                rec.ratio = r.ratio;
                out.spectrum.push_back(rec);
              }
            }
            catch (const std::exception& e)
            {
              out.failure = std::string("rod-spectrum bc=") + to_string(bc) + " " + v.label() +
                            " p=" + std::to_string(p) + " n_el=" + std::to_string(n) + ": " +
                            e.what();
            }
            return out;
          });
  return collect(run_cells(cells, config.threads));
}

ExperimentOutput run_rod_convergence(const ExperimentConfig& config)
{
  std::vector<Cell> cells;
  for (auto bc : config.bcs)
    for (const auto& v : config.variants)
      for (int p : config.degrees)
        for (int n : config.n_el)
          cells.push_back([&config, bc, v, p, n]() {
            return guarded(base_row(config, bc, v, p, n), [&](ResultRow& row, CellOutput& out) {
              const auto t0 = std::chrono::steady_clock::now();
              RodDomain domain = config.rod;
              domain.right_bc = bc;
              const auto problem = build_rod(config, domain, v, p, n);
              TransientSetup setup;
              setup.problem = &problem;
              setup.initial = rod_initial;
              const double s = sign_for(bc);
              setup.exact = [s](const Vec2& x) { return s * rod_initial(x); };
              setup.final_time = rod_final_time(domain);
              transient_cell(config, setup, row, out, t0);
            });
          });
  return collect(run_cells(cells, config.threads));
}

ExperimentOutput run_rod_cutsweep(const ExperimentConfig& config)
{
  const auto fractions = sweep_fractions(config);
  std::vector<Cell> cells;
  for (auto bc : config.bcs)
    for (const auto& v : config.variants)
      for (int p : config.degrees)
        for (std::size_t c = 0; c < fractions.size(); ++c)
          cells.push_back([&config, bc, v, p, c, chi = fractions[c]]() {
            const int n = config.sweep_n_el;
            auto row = base_row(config, bc, v, p, n);
            row.cut_fraction = chi;
            return guarded(row, [&](ResultRow& r, CellOutput& out) {
              const auto t0 = std::chrono::steady_clock::now();
              RodDomain domain = config.rod;
              domain.right_bc = bc;
              const double h = domain.length / n;
              domain.physical_length = (n - 1) * h + chi * h;
              const auto problem = build_rod(config, domain, v, p, n);
              TransientSetup setup;
              setup.problem = &problem;
              setup.initial = rod_initial;
              const double s = sign_for(bc);
              setup.exact = [s](const Vec2& x) { return s * rod_initial(x); };
              setup.final_time = rod_final_time(domain);
              setup.dt_only = config.fast && v.mode == StabilizationMode::MS;
              setup.dump_tag = static_cast<int>(c);
              transient_cell(config, setup, r, out, t0);
              r.cut_fraction = chi;
            });
          });
  return collect(run_cells(cells, config.threads));
}

ExperimentOutput run_arc_convergence(const ExperimentConfig& config)
{
  std::vector<Cell> cells;
  for (auto bc : config.bcs)
    for (const auto& v : config.variants)
      for (int p : config.degrees)
        for (int n : config.n_el)
          cells.push_back([&config, bc, v, p, n]() {
            return guarded(base_row(config, bc, v, p, n), [&](ResultRow& row, CellOutput& out) {
              const auto t0 = std::chrono::steady_clock::now();
              ArcDomain domain = config.arc;
              domain.bc = bc;
              DiscretizationOptions opt;
              opt.p = p;
              opt.n_el = n;
              opt.depth = config.depth;
              opt.stabilization = config.stabilization_for(v);
              opt.nitsche = config.nitsche;
              const auto problem = build_arc_problem(domain, opt);
              TransientSetup setup;
              setup.problem = &problem;
              setup.initial = [domain](const Vec2& x) { return arc_initial(domain, x); };
              const double s = sign_for(bc);
              setup.exact = [domain, s](const Vec2& x) { return s * arc_initial(domain, x); };
              setup.final_time = arc_final_time(domain);
              setup.dt_only = config.fast && v.mode == StabilizationMode::MS;
              transient_cell(config, setup, row, out, t0);
            });
          });
  return collect(run_cells(cells, config.threads));
}

ExperimentOutput run_experiment(const ExperimentConfig& config)
{
  switch (config.experiment)
  {
  case Experiment::RodSpectrum:
    return run_rod_spectrum(config);
  case Experiment::RodConvergence:
    return run_rod_convergence(config);
  case Experiment::RodCutSweep:
    return run_rod_cutsweep(config);
  case Experiment::ArcConvergence:
    return run_arc_convergence(config);
  }
  throw std::logic_error("run_experiment: unknown experiment");
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumRecord>& rows)
{
  out << "experiment,bc,stabilization,param,p,n_el,mode_index,omega,omega_ref,ratio\n";
  for (const auto& r : rows)
    out << r.experiment << ',' << r.bc << ',' << r.stabilization << ',' << r.param << ',' << r.p
        << ',' << r.n_el << ',' << r.mode_index << ',' << format_number(r.omega) << ','
        << format_number(r.omega_ref) << ',' << format_number(r.ratio) << '\n';
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows)
{
  out << "experiment,bc,stabilization,param,p,n_el,cut_fraction,dt_crit,l2_error,n_steps,"
         "wall_seconds,status\n";
  for (const auto& r : rows)
    out << r.experiment << ',' << r.bc << ',' << r.stabilization << ',' << r.param << ',' << r.p
        << ',' << r.n_el << ',' << format_number(r.cut_fraction) << ','
        << format_number(r.dt_crit) << ',' << format_number(r.l2_error) << ',' << r.n_steps
        << ',' << format_number(r.wall_seconds) << ',' << r.status << '\n';
}

std::vector<SlopeSummary> convergence_slopes(const std::vector<ResultRow>& rows)
{
  using Key = std::tuple<std::string, std::string, std::string, int>;
  std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
  std::vector<Key> order;
  for (const auto& r : rows)
  {
    if (r.status != "ok" || !std::isfinite(r.l2_error) || !(r.l2_error > 0.0))
      continue;
    const Key key{r.bc, r.stabilization, r.param, r.p};
    if (!groups.count(key))
      order.push_back(key);
    groups[key].first.push_back(1.0 / r.n_el);
    groups[key].second.push_back(r.l2_error);
  }
  std::vector<SlopeSummary> out;
  for (const auto& key : order)
  {
    const auto& [h, e] = groups[key];
    if (h.size() < 2)
      continue;
    SlopeSummary s;
    std::tie(s.bc, s.stabilization, s.param, s.p) = key;
    s.slope = convergence_slope(h, e);
    s.points = static_cast<int>(h.size());
    out.push_back(s);
  }
  return out;
}

namespace
{

void summarize(const ExperimentConfig& config, const ExperimentOutput& out, std::ostream& log)
{
  if (config.experiment == Experiment::RodSpectrum)
  {
    std::map<std::tuple<std::string, std::string, std::string, int, int>, std::pair<double, double>>
        stats;
    std::vector<std::tuple<std::string, std::string, std::string, int, int>> order;
    for (const auto& r : out.spectrum)
    {
      const auto key = std::make_tuple(r.bc, r.stabilization, r.param, r.p, r.n_el);
      if (!stats.count(key))
      {
        order.push_back(key);
        stats[key] = {0.0, 0.0};
      }
      stats[key].first = std::max(stats[key].first, r.ratio);
      stats[key].second = r.ratio;  // rows are ascending, the last one wins
    }
    for (const auto& key : order)
      log << std::get<0>(key) << " " << std::get<1>(key) << " " << std::get<2>(key)
          << " p=" << std::get<3>(key) << " n_el=" << std::get<4>(key)
          << ": max ratio " << short_number(stats[key].first) << ", highest mode "
          << short_number(stats[key].second) << "\n";
    return;
  }

  if (config.experiment == Experiment::RodCutSweep)
  {
    std::map<std::tuple<std::string, std::string, int>, std::pair<double, double>> range;
    std::vector<std::tuple<std::string, std::string, int>> order;
    for (const auto& r : out.results)
    {
      if (!r.succeeded())
        continue;
      const auto key = std::make_tuple(r.bc, r.stabilization, r.p);
      if (!range.count(key))
      {
        order.push_back(key);
        range[key] = {r.dt_crit, r.dt_crit};
      }
      range[key].first = std::min(range[key].first, r.dt_crit);
      range[key].second = std::max(range[key].second, r.dt_crit);
    }
    for (const auto& key : order)
      log << std::get<0>(key) << " " << std::get<1>(key) << " p=" << std::get<2>(key)
          << ": dt_crit in [" << short_number(range[key].first) << ", "
          << short_number(range[key].second) << "]\n";
    return;
  }

  for (const auto& s : convergence_slopes(out.results))
    log << s.bc << " " << s.stabilization << " " << s.param << " p=" << s.p << ": slope "
        << short_number(s.slope) << " over " << s.points << " meshes\n";
}

}  // namespace

int execute(const ExperimentConfig& config, std::ostream& log)
{
  std::filesystem::create_directories(config.out_dir);
  const auto out = run_experiment(config);
  const auto path = std::filesystem::path(config.out_dir) /
                    (std::string(to_string(config.experiment)) + ".csv");
  std::ofstream file(path);
  if (!file)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  if (config.experiment == Experiment::RodSpectrum)
    write_spectrum_csv(file, out.spectrum);
  else
    write_results_csv(file, out.results);
  file.close();

  log << "wrote " << path.string() << "\n";
  summarize(config, out, log);
  for (const auto& f : out.failures)
    log << "FAILED " << f << "\n";
  return out.failures.empty() ? 0 : 2;
}

int selftest(std::uint64_t seed, std::ostream& log)
{
  int failed = 0;
  auto report = [&](bool ok, const std::string& name, double measured) {
    log << (ok ? "PASS " : "FAIL ") << name << " (" << short_number(measured) << ")\n";
    failed += ok ? 0 : 1;
  };

  // Quadrature exactness on monomials.
  double worst = 0.0;
  for (int p = 1; p <= 10; ++p)
  {
    const auto gll = gll_rule(p);
    const auto gl = gauss_legendre_rule(p);
    for (int k = 0; k <= 2 * p - 1; ++k)
    {
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < gll.size(); ++i)
        a += gll.weights[i] * std::pow(gll.points[i], k);
      for (std::size_t i = 0; i < gl.size(); ++i)
        b += gl.weights[i] * std::pow(gl.points[i], k);
      worst = std::max({worst, std::abs(a - exact), std::abs(b - exact)});
    }
  }
  report(worst < 1e-12, "quadrature exactness", worst);

  // GEVS mass deflation on random SPD pencils.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double dev = 0.0;
  for (int trial = 0; trial < 20; ++trial)
  {
    const int n = 2 + trial % 9;
    Matrix x(n, n), y(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
      {
        x(i, j) = normal(rng);
        y(i, j) = normal(rng);
      }
    const Matrix a = x * x.transpose() + 0.1 * Matrix::Identity(n, n);
    const Matrix b = y * y.transpose() + 0.1 * Matrix::Identity(n, n);
    const Vector before = gen_sym_eigvals(a, b);
    const double star = before(n / 2);
    const auto res = gevs(a, b, star, GevsVariant::Mass);
    const Vector after = gen_sym_eigvals(res.k, res.m);
    for (int i = 0; i < n; ++i)
    {
      const double target = std::min(before(i), star);
      dev = std::max(dev, std::abs(after(i) - target) / std::abs(target));
    }
  }
  report(dev < 1e-9, "gevs mass deflation", dev);

  // Second order accuracy of CDM on x'' = -x.
  auto oscillator_error = [](std::int64_t steps) {
    GlobalSystem sys;
    sys.mass.diagonal = Vector::Ones(1);
    sys.mass.correction.resize(1, 1);
    sys.stiffness.resize(1, 1);
    sys.stiffness.insert(0, 0) = 1.0;
    sys.stiffness.makeCompressed();
    sys.force = Vector::Zero(1);
    sys.dofs.n_dof = 1;
    const double t = 1.0;
    const auto r = run(sys, Vector::Ones(1), Vector::Zero(1), t / steps, steps);
    return std::abs(r.final(0) - std::cos(t));
  };
  const double order = std::log2(oscillator_error(200) / oscillator_error(400));
  report(order > 1.9, "cdm order", order);

  return failed == 0 ? 0 : 2;
}

}  // namespace cutwave
