// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. All tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cutwave/analysis.hpp"
#include "cutwave/experiments.hpp"
#include "cutwave/model.hpp"
#include "cutwave/polybasis.hpp"
#include "cutwave/stabilize.hpp"
#include "cutwave/timeint.hpp"

using namespace cutwave;

namespace
{

struct Outcome
{
  bool pass = true;
  std::vector<std::string> notes;

  // Records a checked item; failed items are marked with a leading '!'.
  void require(bool ok, const std::string& what)
  {
    if (!ok)
      pass = false;
    notes.push_back((ok ? "  " : "! ") + what);
  }
  void note(const std::string& s) { notes.push_back("  " + s); }
};

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------------------

constexpr int kPencils = 100;
constexpr double kDeflationTol = 1e-9;

Outcome deflation_property()
{
  Outcome out;
  std::mt19937_64 rng(20240917);
  std::uniform_int_distribution<int> size(2, 12);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> where(0.2, 0.8);
  auto random_spd = [&](int n) {
    Matrix x(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        x(i, j) = g(rng);
    return Matrix(x * x.transpose() + 0.05 * Matrix::Identity(n, n));
  };

  double worst = 0.0;
  int checked = 0;
  for (auto variant : {GevsVariant::Mass, GevsVariant::Stiffness, GevsVariant::Both})
    for (int trial = 0; trial < kPencils; ++trial)
    {
      const int n = size(rng);
      const Matrix k = random_spd(n);
      const Matrix m = random_spd(n);
      const Vector before = Eigen::GeneralizedSelfAdjointEigenSolver<Matrix>(
                                k, m, Eigen::EigenvaluesOnly)
                                .eigenvalues();
      // lambda* somewhere inside the spectrum
      const double star =
          std::exp(std::log(before(0)) + where(rng) * std::log(before(n - 1) / before(0)));
      const auto res = gevs(k, m, star, variant);
      const Vector after = Eigen::GeneralizedSelfAdjointEigenSolver<Matrix>(
                               res.k, res.m, Eigen::EigenvaluesOnly)
                               .eigenvalues();
      for (int i = 0; i < n; ++i)
      {
        const double target = before(i) > star ? star : before(i);
        const double rel = std::abs(after(i) - target) / target;
        worst = std::max(worst, rel);
        ++checked;
      }
    }
  out.require(worst <= kDeflationTol, std::to_string(checked) + " eigenvalues over " +
                                          std::to_string(3 * kPencils) +
                                          " pencils, worst relative deviation " + fmt(worst) +
                                          " <= 1e-9");
  return out;
}

// ---------------------------------------------------------------------------

constexpr double kExactness = 1e-12;

Outcome quadrature_exactness()
{
  Outcome out;
  auto monomial = [](int k) { return k % 2 == 0 ? 2.0 / (k + 1) : 0.0; };
  auto rule_error = [&](const QuadratureRule1D& rule, int degree) {
    double worst = 0.0;
    for (int k = 0; k <= degree; ++k)
    {
      double s = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q)
        s += rule.weights[q] * std::pow(rule.points[q], k);
      worst = std::max(worst, std::abs(s - monomial(k)));
    }
    return worst;
  };

  double gll = 0.0, gl = 0.0, delta = 0.0, unity = 0.0;
  for (int p = 1; p <= 10; ++p)
    gll = std::max(gll, rule_error(gll_rule(p), 2 * p - 1));
  for (int n = 1; n <= 10; ++n)
    gl = std::max(gl, rule_error(gauss_legendre_rule(n), 2 * n - 1));
  for (int p = 1; p <= 10; ++p)
  {
    const SpectralBasis1D basis(p);
    for (int j = 0; j <= p; ++j)
    {
      const auto v = basis.eval(basis.nodes()[j]);
      for (int i = 0; i <= p; ++i)
        delta = std::max(delta, std::abs(v.values[i] - (i == j ? 1.0 : 0.0)));
    }
    for (int s = 0; s <= 50; ++s)
    {
      const auto v = basis.eval(-1.0 + 2.0 * s / 50);
      double sum = 0.0;
      for (double x : v.values)
        sum += x;
      unity = std::max(unity, std::abs(sum - 1.0));
    }
  }
  out.require(gll <= kExactness, "GLL exact to degree 2p-1, error " + fmt(gll));
  out.require(gl <= kExactness, "Gauss-Legendre exact to degree 2n-1, error " + fmt(gl));
  out.require(delta <= kExactness, "delta property, error " + fmt(delta));
  out.require(unity <= kExactness, "partition of unity, error " + fmt(unity));
  return out;
}

// ---------------------------------------------------------------------------

struct Window
{
  double lo;
  double hi;
};

Outcome rod_spectrum()
{
  Outcome out;
  const auto config = ExperimentConfig::defaults(Experiment::RodSpectrum);
  const auto result = run_rod_spectrum(config);
  out.require(result.failures.empty(), "all spectrum cells computed");

  // (bc, stabilization, param) -> (max ratio, highest-mode ratio)
  std::map<std::string, std::pair<double, double>> stats;
  std::map<std::string, int> top_index;
  for (const auto& r : result.spectrum)
  {
    const auto key = r.bc + " " + r.stabilization + " " + r.param;
    auto& s = stats[key];
    s.first = std::max(s.first, r.ratio);
    if (r.mode_index >= top_index[key])
    {
      top_index[key] = r.mode_index;
      s.second = r.ratio;
    }
  }
  auto check = [&](const std::string& key, bool highest, Window w) {
    if (!stats.count(key))
    {
      out.require(false, key + " present");
      return;
    }
    const double v = highest ? stats[key].second : stats[key].first;
    const std::string what = key + (highest ? " highest-mode ratio " : " outlier ratio ") +
                             fmt(v) + " in [" + fmt(w.lo) + ", " + fmt(w.hi) + "]";
    out.require(v >= w.lo && v <= w.hi, what);
  };
  for (const char* bc : {"neumann", "dirichlet"})
  {
    const std::string b = bc;
    check(b + " fitted none", true, {0.72, 0.82});
    check(b + " gevs-mass alpha=1e-10", true, {0.72, 0.82});
    check(b + " ms alpha=1e-05", false, {2.5, 3.5});
    check(b + " ms alpha=1e-10", false, {2.5, 3.5});
  }
  check("neumann evs eps=0.01", false, {1.1, 1.35});
  check("dirichlet evs eps=0.01", false, {2.0, 2.6});
  check("neumann evs eps=0.0001", false, {1.8, 2.2});
  check("dirichlet evs eps=0.0001", false, {2.2, 2.8});
  return out;
}

// Observed rate between the two finest meshes of every (bc, stabilization, p).
void note_finest_rates(Outcome& out, const std::vector<ResultRow>& rows)
{
  std::map<std::tuple<std::string, std::string, int>, std::map<int, double>> errors;
  for (const auto& r : rows)
    if (r.status == "ok")
      errors[{r.bc, r.stabilization, r.p}][r.n_el] = r.l2_error;
  for (const auto& [key, by_n] : errors)
  {
    if (by_n.size() < 2)
      continue;
    const auto fine = std::prev(by_n.end());
    const auto coarse = std::prev(fine);
    const double rate =
        std::log(coarse->second / fine->second) / std::log(double(fine->first) / coarse->first);
    out.note(std::get<0>(key) + " " + std::get<1>(key) + " p=" + std::to_string(std::get<2>(key)) +
             " rate " + fmt(rate) + " between n_el " + std::to_string(coarse->first) + " and " +
             std::to_string(fine->first));
  }
}

// ---------------------------------------------------------------------------

constexpr double kRodSlopeTol = 0.2;
constexpr double kDtRatioLo = 0.8;
constexpr double kDtRatioHi = 1.25;

Outcome rod_convergence()
{
  Outcome out;
  // full 100 000 steps per run
  const auto config = ExperimentConfig::defaults(Experiment::RodConvergence);
  const auto result = run_rod_convergence(config);
  out.require(result.failures.empty(), "all convergence cells completed");

  for (const auto& s : convergence_slopes(result.results))
  {
    if (s.stabilization == "fitted")
    {
      out.note("reference " + s.bc + " fitted p=" + std::to_string(s.p) + " slope " +
               fmt(s.slope));
      continue;
    }
    const std::string what = s.bc + " " + s.stabilization + " p=" + std::to_string(s.p) +
                             " slope " + fmt(s.slope) + " vs " + std::to_string(s.p + 1) +
                             " +- " + fmt(kRodSlopeTol);
    out.require(s.points == 4 && std::abs(s.slope - (s.p + 1)) <= kRodSlopeTol, what);
  }

  std::map<std::tuple<std::string, int, int>, double> fitted_dt;
  for (const auto& r : result.results)
    if (r.stabilization == "fitted")
      fitted_dt[{r.bc, r.p, r.n_el}] = r.dt_crit;
  double lo = 1e300, hi = 0.0;
  for (const auto& r : result.results)
  {
    if (r.stabilization == "fitted")
      continue;
    const auto it = fitted_dt.find({r.bc, r.p, r.n_el});
    if (it == fitted_dt.end())
      continue;
    const double q = r.dt_crit / it->second;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  out.require(lo >= kDtRatioLo && hi <= kDtRatioHi, "dt_crit(GEVS) / dt_crit(fitted) in [" +
                                                        fmt(lo) + ", " + fmt(hi) +
                                                        "], allowed [0.8, 1.25]");
  note_finest_rates(out, result.results);
  return out;
}

// ---------------------------------------------------------------------------

constexpr double kSweepDtSpread = 1.05;
constexpr double kSweepErrorGrowth = 2.0;
constexpr double kMonotoneBelow = 1e-4;

Outcome cut_sweep()
{
  Outcome out;
  auto config = ExperimentConfig::defaults(Experiment::RodCutSweep);
  // reduced steps for the error column; MS cells report dt_crit only
  config.fast = true;
  const auto result = run_rod_cutsweep(config);
  out.require(result.failures.empty(), "all sweep cells completed");

  // rows arrive ordered by decreasing chi within each (bc, variant, p)
  std::map<std::tuple<std::string, std::string, int>, std::vector<const ResultRow*>> groups;
  for (const auto& r : result.results)
    groups[{r.bc, r.stabilization, r.p}].push_back(&r);

  for (const auto& [key, rows] : groups)
  {
    const auto& [bc, stab, p] = key;
    const std::string tag = bc + " " + stab + " p=" + std::to_string(p);
    if (stab == "gevs-mass")
    {
      double lo = 1e300, hi = 0.0, worst = 0.0;
      const double e0 = rows.front()->l2_error;
      for (const auto* r : rows)
      {
        lo = std::min(lo, r->dt_crit);
        hi = std::max(hi, r->dt_crit);
        worst = std::max(worst, r->l2_error / e0);
      }
      out.require(rows.size() == 15, tag + " has 15 cut fractions");
      out.require(hi / lo <= kSweepDtSpread, tag + " dt_crit spread " + fmt(hi / lo) + " <= 1.05");
      out.require(worst <= kSweepErrorGrowth,
                  tag + " error growth " + fmt(worst) + " <= 2 x chi=1e-1 value");
    }
    else if (stab == "ms" && bc == "dirichlet")
    {
      std::string trace;
      bool monotone = true;
      const ResultRow* prev = nullptr;
      for (const auto* r : rows)
      {
        if (r->cut_fraction > kMonotoneBelow * (1 + 1e-9))
          continue;
        trace += (trace.empty() ? "" : " ") + fmt(r->dt_crit);
        if (prev && !(r->dt_crit < prev->dt_crit))
          monotone = false;
        prev = r;
      }
      out.require(monotone, tag + " dt_crit decreasing for chi <= 1e-4: " + trace);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

constexpr double kArcSlopeTol = 0.3;
constexpr double kArcNeumannRatio = 10.0;
constexpr double kArcDirichletRatio = 100.0;

Outcome arc_study()
{
  Outcome out;
  auto config = ExperimentConfig::defaults(Experiment::ArcConvergence);
  config.degrees = {1, 2, 3};
  config.n_el = {8, 16, 32};
  config.fast = true;
  const auto result = run_arc_convergence(config);
  out.require(result.failures.empty(), "all arc cells completed");

  for (const auto& s : convergence_slopes(result.results))
  {
    if (s.stabilization != "gevs-mass")
      continue;
    const std::string what = s.bc + " p=" + std::to_string(s.p) + " slope " + fmt(s.slope) +
                             " vs " + std::to_string(s.p + 1) + " +- " + fmt(kArcSlopeTol);
    out.require(s.points == 3 && std::abs(s.slope - (s.p + 1)) <= kArcSlopeTol, what);
  }

  std::map<std::tuple<std::string, std::string, int>, double> dt;
  for (const auto& r : result.results)
    if (r.n_el == 32)
      dt[{r.bc, r.stabilization, r.p}] = r.dt_crit;
  for (const char* bc : {"neumann", "dirichlet"})
    for (int p : config.degrees)
    {
      const double ratio = dt[{bc, "gevs-mass", p}] / dt[{bc, "ms", p}];
      const double need =
          std::string(bc) == "neumann" ? kArcNeumannRatio : kArcDirichletRatio;
      const std::string what = std::string(bc) + " p=" + std::to_string(p) +
                               " dt_crit(GEVS)/dt_crit(MS) " + fmt(ratio) + " >= " + fmt(need);
      out.require(ratio >= need, what);
    }
  note_finest_rates(out, result.results);
  return out;
}

// ---------------------------------------------------------------------------

constexpr double kMinOrder = 1.9;
constexpr double kEnergyDrift = 1e-3;
constexpr double kBlowUp = 1e6;

Outcome cdm_contract()
{
  Outcome out;

  // m = 2, k = 8: omega = 2, exact solution cos(2 t)
  GlobalSystem osc;
  osc.mass.diagonal = Vector::Constant(1, 2.0);
  osc.mass.correction.resize(1, 1);
  osc.stiffness.resize(1, 1);
  osc.stiffness.insert(0, 0) = 8.0;
  osc.force = Vector::Zero(1);
  osc.dofs.n_dof = 1;
  auto error = [&](std::int64_t steps) {
    const auto r = run(osc, Vector::Ones(1), Vector::Zero(1), 1.5 / steps, steps);
    return std::abs(r.final(0) - std::cos(3.0));
  };
  double worst_order = 1e300;
  double prev = error(100);
  for (std::int64_t s : {200, 400, 800, 1600})
  {
    const double e = error(s);
    worst_order = std::min(worst_order, std::log2(prev / e));
    prev = e;
  }
  out.require(worst_order >= kMinOrder,
              "oscillator observed order " + fmt(worst_order) + " >= 1.9");

  for (auto bc : {BoundaryCondition::Neumann, BoundaryCondition::Dirichlet})
  {
    RodDomain rod;
    rod.right_bc = bc;
    DiscretizationOptions opt;
    const auto prob = build_rod_problem(rod, opt);
    const double dtc = critical_dt(prob.system);
    const double t = rod_final_time(rod);
    const Vector psi0 = prob.interpolate(rod_initial);
    const Vector v0 = Vector::Zero(psi0.size());
    const double scale = psi0.cwiseAbs().maxCoeff();
    const std::string name = to_string(bc);

    RunOptions opts;
    opts.track_energy = true;
    opts.trace_interval = 1;
    const double dt_stable = 0.95 * dtc;
    const auto stable = run(prob.system, psi0, v0, dt_stable,
                            static_cast<std::int64_t>(std::ceil(t / dt_stable)), opts);
    const double peak =
        *std::max_element(stable.max_abs_trace.begin(), stable.max_abs_trace.end());
    out.require(!stable.aborted && peak <= 10 * scale, name + " rod stable at 0.95 dt_crit");
    out.require(stable.energy_drift <= kEnergyDrift,
                name + " energy drift " + fmt(stable.energy_drift) + " <= 1e-3");

    const double dt_unstable = 1.05 * dtc;
    const auto unstable = run(prob.system, psi0, v0, dt_unstable,
                              static_cast<std::int64_t>(std::ceil(t / dt_unstable)), opts);
    const double grown =
        unstable.max_abs_trace.empty()
            ? 0.0
            : *std::max_element(unstable.max_abs_trace.begin(), unstable.max_abs_trace.end());
    const bool diverged = unstable.aborted || grown > kBlowUp * scale;
    out.require(diverged, name + " rod divergent at 1.05 dt_crit (" +
                              (unstable.aborted
                                   ? "non-finite at step " + std::to_string(unstable.abort_step)
                                   : "growth " + fmt(grown / scale)) +
                              "), peak " + fmt(peak / scale) + " x initial at 0.95 dt_crit");
  }
  return out;
}

// ---------------------------------------------------------------------------

struct Criterion
{
  const char* name;
  double limit_seconds;
  std::function<Outcome()> body;
};

}  // namespace

int main()
{
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::vector<Criterion> criteria{
      {"deflation correctness", 5.0, deflation_property},
      {"quadrature and basis exactness", 1.0, quadrature_exactness},
      {"rod spectrum", 30.0, rod_spectrum},
      {"rod h-convergence", 15 * 60.0, rod_convergence},
      {"cut-fraction sweep", 2 * 60.0, cut_sweep},
      {"arc study", 30 * 60.0, arc_study},
      {"central difference contract", 60.0, cdm_contract},
  };

  int failed = 0;
  for (const auto& c : criteria)
  {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try
    {
      o = c.body();
    }
    catch (const std::exception& e)
    {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs <= c.limit_seconds,
              "runtime " + fmt(secs) + " s within " + fmt(c.limit_seconds) + " s");
    std::printf("%s %s (%.2f s, limit %.0f s)\n", o.pass ? "PASS" : "FAIL", c.name, secs,
                c.limit_seconds);
    for (const auto& n : o.notes)
      std::printf("    %s\n", n.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
