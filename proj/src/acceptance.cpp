#include "qdce/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "qdce/dyson.hpp"
#include "qdce/errors.hpp"
#include "qdce/sweep.hpp"

namespace qdce {

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

ModelParams resonant(double g0, double omega_d = 1.0) {
  ModelParams p;
  p.omega = 1.0;
  p.Omega = 1.0;
  p.omega_d = omega_d;
  p.g0 = g0;
  return p;
}

StateSeries run(const ModelParams& p, const TimeGrid& grid, const EvolveOptions& options = {}) {
  const HilbertSpace space(p.fock_cutoff);
  return evolve_schrodinger(p, space, StateVector::basis(space, {0, 0}), grid, options);
}

ObservableTable table(const StateSeries& s) {
  return observables_series(s, standard_observables(s.samples.front().space()));
}

// Real least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

const TimeGrid kShortGrid{10.0, 1e-3, 10};

Outcome second_order_amplitude() {
  const double g0 = 0.02;
  const StateSeries s = run(resonant(g0), kShortGrid);
  std::vector<double> ts, amps;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.times[k] >= 5.0 - 1e-9) {
      ts.push_back(s.times[k]);
      amps.push_back(std::abs(s.samples[k].amplitude({0, 2})));
    }
  }
  const double slope = ls_slope(ts, amps);
  const double expected = std::sqrt(2.0) * g0 * g0 / 4.0;
  const double err = std::abs(slope - expected) / expected;
  return {err <= 0.05, "slope " + fmt(slope) + " vs " + fmt(expected) + ", relative error " + fmt(err, 3) +
                           " (limit 0.05)"};
}

Outcome photon_number_consequence() {
  const double g0 = 0.02;
  const StateSeries s = run(resonant(g0), kShortGrid);
  const ObservableTable obs = table(s);
  const auto& n = obs.column("N");
  double worst = 0.0, worst_t = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double t = s.times[k];
    if (t < 5.0 - 1e-9) continue;
    const double expected = std::pow(g0, 4) * t * t / 4.0;
    const double err = std::abs(n[k] - expected) / expected;
    if (err > worst) {
      worst = err;
      worst_t = t;
    }
  }
  const std::size_t k5 = static_cast<std::size_t>(kShortGrid.nearest_sample(5.0));
  return {worst <= 0.10, "max relative error " + fmt(worst, 3) + " at t=" + fmt(worst_t) + " (limit 0.1); N(5)=" +
                             fmt(n[k5]) + " vs " + fmt(std::pow(g0, 4) * 25.0 / 4.0)};
}

Outcome dce_phenomenology() {
  const TimeGrid grid{};
  const ObservableTable obs = table(run(resonant(0.1), grid));
  const auto& n = obs.column("N");
  const auto& sz = obs.column("Sz");
  std::vector<double> picks;
  for (double t : {50.0, 100.0, 150.0, 200.0}) picks.push_back(n[grid.nearest_sample(t)]);
  bool increasing = true;
  for (std::size_t i = 1; i < picks.size(); ++i) increasing = increasing && picks[i] > picks[i - 1];
  double sz_dev = 0.0;
  for (double v : sz) sz_dev = std::max(sz_dev, std::abs(v + 0.5));
  return {increasing && sz_dev < 0.1, "N at t=50,100,150,200: " + fmt(picks[0]) + ", " + fmt(picks[1]) + ", " +
                                          fmt(picks[2]) + ", " + fmt(picks[3]) + "; max|Sz+1/2| " + fmt(sz_dev)};
}

Outcome unruh_phenomenology() {
  const ObservableTable obs = table(run(resonant(0.1, 2.0), TimeGrid{}));
  const auto& n = obs.column("N");
  const auto& sz = obs.column("Sz");
  const double n_max = *std::max_element(n.begin(), n.end());
  double lock = 0.0;
  for (std::size_t k = 0; k < n.size(); ++k) lock = std::max(lock, std::abs(n[k] - (sz[k] + 0.5)));
  return {n_max >= 0.8 && n_max <= 1.05 && lock < 0.15,
          "max N " + fmt(n_max) + " (want [0.8, 1.05]); max|N-(Sz+1/2)| " + fmt(lock) + " (limit 0.15)"};
}

Outcome fig4_structure(const AcceptanceOptions& options) {
  SweepConfig c = preset("fig4");
  for (auto& ax : c.axes) ax.steps = options.fig4_steps;
  c.output.clear();
  c.threads = options.threads;
  const SweepResult r = run_sweep(c);
  if (!r.errors.empty()) return {false, std::to_string(r.errors.size()) + " failed cells"};

  const auto& omegas = r.axis_values[0];
  const auto& drives = r.axis_values[1];
  const double step = c.axes[1].step();
  const double tol = step * (1.0 + 1e-9);
  auto nearest = [&](double x) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < drives.size(); ++j) {
      if (std::abs(drives[j] - x) < std::abs(drives[best] - x)) best = j;
    }
    return best;
  };

  std::vector<std::string> argmax_misses;
  int ridge_rows = 0, ridge_hits = 0;
  for (std::size_t i = 0; i < r.rows; ++i) {
    std::size_t arg = 0;
    for (std::size_t j = 1; j < r.cols; ++j) {
      if (r.at(0, i, j) > r.at(0, i, arg)) arg = j;
    }
    if (std::abs(drives[arg] - c.params.omega) > tol) {
      argmax_misses.push_back("Omega=" + fmt(omegas[i], 3) + "->" + fmt(drives[arg], 3));
    }
    const double line = c.params.omega + omegas[i];
    if (line > drives.back() + tol) continue;
    ++ridge_rows;
    for (std::size_t j = 0; j < r.cols; ++j) {
      if (std::abs(drives[j] - line) > tol) continue;
      const double v = r.at(0, i, j);
      const bool left = j == 0 || v >= r.at(0, i, j - 1);
      const bool right = j + 1 == r.cols || v >= r.at(0, i, j + 1);
      if (left && right) {
        ++ridge_hits;
        break;
      }
    }
  }

  const std::size_t col = nearest(c.params.omega);
  std::vector<std::string> rises;
  double prev = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < r.rows; ++i) {
    if (omegas[i] < c.params.omega - 1e-9) continue;
    const double v = r.at(0, i, col);
    if (!first && v > prev) rises.push_back("Omega=" + fmt(omegas[i], 3));
    prev = v;
    first = false;
  }

  std::ostringstream detail;
  detail << r.rows << "x" << r.cols << " grid; argmax off omega_d=omega in " << argmax_misses.size() << "/"
         << r.rows << " rows";
  if (!argmax_misses.empty()) {
    detail << " (e.g.";
    for (std::size_t k = 0; k < std::min<std::size_t>(argmax_misses.size(), 3); ++k) {
      detail << ' ' << argmax_misses[k];
    }
    detail << ')';
  }
  detail << "; ridge at omega+Omega in " << ridge_hits << "/" << ridge_rows << " rows";
  detail << "; column omega_d=omega rises at " << rises.size() << " Omega values";
  if (!rises.empty()) detail << " (first " << rises.front() << ")";
  return {argmax_misses.empty() && ridge_hits == ridge_rows && rises.empty(), detail.str()};
}

Outcome dyson_equivalence() {
  const ModelParams base = resonant(0.02);
  const HilbertSpace space(base.fock_cutoff);
  const StateVector psi0 = StateVector::basis(space, {0, 0});
  const DysonStack stack = dyson_corrections(base, space, psi0, 3, kShortGrid);
  std::vector<double> lg, lr;
  std::ostringstream residuals;
  for (double g0 : {0.02, 0.04, 0.08}) {
    const ModelParams p = resonant(g0);
    const RealSeries res = reconstruct_and_compare(stack, g0, evolve_schrodinger(p, space, psi0, kShortGrid));
    const double worst = max_over_time(res);
    lg.push_back(std::log(g0));
    lr.push_back(std::log(worst));
    residuals << (residuals.tellp() > 0 ? ", " : "") << fmt(worst, 3);
  }
  const double exponent = ls_slope(lg, lr);
  return {std::abs(exponent - 4.0) <= 0.3,
          "residuals " + residuals.str() + "; exponent " + fmt(exponent) + " (want 4.0 +/- 0.3)"};
}

Outcome secular_classification() {
  const ModelParams p = resonant(0.1);
  const HilbertSpace space(p.fock_cutoff);
  const TimeGrid grid{};
  const DysonStack stack = dyson_corrections(p, space, StateVector::basis(space, {0, 0}), 3, grid);
  const auto reports = secular_table(stack);

  std::set<std::string> secular_low;
  std::vector<std::string> problems;
  for (const auto& r : reports) {
    const bool secular = r.classification == SecularClass::secular;
    if (r.order <= 2 && secular) secular_low.insert(to_string(r.label));
    if (secular && r.order == 1) problems.push_back("order 1 " + to_string(r.label));
    if (secular && r.label.qubit == 1) problems.push_back("order " + std::to_string(r.order) + " " + to_string(r.label));
  }
  const std::set<std::string> expected{to_string(BasisLabel{0, 0}), to_string(BasisLabel{0, 2})};

  const auto rows = detuning_scan(p, {-0.5, 0.0, 0.5}, 2, grid);
  bool scan_ok = true;
  std::ostringstream scan;
  for (const auto& row : rows) {
    scan_ok = scan_ok && row.classification == SecularClass::secular;
    scan << (scan.tellp() > 0 ? ", " : "") << "delta=" << fmt(row.delta, 2) << ' ' << to_string(row.classification)
         << " |b|=" << fmt(row.slope_abs);
  }

  std::ostringstream detail;
  detail << "secular up to order 2: {";
  bool comma = false;
  for (const auto& s : secular_low) {
    detail << (comma ? ", " : "") << s;
    comma = true;
  }
  detail << "}; unexpected secular: " << problems.size() << "; scan " << scan.str();
  return {secular_low == expected && problems.empty() && scan_ok, detail.str()};
}

Outcome truncation_validation() {
  const TimeGrid grid{};
  std::ostringstream detail;
  bool ok = true;
  for (double wd : {0.0, 2.0}) {
    const ModelParams p = resonant(0.1, wd);
    const HilbertSpace space(p.fock_cutoff);
    const TruncationReport rep = validate_truncation(run(p, grid), space, 1e-3);
    ok = ok && !rep.first_violation_time;
    detail << "omega_d=" << wd << " max cutoff " << fmt(rep.max_cutoff_population, 3) << "; ";
  }

  ModelParams p7 = resonant(0.1);
  ModelParams p14 = p7;
  p14.fock_cutoff = 14;
  const StateSeries s7 = run(p7, grid);
  const TruncationReport rep = validate_truncation(s7, HilbertSpace(7), 1e-3);
  const double t_end = rep.first_violation_time.value_or(grid.t_max);
  const auto n7 = table(s7).column("N");
  const auto n14 = table(run(p14, grid)).column("N");
  double worst = 0.0;
  for (std::size_t k = 0; k < n7.size() && s7.times[k] <= t_end + 1e-9; ++k) {
    const double err = std::abs(n7[k] - n14[k]);
    if (err > 0.01 * std::abs(n14[k]) + 1e-15) ok = false;
    if (n14[k] > 0.0) worst = std::max(worst, err / n14[k]);
  }
  detail << "DCE n7 vs n14 up to t=" << fmt(t_end) << ": max relative difference " << fmt(worst, 3)
         << " (limit 0.01)";
  return {ok, detail.str()};
}

Outcome numerical_hygiene() {
  const TimeGrid grid{};
  const ModelParams p = resonant(0.1);
  const StateSeries s = run(p, grid, EvolveOptions{1.0, 1e-3});
  double drift = 0.0;
  for (const auto& psi : s.samples) drift = std::max(drift, std::abs(psi.norm() - 1.0));

  const ModelParams pl = resonant(0.025);
  const HilbertSpace space(pl.fock_cutoff);
  LindbladOptions lopt;
  lopt.trace_tolerance = 1.0;
  lopt.positivity_floor = -1.0;
  const DensitySeries rho = evolve_lindblad(pl, space, DensityMatrix::pure(StateVector::basis(space, {0, 0})),
                                            LindbladSpec::cavity_and_qubit(0.025, 0.025), grid, lopt);
  double trace = 0.0, min_eig = 1.0;
  for (const auto& r : rho.samples) {
    const auto d = r.diagnostics();
    trace = std::max(trace, d.trace_error);
    min_eig = std::min(min_eig, d.min_eigenvalue);
  }

  const double n_full = table(s).column("N").back();
  const double n_half = table(run(p, grid.halved())).column("N").back();
  const double halving = std::abs(n_full - n_half);

  const bool ok = drift < 1e-8 && trace < 1e-6 && min_eig > -1e-6 && halving < 1e-6;
  return {ok, "norm drift " + fmt(drift, 3) + "; trace drift " + fmt(trace, 3) + "; min eigenvalue " +
                  fmt(min_eig, 3) + "; step-halving dN(t_max) " + fmt(halving, 3)};
}

Outcome lindblad_visibility() {
  const TimeGrid grid{};
  const ModelParams p = resonant(0.025);
  const HilbertSpace space(p.fock_cutoff);
  const DensityMatrix rho0 = DensityMatrix::pure(StateVector::basis(space, {0, 0}));
  const auto ops = standard_observables(space);
  auto photons = [&](double gamma) {
    return observables_series(
               evolve_lindblad(p, space, rho0, LindbladSpec::cavity_and_qubit(gamma, gamma), grid), ops)
        .column("N");
  };
  const auto n1 = photons(0.025);
  const auto n2 = photons(0.05);
  const double peak = *std::max_element(n1.begin(), n1.end());
  bool ordered = true;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n1.size(); ++k) {
    if (grid.sample_time(static_cast<int>(k)) < 100.0 - 1e-9) continue;
    ordered = ordered && n1[k] > n2[k];
    min_gap = std::min(min_gap, n1[k] - n2[k]);
  }
  return {peak > 0.05 && ordered, "max N " + fmt(peak) + " (want > 0.05); min N_gamma - N_2gamma on [100,200] " +
                                      fmt(min_gap, 3) + (ordered ? " (ordered)" : " (not ordered)")};
}

const char* criterion_name(int id) {
  static const char* names[] = {"second-order amplitude",  "photon number consequence",
                                "dce phenomenology",       "unruh phenomenology",
                                "fig4 resonance structure", "dyson oracle equivalence",
                                "secular classification",  "truncation validation",
                                "numerical hygiene",       "lindblad dce visibility"};
  return names[id - 1];
}

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
  if (id < 1 || id > kCriterionCount) {
    throw ConfigInvalid("criterion must be in [1, " + std::to_string(kCriterionCount) + "]");
  }
  CriterionResult result;
  result.id = id;
  result.name = criterion_name(id);
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    switch (id) {
      case 1: o = second_order_amplitude(); break;
      case 2: o = photon_number_consequence(); break;
      case 3: o = dce_phenomenology(); break;
      case 4: o = unruh_phenomenology(); break;
      case 5: o = fig4_structure(options); break;
      case 6: o = dyson_equivalence(); break;
      case 7: o = secular_classification(); break;
      case 8: o = truncation_validation(); break;
      case 9: o = numerical_hygiene(); break;
      case 10: o = lindblad_visibility(); break;
    }
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  result.passed = o.passed;
  result.detail = o.detail;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, options));
  return out;
}

std::string format(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "[PASS] " : "[FAIL] ") << 'C' << r.id << ' ' << r.name << ": " << r.detail << " ["
     << std::fixed << std::setprecision(1) << r.seconds << " s]";
  return os.str();
}

}  // namespace qdce
