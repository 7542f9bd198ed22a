#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qdce/acceptance.hpp"
#include "qdce/dyson.hpp"
#include "qdce/errors.hpp"
#include "qdce/sweep.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

// Flags shared by the single-run subcommands. Unset flags keep the value from
// --config (a ModelParams JSON file) or the defaults.
struct RunFlags {
  std::string config;
  std::optional<double> omega_d, qubit_freq, g0, t_max, dt;
  std::optional<int> fock_cutoff;
  std::optional<std::string> variant;
  std::string out;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--config", f.config, "ModelParams JSON file");
  app->add_option("--omega-d", f.omega_d, "driving frequency");
  app->add_option("--qubit-freq", f.qubit_freq, "qubit frequency Omega");
  app->add_option("--g0", f.g0, "coupling amplitude");
  app->add_option("--t-max", f.t_max, "final time");
  app->add_option("--dt", f.dt, "integration step");
  app->add_option("--fock-cutoff", f.fock_cutoff, "largest photon number n_max");
  app->add_option("--variant", f.variant, "full, rwa or anti_rwa");
  app->add_option("--out", f.out, "output file (default stdout)");
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qdce::ConfigInvalid("cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw qdce::ConfigInvalid(path + ": " + e.what());
  }
}

qdce::ModelParams model_from(const RunFlags& f) {
  qdce::ModelParams p;
  if (!f.config.empty()) p = qdce::params_from_json(read_json(f.config));
  if (f.omega_d) p.omega_d = *f.omega_d;
  if (f.qubit_freq) p.Omega = *f.qubit_freq;
  if (f.g0) p.g0 = *f.g0;
  if (f.fock_cutoff) p.fock_cutoff = *f.fock_cutoff;
  if (f.variant) p.variant = qdce::parse_variant(*f.variant);
  p.validate();
  if (p.fock_cutoff < 1) throw qdce::ConfigInvalid("fock cutoff must be >= 1");
  return p;
}

qdce::TimeGrid grid_from(const RunFlags& f) {
  qdce::TimeGrid g;
  if (f.t_max) g.t_max = *f.t_max;
  if (f.dt) {
    // keep the snapshot spacing at 0.1 when it divides evenly
    g.dt = *f.dt;
    const double per = 0.1 / g.dt;
    g.sample_every = std::abs(per - std::round(per)) < 1e-9 && per >= 1.0 ? static_cast<int>(std::round(per)) : 1;
  }
  g.validate();
  return g;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    qdce::write_file_atomic(path, text);
  }
}

void warn(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

std::vector<qdce::NamedObservable> csv_observables(const qdce::HilbertSpace& space) {
  return {qdce::named_observable(space, "N"), qdce::named_observable(space, "Sz")};
}

int cmd_evolve(const RunFlags& f) {
  const qdce::ModelParams p = model_from(f);
  const qdce::TimeGrid g = grid_from(f);
  const qdce::HilbertSpace space(p.fock_cutoff);
  const auto states = qdce::evolve_schrodinger(p, space, qdce::StateVector::basis(space, {0, 0}), g);
  warn(states.warnings);
  std::ostringstream os;
  qdce::observables_series(states, csv_observables(space)).write_csv(os);
  emit(f.out, os.str());
  return 0;
}

int cmd_lindblad(const RunFlags& f, double gamma_a, double gamma_q) {
  const qdce::ModelParams p = model_from(f);
  const qdce::TimeGrid g = grid_from(f);
  const qdce::HilbertSpace space(p.fock_cutoff);
  const auto spec = qdce::LindbladSpec::cavity_and_qubit(gamma_a, gamma_q);
  spec.validate();
  const auto rho0 = qdce::DensityMatrix::pure(qdce::StateVector::basis(space, {0, 0}));
  const auto states = qdce::evolve_lindblad(p, space, rho0, spec, g);
  warn(states.warnings);
  std::ostringstream os;
  qdce::observables_series(states, csv_observables(space)).write_csv(os);
  emit(f.out, os.str());
  return 0;
}

int cmd_dyson(const RunFlags& f, int order) {
  const qdce::ModelParams p = model_from(f);
  const qdce::TimeGrid g = grid_from(f);
  const qdce::HilbertSpace space(p.fock_cutoff);
  const auto stack = qdce::dyson_corrections(p, space, qdce::StateVector::basis(space, {0, 0}), order, g);
  std::ostringstream os;
  qdce::write_secular_csv(os, qdce::secular_table(stack));
  emit(f.out, os.str());
  return 0;
}

int finish_sweep(qdce::SweepConfig c, const std::string& out, int threads) {
  if (!out.empty()) c.output = out;
  if (threads > 0) c.threads = threads;
  if (c.output.empty()) throw qdce::ConfigInvalid("sweep needs an output path (--out or \"output\")");
  const auto result = qdce::run_sweep(c);
  for (const auto& e : result.errors) std::cerr << "cell " << e.cell << " failed: " << e.message << '\n';
  return result.errors.empty() ? 0 : kExitFailure;
}

int cmd_validate(int criterion, const qdce::AcceptanceOptions& options) {
  bool ok = true;
  auto report = [&](const qdce::CriterionResult& r) {
    std::cout << qdce::format(r) << std::endl;
    ok = ok && r.passed;
  };
  if (criterion > 0) {
    report(qdce::run_criterion(criterion, options));
  } else {
    for (int id = 1; id <= qdce::kCriterionCount; ++id) report(qdce::run_criterion(id, options));
  }
  return ok ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qubit in a vibrating cavity: dynamical Casimir effect simulator"};
  app.set_version_flag("--version", QDCE_VERSION);
  app.require_subcommand(1);

  RunFlags evolve_flags, lindblad_flags, dyson_flags;
  auto* evolve = app.add_subcommand("evolve", "closed-system run, CSV t,N,Sz");
  add_run_flags(evolve, evolve_flags);

  double gamma_a = 0.025, gamma_q = 0.025;
  auto* lindblad = app.add_subcommand("lindblad", "damped run, CSV t,N,Sz");
  add_run_flags(lindblad, lindblad_flags);
  lindblad->add_option("--gamma-a", gamma_a, "cavity loss rate")->capture_default_str();
  lindblad->add_option("--gamma-q", gamma_q, "qubit relaxation rate")->capture_default_str();

  int order = 2;
  auto* dyson = app.add_subcommand("dyson", "Dyson corrections and secular report");
  add_run_flags(dyson, dyson_flags);
  dyson->add_option("--order", order, "highest order (1 to 3)")->capture_default_str();

  std::string sweep_config, sweep_out;
  int sweep_threads = 0;
  auto* sweep = app.add_subcommand("sweep", "parameter sweep from a JSON config");
  sweep->add_option("--config", sweep_config, "sweep config JSON")->required();
  sweep->add_option("--out", sweep_out, "output CSV (overrides the config)");
  sweep->add_option("--threads", sweep_threads, "worker threads (0: all cores)");

  std::string preset_name, preset_out;
  int preset_threads = 0, preset_steps = 0;
  auto* preset = app.add_subcommand("preset", "emit the data behind a figure");
  preset->add_option("name", preset_name, "fig2 fig3 fig4 figA1 figA2 figC1 figC2 figC3")->required();
  preset->add_option("--out", preset_out, "output CSV (default <name>.csv)");
  preset->add_option("--threads", preset_threads, "worker threads (0: all cores)");
  preset->add_option("--steps", preset_steps, "override the points per axis");

  int criterion = 0;
  qdce::AcceptanceOptions acceptance;
  auto* validate = app.add_subcommand("validate", "run the acceptance suite");
  validate->add_option("--criterion", criterion, "run one criterion (1 to 10)");
  validate->add_option("--threads", acceptance.threads, "worker threads for the sweep criterion");
  validate->add_option("--fig4-steps", acceptance.fig4_steps, "points per axis of the fig4 check")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*evolve) return cmd_evolve(evolve_flags);
    if (*lindblad) return cmd_lindblad(lindblad_flags, gamma_a, gamma_q);
    if (*dyson) return cmd_dyson(dyson_flags, order);
    if (*sweep) return finish_sweep(qdce::sweep_config_from_json(read_json(sweep_config)), sweep_out, sweep_threads);
    if (*preset) {
      qdce::SweepConfig c = qdce::preset(preset_name);
      if (preset_steps > 0) {
        for (auto& ax : c.axes) ax.steps = preset_steps;
        c.validate();
      }
      return finish_sweep(c, preset_out, preset_threads);
    }
    if (*validate) return cmd_validate(criterion, acceptance);
  } catch (const qdce::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const qdce::OrderOutOfRange& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const qdce::NonPositiveCutoff& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
