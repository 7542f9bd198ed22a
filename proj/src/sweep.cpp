#include "qdce/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "qdce/errors.hpp"

namespace qdce {

namespace {

const std::set<std::string> kAxisNames{"omega_d", "Omega", "g0"};

void apply_axis(ModelParams& p, const std::string& name, double value) {
  if (name == "omega_d") p.omega_d = value;
  else if (name == "Omega") p.Omega = value;
  else if (name == "g0") p.g0 = value;
  else throw ConfigInvalid("cannot sweep parameter '" + name + "'");
}

OperatorKind parse_operator_kind(const std::string& name) {
  for (OperatorKind k : {OperatorKind::a, OperatorKind::a_dag, OperatorKind::number,
                         OperatorKind::s_z, OperatorKind::sigma_x, OperatorKind::sigma_plus,
                         OperatorKind::sigma_minus, OperatorKind::identity,
                         OperatorKind::cutoff_projector}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigInvalid("unknown collapse operator '" + name + "'");
}

CollapseConvention parse_convention(const std::string& name) {
  if (name == "rate") return CollapseConvention::rate;
  if (name == "literal") return CollapseConvention::literal;
  throw ConfigInvalid("unknown collapse convention '" + name + "' (rate, literal)");
}

Reduction parse_reduction(const std::string& name) {
  if (name == "none") return Reduction::none;
  if (name == "max_over_time") return Reduction::max_over_time;
  throw ConfigInvalid("unknown reduction '" + name + "' (none, max_over_time)");
}

template <class T>
T get_field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalid(std::string("bad value for '") + key + "': " + e.what());
  }
}

void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const char* where) {
  if (!j.is_object()) throw ConfigInvalid(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw ConfigInvalid(std::string("unknown key '") + key + "' in " + where);
    }
  }
}

// Expectation values of every requested observable at each sample.
std::vector<std::vector<double>> simulate_cell(const SweepConfig& config, const ModelParams& p) {
  const HilbertSpace space(p.fock_cutoff);
  std::vector<NamedObservable> ops;
  for (const auto& name : config.observables) ops.push_back(named_observable(space, name));
  const StateVector ground = StateVector::basis(space, {0, 0});

  ObservableTable table;
  if (config.lindblad) {
    table = observables_series(
        evolve_lindblad(p, space, DensityMatrix::pure(ground), *config.lindblad, config.grid), ops);
  } else {
    table = observables_series(evolve_schrodinger(p, space, ground, config.grid), ops);
  }
  return std::move(table.columns);
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::vector<double> AxisSpec::values() const {
  std::vector<double> out(static_cast<std::size_t>(std::max(steps, 0)));
  for (int i = 0; i < steps; ++i) {
    out[i] = i == steps - 1 ? max : min + (max - min) * static_cast<double>(i) / (steps - 1);
  }
  return out;
}

std::string_view to_string(Reduction r) {
  return r == Reduction::none ? "none" : "max_over_time";
}

void SweepConfig::validate() const {
  if (axes.empty() || axes.size() > 2) throw ConfigInvalid("a sweep needs one or two axes");
  std::set<std::string> seen;
  for (const auto& ax : axes) {
    if (!kAxisNames.contains(ax.name)) {
      throw ConfigInvalid("cannot sweep parameter '" + ax.name + "' (omega_d, Omega, g0)");
    }
    if (!seen.insert(ax.name).second) throw ConfigInvalid("axis '" + ax.name + "' repeated");
    if (ax.steps < 2) throw ConfigInvalid("axis '" + ax.name + "' needs at least 2 steps");
    if (!std::isfinite(ax.min) || !std::isfinite(ax.max)) {
      throw ConfigInvalid("axis '" + ax.name + "' bounds must be finite");
    }
  }
  if (reduction == Reduction::none && axes.size() != 1) {
    throw ConfigInvalid("reduction 'none' is only available for one-axis sweeps");
  }
  if (observables.empty()) throw ConfigInvalid("no observables requested");
  const HilbertSpace probe(std::max(params.fock_cutoff, 1));
  for (const auto& name : observables) named_observable(probe, name);
  params.validate();
  grid.validate();
  if (lindblad) lindblad->validate();
  if (threads < 0) throw ConfigInvalid("threads must be >= 0");

  // Every grid point must be a valid model.
  for (const auto& ax : axes) {
    for (double v : {ax.min, ax.max}) {
      ModelParams p = params;
      apply_axis(p, ax.name, v);
      p.validate();
    }
  }
}

nlohmann::json to_json(const SweepConfig& config) {
  nlohmann::json j;
  j["axes"] = nlohmann::json::array();
  for (const auto& ax : config.axes) {
    j["axes"].push_back({{"name", ax.name}, {"min", ax.min}, {"max", ax.max}, {"steps", ax.steps}});
  }
  j["params"] = to_json(config.params);
  j["grid"] = {{"t_max", config.grid.t_max}, {"dt", config.grid.dt},
               {"sample_every", config.grid.sample_every}};
  j["observables"] = config.observables;
  j["reduction"] = std::string(to_string(config.reduction));
  if (config.lindblad) {
    nlohmann::json channels = nlohmann::json::array();
    for (const auto& ch : config.lindblad->channels) {
      channels.push_back({{"operator", std::string(to_string(ch.kind))}, {"gamma", ch.gamma}});
    }
    j["lindblad"] = {
        {"channels", channels},
        {"convention", config.lindblad->convention == CollapseConvention::rate ? "rate" : "literal"}};
  } else {
    j["lindblad"] = nullptr;
  }
  j["output"] = config.output;
  j["write_json"] = config.write_json;
  return j;
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  require_keys(j,
               {"axes", "params", "grid", "observables", "reduction", "lindblad", "output",
                "write_json", "threads"},
               "sweep config");
  SweepConfig c;
  if (!j.contains("axes") || !j["axes"].is_array()) throw ConfigInvalid("sweep config needs an 'axes' array");
  for (const auto& ax : j["axes"]) {
    require_keys(ax, {"name", "min", "max", "steps"}, "axis");
    if (!ax.contains("name")) throw ConfigInvalid("axis needs a name");
    c.axes.push_back({get_field<std::string>(ax, "name", ""), get_field<double>(ax, "min", 0.0),
                      get_field<double>(ax, "max", 1.0), get_field<int>(ax, "steps", 2)});
  }
  if (j.contains("params")) c.params = params_from_json(j["params"]);
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    require_keys(g, {"t_max", "dt", "sample_every"}, "grid");
    c.grid = TimeGrid{get_field<double>(g, "t_max", c.grid.t_max), get_field<double>(g, "dt", c.grid.dt),
                      get_field<int>(g, "sample_every", c.grid.sample_every)};
  }
  if (j.contains("observables")) {
    c.observables = get_field<std::vector<std::string>>(j, "observables", c.observables);
  }
  if (j.contains("reduction")) c.reduction = parse_reduction(get_field<std::string>(j, "reduction", ""));
  if (j.contains("lindblad") && !j["lindblad"].is_null()) {
    const auto& l = j["lindblad"];
    require_keys(l, {"channels", "gamma_a", "gamma_q", "convention"}, "lindblad");
    const auto convention = parse_convention(get_field<std::string>(l, "convention", "rate"));
    LindbladSpec spec;
    if (l.contains("channels")) {
      spec.convention = convention;
      for (const auto& ch : l["channels"]) {
        require_keys(ch, {"operator", "gamma"}, "collapse channel");
        spec.channels.push_back({get_field<double>(ch, "gamma", 0.0),
                                 parse_operator_kind(get_field<std::string>(ch, "operator", ""))});
      }
    } else {
      spec = LindbladSpec::cavity_and_qubit(get_field<double>(l, "gamma_a", 0.0),
                                            get_field<double>(l, "gamma_q", 0.0), convention);
    }
    c.lindblad = spec;
  }
  c.output = get_field<std::string>(j, "output", "");
  c.write_json = get_field<bool>(j, "write_json", false);
  c.threads = get_field<int>(j, "threads", 0);
  c.validate();
  return c;
}

std::size_t SweepResult::cell_count() const {
  std::size_t n = 1;
  for (const auto& v : axis_values) n *= v.size();
  return n;
}

double max_over_time(std::span<const double> values) {
  if (values.empty()) throw EmptySeries("max_over_time of an empty series");
  return *std::max_element(values.begin(), values.end());
}

double max_over_time(const RealSeries& series) { return max_over_time(std::span<const double>(series.samples)); }

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();

  SweepResult result;
  result.config = config;
  for (const auto& ax : config.axes) result.axis_values.push_back(ax.values());

  const std::size_t n_obs = config.observables.size();
  const std::size_t n_cells = result.cell_count();
  const std::size_t n_samples = static_cast<std::size_t>(config.grid.sample_count());
  for (int k = 0; k < config.grid.sample_count(); ++k) result.times.push_back(config.grid.sample_time(k));

  if (config.reduction == Reduction::max_over_time) {
    result.rows = result.axis_values[0].size();
    result.cols = config.axes.size() == 2 ? result.axis_values[1].size() : 1;
  } else {
    result.rows = n_samples;
    result.cols = result.axis_values[0].size();
  }
  result.data.assign(n_obs, std::vector<double>(result.rows * result.cols,
                                                std::numeric_limits<double>::quiet_NaN()));
  std::vector<std::string> cell_errors(n_cells);

  auto compute = [&](std::size_t cell) {
    ModelParams p = config.params;
    const std::size_t i = config.axes.size() == 2 ? cell / result.axis_values[1].size() : cell;
    apply_axis(p, config.axes[0].name, result.axis_values[0][i]);
    if (config.axes.size() == 2) {
      apply_axis(p, config.axes[1].name, result.axis_values[1][cell % result.axis_values[1].size()]);
    }
    try {
      const auto columns = simulate_cell(config, p);
      for (std::size_t o = 0; o < n_obs; ++o) {
        if (config.reduction == Reduction::max_over_time) {
          result.data[o][cell] = max_over_time(std::span<const double>(columns[o]));
        } else {
          for (std::size_t k = 0; k < n_samples; ++k) result.data[o][k * result.cols + cell] = columns[o][k];
        }
      }
    } catch (const std::exception& e) {
      cell_errors[cell] = e.what();
      // Partially written cells are reset so a failed cell is NaN throughout.
      for (std::size_t o = 0; o < n_obs; ++o) {
        if (config.reduction == Reduction::max_over_time) {
          result.data[o][cell] = std::numeric_limits<double>::quiet_NaN();
        } else {
          for (std::size_t k = 0; k < n_samples; ++k) {
            result.data[o][k * result.cols + cell] = std::numeric_limits<double>::quiet_NaN();
          }
        }
      }
    }
  };

  std::size_t workers = config.threads > 0 ? static_cast<std::size_t>(config.threads)
                                           : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n_cells);
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t cell = next.fetch_add(1); cell < n_cells; cell = next.fetch_add(1)) compute(cell);
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(drain);
    drain();
  }

  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    if (!cell_errors[cell].empty()) result.errors.push_back({cell, cell_errors[cell]});
  }

  result.provenance = {
      {"tool", "qdce"},
      {"version", QDCE_VERSION},
      {"dt", config.grid.dt},
      {"config", to_json(config)},
  };

  if (!config.output.empty()) write_sweep_outputs(result, config.output);
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result, std::size_t observable) {
  const SweepConfig& c = result.config;
  const std::string& obs = c.observables.at(observable);
  const bool time_rows = c.reduction == Reduction::none;
  const std::string row_name = time_rows ? "t" : c.axes[0].name;
  const std::string col_name = time_rows ? c.axes[0].name : (c.axes.size() == 2 ? c.axes[1].name : "");

  out << "# qdce sweep\n";
  out << "# version: " << result.provenance.value("version", "") << '\n';
  out << "# observable: " << obs << '\n';
  out << "# reduction: " << to_string(c.reduction) << '\n';
  out << "# rows: " << row_name << '\n';
  out << "# columns: " << (col_name.empty() ? obs : col_name) << '\n';
  out << "# dt: " << format_double(c.grid.dt) << '\n';
  out << "# failed_cells: " << result.errors.size() << '\n';
  out << "# config: " << to_json(c).dump() << '\n';

  const std::vector<double>& row_values = time_rows ? result.times : result.axis_values[0];
  out << std::setprecision(17);
  if (col_name.empty()) {
    out << row_name << ',' << obs << '\n';
  } else {
    out << row_name << '\\' << col_name;
    const std::vector<double>& col_values = time_rows ? result.axis_values[0] : result.axis_values[1];
    for (double v : col_values) out << ',' << v;
    out << '\n';
  }
  for (std::size_t r = 0; r < result.rows; ++r) {
    out << row_values[r];
    for (std::size_t col = 0; col < result.cols; ++col) out << ',' << result.at(observable, r, col);
    out << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigInvalid("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::filesystem::path> write_sweep_outputs(const SweepResult& result,
                                                       const std::filesystem::path& path) {
  std::vector<std::filesystem::path> written;
  const auto& obs = result.config.observables;
  for (std::size_t o = 0; o < obs.size(); ++o) {
    std::filesystem::path target = path;
    if (obs.size() > 1) {
      target = path.parent_path() / (path.stem().string() + "_" + obs[o] + path.extension().string());
    }
    std::ostringstream os;
    write_sweep_csv(os, result, o);
    write_file_atomic(target, os.str());
    written.push_back(target);
  }

  if (result.config.write_json) {
    nlohmann::json j;
    j["provenance"] = result.provenance;
    j["axes"] = nlohmann::json::array();
    for (std::size_t a = 0; a < result.axis_values.size(); ++a) {
      j["axes"].push_back({{"name", result.config.axes[a].name}, {"values", result.axis_values[a]}});
    }
    j["rows"] = result.rows;
    j["cols"] = result.cols;
    if (result.config.reduction == Reduction::none) j["times"] = result.times;
    j["data"] = nlohmann::json::object();
    for (std::size_t o = 0; o < obs.size(); ++o) {
      // NaN is not representable in JSON; failed cells become null.
      nlohmann::json cells = nlohmann::json::array();
      for (double v : result.data[o]) cells.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json());
      j["data"][obs[o]] = std::move(cells);
    }
    std::filesystem::path target = path;
    target.replace_extension(".json");
    write_file_atomic(target, j.dump(1));
    written.push_back(target);
  }

  std::filesystem::path log = path;
  log += ".errors.log";
  if (!result.errors.empty()) {
    std::ostringstream os;
    for (const auto& e : result.errors) os << "cell " << e.cell << ": " << e.message << '\n';
    write_file_atomic(log, os.str());
    written.push_back(log);
  } else if (std::filesystem::exists(log)) {
    std::filesystem::remove(log);
  }
  return written;
}

std::vector<std::string> preset_names() {
  return {"fig2", "fig3", "fig4", "figA1", "figA2", "figC1", "figC2", "figC3"};
}

SweepConfig preset(std::string_view name) {
  SweepConfig c;
  c.params = ModelParams{};
  c.params.Omega = 1.0;
  c.params.g0 = 0.1;
  c.grid = TimeGrid{200.0, 1e-3, 100};

  // [0, 3] in 121 points puts omega_d = 1 and 2 on the grid; [0.2, 3] in
  // 141 points does the same for omega_d = 1 and omega_d = 1 + Omega.
  const AxisSpec time_axis{"omega_d", 0.0, 3.0, 121};
  const AxisSpec omega_rows{"Omega", 0.2, 3.0, 141};
  const AxisSpec drive_cols{"omega_d", 0.2, 3.0, 141};

  auto time_map = [&](const char* obs) {
    c.axes = {time_axis};
    c.reduction = Reduction::none;
    c.observables = {obs};
  };
  auto param_map = [&](const char* obs) {
    c.axes = {omega_rows, drive_cols};
    c.reduction = Reduction::max_over_time;
    c.observables = {obs};
  };
  auto dissipative = [&](const char* obs) {
    time_map(obs);
    c.params.g0 = 0.025;
    c.lindblad = LindbladSpec::cavity_and_qubit(0.025, 0.025);
  };

  if (name == "fig2") time_map("N");
  else if (name == "fig3") time_map("Sz");
  else if (name == "figA1") time_map("cutoff");
  else if (name == "fig4") param_map("N");
  else if (name == "figA2") param_map("cutoff");
  else if (name == "figC1") dissipative("N");
  else if (name == "figC2") dissipative("Sz");
  else if (name == "figC3") dissipative("cutoff");
  else throw ConfigInvalid("unknown preset '" + std::string(name) + "'");

  c.output = std::string(name) + ".csv";
  c.validate();
  return c;
}

}  // namespace qdce
