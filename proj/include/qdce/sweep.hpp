#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qdce/dynamics.hpp"

namespace qdce {

// One swept parameter: `steps` evenly spaced values from min to max inclusive.
// name is one of omega_d, Omega, g0.
struct AxisSpec {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  int steps = 2;

  std::vector<double> values() const;
  double step() const { return (max - min) / (steps - 1); }
};

enum class Reduction { none, max_over_time };

std::string_view to_string(Reduction r);

struct SweepConfig {
  std::vector<AxisSpec> axes;
  ModelParams params;
  TimeGrid grid;
  std::vector<std::string> observables{"N"};
  Reduction reduction = Reduction::max_over_time;
  std::optional<LindbladSpec> lindblad;
  std::string output;        // empty: keep results in memory only
  bool write_json = false;   // also write <stem>.json
  int threads = 0;           // 0: one per hardware thread

  // Throws ConfigInvalid: 1 or 2 distinct axes from {omega_d, Omega, g0},
  // steps >= 2, reduction none only with a single axis, known observables.
  void validate() const;
};

nlohmann::json to_json(const SweepConfig& config);
// Throws ConfigInvalid on schema violations.
SweepConfig sweep_config_from_json(const nlohmann::json& j);

struct CellError {
  std::size_t cell = 0;
  std::string message;
};

// Matrices are row-major, one per observable.
//   max_over_time: rows = axes[0] values, cols = axes[1] values (or 1 column)
//   none:          rows = sample times,   cols = axes[0] values
struct SweepResult {
  SweepConfig config;
  std::vector<std::vector<double>> axis_values;
  std::vector<double> times;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<double>> data;
  std::vector<CellError> errors;
  nlohmann::json provenance;

  double at(std::size_t observable, std::size_t row, std::size_t col) const {
    return data[observable][row * cols + col];
  }
  std::size_t cell_count() const;
};

// One evolution per grid cell, spread over worker threads. Results do not
// depend on the number of workers. A failing cell is stored as NaN and
// recorded in `errors`; the rest of the sweep continues. When
// config.output is set the CSV files (and optional JSON) are written.
SweepResult run_sweep(const SweepConfig& config);

// Throws EmptySeries on an empty series.
double max_over_time(std::span<const double> values);
double max_over_time(const RealSeries& series);

// Matrix CSV for one observable, preceded by a `#` provenance block.
void write_sweep_csv(std::ostream& out, const SweepResult& result, std::size_t observable);

// Writes every output file atomically (temp file + rename) and returns the
// paths. One CSV per observable: `path` itself for a single observable,
// `<stem>_<obs><ext>` otherwise. Failed cells go to `<path>.errors.log`.
std::vector<std::filesystem::path> write_sweep_outputs(const SweepResult& result,
                                                       const std::filesystem::path& path);

// Write `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// fig2, fig3, fig4, figA1, figA2, figC1, figC2, figC3
std::vector<std::string> preset_names();
SweepConfig preset(std::string_view name);  // throws ConfigInvalid

}  // namespace qdce
