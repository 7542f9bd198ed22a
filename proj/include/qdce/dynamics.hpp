#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qdce/model.hpp"
#include "qdce/qspace.hpp"

namespace qdce {

// Fixed-step integration grid. Snapshots are taken every `sample_every`
// steps, so sample k sits at t = k * sample_every * dt.
struct TimeGrid {
  double t_max = 200.0;
  double dt = 1e-3;
  int sample_every = 100;

  // Throws ConfigInvalid unless dt > 0, t_max >= dt and sample_every >= 1.
  void validate() const;

  // floor(t_max / (dt * sample_every)) + 1
  int sample_count() const;
  long long step_count() const { return static_cast<long long>(sample_count() - 1) * sample_every; }
  double sample_time(int k) const { return static_cast<double>(k) * sample_every * dt; }
  // Index of the sample closest to t.
  int nearest_sample(double t) const;

  // Same sample times with half the step.
  TimeGrid halved() const { return TimeGrid{t_max, dt / 2.0, sample_every * 2}; }
};

template <class Sample>
struct TimeSeries {
  std::vector<double> times;
  std::vector<Sample> samples;
  std::vector<std::string> warnings;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

using StateSeries = TimeSeries<StateVector>;
using DensitySeries = TimeSeries<DensityMatrix>;
using RealSeries = TimeSeries<double>;

struct NamedObservable {
  std::string name;
  Operator op;
};

// N, Sz and the cutoff projector, named "N", "Sz", "cutoff".
std::vector<NamedObservable> standard_observables(const HilbertSpace& space);
// Throws ConfigInvalid for names other than N, Sz, cutoff.
NamedObservable named_observable(const HilbertSpace& space, const std::string& name);

// Real observables sampled on a time grid, one column per observable.
struct ObservableTable {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const;

  // Header `t,<name>,...`; 17 significant digits.
  void write_csv(std::ostream& out) const;
};

enum class CollapseConvention {
  rate,     // C = sqrt(gamma) O, gamma a decay rate
  literal,  // C = gamma O
};

struct CollapseChannel {
  double gamma = 0.0;
  OperatorKind kind = OperatorKind::a;
};

struct LindbladSpec {
  std::vector<CollapseChannel> channels;
  CollapseConvention convention = CollapseConvention::rate;

  // Cavity loss through a and qubit relaxation through sigma-.
  static LindbladSpec cavity_and_qubit(double gamma_a, double gamma_q,
                                       CollapseConvention convention = CollapseConvention::rate);

  void validate() const;  // gamma >= 0, finite
  std::vector<Operator> collapse_operators(const HilbertSpace& space) const;
};

struct EvolveOptions {
  double norm_tolerance = 1e-8;
  double truncation_threshold = 1e-3;
};

struct LindbladOptions {
  double trace_tolerance = 1e-6;
  double positivity_floor = -1e-6;
  double truncation_threshold = 1e-3;
  // Eigenvalue checks at every snapshot; sweeps can switch this off.
  bool check_positivity = true;
};

// Integrates i dpsi/dt = (H0 + g(t) V) psi with classical RK4, where V is the
// coupling operator of params.variant and g(t) = g0 cos(omega_d t).
// Throws InvalidState if psi0 is not normalized and NormDriftExceeded if the
// norm drifts beyond options.norm_tolerance. A truncation warning is
// attached when the cutoff population exceeds options.truncation_threshold.
StateSeries evolve_schrodinger(const ModelParams& params, const HilbertSpace& space,
                               const StateVector& psi0, const TimeGrid& grid,
                               const EvolveOptions& options = {});

// drho/dt = -i[H(t), rho] + sum_k (C_k rho C_k^dag - 1/2 {C_k^dag C_k, rho}), RK4.
// Throws TraceDriftExceeded or PositivityViolation at the first offending snapshot.
DensitySeries evolve_lindblad(const ModelParams& params, const HilbertSpace& space,
                              const DensityMatrix& rho0, const LindbladSpec& lspec,
                              const TimeGrid& grid, const LindbladOptions& options = {});

ObservableTable observables_series(const StateSeries& states,
                                   const std::vector<NamedObservable>& ops);
ObservableTable observables_series(const DensitySeries& states,
                                   const std::vector<NamedObservable>& ops);

struct TruncationReport {
  double max_cutoff_population = 0.0;
  std::optional<double> first_violation_time;
};

// Population of I2 (x) |n_max><n_max| over the series. threshold in (0, 1).
TruncationReport validate_truncation(const StateSeries& states, const HilbertSpace& space,
                                     double threshold = 1e-3);
TruncationReport validate_truncation(const DensitySeries& states, const HilbertSpace& space,
                                     double threshold = 1e-3);

}  // namespace qdce
