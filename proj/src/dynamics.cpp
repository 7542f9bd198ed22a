#include "qdce/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "qdce/errors.hpp"
#include "sparse_apply.hpp"

namespace qdce {

namespace {

using detail::EntryList;
using detail::Rk4;

constexpr Complex kMinusI{0.0, -1.0};

void require_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* what) {
  if (!(a == b)) {
    throw DimensionMismatch(std::string(what) + ": spaces with cutoffs " +
                            std::to_string(a.fock_cutoff()) + " and " +
                            std::to_string(b.fock_cutoff()));
  }
}

std::string truncation_warning(double population, double t) {
  std::ostringstream os;
  os << "cutoff population " << population << " exceeds threshold at t = " << t;
  return os.str();
}

// psi' = -i (H0 + g(t) V) psi with H0 diagonal.
class SchrodingerRhs {
 public:
  SchrodingerRhs(const ModelParams& params, const HilbertSpace& space)
      : params_(params),
        energies_(free_hamiltonian(params, space).matrix().diagonal()),
        coupling_(EntryList::from(coupling_operator(space, params.variant).matrix())) {}

  void operator()(double t, const CVector& psi, CVector& out) {
    const double g = coupling(params_, t);
    out = kMinusI * energies_.cwiseProduct(psi);
    if (g != 0.0) coupling_.apply_add(psi.data(), out.data(), kMinusI * g);
  }

 private:
  ModelParams params_;
  CVector energies_;
  EntryList coupling_;
};

// rho' = -i(K rho - rho K^dag) + sum C rho C^dag with K = H - i/2 sum C^dag C.
// The commutator part is evaluated as -i K rho plus its adjoint, which
// requires rho hermitian; the stage states of RK4 stay hermitian since every
// update is hermitian by construction.
class LindbladRhs {
 public:
  LindbladRhs(const ModelParams& params, const HilbertSpace& space,
              const std::vector<Operator>& collapse)
      : params_(params), dim_(space.total_dim()) {
    CMatrix k_static = free_hamiltonian(params, space).matrix();
    for (const Operator& c : collapse) {
      k_static += Complex{0.0, -0.5} * (c.matrix().adjoint() * c.matrix());
      jumps_.push_back(EntryList::from(c.matrix()));
    }
    static_ = EntryList::from(k_static);
    coupling_ = EntryList::from(coupling_operator(space, params.variant).matrix());
    scratch_ = CMatrix::Zero(dim_, dim_);
    jump_sum_ = CMatrix::Zero(dim_, dim_);
  }

  void operator()(double t, const CMatrix& rho, CMatrix& out) {
    const double g = coupling(params_, t);
    // scratch = -i K rho, column by column
    scratch_.setZero();
    for (int c = 0; c < dim_; ++c) {
      const Complex* x = rho.col(c).data();
      Complex* y = scratch_.col(c).data();
      static_.apply_add(x, y, kMinusI);
      if (g != 0.0) coupling_.apply_add(x, y, kMinusI * g);
    }
    out = scratch_ + scratch_.adjoint();

    if (jumps_.empty()) return;
    jump_sum_.setZero();
    for (const EntryList& c : jumps_) {
      // scratch = C rho
      scratch_.setZero();
      for (int col = 0; col < dim_; ++col) c.apply_add(rho.col(col).data(), scratch_.col(col).data(), 1.0);
      // jump_sum(:, j) += scratch(:, k) conj(C_jk)
      for (const auto& e : c.entries) {
        jump_sum_.col(e.row) += std::conj(e.value) * scratch_.col(e.col);
      }
    }
    out += 0.5 * (jump_sum_ + jump_sum_.adjoint());
  }

 private:
  ModelParams params_;
  int dim_;
  EntryList static_;
  EntryList coupling_;
  std::vector<EntryList> jumps_;
  CMatrix scratch_;
  CMatrix jump_sum_;
};

double cutoff_population(const CVector& psi, const HilbertSpace& space) {
  const int n = space.fock_cutoff();
  return std::norm(psi(space.index(0, n))) + std::norm(psi(space.index(1, n)));
}

double cutoff_population(const CMatrix& rho, const HilbertSpace& space) {
  const int n = space.fock_cutoff();
  return rho(space.index(0, n), space.index(0, n)).real() +
         rho(space.index(1, n), space.index(1, n)).real();
}

template <class Series>
ObservableTable tabulate(const Series& states, const std::vector<NamedObservable>& ops) {
  ObservableTable table;
  table.times = states.times;
  for (const auto& op : ops) {
    table.names.push_back(op.name);
    std::vector<double> col;
    col.reserve(states.size());
    for (const auto& s : states.samples) {
      require_same_space(s.space(), op.op.space(), "observables_series");
      col.push_back(expectation(s, op.op));
    }
    table.columns.push_back(std::move(col));
  }
  return table;
}

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigInvalid("truncation threshold must lie in (0, 1)");
  }
}

}  // namespace

void TimeGrid::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigInvalid("time step must be > 0");
  if (!(t_max >= dt) || !std::isfinite(t_max)) throw ConfigInvalid("t_max must be >= dt");
  if (sample_every < 1) throw ConfigInvalid("sample_every must be >= 1");
}

int TimeGrid::sample_count() const {
  const double intervals = t_max / (dt * sample_every);
  return static_cast<int>(std::floor(intervals + 1e-9)) + 1;
}

int TimeGrid::nearest_sample(double t) const {
  const long k = std::lround(t / (dt * sample_every));
  return static_cast<int>(std::clamp<long>(k, 0, sample_count() - 1));
}

std::vector<NamedObservable> standard_observables(const HilbertSpace& space) {
  return {named_observable(space, "N"), named_observable(space, "Sz"),
          named_observable(space, "cutoff")};
}

NamedObservable named_observable(const HilbertSpace& space, const std::string& name) {
  if (name == "N") return {name, build_operator(space, OperatorKind::number)};
  if (name == "Sz") return {name, build_operator(space, OperatorKind::s_z)};
  if (name == "cutoff") return {name, build_operator(space, OperatorKind::cutoff_projector)};
  throw ConfigInvalid("unknown observable '" + name + "' (N, Sz, cutoff)");
}

const std::vector<double>& ObservableTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return columns[i];
  }
  throw ConfigInvalid("no observable column named '" + name + "'");
}

void ObservableTable::write_csv(std::ostream& out) const {
  out << "t";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t k = 0; k < times.size(); ++k) {
    out << times[k];
    for (const auto& col : columns) out << ',' << col[k];
    out << '\n';
  }
}

LindbladSpec LindbladSpec::cavity_and_qubit(double gamma_a, double gamma_q,
                                            CollapseConvention convention) {
  LindbladSpec spec;
  spec.convention = convention;
  spec.channels = {{gamma_a, OperatorKind::a}, {gamma_q, OperatorKind::sigma_minus}};
  return spec;
}

void LindbladSpec::validate() const {
  for (const auto& ch : channels) {
    if (!std::isfinite(ch.gamma) || ch.gamma < 0.0) {
      throw ConfigInvalid("collapse rates must be finite and >= 0");
    }
  }
}

std::vector<Operator> LindbladSpec::collapse_operators(const HilbertSpace& space) const {
  validate();
  std::vector<Operator> ops;
  for (const auto& ch : channels) {
    if (ch.gamma == 0.0) continue;
    const double scale = convention == CollapseConvention::rate ? std::sqrt(ch.gamma) : ch.gamma;
    ops.push_back(scale * build_operator(space, ch.kind));
  }
  return ops;
}

StateSeries evolve_schrodinger(const ModelParams& params, const HilbertSpace& space,
                               const StateVector& psi0, const TimeGrid& grid,
                               const EvolveOptions& options) {
  params.validate();
  grid.validate();
  require_same_space(space, psi0.space(), "evolve_schrodinger");
  psi0.require_normalized();

  SchrodingerRhs rhs(params, space);
  CVector psi = psi0.amplitudes();
  Rk4<CVector> stepper(psi);

  StateSeries series;
  const int samples = grid.sample_count();
  series.times.reserve(samples);
  series.samples.reserve(samples);
  bool warned = false;

  auto record = [&](int k) {
    const double t = grid.sample_time(k);
    const double drift = std::abs(psi.norm() - 1.0);
    if (!(drift <= options.norm_tolerance)) {
      std::ostringstream os;
      os << "norm drift " << drift << " at t = " << t << " (dt = " << grid.dt << ")";
      throw NormDriftExceeded(os.str());
    }
    const double pop = cutoff_population(psi, space);
    if (!warned && pop > options.truncation_threshold) {
      series.warnings.push_back(truncation_warning(pop, t));
      warned = true;
    }
    series.times.push_back(t);
    series.samples.emplace_back(space, psi);
  };

  record(0);
  long long step = 0;
  for (int k = 1; k < samples; ++k) {
    for (int s = 0; s < grid.sample_every; ++s, ++step) {
      stepper.step(rhs, static_cast<double>(step) * grid.dt, grid.dt, psi);
    }
    record(k);
  }
  return series;
}

DensitySeries evolve_lindblad(const ModelParams& params, const HilbertSpace& space,
                              const DensityMatrix& rho0, const LindbladSpec& lspec,
                              const TimeGrid& grid, const LindbladOptions& options) {
  params.validate();
  grid.validate();
  require_same_space(space, rho0.space(), "evolve_lindblad");
  rho0.require_valid();

  LindbladRhs rhs(params, space, lspec.collapse_operators(space));
  CMatrix rho = rho0.matrix();
  Rk4<CMatrix> stepper(rho);

  DensitySeries series;
  const int samples = grid.sample_count();
  series.times.reserve(samples);
  series.samples.reserve(samples);
  bool warned = false;

  auto record = [&](int k) {
    const double t = grid.sample_time(k);
    DensityMatrix snapshot(space, rho);
    const double trace_drift = std::abs(rho.trace() - Complex{1.0, 0.0});
    if (!(trace_drift <= options.trace_tolerance)) {
      std::ostringstream os;
      os << "trace drift " << trace_drift << " at t = " << t;
      throw TraceDriftExceeded(os.str());
    }
    if (options.check_positivity) {
      const double min_eig = snapshot.min_eigenvalue();
      if (min_eig < options.positivity_floor) {
        std::ostringstream os;
        os << "density matrix eigenvalue " << min_eig << " at t = " << t;
        throw PositivityViolation(os.str());
      }
    }
    const double pop = cutoff_population(rho, space);
    if (!warned && pop > options.truncation_threshold) {
      series.warnings.push_back(truncation_warning(pop, t));
      warned = true;
    }
    series.times.push_back(t);
    series.samples.push_back(std::move(snapshot));
  };

  record(0);
  long long step = 0;
  for (int k = 1; k < samples; ++k) {
    for (int s = 0; s < grid.sample_every; ++s, ++step) {
      stepper.step(rhs, static_cast<double>(step) * grid.dt, grid.dt, rho);
    }
    record(k);
  }
  return series;
}

ObservableTable observables_series(const StateSeries& states,
                                   const std::vector<NamedObservable>& ops) {
  return tabulate(states, ops);
}

ObservableTable observables_series(const DensitySeries& states,
                                   const std::vector<NamedObservable>& ops) {
  return tabulate(states, ops);
}

TruncationReport validate_truncation(const StateSeries& states, const HilbertSpace& space,
                                     double threshold) {
  check_threshold(threshold);
  TruncationReport report;
  for (std::size_t k = 0; k < states.size(); ++k) {
    require_same_space(states.samples[k].space(), space, "validate_truncation");
    const double pop = cutoff_population(states.samples[k].amplitudes(), space);
    report.max_cutoff_population = std::max(report.max_cutoff_population, pop);
    if (!report.first_violation_time && pop > threshold) report.first_violation_time = states.times[k];
  }
  return report;
}

TruncationReport validate_truncation(const DensitySeries& states, const HilbertSpace& space,
                                     double threshold) {
  check_threshold(threshold);
  TruncationReport report;
  for (std::size_t k = 0; k < states.size(); ++k) {
    require_same_space(states.samples[k].space(), space, "validate_truncation");
    const double pop = cutoff_population(states.samples[k].matrix(), space);
    report.max_cutoff_population = std::max(report.max_cutoff_population, pop);
    if (!report.first_violation_time && pop > threshold) report.first_violation_time = states.times[k];
  }
  return report;
}

}  // namespace qdce
