#include "qdce/dyson.hpp"

#include <cmath>
#include <iomanip>

#include "qdce/errors.hpp"
#include "sparse_apply.hpp"

namespace qdce {

namespace {

using detail::EntryList;
using detail::Rk4;

constexpr int kMaxOrder = 3;
constexpr double kSecularFactor = 10.0;

// Columns of the state matrix are the orders. Column 0 is constant; column
// n obeys d phi^(n)/dt = -i h(t) phi^(n-1) with h = e^{iH0t} cos(omega_d t) V e^{-iH0t}.
class HierarchyRhs {
 public:
  HierarchyRhs(const ModelParams& params, const HilbertSpace& space)
      : params_(params),
        energies_(free_hamiltonian(params, space).matrix().diagonal().real()),
        coupling_(EntryList::from(coupling_operator(space, params.variant).matrix())),
        rotated_(space.total_dim()),
        product_(space.total_dim()) {}

  void operator()(double t, const CMatrix& phi, CMatrix& out) {
    const double drive = std::cos(params_.omega_d * t);
    out.col(0).setZero();
    for (Eigen::Index n = 1; n < phi.cols(); ++n) {
      for (Eigen::Index i = 0; i < rotated_.size(); ++i) {
        rotated_(i) = std::polar(1.0, -energies_(i) * t) * phi(i, n - 1);
      }
      product_.setZero();
      coupling_.apply_add(rotated_.data(), product_.data(), Complex{0.0, -drive});
      for (Eigen::Index i = 0; i < product_.size(); ++i) {
        out(i, n) = std::polar(1.0, energies_(i) * t) * product_(i);
      }
    }
  }

 private:
  ModelParams params_;
  Eigen::VectorXd energies_;
  EntryList coupling_;
  CVector rotated_;
  CVector product_;
};

}  // namespace

std::string_view to_string(SecularClass c) {
  return c == SecularClass::secular ? "secular" : "bounded";
}

DysonStack dyson_corrections(const ModelParams& params, const HilbertSpace& space,
                             const StateVector& psi0, int order, const TimeGrid& grid) {
  if (order < 1 || order > kMaxOrder) {
    throw OrderOutOfRange("Dyson order must be in [1, 3], got " + std::to_string(order));
  }
  params.validate();
  grid.validate();
  if (!(psi0.space() == space)) throw DimensionMismatch("initial state lives on another space");
  psi0.require_normalized();

  const int dim = space.total_dim();
  CMatrix phi = CMatrix::Zero(dim, order + 1);
  phi.col(0) = psi0.amplitudes();

  HierarchyRhs rhs(params, space);
  Rk4<CMatrix> stepper(phi);

  DysonStack stack{params, space, grid, order, std::vector<StateSeries>(order + 1)};
  const int samples = grid.sample_count();
  for (auto& c : stack.corrections) {
    c.times.reserve(samples);
    c.samples.reserve(samples);
  }
  auto record = [&](int k) {
    const double t = grid.sample_time(k);
    for (int n = 0; n <= order; ++n) {
      stack.corrections[n].times.push_back(t);
      stack.corrections[n].samples.emplace_back(space, phi.col(n));
    }
  };

  record(0);
  long long step = 0;
  for (int k = 1; k < samples; ++k) {
    for (int s = 0; s < grid.sample_every; ++s, ++step) {
      stepper.step(rhs, static_cast<double>(step) * grid.dt, grid.dt, phi);
    }
    record(k);
  }
  return stack;
}

SecularReport secular_fit(const DysonStack& stack, BasisLabel label, int order) {
  if (order < 0 || order > stack.order) {
    throw OrderOutOfRange("stack holds orders up to " + std::to_string(stack.order));
  }
  const StateSeries& series = stack.correction(order);
  if (series.empty()) throw EmptySeries("Dyson stack has no samples");
  const int index = stack.space.index(label.qubit, label.photons);
  const double t_max = series.times.back();

  std::vector<double> ts;
  std::vector<Complex> ys;
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series.times[k] >= 0.5 * t_max) {
      ts.push_back(series.times[k]);
      ys.push_back(series.samples[k].amplitudes()(index));
    }
  }

  const double n = static_cast<double>(ts.size());
  double t_mean = 0.0;
  Complex y_mean{0.0, 0.0};
  for (std::size_t k = 0; k < ts.size(); ++k) {
    t_mean += ts[k];
    y_mean += ys[k];
  }
  t_mean /= n;
  y_mean /= n;

  double stt = 0.0;
  Complex sty{0.0, 0.0};
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double dt = ts[k] - t_mean;
    stt += dt * dt;
    sty += dt * (ys[k] - y_mean);
  }

  SecularReport report;
  report.label = label;
  report.order = order;
  report.slope = stt > 0.0 ? sty / stt : Complex{0.0, 0.0};
  const Complex intercept = y_mean - report.slope * t_mean;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    report.residual = std::max(report.residual, std::abs(ys[k] - intercept - report.slope * ts[k]));
  }
  report.classification = std::abs(report.slope) * t_max > kSecularFactor * report.residual
                              ? SecularClass::secular
                              : SecularClass::bounded;
  return report;
}

std::vector<SecularReport> secular_table(const DysonStack& stack) {
  std::vector<SecularReport> out;
  for (int order = 1; order <= stack.order; ++order) {
    for (int q = 0; q < HilbertSpace::qubit_dim; ++q) {
      for (int n = 0; n <= stack.space.fock_cutoff(); ++n) {
        out.push_back(secular_fit(stack, {q, n}, order));
      }
    }
  }
  return out;
}

void write_secular_csv(std::ostream& out, const std::vector<SecularReport>& reports) {
  out << "qubit,photons,order,slope_re,slope_im,residual,class\n";
  out << std::setprecision(17);
  for (const auto& r : reports) {
    out << (r.label.qubit == 0 ? 'g' : 'e') << ',' << r.label.photons << ',' << r.order << ','
        << r.slope.real() << ',' << r.slope.imag() << ',' << r.residual << ','
        << to_string(r.classification) << '\n';
  }
}

std::vector<DetuningRow> detuning_scan(const ModelParams& params_template,
                                       const std::vector<double>& deltas, int order,
                                       const TimeGrid& grid) {
  std::vector<DetuningRow> rows;
  for (double delta : deltas) {
    ModelParams p = params_template;
    p.Omega = p.omega + delta;
    const HilbertSpace space(p.fock_cutoff);
    const DysonStack stack =
        dyson_corrections(p, space, StateVector::basis(space, {0, 0}), order, grid);
    const SecularReport fit = secular_fit(stack, {0, 2}, order);
    rows.push_back({delta, p.Omega, std::abs(fit.slope), fit.classification});
  }
  return rows;
}

RealSeries reconstruct_and_compare(const DysonStack& stack, double g0, const StateSeries& full_run) {
  const StateSeries& base = stack.correction(0);
  if (full_run.size() != base.size()) {
    throw DimensionMismatch("full run has " + std::to_string(full_run.size()) +
                            " samples, Dyson stack has " + std::to_string(base.size()));
  }
  const Eigen::VectorXd energies = free_hamiltonian(stack.params, stack.space).matrix().diagonal().real();
  RealSeries residual;
  residual.times = base.times;
  residual.samples.reserve(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    if (!(full_run.samples[k].space() == stack.space)) {
      throw DimensionMismatch("full run lives on another space");
    }
    if (std::abs(full_run.times[k] - base.times[k]) > 1e-9 * std::max(1.0, base.times[k])) {
      throw DimensionMismatch("full run samples are not aligned with the Dyson grid");
    }
    CVector sum = CVector::Zero(stack.space.total_dim());
    double power = 1.0;
    for (int n = 0; n <= stack.order; ++n) {
      sum += power * stack.corrections[n].samples[k].amplitudes();
      power *= g0;
    }
    const double t = base.times[k];
    for (Eigen::Index i = 0; i < sum.size(); ++i) sum(i) *= std::polar(1.0, -energies(i) * t);
    residual.samples.push_back((full_run.samples[k].amplitudes() - sum).norm());
  }
  return residual;
}

}  // namespace qdce
