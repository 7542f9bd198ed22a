#pragma once

#include <ostream>
#include <vector>

#include "qdce/dynamics.hpp"

namespace qdce {

// Dyson corrections phi^(0..order) in the interaction picture of
// H0 = Omega S_z + omega a^dag a.
//
// Convention: phi^(n) is the plain n-fold time-ordered integral
//   phi^(n)(t) = (-i)^n int_{t > t1 > ... > tn > 0} h(t1) ... h(tn) psi0,
// with h(t) = H_I(t) / g0, so that psi_I(t) = sum_n g0^n phi^(n)(t). No 1/n!
// appears; the corrections never depend on g0.
struct DysonStack {
  ModelParams params;
  HilbertSpace space;
  TimeGrid grid;
  int order = 0;
  std::vector<StateSeries> corrections;  // index n holds phi^(n)

  const StateSeries& correction(int n) const { return corrections.at(static_cast<std::size_t>(n)); }
};

enum class SecularClass { secular, bounded };

std::string_view to_string(SecularClass c);

struct SecularReport {
  BasisLabel label;
  int order = 0;
  Complex slope;            // b of the fit a + b t
  double residual = 0.0;    // max |amplitude - (a + b t)| over the fit window
  SecularClass classification = SecularClass::bounded;
};

// Throws OrderOutOfRange unless 1 <= order <= 3; InvalidState if psi0 is not
// normalized.
DysonStack dyson_corrections(const ModelParams& params, const HilbertSpace& space,
                             const StateVector& psi0, int order, const TimeGrid& grid);

// Complex least-squares fit of <label|phi^(order)(t)> over the second half of
// the grid. Secular when |b| t_max exceeds ten times the fit residual.
SecularReport secular_fit(const DysonStack& stack, BasisLabel label, int order);

// secular_fit for every basis state and every order 1..stack.order.
std::vector<SecularReport> secular_table(const DysonStack& stack);

// Header `qubit,photons,order,slope_re,slope_im,residual,class`.
void write_secular_csv(std::ostream& out, const std::vector<SecularReport>& reports);

struct DetuningRow {
  double delta = 0.0;
  double Omega = 0.0;
  double slope_abs = 0.0;
  SecularClass classification = SecularClass::bounded;
};

// For each delta, sets Omega = omega + delta in a copy of params_template and
// fits the |g,2> amplitude at the given order, starting from |g,0>.
std::vector<DetuningRow> detuning_scan(const ModelParams& params_template,
                                       const std::vector<double>& deltas, int order,
                                       const TimeGrid& grid);

// || psi_full(t) - e^{-i H0 t} sum_{n <= order} g0^n phi^(n)(t) || per sample.
// Throws DimensionMismatch if the run does not share the stack's space and
// sample times.
RealSeries reconstruct_and_compare(const DysonStack& stack, double g0, const StateSeries& full_run);

}  // namespace qdce
