#pragma once

#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace qdce {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Composite qubit (x) truncated Fock space.
//
// Basis ordering is qubit-major: index = q * (n_max + 1) + n with q = 0 for
// the ground state and q = 1 for the excited state. Every matrix, state
// snapshot and file output in the project uses this ordering.
class HilbertSpace {
 public:
  static constexpr int qubit_dim = 2;

  // Throws NonPositiveCutoff when fock_cutoff < 1.
  explicit HilbertSpace(int fock_cutoff);

  int fock_cutoff() const { return fock_cutoff_; }
  int fock_dim() const { return fock_cutoff_ + 1; }
  int total_dim() const { return qubit_dim * fock_dim(); }

  // Position of |q, n> in the composite basis.
  int index(int qubit, int photons) const;

  bool operator==(const HilbertSpace&) const = default;

 private:
  int fock_cutoff_;
};

HilbertSpace make_space(int fock_cutoff);

// |q, n> with q in {0 = g, 1 = e}.
struct BasisLabel {
  int qubit = 0;
  int photons = 0;

  bool operator==(const BasisLabel&) const = default;
};

std::string to_string(const BasisLabel& label);

enum class OperatorKind {
  a,
  a_dag,
  number,
  s_z,
  sigma_x,
  sigma_plus,
  sigma_minus,
  identity,
  cutoff_projector,
};

std::string_view to_string(OperatorKind kind);

// Dense operator on the composite space. Operators built as hermitian are
// checked elementwise against their adjoint to 1e-12.
class Operator {
 public:
  static constexpr double hermiticity_tolerance = 1e-12;

  Operator(HilbertSpace space, CMatrix matrix, bool hermitian = false);

  const HilbertSpace& space() const { return space_; }
  const CMatrix& matrix() const { return matrix_; }
  bool hermitian() const { return hermitian_; }

  Operator adjoint() const;

  friend Operator operator+(const Operator& lhs, const Operator& rhs);
  friend Operator operator-(const Operator& lhs, const Operator& rhs);
  friend Operator operator*(const Operator& lhs, const Operator& rhs);
  friend Operator operator*(double scale, const Operator& op);
  friend Operator operator*(Complex scale, const Operator& op);

 private:
  HilbertSpace space_;
  CMatrix matrix_;
  bool hermitian_;
};

Operator build_operator(const HilbertSpace& space, OperatorKind kind);

// Largest elementwise |M - M^dagger|.
double hermiticity_error(const CMatrix& m);

class StateVector {
 public:
  // Throws InvalidState on non-finite amplitudes, DimensionMismatch on size.
  StateVector(HilbertSpace space, CVector amplitudes);

  static StateVector basis(const HilbertSpace& space, BasisLabel label);

  const HilbertSpace& space() const { return space_; }
  const CVector& amplitudes() const { return amplitudes_; }
  Complex amplitude(BasisLabel label) const;

  double norm() const { return amplitudes_.norm(); }
  StateVector normalized() const;

  // Throws InvalidState when |norm - 1| > tolerance.
  void require_normalized(double tolerance = 1e-10) const;

 private:
  HilbertSpace space_;
  CVector amplitudes_;
};

struct DensityDiagnostics {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
};

class DensityMatrix {
 public:
  static constexpr double hermiticity_tolerance = 1e-10;
  static constexpr double trace_tolerance = 1e-8;
  static constexpr double eigenvalue_floor = -1e-8;

  // Stores the matrix as given; call require_valid() to enforce the density
  // matrix invariants.
  DensityMatrix(HilbertSpace space, CMatrix matrix);

  static DensityMatrix pure(const StateVector& psi);

  const HilbertSpace& space() const { return space_; }
  const CMatrix& matrix() const { return matrix_; }

  DensityDiagnostics diagnostics() const;
  double min_eigenvalue() const;

  // Throws InvalidState when any invariant is violated.
  void require_valid() const;

 private:
  HilbertSpace space_;
  CMatrix matrix_;
};

// <psi|O|psi> and Tr[rho O]. The observable must be flagged hermitian.
// Imaginary residues above 1e-8 raise NonHermitianObservable.
double expectation(const StateVector& psi, const Operator& op);
double expectation(const DensityMatrix& rho, const Operator& op);

// JSON array of [re, im] pairs in qubit-major order.
std::string state_to_json(const StateVector& psi);
StateVector state_from_json(const HilbertSpace& space, std::string_view text);

}  // namespace qdce
