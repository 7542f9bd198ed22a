#include "qdce/qspace.hpp"

#include <cmath>

#include "json.hpp"
#include "qdce/errors.hpp"

namespace qdce {

namespace {

// Imaginary parts of expectation values below this are rounding residue.
constexpr double kImagResidueLimit = 1e-8;

void require_same_space(const HilbertSpace& a, const HilbertSpace& b) {
  if (!(a == b)) {
    throw DimensionMismatch("operands live on spaces with cutoffs " +
                            std::to_string(a.fock_cutoff()) + " and " +
                            std::to_string(b.fock_cutoff()));
  }
}

CMatrix qubit_matrix(OperatorKind kind) {
  CMatrix m = CMatrix::Zero(2, 2);
  switch (kind) {
    case OperatorKind::s_z:
      m(0, 0) = -0.5;
      m(1, 1) = 0.5;
      break;
    case OperatorKind::sigma_x:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case OperatorKind::sigma_plus:
      m(1, 0) = 1.0;  // |e><g|
      break;
    case OperatorKind::sigma_minus:
      m(0, 1) = 1.0;
      break;
    default:
      m = CMatrix::Identity(2, 2);
  }
  return m;
}

CMatrix field_matrix(OperatorKind kind, int fock_dim) {
  CMatrix m = CMatrix::Zero(fock_dim, fock_dim);
  switch (kind) {
    case OperatorKind::a:
      for (int n = 1; n < fock_dim; ++n) m(n - 1, n) = std::sqrt(double(n));
      break;
    case OperatorKind::a_dag:
      for (int n = 1; n < fock_dim; ++n) m(n, n - 1) = std::sqrt(double(n));
      break;
    case OperatorKind::number:
      for (int n = 0; n < fock_dim; ++n) m(n, n) = double(n);
      break;
    case OperatorKind::cutoff_projector:
      m(fock_dim - 1, fock_dim - 1) = 1.0;
      break;
    default:
      m = CMatrix::Identity(fock_dim, fock_dim);
  }
  return m;
}

// Qubit-major Kronecker product: (Q (x) F)[q*d + n, p*d + m] = Q[q,p] F[n,m].
CMatrix kron(const CMatrix& q, const CMatrix& f) {
  const auto d = f.rows();
  CMatrix out = CMatrix::Zero(q.rows() * d, q.cols() * d);
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      if (q(i, j) != Complex{0.0, 0.0}) out.block(i * d, j * d, d, d) = q(i, j) * f;
    }
  }
  return out;
}

double checked_real(Complex value) {
  const double residue = std::abs(value.imag());
  if (residue > kImagResidueLimit) {
    throw NonHermitianObservable("expectation value has imaginary part " +
                                 std::to_string(value.imag()));
  }
  return value.real();
}

}  // namespace

HilbertSpace::HilbertSpace(int fock_cutoff) : fock_cutoff_(fock_cutoff) {
  if (fock_cutoff < 1) {
    throw NonPositiveCutoff("fock cutoff must be >= 1, got " + std::to_string(fock_cutoff));
  }
}

int HilbertSpace::index(int qubit, int photons) const {
  if (qubit < 0 || qubit >= qubit_dim || photons < 0 || photons > fock_cutoff_) {
    throw DimensionMismatch("basis label |" + std::to_string(qubit) + "," +
                            std::to_string(photons) + "> outside space with cutoff " +
                            std::to_string(fock_cutoff_));
  }
  return qubit * fock_dim() + photons;
}

HilbertSpace make_space(int fock_cutoff) { return HilbertSpace(fock_cutoff); }

std::string to_string(const BasisLabel& label) {
  return std::string("|") + (label.qubit == 0 ? "g" : "e") + "," +
         std::to_string(label.photons) + ">";
}

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::a: return "a";
    case OperatorKind::a_dag: return "a_dag";
    case OperatorKind::number: return "number";
    case OperatorKind::s_z: return "s_z";
    case OperatorKind::sigma_x: return "sigma_x";
    case OperatorKind::sigma_plus: return "sigma_plus";
    case OperatorKind::sigma_minus: return "sigma_minus";
    case OperatorKind::identity: return "identity";
    case OperatorKind::cutoff_projector: return "cutoff_projector";
  }
  return "unknown";
}

double hermiticity_error(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Operator::Operator(HilbertSpace space, CMatrix matrix, bool hermitian)
    : space_(space), matrix_(std::move(matrix)), hermitian_(hermitian) {
  const int dim = space_.total_dim();
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw DimensionMismatch("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                            std::to_string(matrix_.cols()) + ", space dimension is " +
                            std::to_string(dim));
  }
  if (hermitian_ && hermiticity_error(matrix_) > hermiticity_tolerance) {
    throw NonHermitianObservable("operator flagged hermitian deviates from its adjoint by " +
                                 std::to_string(hermiticity_error(matrix_)));
  }
}

Operator Operator::adjoint() const { return Operator(space_, matrix_.adjoint(), hermitian_); }

Operator operator+(const Operator& lhs, const Operator& rhs) {
  require_same_space(lhs.space_, rhs.space_);
  return Operator(lhs.space_, lhs.matrix_ + rhs.matrix_, lhs.hermitian_ && rhs.hermitian_);
}

Operator operator-(const Operator& lhs, const Operator& rhs) {
  require_same_space(lhs.space_, rhs.space_);
  return Operator(lhs.space_, lhs.matrix_ - rhs.matrix_, lhs.hermitian_ && rhs.hermitian_);
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  require_same_space(lhs.space_, rhs.space_);
  return Operator(lhs.space_, lhs.matrix_ * rhs.matrix_, false);
}

Operator operator*(double scale, const Operator& op) {
  return Operator(op.space_, scale * op.matrix_, op.hermitian_);
}

Operator operator*(Complex scale, const Operator& op) {
  return Operator(op.space_, scale * op.matrix_, op.hermitian_ && scale.imag() == 0.0);
}

Operator build_operator(const HilbertSpace& space, OperatorKind kind) {
  const int d = space.fock_dim();
  switch (kind) {
    case OperatorKind::a:
    case OperatorKind::a_dag:
      return Operator(space, kron(CMatrix::Identity(2, 2), field_matrix(kind, d)));
    case OperatorKind::number:
    case OperatorKind::cutoff_projector:
      return Operator(space, kron(CMatrix::Identity(2, 2), field_matrix(kind, d)), true);
    case OperatorKind::s_z:
    case OperatorKind::sigma_x:
      return Operator(space, kron(qubit_matrix(kind), CMatrix::Identity(d, d)), true);
    case OperatorKind::sigma_plus:
    case OperatorKind::sigma_minus:
      return Operator(space, kron(qubit_matrix(kind), CMatrix::Identity(d, d)));
    case OperatorKind::identity:
      return Operator(space, CMatrix::Identity(space.total_dim(), space.total_dim()), true);
  }
  throw std::invalid_argument("unknown operator kind");
}

StateVector::StateVector(HilbertSpace space, CVector amplitudes)
    : space_(space), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != space_.total_dim()) {
    throw DimensionMismatch("state has " + std::to_string(amplitudes_.size()) +
                            " amplitudes, space dimension is " +
                            std::to_string(space_.total_dim()));
  }
  if (!amplitudes_.allFinite()) throw InvalidState("state vector has non-finite amplitudes");
}

StateVector StateVector::basis(const HilbertSpace& space, BasisLabel label) {
  CVector v = CVector::Zero(space.total_dim());
  v(space.index(label.qubit, label.photons)) = 1.0;
  return StateVector(space, std::move(v));
}

Complex StateVector::amplitude(BasisLabel label) const {
  return amplitudes_(space_.index(label.qubit, label.photons));
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw InvalidState("cannot normalize the zero vector");
  return StateVector(space_, amplitudes_ / n);
}

void StateVector::require_normalized(double tolerance) const {
  if (std::abs(norm() - 1.0) > tolerance) {
    throw InvalidState("state norm " + std::to_string(norm()) + " is not 1");
  }
}

DensityMatrix::DensityMatrix(HilbertSpace space, CMatrix matrix)
    : space_(space), matrix_(std::move(matrix)) {
  const int dim = space_.total_dim();
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw DimensionMismatch("density matrix is " + std::to_string(matrix_.rows()) + "x" +
                            std::to_string(matrix_.cols()) + ", space dimension is " +
                            std::to_string(dim));
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const CVector& v = psi.amplitudes();
  return DensityMatrix(psi.space(), v * v.adjoint());
}

double DensityMatrix::min_eigenvalue() const {
  // Eigenvalues of the hermitian part; the antihermitian residue is tracked
  // separately by hermiticity_error.
  const CMatrix herm = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DensityDiagnostics DensityMatrix::diagnostics() const {
  DensityDiagnostics d;
  d.hermiticity_error = hermiticity_error(matrix_);
  d.trace_error = std::abs(matrix_.trace() - Complex{1.0, 0.0});
  d.min_eigenvalue = min_eigenvalue();
  return d;
}

void DensityMatrix::require_valid() const {
  if (!matrix_.allFinite()) throw InvalidState("density matrix has non-finite entries");
  const auto d = diagnostics();
  if (d.hermiticity_error > hermiticity_tolerance) {
    throw InvalidState("density matrix is not hermitian (error " +
                       std::to_string(d.hermiticity_error) + ")");
  }
  if (d.trace_error > trace_tolerance) {
    throw InvalidState("density matrix trace deviates from 1 by " + std::to_string(d.trace_error));
  }
  if (d.min_eigenvalue < eigenvalue_floor) {
    throw InvalidState("density matrix has eigenvalue " + std::to_string(d.min_eigenvalue));
  }
}

double expectation(const StateVector& psi, const Operator& op) {
  require_same_space(psi.space(), op.space());
  if (!op.hermitian()) throw NonHermitianObservable("observable is not flagged hermitian");
  const CVector& v = psi.amplitudes();
  return checked_real(v.dot(op.matrix() * v));
}

double expectation(const DensityMatrix& rho, const Operator& op) {
  require_same_space(rho.space(), op.space());
  if (!op.hermitian()) throw NonHermitianObservable("observable is not flagged hermitian");
  // Tr[rho O] = sum_ij rho_ij O_ji
  const Complex tr = (rho.matrix().array() * op.matrix().transpose().array()).sum();
  return checked_real(tr);
}

std::string state_to_json(const StateVector& psi) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Complex& c : psi.amplitudes()) arr.push_back({c.real(), c.imag()});
  return arr.dump();
}

StateVector state_from_json(const HilbertSpace& space, std::string_view text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidState(std::string("state JSON does not parse: ") + e.what());
  }
  if (!arr.is_array()) throw InvalidState("state JSON must be an array of [re, im] pairs");
  CVector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& pair = arr[i];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      throw InvalidState("state JSON entry " + std::to_string(i) + " is not an [re, im] pair");
    }
    v(static_cast<Eigen::Index>(i)) = Complex{pair[0].get<double>(), pair[1].get<double>()};
  }
  return StateVector(space, std::move(v));
}

}  // namespace qdce
