#include <cmath>

#include "doctest.h"
#include "qdce/errors.hpp"
#include "qdce/qspace.hpp"

using namespace qdce;

TEST_SUITE("qspace") {

TEST_CASE("space dimensions") {
  CHECK(make_space(7).total_dim() == 16);
  CHECK(make_space(1).total_dim() == 4);
  CHECK_THROWS_AS(make_space(0), NonPositiveCutoff);
  CHECK_THROWS_AS(make_space(-3), NonPositiveCutoff);

  const HilbertSpace s(3);
  CHECK(s.index(0, 0) == 0);
  CHECK(s.index(0, 3) == 3);
  CHECK(s.index(1, 0) == 4);
  CHECK(s.index(1, 3) == 7);
  CHECK_THROWS_AS(s.index(2, 0), DimensionMismatch);
  CHECK_THROWS_AS(s.index(0, 4), DimensionMismatch);
}

TEST_CASE("basis labels") {
  CHECK(to_string(BasisLabel{0, 2}) == "|g,2>");
  CHECK(to_string(BasisLabel{1, 0}) == "|e,0>");
}

TEST_CASE("operator eigenvalues on basis states") {
  const HilbertSpace s(7);
  const Operator n = build_operator(s, OperatorKind::number);
  const Operator sz = build_operator(s, OperatorKind::s_z);
  const Operator cut = build_operator(s, OperatorKind::cutoff_projector);

  const StateVector g3 = StateVector::basis(s, {0, 3});
  CHECK((n.matrix() * g3.amplitudes() - 3.0 * g3.amplitudes()).norm() < 1e-14);

  const StateVector g0 = StateVector::basis(s, {0, 0});
  CHECK((sz.matrix() * g0.amplitudes() + 0.5 * g0.amplitudes()).norm() < 1e-14);

  CHECK(expectation(StateVector::basis(s, {0, 7}), cut) == doctest::Approx(1.0));
  CHECK(expectation(StateVector::basis(s, {1, 7}), cut) == doctest::Approx(1.0));
  CHECK(expectation(StateVector::basis(s, {0, 6}), cut) == doctest::Approx(0.0));
}

TEST_CASE("expectation examples") {
  const HilbertSpace s(7);
  const Operator n = build_operator(s, OperatorKind::number);
  const Operator sz = build_operator(s, OperatorKind::s_z);
  CHECK(expectation(StateVector::basis(s, {0, 0}), n) == 0.0);
  CHECK(expectation(StateVector::basis(s, {1, 1}), sz) == doctest::Approx(0.5));

  CVector v = CVector::Zero(s.total_dim());
  v(s.index(0, 0)) = 1.0 / std::sqrt(2.0);
  v(s.index(0, 2)) = 1.0 / std::sqrt(2.0);
  const StateVector mix(s, v);
  CHECK(expectation(mix, n) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(expectation(DensityMatrix::pure(mix), n) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ladder algebra below the cutoff") {
  const HilbertSpace s(7);
  const CMatrix a = build_operator(s, OperatorKind::a).matrix();
  const CMatrix ad = build_operator(s, OperatorKind::a_dag).matrix();
  const CMatrix comm = a * ad - ad * a;
  for (int q = 0; q < 2; ++q) {
    for (int n = 0; n < s.fock_cutoff(); ++n) {
      const CVector psi = StateVector::basis(s, {q, n}).amplitudes();
      CHECK((ad * psi).norm() == doctest::Approx(std::sqrt(n + 1.0)));
      CHECK((comm * psi - psi).norm() < 1e-14);
    }
    // truncation breaks the commutator on |n_max> only
    const CVector top = StateVector::basis(s, {q, 7}).amplitudes();
    CHECK((comm * top - top).norm() > 1.0);
  }
}

TEST_CASE("pauli relations") {
  const HilbertSpace s(4);
  const Operator sx = build_operator(s, OperatorKind::sigma_x);
  const Operator sp = build_operator(s, OperatorKind::sigma_plus);
  const Operator sm = build_operator(s, OperatorKind::sigma_minus);
  CHECK((sx.matrix() - (sp + sm).matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sx.hermitian());
  CHECK_FALSE(sp.hermitian());
  // sigma+ raises the qubit
  const CVector e = sp.matrix() * StateVector::basis(s, {0, 2}).amplitudes();
  CHECK(std::abs(e(s.index(1, 2)) - 1.0) < 1e-15);

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(build_operator(s, OperatorKind::s_z).matrix());
  CHECK(eig.eigenvalues().minCoeff() == doctest::Approx(-0.5));
  CHECK(eig.eigenvalues().maxCoeff() == doctest::Approx(0.5));
}

TEST_CASE("operator construction checks") {
  const HilbertSpace s(2);
  CHECK_THROWS_AS(Operator(s, CMatrix::Zero(3, 3)), DimensionMismatch);
  CMatrix m = CMatrix::Zero(6, 6);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(Operator(s, m, true), NonHermitianObservable);
  CHECK_NOTHROW(Operator(s, m, false));
  CHECK(hermiticity_error(m) == doctest::Approx(1.0));

  const Operator a = build_operator(s, OperatorKind::a);
  CHECK_THROWS_AS(expectation(StateVector::basis(s, {0, 1}), a), NonHermitianObservable);
  CHECK((a.adjoint().matrix() - build_operator(s, OperatorKind::a_dag).matrix()).norm() == 0.0);
  CHECK_THROWS_AS(a + build_operator(HilbertSpace(3), OperatorKind::a), DimensionMismatch);
}

TEST_CASE("expectation is linear and real") {
  const HilbertSpace s(5);
  const Operator n = build_operator(s, OperatorKind::number);
  const Operator sz = build_operator(s, OperatorKind::s_z);
  const Operator sx = build_operator(s, OperatorKind::sigma_x);
  CVector v(s.total_dim());
  for (int i = 0; i < v.size(); ++i) v(i) = Complex(std::cos(1.3 * i), std::sin(0.7 * i + 0.2));
  const StateVector psi = StateVector(s, v).normalized();
  const double lhs = expectation(psi, 2.0 * n + 0.5 * sz - sx);
  const double rhs = 2.0 * expectation(psi, n) + 0.5 * expectation(psi, sz) - expectation(psi, sx);
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("state validation") {
  const HilbertSpace s(2);
  CVector v = CVector::Zero(6);
  v(0) = 2.0;
  const StateVector unnormalized(s, v);
  CHECK_THROWS_AS(unnormalized.require_normalized(), InvalidState);
  CHECK_NOTHROW(unnormalized.normalized().require_normalized());
  v(1) = std::nan("");
  CHECK_THROWS_AS(StateVector(s, v), InvalidState);
  CHECK_THROWS_AS(StateVector(s, CVector::Zero(5)), DimensionMismatch);

  CMatrix rho = CMatrix::Zero(6, 6);
  rho(0, 0) = 1.2;
  rho(1, 1) = -0.2;
  const DensityMatrix bad(s, rho);
  CHECK(bad.min_eigenvalue() == doctest::Approx(-0.2));
  CHECK_THROWS_AS(bad.require_valid(), InvalidState);
  CHECK_NOTHROW(DensityMatrix::pure(StateVector::basis(s, {1, 1})).require_valid());
}

TEST_CASE("state json round trip") {
  const HilbertSpace s(3);
  CVector v(s.total_dim());
  for (int i = 0; i < v.size(); ++i) v(i) = Complex(0.1 * i, -0.05 * i * i);
  const StateVector psi = StateVector(s, v).normalized();
  const StateVector back = state_from_json(s, state_to_json(psi));
  CHECK((back.amplitudes() - psi.amplitudes()).norm() == 0.0);
  CHECK_THROWS_AS(state_from_json(HilbertSpace(2), state_to_json(psi)), DimensionMismatch);
}

}
