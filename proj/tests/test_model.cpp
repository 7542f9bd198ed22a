#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qdce/errors.hpp"
#include "qdce/model.hpp"

using namespace qdce;

namespace {

// Element <bra|M|ket>.
Complex element(const Operator& op, BasisLabel bra, BasisLabel ket) {
  const HilbertSpace& s = op.space();
  return op.matrix()(s.index(bra.qubit, bra.photons), s.index(ket.qubit, ket.photons));
}

CMatrix propagator(const Operator& h0, double t) {
  CMatrix u = CMatrix::Zero(h0.matrix().rows(), h0.matrix().cols());
  for (Eigen::Index i = 0; i < u.rows(); ++i) u(i, i) = std::polar(1.0, -h0.matrix()(i, i).real() * t);
  return u;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("bounce position") {
  const BounceTrajectory traj{1.0, 1.0, 0.0};
  CHECK(position(traj, 0.0) == 0.0);
  CHECK(position(traj, 1.0) == doctest::Approx(1.0));
  CHECK(position(traj, 1.5) == doctest::Approx(0.5));
  CHECK(position(traj, 2.0) == doctest::Approx(0.0));
  CHECK(position(traj, 3.25) == doctest::Approx(0.75));
  CHECK(traj.period() == 2.0);

  const BounceTrajectory fast{2.0, 3.0, 0.0};
  const double eps = 1e-4;
  for (double t = 0.0; t < 10.0; t += 0.0137) {
    const double x = position(fast, t);
    CHECK(x >= 0.0);
    CHECK(x <= 2.0);
    CHECK(std::abs(position(fast, t + eps) - x) <= 3.0 * eps * (1.0 + 1e-9));
  }
}

TEST_CASE("coupling values") {
  ModelParams p;
  p.g0 = 0.1;
  p.omega_d = 1.0;
  const BounceTrajectory traj = bounce_for(p);
  CHECK(traj.v == doctest::Approx(1.0 / std::numbers::pi));
  CHECK(coupling(p, traj, 0.0) == doctest::Approx(0.1));
  CHECK(coupling(p, traj, std::numbers::pi) == doctest::Approx(-0.1));
  CHECK(coupling(p, std::numbers::pi) == doctest::Approx(-0.1));
}

TEST_CASE("trajectory coupling equals the closed form") {
  for (double wd : {0.3, 1.0, 2.0, 2.7}) {
    ModelParams p;
    p.omega_d = wd;
    p.L = 1.7;
    const BounceTrajectory traj = bounce_for(p);
    double worst = 0.0, largest = 0.0;
    for (int k = 0; k <= 200000; ++k) {
      const double t = 1e-3 * k;
      const double g = coupling(p, traj, t);
      worst = std::max(worst, std::abs(g - p.g0 * std::cos(wd * t)));
      largest = std::max(largest, std::abs(g));
    }
    CHECK(worst < 1e-12);
    CHECK(largest <= p.g0 + 1e-15);
  }
}

TEST_CASE("parameter validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.delta() == 0.0);
  CHECK(p.k() * p.L == doctest::Approx(std::numbers::pi));
  p.g0 = -0.1;
  CHECK_THROWS_AS(p.validate(), ConfigInvalid);
  p = {};
  p.omega = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigInvalid);
  p = {};
  p.omega_d = std::nan("");
  CHECK_THROWS_AS(p.validate(), ConfigInvalid);

  CHECK(parse_variant("anti_rwa") == Variant::anti_rwa);
  CHECK_THROWS_AS(parse_variant("jc"), ConfigInvalid);

  ModelParams q;
  q.Omega = 1.4;
  q.variant = Variant::rwa;
  const ModelParams back = params_from_json(to_json(q));
  CHECK(back.Omega == 1.4);
  CHECK(back.variant == Variant::rwa);
  CHECK_THROWS_AS(params_from_json(nlohmann::json{{"omega_x", 1.0}}), ConfigInvalid);
}

TEST_CASE("hamiltonian matrix elements") {
  const HilbertSpace s(7);
  ModelParams p;
  p.g0 = 0.0;
  const Operator h0 = hamiltonian(p, bounce_for(p), 0.7, s);
  CHECK(element(h0, {0, 0}, {0, 0}).real() == doctest::Approx(-0.5));
  CHECK(element(h0, {1, 2}, {1, 2}).real() == doctest::Approx(2.5));

  p.g0 = 0.1;
  const double t = 0.4;
  const Operator h = hamiltonian(p, bounce_for(p), t, s);
  CHECK(std::abs(element(h, {1, 1}, {0, 0}) - coupling(p, t)) < 1e-14);
  const Operator h_t0 = hamiltonian(p, bounce_for(p), 0.0, s);
  CHECK(std::abs(element(h_t0, {0, 1}, {1, 0}) - 0.1) < 1e-14);
  CHECK(hermiticity_error(h.matrix()) < 1e-12);

  p.variant = Variant::rwa;
  CHECK_THROWS_AS(hamiltonian(p, bounce_for(p), 0.0, s), VariantMismatch);
}

TEST_CASE("interaction picture") {
  const HilbertSpace s(6);
  ModelParams p;
  p.g0 = 0.1;
  p.Omega = 1.3;
  p.omega_d = 0.8;

  const Operator hi0 = interaction_hamiltonian(p, 0.0, s);
  const CMatrix expected = 0.1 * coupling_operator(s, Variant::full).matrix();
  CHECK((hi0.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);

  const Operator h0 = free_hamiltonian(p, s);
  const CMatrix v = coupling_operator(s, Variant::full).matrix();
  for (double t : {0.37, 1.9, 12.5, 77.1}) {
    const CMatrix u = propagator(h0, t);
    const CMatrix rotated = u.adjoint() * (coupling(p, t) * v) * u;
    const Operator hi = interaction_hamiltonian(p, t, s);
    CHECK((hi.matrix() - rotated).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(hermiticity_error(hi.matrix()) < 1e-12);
  }

  p.variant = Variant::rwa;
  p.Omega = 1.0;
  p.omega_d = 0.0;
  CHECK(element(interaction_hamiltonian(p, 0.9, s), {1, 1}, {0, 0}) == Complex(0.0, 0.0));
  CHECK(std::abs(element(interaction_hamiltonian(p, 0.0, s), {1, 0}, {0, 1})) == doctest::Approx(0.1));
}

TEST_CASE("anti-rwa coefficient averages to g0/2 at omega_d = 2 omega") {
  const HilbertSpace s(3);
  ModelParams p;
  p.variant = Variant::anti_rwa;
  p.omega_d = 2.0;
  const double period = std::numbers::pi;
  const int n = 4000;
  Complex mean{0.0, 0.0};
  for (int k = 0; k < n; ++k) {
    const double t = period * (k + 0.5) / n;
    mean += element(interaction_hamiltonian(p, t, s), {1, 1}, {0, 0});
  }
  mean /= static_cast<double>(n);
  CHECK(std::abs(mean - Complex(p.g0 / 2.0, 0.0)) < 1e-6);
  // the rotating part is gone
  CHECK(element(interaction_hamiltonian(p, 0.3, s), {1, 0}, {0, 1}) == Complex(0.0, 0.0));
}

}
