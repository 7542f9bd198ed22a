#include <cmath>
#include <sstream>

#include "doctest.h"
#include "qdce/dyson.hpp"
#include "qdce/errors.hpp"

using namespace qdce;

namespace {

const TimeGrid kLong{200.0, 1e-3, 100};
const TimeGrid kShort{10.0, 1e-3, 10};

DysonStack stack_for(const ModelParams& p, int order, const TimeGrid& grid) {
  const HilbertSpace s(p.fock_cutoff);
  return dyson_corrections(p, s, StateVector::basis(s, {0, 0}), order, grid);
}

}  // namespace

TEST_SUITE("dyson") {

TEST_CASE("corrections do not depend on g0") {
  ModelParams a;
  a.g0 = 0.02;
  ModelParams b = a;
  b.g0 = 0.3;
  const auto sa = stack_for(a, 3, kShort);
  const auto sb = stack_for(b, 3, kShort);
  for (int n = 0; n <= 3; ++n) {
    for (std::size_t k = 0; k < sa.correction(n).size(); ++k) {
      CHECK((sa.correction(n).samples[k].amplitudes() - sb.correction(n).samples[k].amplitudes()).norm() == 0.0);
    }
  }
}

TEST_CASE("hierarchy initial values and selection rules") {
  const auto stack = stack_for(ModelParams{}, 2, kShort);
  const HilbertSpace& s = stack.space;
  for (const auto& psi : stack.correction(0).samples) CHECK(psi.amplitude({0, 0}) == Complex(1.0, 0.0));
  CHECK(stack.correction(1).samples.front().amplitudes().norm() == 0.0);
  CHECK(stack.correction(2).samples.front().amplitudes().norm() == 0.0);

  // first order reaches |e,1> only; sigma_x (a^dag + a) cannot leave the photon number unchanged
  double e1 = 0.0;
  for (const auto& psi : stack.correction(1).samples) {
    e1 = std::max(e1, std::abs(psi.amplitude({1, 1})));
    for (int q = 0; q < 2; ++q) {
      for (int n = 0; n <= s.fock_cutoff(); ++n) {
        if (q == 1 && n == 1) continue;
        CHECK(psi.amplitude({q, n}) == Complex(0.0, 0.0));
      }
    }
  }
  CHECK(e1 > 0.1);

  // second order lives on the ground qubit with even photon numbers
  for (const auto& psi : stack.correction(2).samples) {
    for (int n = 0; n <= s.fock_cutoff(); ++n) {
      CHECK(psi.amplitude({1, n}) == Complex(0.0, 0.0));
      if (n % 2 == 1) CHECK(psi.amplitude({0, n}) == Complex(0.0, 0.0));
    }
  }
}

TEST_CASE("order range") {
  const HilbertSpace s(3);
  const auto psi = StateVector::basis(s, {0, 0});
  CHECK_THROWS_AS(dyson_corrections(ModelParams{}, s, psi, 0, kShort), OrderOutOfRange);
  CHECK_THROWS_AS(dyson_corrections(ModelParams{}, s, psi, 4, kShort), OrderOutOfRange);
  ModelParams p;
  p.fock_cutoff = 3;
  const auto stack = dyson_corrections(p, s, psi, 1, kShort);
  CHECK_THROWS_AS(secular_fit(stack, {0, 2}, 2), OrderOutOfRange);
}

TEST_CASE("resonant secular structure") {
  const auto stack = stack_for(ModelParams{}, 3, kLong);
  const auto g2 = secular_fit(stack, {0, 2}, 2);
  CHECK(g2.classification == SecularClass::secular);
  CHECK(std::abs(g2.slope) == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(0.01));
  CHECK(secular_fit(stack, {0, 0}, 2).classification == SecularClass::secular);
  CHECK(secular_fit(stack, {1, 1}, 1).classification == SecularClass::bounded);

  for (const auto& r : secular_table(stack)) {
    const bool secular = r.classification == SecularClass::secular;
    if (r.order <= 2) {
      const bool expected = r.order == 2 && r.label.qubit == 0 && (r.label.photons == 0 || r.label.photons == 2);
      CHECK_MESSAGE(secular == expected, to_string(r.label), " order ", r.order);
    }
    if (r.label.qubit == 1) CHECK_MESSAGE(!secular, to_string(r.label), " order ", r.order);
  }

  std::ostringstream os;
  write_secular_csv(os, secular_table(stack));
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "qubit,photons,order,slope_re,slope_im,residual,class");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 3 * 2 * 8);
}

TEST_CASE("detuning keeps the two-photon resonance") {
  const auto rows = detuning_scan(ModelParams{}, {-0.5, 0.0, 0.5}, 2, kLong);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row.classification == SecularClass::secular);
    CHECK(row.Omega == doctest::Approx(1.0 + row.delta));
  }
  CHECK(rows[1].slope_abs == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(0.01));
}

TEST_CASE("off-resonant driving is bounded") {
  ModelParams p;
  p.omega_d = 1.3;
  const auto stack = stack_for(p, 2, kLong);
  CHECK(secular_fit(stack, {0, 2}, 2).classification == SecularClass::bounded);
}

TEST_CASE("reconstruction") {
  ModelParams p;
  p.fock_cutoff = 7;
  const HilbertSpace s(7);
  const auto psi0 = StateVector::basis(s, {0, 0});
  const auto stack = dyson_corrections(p, s, psi0, 3, kShort);

  ModelParams free = p;
  free.g0 = 0.0;
  const auto zero = reconstruct_and_compare(stack, 0.0, evolve_schrodinger(free, s, psi0, kShort));
  for (double r : zero.samples) CHECK(r < 1e-10);

  // halving g0 shrinks the order-3 remainder by about 2^4
  double worst[2];
  int i = 0;
  for (double g0 : {0.08, 0.04}) {
    ModelParams q = p;
    q.g0 = g0;
    const auto res = reconstruct_and_compare(stack, g0, evolve_schrodinger(q, s, psi0, kShort));
    worst[i] = 0.0;
    for (double r : res.samples) worst[i] = std::max(worst[i], r);
    ++i;
  }
  CHECK(worst[0] / worst[1] == doctest::Approx(16.0).epsilon(0.2));

  ModelParams q = p;
  q.g0 = 0.1;
  const auto res = reconstruct_and_compare(stack, 0.1, evolve_schrodinger(q, s, psi0, kShort));
  for (double r : res.samples) CHECK(r < 1e-2);

  CHECK_THROWS_AS(reconstruct_and_compare(stack, 0.1, evolve_schrodinger(q, s, psi0, TimeGrid{5.0, 1e-3, 10})),
                  DimensionMismatch);
}

}
