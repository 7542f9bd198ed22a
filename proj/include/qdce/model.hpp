#pragma once

#include <numbers>
#include <string>
#include <string_view>

#include "json.hpp"
#include "qdce/qspace.hpp"

namespace qdce {

// Which parts of the qubit-mode coupling are kept.
//   full      sigma_x (a^dag + a)
//   rwa       sigma+ a + sigma- a^dag          (Jaynes-Cummings)
//   anti_rwa  sigma+ a^dag + sigma- a          (counter-rotating only)
enum class Variant { full, rwa, anti_rwa };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);  // throws ConfigInvalid

// Frequencies in units of the mode frequency, time in units of 1/omega.
struct ModelParams {
  double omega = 1.0;    // mode
  double Omega = 1.0;    // qubit
  double omega_d = 1.0;  // driving
  double g0 = 0.1;
  double L = 1.0;
  Variant variant = Variant::full;
  int fock_cutoff = 7;

  double delta() const { return Omega - omega; }
  double k() const { return std::numbers::pi / L; }

  // Throws ConfigInvalid when omega <= 0, g0 < 0, omega_d < 0, L <= 0 or any
  // value is non-finite.
  void validate() const;
};

nlohmann::json to_json(const ModelParams& p);
// Missing keys keep their defaults; unknown keys are rejected.
ModelParams params_from_json(const nlohmann::json& j);

// Constant-speed motion between the walls at 0 and L, reflected at each wall.
struct BounceTrajectory {
  double L = 1.0;
  double v = 0.0;
  double x0 = 0.0;

  double period() const { return 2.0 * L / v; }
};

// Trajectory whose coupling oscillates at params.omega_d: v = omega_d L / pi.
BounceTrajectory bounce_for(const ModelParams& params);

double position(const BounceTrajectory& traj, double t);

// g0 cos(k x(t)) composed through the trajectory.
double coupling(const ModelParams& params, const BounceTrajectory& traj, double t);

// g0 cos(omega_d t); equal to the trajectory form for bounce_for(params).
double coupling(const ModelParams& params, double t);

// H0 = Omega S_z + omega a^dag a
Operator free_hamiltonian(const ModelParams& params, const HilbertSpace& space);

// Coupling operator multiplying g(t) for the given variant.
Operator coupling_operator(const HilbertSpace& space, Variant variant);

// H0 + g(t) sigma_x (a^dag + a). Throws VariantMismatch unless variant == full.
Operator hamiltonian(const ModelParams& params, const BounceTrajectory& traj, double t,
                     const HilbertSpace& space);

// g(t) (sigma+ e^{i Omega t} + sigma- e^{-i Omega t})(a^dag e^{i omega t} + a e^{-i omega t}),
// restricted to the terms kept by params.variant.
Operator interaction_hamiltonian(const ModelParams& params, double t, const HilbertSpace& space);

}  // namespace qdce
