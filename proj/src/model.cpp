#include "qdce/model.hpp"

#include <cmath>
#include <set>

#include "qdce/errors.hpp"

namespace qdce {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::rwa: return "rwa";
    case Variant::anti_rwa: return "anti_rwa";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "full") return Variant::full;
  if (name == "rwa") return Variant::rwa;
  if (name == "anti_rwa") return Variant::anti_rwa;
  throw ConfigInvalid("unknown variant '" + std::string(name) + "' (full, rwa, anti_rwa)");
}

void ModelParams::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(omega) || !finite(Omega) || !finite(omega_d) || !finite(g0) || !finite(L)) {
    throw ConfigInvalid("model parameters must be finite");
  }
  if (omega <= 0.0) throw ConfigInvalid("omega must be > 0");
  if (g0 < 0.0) throw ConfigInvalid("g0 must be >= 0");
  if (omega_d < 0.0) throw ConfigInvalid("omega_d must be >= 0");
  if (L <= 0.0) throw ConfigInvalid("L must be > 0");
  if (fock_cutoff < 1) throw ConfigInvalid("fock_cutoff must be >= 1");
}

nlohmann::json to_json(const ModelParams& p) {
  return {{"omega", p.omega}, {"Omega", p.Omega},       {"omega_d", p.omega_d},
          {"g0", p.g0},       {"L", p.L},               {"variant", std::string(to_string(p.variant))},
          {"fock_cutoff", p.fock_cutoff}};
}

ModelParams params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigInvalid("model parameters must be a JSON object");
  static const std::set<std::string> known{"omega", "Omega", "omega_d", "g0",
                                           "L",     "variant", "fock_cutoff"};
  ModelParams p;
  try {
    for (const auto& [key, value] : j.items()) {
      if (!known.contains(key)) throw ConfigInvalid("unknown model parameter '" + key + "'");
      if (key == "omega") p.omega = value.get<double>();
      else if (key == "Omega") p.Omega = value.get<double>();
      else if (key == "omega_d") p.omega_d = value.get<double>();
      else if (key == "g0") p.g0 = value.get<double>();
      else if (key == "L") p.L = value.get<double>();
      else if (key == "variant") p.variant = parse_variant(value.get<std::string>());
      else if (key == "fock_cutoff") p.fock_cutoff = value.get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalid(std::string("bad model parameter value: ") + e.what());
  }
  p.validate();
  return p;
}

BounceTrajectory bounce_for(const ModelParams& params) {
  return BounceTrajectory{params.L, params.omega_d * params.L / std::numbers::pi, 0.0};
}

double position(const BounceTrajectory& traj, double t) {
  if (traj.v == 0.0) return traj.x0;
  // Unfold onto a line of period 2L, then reflect the return leg.
  const double span = 2.0 * traj.L;
  double s = std::fmod(traj.x0 + traj.v * t, span);
  if (s < 0.0) s += span;
  return s <= traj.L ? s : span - s;
}

double coupling(const ModelParams& params, const BounceTrajectory& traj, double t) {
  return params.g0 * std::cos(params.k() * position(traj, t));
}

double coupling(const ModelParams& params, double t) {
  return params.g0 * std::cos(params.omega_d * t);
}

Operator free_hamiltonian(const ModelParams& params, const HilbertSpace& space) {
  return params.Omega * build_operator(space, OperatorKind::s_z) +
         params.omega * build_operator(space, OperatorKind::number);
}

Operator coupling_operator(const HilbertSpace& space, Variant variant) {
  const Operator sp = build_operator(space, OperatorKind::sigma_plus);
  const Operator sm = build_operator(space, OperatorKind::sigma_minus);
  const Operator a = build_operator(space, OperatorKind::a);
  const Operator ad = build_operator(space, OperatorKind::a_dag);
  CMatrix m;
  switch (variant) {
    case Variant::full:
      m = (build_operator(space, OperatorKind::sigma_x) * (ad + a)).matrix();
      break;
    case Variant::rwa:
      m = (sp * a + sm * ad).matrix();
      break;
    case Variant::anti_rwa:
      m = (sp * ad + sm * a).matrix();
      break;
  }
  return Operator(space, std::move(m), true);
}

Operator hamiltonian(const ModelParams& params, const BounceTrajectory& traj, double t,
                     const HilbertSpace& space) {
  if (params.variant != Variant::full) {
    throw VariantMismatch("hamiltonian() builds the full model; got variant " +
                          std::string(to_string(params.variant)));
  }
  return free_hamiltonian(params, space) +
         coupling(params, traj, t) * coupling_operator(space, Variant::full);
}

Operator interaction_hamiltonian(const ModelParams& params, double t, const HilbertSpace& space) {
  using namespace std::complex_literals;
  const Complex qubit_phase = std::exp(1i * (params.Omega * t));
  const Complex field_phase = std::exp(1i * (params.omega * t));
  const CMatrix sp = build_operator(space, OperatorKind::sigma_plus).matrix();
  const CMatrix sm = build_operator(space, OperatorKind::sigma_minus).matrix();
  const CMatrix a = build_operator(space, OperatorKind::a).matrix();
  const CMatrix ad = build_operator(space, OperatorKind::a_dag).matrix();

  const bool keep_rotating = params.variant != Variant::anti_rwa;
  const bool keep_counter = params.variant != Variant::rwa;

  CMatrix m = CMatrix::Zero(space.total_dim(), space.total_dim());
  if (keep_counter) {
    m += (qubit_phase * field_phase) * (sp * ad);
    m += std::conj(qubit_phase * field_phase) * (sm * a);
  }
  if (keep_rotating) {
    m += (qubit_phase * std::conj(field_phase)) * (sp * a);
    m += (std::conj(qubit_phase) * field_phase) * (sm * ad);
  }
  m *= coupling(params, t);
  return Operator(space, std::move(m), true);
}

}  // namespace qdce
