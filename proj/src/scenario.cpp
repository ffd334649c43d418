#include "swarmtele/scenario.hpp"

#include <string>

namespace swarmtele {

void check_initial_margin(const Scenario& scenario) {
  if (!(scenario.epsilon > 0.0 && scenario.epsilon < scenario.r)) {
    throw AssumptionViolated("initial margin requires 0 < epsilon < r (epsilon=" +
                             std::to_string(scenario.epsilon) +
                             ", r=" + std::to_string(scenario.r) + ")");
  }
  const double limit = scenario.r - scenario.epsilon;
  for (const Edge& e : scenario.tree.edges()) {
    const double d =
        (scenario.initial_positions.col(e.tail) - scenario.initial_positions.col(e.head)).norm();
    if (!(d < limit)) {
      throw AssumptionViolated("initial edge (" + std::to_string(e.tail + 1) + "," +
                               std::to_string(e.head + 1) + ") has length " + std::to_string(d) +
                               ", not below r - epsilon = " + std::to_string(limit));
    }
  }
}

void check_scenario_shape(const Scenario& scenario) {
  const int n = scenario.n_robots();
  if (n < 2) throw SchemaError("scenario needs a tree with at least 2 robots");
  if (static_cast<int>(scenario.models.size()) != n) {
    throw SchemaError("scenario has " + std::to_string(scenario.models.size()) +
                      " robot models for " + std::to_string(n) + " vertices");
  }
  const int dof = scenario.dof();
  for (int i = 0; i < n; ++i) {
    if (scenario.models[i].dof() != dof) {
      throw SchemaError("robot " + std::to_string(i + 1) + " has dof " +
                        std::to_string(scenario.models[i].dof()) + ", swarm uses " +
                        std::to_string(dof));
    }
  }
  if (scenario.initial_positions.cols() != n || scenario.initial_velocities.cols() != n ||
      scenario.initial_velocities.rows() != dof) {
    throw SchemaError("initial state must have one dof-vector per robot");
  }
  if (!scenario.initial_positions.allFinite() || !scenario.initial_velocities.allFinite()) {
    throw SchemaError("initial state must be finite");
  }
  if (!(scenario.r > 0.0)) throw SchemaError("r must be > 0");
  if (!(scenario.f_bar >= 0.0)) throw SchemaError("f_bar must be >= 0");
  if (!(scenario.dt > 0.0) || !(scenario.duration > 0.0)) {
    throw SchemaError("dt and duration must be > 0");
  }
  const ForceProfile& f = scenario.force;
  if (f.kind == ForceKind::step || f.kind == ForceKind::sinusoid) {
    if (f.direction.size() != dof) throw SchemaError("force direction must have dof entries");
    if (!(f.magnitude >= 0.0) || f.magnitude > scenario.f_bar) {
      throw SchemaError("scripted force magnitude must lie in [0, f_bar]");
    }
  }
  if (f.kind == ForceKind::bounded_random && !(f.hold > 0.0)) {
    throw SchemaError("bounded_random hold must be > 0");
  }
  if (!(scenario.negative_control.force_scale >= 0.0)) {
    throw SchemaError("negative_control.force_scale must be >= 0");
  }
}

const char* to_string(ForceKind kind) {
  switch (kind) {
    case ForceKind::zero: return "zero";
    case ForceKind::step: return "step";
    case ForceKind::sinusoid: return "sinusoid";
    case ForceKind::bounded_random: return "bounded_random";
    case ForceKind::live: return "live";
  }
  return "unknown";
}

const char* to_string(GainSchedule schedule) {
  switch (schedule) {
    case GainSchedule::dynamic: return "dynamic";
    case GainSchedule::frozen: return "frozen";
    case GainSchedule::no_lambda: return "no_lambda";
  }
  return "unknown";
}

}  // namespace swarmtele
