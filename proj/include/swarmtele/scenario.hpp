#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swarmtele/controller.hpp"
#include "swarmtele/dynamics.hpp"
#include "swarmtele/graph.hpp"

namespace swarmtele {

enum class ForceKind { zero, step, sinusoid, bounded_random, live };

/// User force applied to the informed slave.
///  - step: magnitude * direction for t >= onset, zero before.
///  - sinusoid: magnitude * sin(2 pi frequency t + phase) * direction.
///  - bounded_random: piecewise constant over `hold` seconds, direction
///    uniform, magnitude uniform in [0, f_bar], seeded.
///  - live: zero-order hold of the latest operator command.
struct ForceProfile {
  ForceKind kind = ForceKind::zero;
  Eigen::VectorXd direction;  // unit vector (normalised on load)
  double magnitude = 0.0;
  double onset = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
  double hold = 0.25;
};

/// Deliberate invalidations used to show the certificates can fail.
struct NegativeControl {
  GainSchedule schedule = GainSchedule::dynamic;
  double force_scale = 1.0;
  bool controller_disabled = false;

  bool active() const {
    return schedule != GainSchedule::dynamic || force_scale != 1.0 || controller_disabled;
  }
};

struct Scenario {
  std::string name;
  TreeNetwork tree;
  std::vector<RobotModel> models;
  Eigen::MatrixXd initial_positions;   // dof x N
  Eigen::MatrixXd initial_velocities;  // dof x N
  double r = 1.0;
  double epsilon = 0.1;
  double f_bar = 1.0;
  ForceProfile force;
  double dt = 1e-3;
  double duration = 10.0;
  std::uint64_t seed = 0;
  DesignHeuristics heuristics;
  NegativeControl negative_control;

  int n_robots() const { return tree.n_vertices(); }
  int dof() const { return static_cast<int>(initial_positions.rows()); }
};

/// Initial edges strictly shorter than r - epsilon (and 0 < epsilon < r).
/// Throws AssumptionViolated with the offending edge.
void check_initial_margin(const Scenario& scenario);

/// Structural consistency: model count, matrix shapes, dof agreement,
/// positive dt/duration, scripted forces bounded by f_bar. Throws SchemaError.
void check_scenario_shape(const Scenario& scenario);

const char* to_string(ForceKind kind);
const char* to_string(GainSchedule schedule);

}  // namespace swarmtele
