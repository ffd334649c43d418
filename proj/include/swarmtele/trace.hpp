#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swarmtele/design.hpp"
#include "swarmtele/scenario.hpp"

namespace swarmtele {

struct SwarmState {
  Eigen::MatrixXd x;     // dof x N
  Eigen::MatrixXd xdot;  // dof x N
};

/// One row of the trace: state and logged closed-loop quantities at time t.
struct TraceSample {
  double t = 0.0;
  Eigen::MatrixXd x;          // dof x N
  Eigen::MatrixXd xdot;       // dof x N
  Eigen::MatrixXd u;          // dof x N
  Eigen::VectorXd K;          // N
  Eigen::VectorXd f;          // dof, applied to robot 0
  Eigen::VectorXd edge_dist;  // N-1, tree edge order
  double V_p = 0.0;
  double V = 0.0;
};

struct SimTrace {
  Scenario scenario;
  DesignResult design;
  std::vector<TraceSample> samples;
  bool link_broken = false;
  double broken_time = std::numeric_limits<double>::quiet_NaN();
  std::string failure;
  std::string scenario_hash;

  bool zero_force() const;
};

}  // namespace swarmtele
