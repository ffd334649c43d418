#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swarmtele/design.hpp"
#include "swarmtele/scenario.hpp"
#include "swarmtele/trace.hpp"

namespace swarmtele {

/// Single-writer mailbox holding the operator's latest force. Commands are
/// clamped to |f| <= f_bar; stale sequence numbers are ignored.
class LiveForce {
 public:
  LiveForce(int dof, double f_bar);

  /// Installs the command unless `seq` is not newer than the last one
  /// accepted from the same client, or the command is malformed. Returns the
  /// force in effect afterwards.
  Eigen::VectorXd apply(const Eigen::VectorXd& command, const std::string& client,
                        std::uint64_t seq);
  Eigen::VectorXd snapshot() const;
  void reset();
  double f_bar() const { return f_bar_; }

 private:
  mutable std::mutex mutex_;
  Eigen::VectorXd force_;
  double f_bar_;
  std::map<std::string, std::uint64_t> last_seq_;
};

/// Clamps a force to the ball of radius f_bar.
Eigen::VectorXd clamp_force(const Eigen::VectorXd& force, double f_bar);

/// Profile value at time t. Never exceeds f_bar in norm for scripted
/// profiles; live profiles return zero (the simulator reads its mailbox).
Eigen::VectorXd force_at(const ForceProfile& profile, double t, double f_bar, std::uint64_t seed,
                         int dof);

/// Deterministic fixed-step RK4 integration of the closed loop.
class Simulator {
 public:
  /// Validates the scenario shape and initial margin (AssumptionViolated).
  Simulator(Scenario scenario, DesignResult design);

  const Scenario& scenario() const { return scenario_; }
  const DesignResult& design() const { return design_; }
  SwarmState initial_state() const;

  void set_live_force(std::shared_ptr<LiveForce> live) { live_ = std::move(live); }

  /// User force applied at time t (profile times force_scale, or the live
  /// mailbox snapshot).
  Eigen::VectorXd applied_force(double t) const;

  /// Gains per robot at a state under the scenario's gain schedule.
  Eigen::VectorXd gains(const SwarmState& state) const;

  /// Closed-loop state derivative (velocities, accelerations) under force f.
  /// Throws LinkBroken if an edge has left the potential's domain.
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> derivative(const SwarmState& state,
                                                         const Eigen::VectorXd& f) const;

  /// One classical RK4 step. Controls and gains are re-evaluated at every
  /// stage.
  SwarmState step(const SwarmState& state, double t, double dt) const;

  /// Logged quantities at a state.
  TraceSample sample(const SwarmState& state, double t) const;

  /// Integrates for the scenario duration. Stops early on LinkBroken and
  /// flags the trace.
  SimTrace run() const;

 private:
  Scenario scenario_;
  DesignResult design_;
  std::vector<double> frozen_gains_;
  std::shared_ptr<LiveForce> live_;
};

/// design_gains followed by Simulator::run.
SimTrace run(const Scenario& scenario);

/// FNV-1a hash of a canonical scenario description, hex encoded.
std::string scenario_fingerprint(const std::string& canonical);

}  // namespace swarmtele
