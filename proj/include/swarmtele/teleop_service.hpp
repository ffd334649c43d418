#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "swarmtele/design.hpp"
#include "swarmtele/scenario.hpp"
#include "swarmtele/simulator.hpp"

namespace swarmtele {

/// Snapshot streamed to operators.
struct StateFrame {
  std::uint64_t seq = 0;
  double t = 0.0;
  Eigen::MatrixXd x;     // dof x N
  Eigen::MatrixXd xdot;  // dof x N
  Eigen::VectorXd edge_dist;
  Eigen::VectorXd stress;  // psi(d)/psi_max per edge
  Eigen::VectorXd f;
  Eigen::VectorXd K;
  double V = 0.0;
  double V_p = 0.0;
  bool paused = false;
  std::string status = "running";  // running | paused | link_broken
};

struct ForceCommand {
  double fx = 0.0;
  double fy = 0.0;
  std::string client;
  std::uint64_t seq = 0;
};

nlohmann::json frame_to_json(const StateFrame& frame, const TreeNetwork& tree);

/// Live simulation owned by one integration loop. The loop either runs on
/// its own thread against the wall clock (start/stop) or is driven
/// explicitly with advance() for deterministic tests.
class LiveSession {
 public:
  /// Forces the live force profile and runs the gain design. Only planar
  /// swarms (dof 2) can be commanded.
  explicit LiveSession(Scenario scenario);
  ~LiveSession();

  LiveSession(const LiveSession&) = delete;
  LiveSession& operator=(const LiveSession&) = delete;

  /// Integrates `seconds` of simulated time (rounded to whole steps) unless
  /// paused or broken. Returns the resulting frame.
  StateFrame advance(double seconds);
  StateFrame frame() const;

  /// Clamps to f_bar and installs the command; stale sequence numbers are
  /// ignored. Returns the force in effect.
  Eigen::Vector2d apply_command(const ForceCommand& cmd);

  /// pause | resume | reset. Returns the resulting status; throws
  /// SchemaError on an unknown action.
  std::string control(const std::string& action);

  const Scenario& scenario() const { return scenario_; }
  DesignResult design() const;
  nlohmann::json summary() const;
  double f_bar() const { return scenario_.f_bar; }

  /// Real-time loop on a background thread.
  void start();
  void stop();

 private:
  StateFrame make_frame_locked() const;
  void loop();

  Scenario scenario_;
  std::shared_ptr<LiveForce> live_;
  mutable std::mutex mutex_;
  std::unique_ptr<Simulator> sim_;
  SwarmState state_;
  double t_ = 0.0;
  mutable std::uint64_t frame_seq_ = 0;
  bool paused_ = false;
  bool broken_ = false;
  std::string failure_;

  std::thread thread_;
  std::atomic<bool> running_{false};
};

/// WebSocket (/ws) and HTTP (GET /scenario) front end over a LiveSession.
class TeleopServer {
 public:
  TeleopServer(std::shared_ptr<LiveSession> session, std::string address, unsigned short port,
               double frame_rate = 30.0);
  ~TeleopServer();

  /// Binds and starts serving and publishing. Port 0 picks a free port.
  void start();
  void stop();
  unsigned short port() const;
  std::size_t subscriber_count() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace swarmtele
