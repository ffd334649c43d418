#include "swarmtele/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "swarmtele/verifier.hpp"

namespace swarmtele {

Eigen::VectorXd clamp_force(const Eigen::VectorXd& force, double f_bar) {
  const double norm = force.norm();
  if (norm <= f_bar) return force;
  Eigen::VectorXd out = force * (f_bar / norm);
  // Rounding can leave the rescaled norm one ulp above f_bar.
  while (out.norm() > f_bar) out *= (1.0 - 1e-15);
  return out;
}

LiveForce::LiveForce(int dof, double f_bar) : force_(Eigen::VectorXd::Zero(dof)), f_bar_(f_bar) {}

Eigen::VectorXd LiveForce::apply(const Eigen::VectorXd& command, const std::string& client,
                                 std::uint64_t seq) {
  std::lock_guard lock(mutex_);
  if (command.size() != force_.size() || !command.allFinite()) return force_;
  auto it = last_seq_.find(client);
  if (it != last_seq_.end() && seq <= it->second) return force_;
  last_seq_[client] = seq;
  force_ = clamp_force(command, f_bar_);
  return force_;
}

Eigen::VectorXd LiveForce::snapshot() const {
  std::lock_guard lock(mutex_);
  return force_;
}

void LiveForce::reset() {
  std::lock_guard lock(mutex_);
  force_.setZero();
}

Eigen::VectorXd force_at(const ForceProfile& profile, double t, double f_bar, std::uint64_t seed,
                         int dof) {
  switch (profile.kind) {
    case ForceKind::zero:
    case ForceKind::live:
      return Eigen::VectorXd::Zero(dof);
    case ForceKind::step:
      if (t < profile.onset) return Eigen::VectorXd::Zero(dof);
      return clamp_force(profile.magnitude * profile.direction, f_bar);
    case ForceKind::sinusoid:
      return clamp_force(profile.magnitude *
                             std::sin(2.0 * std::numbers::pi * profile.frequency * t + profile.phase) *
                             profile.direction,
                         f_bar);
    case ForceKind::bounded_random: {
      const auto hold = static_cast<std::uint64_t>(std::floor(t / profile.hold));
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(hold), static_cast<std::uint32_t>(hold >> 32)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> normal;
      Eigen::VectorXd dir(dof);
      do {
        for (int k = 0; k < dof; ++k) dir[k] = normal(rng);
      } while (dir.norm() == 0.0);
      dir.normalize();
      const double magnitude = std::uniform_real_distribution<double>(0.0, f_bar)(rng);
      return clamp_force(magnitude * dir, f_bar);
    }
  }
  return Eigen::VectorXd::Zero(dof);
}

Simulator::Simulator(Scenario scenario, DesignResult design)
    : scenario_(std::move(scenario)), design_(std::move(design)) {
  check_scenario_shape(scenario_);
  check_initial_margin(scenario_);
  if (scenario_.negative_control.schedule == GainSchedule::frozen) {
    const SwarmState s0 = initial_state();
    for (int i = 0; i < scenario_.n_robots(); ++i) {
      frozen_gains_.push_back(gain_K(i, s0.x, scenario_.tree, design_.design, design_.params,
                                     scenario_.models));
    }
  }
}

SwarmState Simulator::initial_state() const {
  return {scenario_.initial_positions, scenario_.initial_velocities};
}

Eigen::VectorXd Simulator::applied_force(double t) const {
  if (live_) return live_->snapshot();
  return scenario_.negative_control.force_scale *
         force_at(scenario_.force, t, scenario_.f_bar, scenario_.seed, scenario_.dof());
}

Eigen::VectorXd Simulator::gains(const SwarmState& state) const {
  const int n = scenario_.n_robots();
  Eigen::VectorXd k(n);
  for (int i = 0; i < n; ++i) {
    k[i] = frozen_gains_.empty()
               ? gain_K(i, state.x, scenario_.tree, design_.design, design_.params,
                        scenario_.models, scenario_.negative_control.schedule)
               : frozen_gains_[i];
  }
  return k;
}

namespace {

void require_links(const SwarmState& state, const TreeNetwork& tree, double r) {
  for (const Edge& e : tree.edges()) {
    const double d = (state.x.col(e.tail) - state.x.col(e.head)).norm();
    if (!(d < r)) {
      std::ostringstream os;
      os << "edge (" << e.tail + 1 << "," << e.head + 1 << ") reached length " << d
         << " >= r = " << r;
      throw LinkBroken(os.str());
    }
  }
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> Simulator::derivative(const SwarmState& state,
                                                                  const Eigen::VectorXd& f) const {
  require_links(state, scenario_.tree, scenario_.r);
  const int n = scenario_.n_robots();
  Eigen::MatrixXd acc(state.x.rows(), n);
  const bool scheduled = scenario_.negative_control.schedule != GainSchedule::dynamic;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd total = Eigen::VectorXd::Zero(state.x.rows());
    if (!scenario_.negative_control.controller_disabled) {
      std::optional<double> gain;
      if (scheduled) {
        gain = frozen_gains_.empty()
                   ? gain_K(i, state.x, scenario_.tree, design_.design, design_.params,
                            scenario_.models, scenario_.negative_control.schedule)
                   : frozen_gains_[i];
      }
      total = control(i, state.x, state.xdot, scenario_.tree, design_.design, design_.params,
                      scenario_.models, gain)
                  .u;
    }
    if (i == 0) total += f;
    acc.col(i) = accel(scenario_.models[i], state.x.col(i), state.xdot.col(i), total);
  }
  return {state.xdot, acc};
}

SwarmState Simulator::step(const SwarmState& state, double t, double dt) const {
  const bool smooth = !live_ && scenario_.force.kind == ForceKind::sinusoid;
  const Eigen::VectorXd f0 = applied_force(t);
  auto force = [&](double tau) { return smooth ? applied_force(tau) : f0; };

  try {
    const auto [dx1, dv1] = derivative(state, f0);
    const SwarmState s2{state.x + 0.5 * dt * dx1, state.xdot + 0.5 * dt * dv1};
    const auto [dx2, dv2] = derivative(s2, force(t + 0.5 * dt));
    const SwarmState s3{state.x + 0.5 * dt * dx2, state.xdot + 0.5 * dt * dv2};
    const auto [dx3, dv3] = derivative(s3, force(t + 0.5 * dt));
    const SwarmState s4{state.x + dt * dx3, state.xdot + dt * dv3};
    const auto [dx4, dv4] = derivative(s4, force(t + dt));
    SwarmState next{state.x + (dt / 6.0) * (dx1 + 2.0 * dx2 + 2.0 * dx3 + dx4),
                    state.xdot + (dt / 6.0) * (dv1 + 2.0 * dv2 + 2.0 * dv3 + dv4)};
    if (!next.x.allFinite() || !next.xdot.allFinite()) {
      throw LinkBroken("integration produced a non-finite state");
    }
    return next;
  } catch (const OutOfDomain& e) {
    throw LinkBroken(e.what());
  }
}

TraceSample Simulator::sample(const SwarmState& state, double t) const {
  const int n = scenario_.n_robots();
  TraceSample s;
  s.t = t;
  s.x = state.x;
  s.xdot = state.xdot;
  s.K = gains(state);
  s.u = Eigen::MatrixXd::Zero(state.x.rows(), n);
  if (!scenario_.negative_control.controller_disabled) {
    for (int i = 0; i < n; ++i) {
      s.u.col(i) = control(i, state.x, state.xdot, scenario_.tree, design_.design, design_.params,
                           scenario_.models, s.K[i])
                       .u;
    }
  }
  s.f = applied_force(t);
  s.edge_dist.resize(scenario_.tree.n_edges());
  for (int k = 0; k < scenario_.tree.n_edges(); ++k) {
    const Edge& e = scenario_.tree.edge(k);
    s.edge_dist[k] = (state.x.col(e.tail) - state.x.col(e.head)).norm();
  }
  s.V_p = total_potential(state.x, scenario_.tree, design_.params);
  s.V = lyapunov_V(state, scenario_.tree, design_.design, design_.params, scenario_.models);
  return s;
}

SimTrace Simulator::run() const {
  SimTrace trace;
  trace.scenario = scenario_;
  trace.design = design_;
  const double dt = scenario_.dt;
  const auto steps = static_cast<long>(std::llround(scenario_.duration / dt));
  trace.samples.reserve(static_cast<std::size_t>(steps) + 1);

  SwarmState state = initial_state();
  trace.samples.push_back(sample(state, 0.0));
  for (long k = 1; k <= steps; ++k) {
    const double t_prev = static_cast<double>(k - 1) * dt;
    const double t = static_cast<double>(k) * dt;
    try {
      state = step(state, t_prev, dt);
      trace.samples.push_back(sample(state, t));
    } catch (const Error& e) {
      // LinkBroken from the integrator, or OutOfDomain when the completed
      // step lands outside the potential's domain.
      trace.link_broken = true;
      trace.broken_time = t;
      trace.failure = e.what();
      break;
    }
  }
  return trace;
}

SimTrace run(const Scenario& scenario) {
  return Simulator(scenario, design_gains(scenario)).run();
}

std::string scenario_fingerprint(const std::string& canonical) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace swarmtele
