#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "swarmtele/design.hpp"
#include "swarmtele/graph.hpp"
#include "swarmtele/scenario.hpp"

namespace swarmtele::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::Vector2d random_direction(Rng& rng) {
  const double a = uniform(rng, 0.0, 2.0 * 3.14159265358979323846);
  return {std::cos(a), std::sin(a)};
}

/// Random recursive tree: vertex k attaches to a uniform earlier vertex.
inline TreeNetwork random_tree(int n, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int k = 2; k <= n; ++k) {
    edges.emplace_back(std::uniform_int_distribution<int>(1, k - 1)(rng), k);
  }
  return build_tree(n, edges);
}

/// Positions with every tree edge shorter than `max_len`, grown outward
/// from robot 0 (dof 2).
inline Eigen::MatrixXd positions_within(const TreeNetwork& tree, double max_len, Rng& rng) {
  const int n = tree.n_vertices();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, n);
  x.col(0) = Eigen::Vector2d(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5));
  std::vector<bool> placed(n, false);
  placed[0] = true;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j : tree.neighbors(i)) {
      if (placed[j]) continue;
      x.col(j) = x.col(i) + uniform(rng, 0.0, max_len) * random_direction(rng);
      placed[j] = true;
      stack.push_back(j);
    }
  }
  return x;
}

inline RobotModel random_model(Rng& rng, bool two_link) {
  if (two_link) {
    return RobotModel::two_link(uniform(rng, 0.5, 1.5), uniform(rng, 0.5, 1.5),
                                uniform(rng, 0.5, 1.0), uniform(rng, 0.5, 1.0));
  }
  return RobotModel::point_mass(uniform(rng, 0.5, 2.0));
}

/// Seeded random scenario: mixed point-mass / two-link robots, an
/// initial-margin compliant start and a bounded-random user force.
/// epsilon = r/2 keeps Q large enough that the dynamic gains stay within
/// RK4's stability region at dt = 1e-3 (smaller epsilon shrinks Q and K
/// grows like 1/(r^2 - d^2 + Q)^6).
inline Scenario random_scenario(std::uint64_t seed, bool path, int n = 5, double duration = 30.0) {
  Rng rng(seed);
  Scenario s;
  s.name = (path ? "random_path_" : "random_tree_") + std::to_string(seed);
  s.tree = path ? make_path(n) : random_tree(n, rng);
  for (int i = 0; i < n; ++i) s.models.push_back(random_model(rng, i % 2 == 1));
  s.r = 1.0;
  s.epsilon = 0.5;
  s.initial_positions = positions_within(s.tree, 0.95 * (s.r - s.epsilon), rng);
  s.initial_velocities = Eigen::MatrixXd::NullaryExpr(2, n, [&] { return uniform(rng, -0.2, 0.2); });
  s.f_bar = uniform(rng, 0.2, 1.0);
  s.force.kind = ForceKind::bounded_random;
  s.seed = seed;
  s.dt = 1e-3;
  s.duration = duration;
  return s;
}

}  // namespace swarmtele::testing
