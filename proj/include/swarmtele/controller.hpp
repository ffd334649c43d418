#pragma once

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "swarmtele/dynamics.hpp"
#include "swarmtele/graph.hpp"
#include "swarmtele/potential.hpp"

namespace swarmtele {

/// Step-1 heuristics of the gain design, applied uniformly to every robot.
struct DesignHeuristics {
  double rho = 0.5;    // target decay rate
  double sigma = 0.1;  // surface gain
  double eta = 0.5;
  double gamma = 0.5;
  double zeta = 0.5;
  double Gamma = 1.0;  // user-energy splitter
  double B = 1.0;      // coupling gain
};

/// Complete gain design. Robot 0 is the informed slave.
struct GainDesign {
  double rho = 0.5;
  double sigma = 0.1;
  Eigen::VectorXd eta;
  Eigen::VectorXd gamma;
  Eigen::VectorXd zeta;
  double Gamma = 1.0;
  Eigen::VectorXd B;
  Eigen::VectorXd D;
  double Delta = 0.0;  // energy headroom
  double f_bar = 0.0;  // user-force bound

  int n_robots() const { return static_cast<int>(B.size()); }
  /// B_i + sigma D_i.
  double coupling_denominator(int i) const { return B[i] + sigma * D[i]; }
};

/// How K_i(t) is produced. Only `dynamic` is the certified schedule; the
/// other two exist as negative controls.
enum class GainSchedule { dynamic, frozen, no_lambda };

struct ControlOutput {
  Eigen::VectorXd u;
  double K = 0.0;
  Eigen::VectorXd s;
  Eigen::VectorXd theta;
  double Lambda_sum = 0.0;
};

/// theta_i = sum over initial neighbours of grad_i psi. `positions` is dof x N.
Eigen::VectorXd theta(int i, const Eigen::MatrixXd& positions, const TreeNetwork& tree,
                      const PotentialParams<>& params);

/// Closed-form time derivative of theta_i.
Eigen::VectorXd theta_rate(int i, const Eigen::MatrixXd& positions, const Eigen::MatrixXd& velocities,
                           const TreeNetwork& tree, const PotentialParams<>& params);

/// s_i = xdot_i + sigma theta_i.
Eigen::VectorXd surface(const Eigen::VectorXd& xdot, const Eigen::VectorXd& theta_i, double sigma);

/// Per-edge mismatch gain Lambda_ij. `lambda_max` and `coriolis` are robot
/// i's inertia and Coriolis bound constants.
double lambda_ij(double dist_sq, double lambda_max, double coriolis, double eta, double gamma,
                 double zeta, const PotentialParams<>& params);

/// sum_j Lambda_ij over robot i's initial neighbours.
double lambda_sum(int i, const Eigen::MatrixXd& positions, const TreeNetwork& tree,
                  const GainDesign& design, const PotentialParams<>& params,
                  std::span<const RobotModel> models);

/// Gamma_i / (B_0 + sigma D_0)^2, non-zero only for the informed slave.
double informed_gain_term(int i, const GainDesign& design);

/// K_i(t) making Kbar_i(t) = rho lambda_i2 / 2 exactly.
double gain_K(int i, const Eigen::MatrixXd& positions, const TreeNetwork& tree,
              const GainDesign& design, const PotentialParams<>& params,
              std::span<const RobotModel> models, GainSchedule schedule = GainSchedule::dynamic);

/// Kbar_i = K - sigma sum_j Lambda_ij - Gamma_i/(B_0 + sigma D_0)^2.
double gain_margin(int i, double K, const Eigen::MatrixXd& positions, const TreeNetwork& tree,
                   const GainDesign& design, const PotentialParams<>& params,
                   std::span<const RobotModel> models);

/// u_i = -K_i s_i - D_i xdot_i - B_i theta_i. Reads only robot i's state and
/// its initial neighbours' positions. `gain` overrides the schedule.
ControlOutput control(int i, const Eigen::MatrixXd& positions, const Eigen::MatrixXd& velocities,
                      const TreeNetwork& tree, const GainDesign& design,
                      const PotentialParams<>& params, std::span<const RobotModel> models,
                      std::optional<double> gain = std::nullopt);

/// Delta_i = M_i(x_i) thetadot_i + C_i(x_i, xdot_i) theta_i.
Eigen::VectorXd mismatch_delta(int i, const Eigen::MatrixXd& positions,
                               const Eigen::MatrixXd& velocities, const TreeNetwork& tree,
                               const PotentialParams<>& params, const RobotModel& model);

/// Right-hand side of the bound on s_i^T Delta_i:
/// sum_j [Lambda_ij s^T s + 2(eta+gamma) |xdot_j|^2 + 2(eta+gamma+zeta) |xdot_i|^2].
double mismatch_bound(int i, const Eigen::MatrixXd& positions, const Eigen::MatrixXd& velocities,
                      const TreeNetwork& tree, const GainDesign& design,
                      const PotentialParams<>& params, std::span<const RobotModel> models);

}  // namespace swarmtele
