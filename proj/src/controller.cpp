#include "swarmtele/controller.hpp"

#include <cmath>

namespace swarmtele {

Eigen::VectorXd theta(int i, const Eigen::MatrixXd& positions, const TreeNetwork& tree,
                      const PotentialParams<>& params) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(positions.rows());
  for (int j : tree.neighbors(i)) out += grad_psi(positions.col(i), positions.col(j), params);
  return out;
}

Eigen::VectorXd theta_rate(int i, const Eigen::MatrixXd& positions, const Eigen::MatrixXd& velocities,
                           const TreeNetwork& tree, const PotentialParams<>& params) {
  const double r2 = params.r * params.r;
  const double scale = 2.0 * params.P * (r2 + params.Q);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(positions.rows());
  for (int j : tree.neighbors(i)) {
    const Eigen::VectorXd x_ij = positions.col(i) - positions.col(j);
    const Eigen::VectorXd v_ij = velocities.col(i) - velocities.col(j);
    const double d2 = x_ij.squaredNorm();
    if (!(d2 < r2)) throw OutOfDomain("theta_rate: edge length at or beyond r");
    const double den = r2 - d2 + params.Q;
    out += (4.0 * scale * x_ij.dot(v_ij) / (den * den * den)) * x_ij + (scale / (den * den)) * v_ij;
  }
  return out;
}

Eigen::VectorXd surface(const Eigen::VectorXd& xdot, const Eigen::VectorXd& theta_i, double sigma) {
  return xdot + sigma * theta_i;
}

double lambda_ij(double dist_sq, double lambda_max, double coriolis, double eta, double gamma,
                 double zeta, const PotentialParams<>& params) {
  const double r2 = params.r * params.r;
  if (!(dist_sq >= 0.0 && dist_sq < r2)) throw OutOfDomain("lambda_ij: edge length at or beyond r");
  const double den = r2 - dist_sq + params.Q;
  const double den2 = den * den;
  const double den4 = den2 * den2;
  const double a = params.P * params.P * (r2 + params.Q) * (r2 + params.Q);
  const double l2 = lambda_max * lambda_max;
  return 16.0 * l2 * a * dist_sq * dist_sq / (eta * den4 * den2) + l2 * a / (gamma * den4) +
         coriolis * coriolis * a * dist_sq / (2.0 * zeta * den4);
}

double lambda_sum(int i, const Eigen::MatrixXd& positions, const TreeNetwork& tree,
                  const GainDesign& design, const PotentialParams<>& params,
                  std::span<const RobotModel> models) {
  const InertiaBounds& b = models[i].bounds();
  double sum = 0.0;
  for (int j : tree.neighbors(i)) {
    sum += lambda_ij((positions.col(i) - positions.col(j)).squaredNorm(), b.lambda_max, b.coriolis,
                     design.eta[i], design.gamma[i], design.zeta[i], params);
  }
  return sum;
}

double informed_gain_term(int i, const GainDesign& design) {
  if (i != 0) return 0.0;
  const double den = design.coupling_denominator(0);
  return design.Gamma / (den * den);
}

double gain_K(int i, const Eigen::MatrixXd& positions, const TreeNetwork& tree,
              const GainDesign& design, const PotentialParams<>& params,
              std::span<const RobotModel> models, GainSchedule schedule) {
  const double floor = 0.5 * design.rho * models[i].bounds().lambda_max + informed_gain_term(i, design);
  if (schedule == GainSchedule::no_lambda) return floor;
  return floor + design.sigma * lambda_sum(i, positions, tree, design, params, models);
}

double gain_margin(int i, double K, const Eigen::MatrixXd& positions, const TreeNetwork& tree,
                   const GainDesign& design, const PotentialParams<>& params,
                   std::span<const RobotModel> models) {
  return K - design.sigma * lambda_sum(i, positions, tree, design, params, models) -
         informed_gain_term(i, design);
}

ControlOutput control(int i, const Eigen::MatrixXd& positions, const Eigen::MatrixXd& velocities,
                      const TreeNetwork& tree, const GainDesign& design,
                      const PotentialParams<>& params, std::span<const RobotModel> models,
                      std::optional<double> gain) {
  ControlOutput out;
  out.Lambda_sum = lambda_sum(i, positions, tree, design, params, models);
  out.K = gain ? *gain
               : 0.5 * design.rho * models[i].bounds().lambda_max + design.sigma * out.Lambda_sum +
                     informed_gain_term(i, design);
  out.theta = theta(i, positions, tree, params);
  out.s = surface(velocities.col(i), out.theta, design.sigma);
  out.u = -out.K * out.s - design.D[i] * velocities.col(i) - design.B[i] * out.theta;
  return out;
}

Eigen::VectorXd mismatch_delta(int i, const Eigen::MatrixXd& positions,
                               const Eigen::MatrixXd& velocities, const TreeNetwork& tree,
                               const PotentialParams<>& params, const RobotModel& model) {
  const Eigen::VectorXd x = positions.col(i);
  const Eigen::VectorXd v = velocities.col(i);
  return mass_matrix(model, x) * theta_rate(i, positions, velocities, tree, params) +
         coriolis_matrix(model, x, v) * theta(i, positions, tree, params);
}

double mismatch_bound(int i, const Eigen::MatrixXd& positions, const Eigen::MatrixXd& velocities,
                      const TreeNetwork& tree, const GainDesign& design,
                      const PotentialParams<>& params, std::span<const RobotModel> models) {
  const Eigen::VectorXd s =
      surface(velocities.col(i), theta(i, positions, tree, params), design.sigma);
  const double ss = s.squaredNorm();
  const double vi = velocities.col(i).squaredNorm();
  const InertiaBounds& b = models[i].bounds();
  double bound = 0.0;
  for (int j : tree.neighbors(i)) {
    const double d2 = (positions.col(i) - positions.col(j)).squaredNorm();
    bound += lambda_ij(d2, b.lambda_max, b.coriolis, design.eta[i], design.gamma[i], design.zeta[i],
                       params) * ss +
             2.0 * (design.eta[i] + design.gamma[i]) * velocities.col(j).squaredNorm() +
             2.0 * (design.eta[i] + design.gamma[i] + design.zeta[i]) * vi;
  }
  return bound;
}

}  // namespace swarmtele
