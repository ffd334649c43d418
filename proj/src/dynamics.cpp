#include "swarmtele/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace swarmtele {

RobotModel RobotModel::point_mass(double mass, int dof) {
  if (!(mass > 0.0) || dof < 1) throw Error("point_mass: mass must be > 0 and dof >= 1");
  RobotModel model(PointMass{mass, dof});
  model.bounds_ = certify_bounds(model, 1000);
  return model;
}

RobotModel RobotModel::two_link(double m1, double m2, double l1, double l2,
                                int certification_samples) {
  if (!(m1 > 0.0 && m2 > 0.0 && l1 > 0.0 && l2 > 0.0)) {
    throw Error("two_link: masses and lengths must be > 0");
  }
  RobotModel model(TwoLinkArm{m1, m2, l1, l2});
  model.bounds_ = certify_bounds(model, certification_samples);
  return model;
}

int RobotModel::dof() const {
  return std::visit(detail::Overloaded{[](const PointMass& pm) { return pm.dof; },
                                       [](const TwoLinkArm&) { return 2; }},
                    kind_);
}

std::string RobotModel::kind_name() const {
  return is_point_mass() ? "point_mass" : "two_link";
}

InertiaBounds certify_bounds(const RobotModel& model, int n_samples) {
  if (const auto* pm = std::get_if<PointMass>(&model.kind())) {
    return {pm->mass, pm->mass, 0.0};
  }
  constexpr double margin = 1.1;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  // M and C of the planar arm depend on the elbow angle only, and C is
  // linear in the velocity, so a grid over (q2, velocity direction) covers
  // the whole state space.
  const int grid = std::max(8, static_cast<int>(std::sqrt(static_cast<double>(n_samples))));
  double eig_min = std::numeric_limits<double>::infinity();
  double eig_max = 0.0;
  double coriolis = 0.0;
  for (int a = 0; a < grid; ++a) {
    Eigen::Vector2d q(0.0, two_pi * a / grid);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mass_matrix(model, q),
                                                             Eigen::EigenvaluesOnly);
    eig_min = std::min(eig_min, eig.eigenvalues()[0]);
    eig_max = std::max(eig_max, eig.eigenvalues()[1]);
    for (int b = 0; b < grid; ++b) {
      const double angle = two_pi * b / grid;
      const Eigen::Vector2d y(std::cos(angle), std::sin(angle));
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(coriolis_matrix(model, q, y));
      coriolis = std::max(coriolis, svd.singularValues()[0]);
    }
  }
  return {eig_min / margin, eig_max * margin, coriolis * margin};
}

}  // namespace swarmtele
