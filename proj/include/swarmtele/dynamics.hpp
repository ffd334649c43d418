#pragma once

#include <cmath>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "swarmtele/errors.hpp"

namespace swarmtele {

/// Planar point mass, M = m I, C = 0.
struct PointMass {
  double mass = 1.0;
  int dof = 2;
};

/// Two-link planar arm in joint space (no gravity). Links are uniform
/// slender rods: centre of mass at mid-length, I = m l^2 / 12.
struct TwoLinkArm {
  double m1 = 1.0;
  double m2 = 1.0;
  double l1 = 1.0;
  double l2 = 1.0;
};

/// Constants of the inertia and Coriolis bounds:
/// lambda_min I <= M(x) <= lambda_max I and |C(x,y) z| <= coriolis |y| |z|.
struct InertiaBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double coriolis = 0.0;
};

class RobotModel {
 public:
  using Kind = std::variant<PointMass, TwoLinkArm>;

  static RobotModel point_mass(double mass, int dof = 2);
  static RobotModel two_link(double m1, double m2, double l1, double l2,
                             int certification_samples = 4096);

  const Kind& kind() const { return kind_; }
  bool is_point_mass() const { return std::holds_alternative<PointMass>(kind_); }
  int dof() const;
  std::string kind_name() const;
  const InertiaBounds& bounds() const { return bounds_; }

 private:
  explicit RobotModel(Kind kind) : kind_(kind) {}

  Kind kind_;
  InertiaBounds bounds_;
};

template <typename Scalar = double>
using JointVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar = double>
using JointMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

// Inertia coefficients of the two-link arm: M11 = a1 + 2 a2 cos q2,
// M12 = a3 + a2 cos q2, M22 = a3.
struct TwoLinkCoefficients {
  double a1, a2, a3;
};

inline TwoLinkCoefficients coefficients(const TwoLinkArm& arm) {
  const double lc1 = 0.5 * arm.l1;
  const double lc2 = 0.5 * arm.l2;
  const double i1 = arm.m1 * arm.l1 * arm.l1 / 12.0;
  const double i2 = arm.m2 * arm.l2 * arm.l2 / 12.0;
  return {i1 + i2 + arm.m1 * lc1 * lc1 + arm.m2 * (arm.l1 * arm.l1 + lc2 * lc2),
          arm.m2 * arm.l1 * lc2, i2 + arm.m2 * lc2 * lc2};
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace detail

template <typename Derived>
JointMatrix<typename Derived::Scalar> mass_matrix(const RobotModel& model,
                                                  const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return std::visit(
      detail::Overloaded{
          [&](const PointMass& pm) -> JointMatrix<Scalar> {
            return Scalar(pm.mass) * JointMatrix<Scalar>::Identity(pm.dof, pm.dof);
          },
          [&](const TwoLinkArm& arm) -> JointMatrix<Scalar> {
            using std::cos;
            const auto k = detail::coefficients(arm);
            const Scalar c2 = cos(Scalar(x[1]));
            JointMatrix<Scalar> m(2, 2);
            m(0, 0) = Scalar(k.a1) + Scalar(2 * k.a2) * c2;
            m(0, 1) = Scalar(k.a3) + Scalar(k.a2) * c2;
            m(1, 0) = m(0, 1);
            m(1, 1) = Scalar(k.a3);
            return m;
          }},
      model.kind());
}

/// Coriolis/centrifugal matrix C(x, xdot), linear in xdot, with
/// Mdot - 2C skew-symmetric.
template <typename DerivedX, typename DerivedV>
JointMatrix<typename DerivedX::Scalar> coriolis_matrix(const RobotModel& model,
                                                       const Eigen::MatrixBase<DerivedX>& x,
                                                       const Eigen::MatrixBase<DerivedV>& xdot) {
  using Scalar = typename DerivedX::Scalar;
  return std::visit(
      detail::Overloaded{
          [&](const PointMass& pm) -> JointMatrix<Scalar> {
            return JointMatrix<Scalar>::Zero(pm.dof, pm.dof);
          },
          [&](const TwoLinkArm& arm) -> JointMatrix<Scalar> {
            using std::sin;
            const auto k = detail::coefficients(arm);
            const Scalar h = -Scalar(k.a2) * sin(Scalar(x[1]));
            JointMatrix<Scalar> c(2, 2);
            c(0, 0) = h * xdot[1];
            c(0, 1) = h * (xdot[0] + xdot[1]);
            c(1, 0) = -h * xdot[0];
            c(1, 1) = Scalar(0);
            return c;
          }},
      model.kind());
}

/// Solves M(x) xddot = force - C(x, xdot) xdot.
template <typename DerivedX, typename DerivedV, typename DerivedF>
JointVector<typename DerivedX::Scalar> accel(const RobotModel& model,
                                             const Eigen::MatrixBase<DerivedX>& x,
                                             const Eigen::MatrixBase<DerivedV>& xdot,
                                             const Eigen::MatrixBase<DerivedF>& total_force) {
  using Scalar = typename DerivedX::Scalar;
  if (model.is_point_mass()) {
    return total_force / Scalar(std::get<PointMass>(model.kind()).mass);
  }
  const JointMatrix<Scalar> m = mass_matrix(model, x);
  const JointVector<Scalar> rhs = total_force - coriolis_matrix(model, x, xdot) * xdot;
  const Eigen::LLT<JointMatrix<Scalar>> llt(m);
  if (llt.info() != Eigen::Success) throw SingularInertia("accel: inertia matrix not positive definite");
  return llt.solve(rhs);
}

template <typename DerivedX, typename DerivedV>
typename DerivedX::Scalar kinetic_energy(const RobotModel& model, const Eigen::MatrixBase<DerivedX>& x,
                                         const Eigen::MatrixBase<DerivedV>& xdot) {
  return typename DerivedX::Scalar(0.5) * xdot.dot(mass_matrix(model, x) * xdot);
}

/// Bound constants for the model. Point masses return (m, m, 0) exactly.
/// Two-link arms are sampled on a deterministic grid over the elbow angle
/// and velocity direction; the result carries a 10% safety margin.
InertiaBounds certify_bounds(const RobotModel& model, int n_samples);

}  // namespace swarmtele
