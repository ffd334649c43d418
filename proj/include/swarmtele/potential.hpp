#pragma once

#include <string>

#include <Eigen/Dense>

#include "swarmtele/errors.hpp"
#include "swarmtele/graph.hpp"

namespace swarmtele {

struct SimTrace;

/// Parameters of the edge potential psi(d) = P d^2 / (r^2 - d^2 + Q).
template <typename Scalar = double>
struct PotentialParams {
  Scalar P{1};
  Scalar Q{1};
  Scalar r{1};        // communication radius
  Scalar epsilon{0};  // initial margin, edges start shorter than r - epsilon

  /// Value of psi at d = r.
  Scalar psi_max() const { return P * r * r / Q; }

  template <typename Other>
  PotentialParams<Other> cast() const {
    return {Other(P), Other(Q), Other(r), Other(epsilon)};
  }
};

template <typename Scalar>
Scalar psi(Scalar dist_sq, const PotentialParams<Scalar>& p) {
  const Scalar r2 = p.r * p.r;
  if (!(dist_sq >= Scalar(0) && dist_sq <= r2)) {
    throw OutOfDomain("psi: squared distance outside [0, r^2]");
  }
  return p.P * dist_sq / (r2 - dist_sq + p.Q);
}

/// Scalar factor 2P(r^2+Q)/(r^2-d^2+Q)^2 multiplying x_i - x_j in the
/// gradient; also the adjacency weight of the potential-weighted Laplacian.
template <typename Scalar>
Scalar grad_psi_weight(Scalar dist_sq, const PotentialParams<Scalar>& p) {
  const Scalar r2 = p.r * p.r;
  if (!(dist_sq >= Scalar(0) && dist_sq < r2)) {
    throw OutOfDomain("grad_psi: edge length at or beyond r");
  }
  const Scalar den = r2 - dist_sq + p.Q;
  return Scalar(2) * p.P * (r2 + p.Q) / (den * den);
}

/// Gradient of psi(|x_i - x_j|) with respect to x_i.
template <typename DerivedI, typename DerivedJ>
Eigen::Matrix<typename DerivedI::Scalar, Eigen::Dynamic, 1> grad_psi(
    const Eigen::MatrixBase<DerivedI>& x_i, const Eigen::MatrixBase<DerivedJ>& x_j,
    const PotentialParams<typename DerivedI::Scalar>& p) {
  const Eigen::Matrix<typename DerivedI::Scalar, Eigen::Dynamic, 1> diff = x_i - x_j;
  return grad_psi_weight(diff.squaredNorm(), p) * diff;
}

/// V_p: sum of psi over the edges of the tree. `positions` is dof x N.
template <typename Derived>
typename Derived::Scalar total_potential(const Eigen::MatrixBase<Derived>& positions,
                                         const TreeNetwork& tree,
                                         const PotentialParams<typename Derived::Scalar>& p) {
  using Scalar = typename Derived::Scalar;
  Scalar v = Scalar(0);
  for (const Edge& e : tree.edges()) {
    v += psi<Scalar>((positions.col(e.tail) - positions.col(e.head)).squaredNorm(), p);
  }
  return v;
}

/// Left side of the Q feasibility inequality:
/// [r^2 - (N-1)(r-eps)^2] Q + [r^2 - (r-eps)^2] r^2.
double q_feasibility_margin(double r, double epsilon, int n_robots, double Q);

/// Strict lower bound on P guaranteeing V_p(0) + Delta < psi_max.
double p_lower_bound(double r, double epsilon, int n_robots, double Q, double Delta);

/// Q = 1 when any Q works, otherwise half the feasibility upper bound.
double select_Q(double r, double epsilon, int n_robots);

/// 1.05 x max(p_lower_bound, decay_bound), floored at 1.
double select_P(double r, double epsilon, int n_robots, double Q, double Delta,
                double decay_bound);

/// Energy premise V_p(t) <= V_p(0) + Delta and its conclusion (every edge
/// shorter than r), scanned over a trace.
struct InvarianceReport {
  bool premise_holds = true;
  double energy_margin = 0.0;  // min_t (V_p(0) + Delta - V_p(t))
  int energy_index = 0;
  bool conclusion_holds = true;
  double distance_margin = 0.0;  // min_t (r - max_e |x_e(t)|)
  int distance_index = 0;
  std::string detail;
};

InvarianceReport check_prop2_invariance(const SimTrace& trace, const PotentialParams<double>& params,
                                        double Delta);

}  // namespace swarmtele
