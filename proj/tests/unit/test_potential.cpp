#include <doctest.h>

#include "swarmtele/graph.hpp"
#include "swarmtele/potential.hpp"
#include "../support.hpp"

using namespace swarmtele;
using namespace swarmtele::testing;

TEST_CASE("psi values") {
  const PotentialParams<> p{1.0, 1.0, 1.0, 0.0};
  CHECK(psi(0.0, p) == 0.0);
  CHECK(psi(0.25, p) == doctest::Approx(0.25 / 1.75).epsilon(1e-15));
  CHECK(psi(1.0, p) == doctest::Approx(p.psi_max()));
  CHECK_THROWS_AS(psi(1.0001, p), OutOfDomain);
  CHECK_THROWS_AS(psi(-1e-3, p), OutOfDomain);
  CHECK_THROWS_AS(grad_psi_weight(1.0, p), OutOfDomain);

  const PotentialParams<> q{3.0, 0.5, 2.0, 0.1};
  CHECK(psi(4.0, q) == doctest::Approx(3.0 * 4.0 / 0.5));
}

TEST_CASE("psi is increasing, bounded and continuous at r") {
  const PotentialParams<> p{2.0, 0.3, 1.5, 0.0};
  double prev = -1.0;
  for (int k = 0; k <= 1000; ++k) {
    const double d = p.r * k / 1000.0;
    const double v = psi(d * d, p);
    CHECK(v > prev);
    CHECK(v <= p.psi_max() * (1 + 1e-15));
    prev = v;
  }
  for (double delta : {1e-3, 1e-6, 1e-9}) {
    const double d = p.r * (1 - delta);
    CHECK(p.psi_max() - psi(d * d, p) < 10 * delta * p.psi_max() * (1 + p.r * p.r / p.Q));
  }
}

TEST_CASE("grad_psi against central differences") {
  const PotentialParams<> p{1.7, 0.4, 1.0, 0.0};
  Rng rng(3);
  Eigen::Vector2d a = Eigen::Vector2d::Zero();
  CHECK(grad_psi(a, a, p).norm() == 0.0);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Vector2d xj(uniform(rng, -1, 1), uniform(rng, -1, 1));
    const Eigen::Vector2d xi = xj + uniform(rng, 0.05, 0.95) * random_direction(rng);
    const Eigen::Vector2d g = grad_psi(xi, xj, p);
    CHECK((g + grad_psi(xj, xi, p)).norm() == 0.0);
    Eigen::Vector2d fd;
    const double h = 1e-6;
    for (int c = 0; c < 2; ++c) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e[c] = h;
      fd[c] = (psi((xi + e - xj).squaredNorm(), p) - psi((xi - e - xj).squaredNorm(), p)) / (2 * h);
    }
    CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
  }
}

TEST_CASE("total potential") {
  const PotentialParams<> p{1.0, 1.0, 1.0, 0.0};
  CHECK(total_potential(Eigen::MatrixXd::Zero(2, 4), make_star(4), p) == 0.0);
  Eigen::MatrixXd two(2, 2);
  two << 0, 0.3, 0, 0.4;
  CHECK(total_potential(two, make_path(2), p) == doctest::Approx(psi(0.25, p)));
  Eigen::MatrixXd three(2, 3);
  three << 0, 0.5, 1.0, 0, 0, 0;
  CHECK(total_potential(three, make_path(3), p) == doctest::Approx(2 * 0.25 / 1.75).epsilon(1e-15));
}

TEST_CASE("select_Q") {
  CHECK(select_Q(1.0, 0.2, 3) == doctest::Approx(0.5 * 0.36 / 0.28).epsilon(1e-14));
  CHECK(select_Q(1.0, 0.2, 3) == doctest::Approx(0.642857142857).epsilon(1e-10));
  CHECK(select_Q(1.0, 0.5, 2) == 1.0);
  for (int n = 2; n <= 8; ++n) {
    for (double eps : {0.05, 0.2, 0.5, 0.9}) {
      CHECK(q_feasibility_margin(1.0, eps, n, select_Q(1.0, eps, n)) > 0.0);
    }
  }
}

TEST_CASE("select_P") {
  CHECK(p_lower_bound(1.0, 0.2, 3, 1.0, 1.0) == doctest::Approx(17.0).epsilon(1e-12));
  CHECK(select_P(1.0, 0.2, 3, 1.0, 1.0, 0.0) == doctest::Approx(17.85).epsilon(1e-12));
  CHECK(select_P(1.0, 0.2, 3, 1.0, 0.0, 0.0) == 1.0);
  CHECK(select_P(1.0, 0.2, 3, 1.0, 1.0, 100.0) == doctest::Approx(105.0).epsilon(1e-12));
}

TEST_CASE("selected Q and P keep V_p(0) + Delta below psi_max") {
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 7;
    const double r = uniform(rng, 0.5, 2.0);
    const double eps = uniform(rng, 0.05, 0.8) * r;
    const double delta = uniform(rng, 0.0, 5.0);
    const double Q = select_Q(r, eps, n);
    const double P = select_P(r, eps, n, Q, delta, 0.0);
    const PotentialParams<> p{P, Q, r, eps};
    const TreeNetwork tree = random_tree(n, rng);
    const Eigen::MatrixXd x = positions_within(tree, (r - eps) * (1 - 1e-12), rng);
    CHECK(total_potential(x, tree, p) + delta < p.psi_max());
  }
}
