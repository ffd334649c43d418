#include "swarmtele/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace swarmtele {

namespace {

constexpr int kMaxRounds = 64;
constexpr int kRoundsPerSigma = 8;

}  // namespace

GainDesign base_design(const DesignHeuristics& h, const TreeNetwork& tree, double f_bar) {
  const int n = tree.n_vertices();
  GainDesign d;
  d.rho = h.rho;
  d.sigma = h.sigma;
  d.eta = Eigen::VectorXd::Constant(n, h.eta);
  d.gamma = Eigen::VectorXd::Constant(n, h.gamma);
  d.zeta = Eigen::VectorXd::Constant(n, h.zeta);
  d.Gamma = h.Gamma;
  d.B = Eigen::VectorXd::Constant(n, h.B);
  d.D = Eigen::VectorXd::Zero(n);
  d.f_bar = f_bar;
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j : tree.neighbors(i)) {
      sum += d.eta[i] + d.gamma[i] + d.zeta[i] + d.eta[j] + d.gamma[j];
    }
    d.D[i] = 2.0 * d.sigma * sum;
  }
  return d;
}

double damping_margin(int i, const GainDesign& design, const TreeNetwork& tree) {
  double sum = 0.0;
  for (int j : tree.neighbors(i)) {
    sum += design.eta[i] + design.gamma[i] + design.zeta[i] + design.eta[j] + design.gamma[j];
  }
  return design.D[i] - 2.0 * design.sigma * sum;
}

double decay_lower_bound(const GainDesign& design, double r, double Q, double lambda_L) {
  double worst = 0.0;
  for (int i = 0; i < design.n_robots(); ++i) {
    worst = std::max(worst, design.coupling_denominator(i) / (design.sigma * design.B[i]));
  }
  return design.rho * (r * r + Q) / (4.0 * lambda_L) * worst;
}

double headroom_delta(const GainDesign& design, const PotentialParams<>& params,
                      const Scenario& scenario) {
  double kinetic = 0.0;
  for (int i = 0; i < scenario.n_robots(); ++i) {
    const Eigen::VectorXd s =
        surface(scenario.initial_velocities.col(i),
                theta(i, scenario.initial_positions, scenario.tree, params), design.sigma);
    kinetic += scenario.models[i].bounds().lambda_max / design.coupling_denominator(i) *
               s.squaredNorm();
  }
  return 0.5 * kinetic + design.f_bar * design.f_bar / (4.0 * design.rho * design.Gamma);
}

DesignResult design_gains(const Scenario& scenario) {
  try {
    check_initial_margin(scenario);
  } catch (const AssumptionViolated& e) {
    throw DesignInfeasible(std::string("initial margin (Assumption 1): ") + e.what());
  }
  const DesignHeuristics& h = scenario.heuristics;
  if (!(h.rho > 0 && h.sigma > 0 && h.eta > 0 && h.gamma > 0 && h.zeta > 0 && h.Gamma > 0 &&
        h.B > 0)) {
    throw DesignInfeasible("heuristics rho, sigma, eta, gamma, zeta, Gamma, B must all be > 0");
  }

  const int n = scenario.n_robots();
  const double r = scenario.r;
  const double eps = scenario.epsilon;

  DesignResult result;
  result.spectral = spectral_constants(scenario.tree);
  const double Q = select_Q(r, eps, n);
  if (!(q_feasibility_margin(r, eps, n, Q) > 0.0)) {
    throw DesignInfeasible("Q feasibility inequality has no positive solution");
  }

  DesignHeuristics current = h;
  int rounds = 0;
  for (int halvings = 0;; ++halvings) {
    GainDesign design = base_design(current, scenario.tree, scenario.f_bar);
    const double decay_bound = decay_lower_bound(design, r, Q, result.spectral.lambda_L);
    PotentialParams<> params{1.0, Q, r, eps};
    const double force_headroom =
        design.f_bar * design.f_bar / (4.0 * design.rho * design.Gamma);
    params.P = select_P(r, eps, n, Q, force_headroom, decay_bound);

    for (int k = 0; k < kRoundsPerSigma; ++k) {
      if (++rounds > kMaxRounds) {
        std::ostringstream os;
        os << "P > bound(Delta(P)) did not converge in " << kMaxRounds
           << " rounds (last P=" << params.P << ", sigma=" << design.sigma << ")";
        throw DesignInfeasible(os.str());
      }
      const double delta = headroom_delta(design, params, scenario);
      if (params.P > p_lower_bound(r, eps, n, Q, delta) && params.P >= decay_bound) {
        design.Delta = delta;
        result.design = design;
        result.params = params;
        result.rounds = rounds;
        result.sigma_halvings = halvings;
        return result;
      }
      params.P = select_P(r, eps, n, Q, delta, decay_bound);
    }
    current.sigma *= 0.5;
  }
}

std::vector<DesignCondition> audit_design(const Scenario& scenario, const DesignResult& result) {
  const GainDesign& d = result.design;
  const PotentialParams<>& p = result.params;
  const int n = scenario.n_robots();
  std::vector<DesignCondition> out;
  auto add = [&](std::string name, double margin, bool ok, std::string detail) {
    out.push_back({std::move(name), margin, ok, std::move(detail)});
  };

  double init_margin = std::numeric_limits<double>::infinity();
  for (const Edge& e : scenario.tree.edges()) {
    const double len =
        (scenario.initial_positions.col(e.tail) - scenario.initial_positions.col(e.head)).norm();
    init_margin = std::min(init_margin, p.r - p.epsilon - len);
  }
  add("initial_margin", init_margin, init_margin > 0.0, "min_e (r - epsilon - |x_e(0)|) > 0");

  const double qm = q_feasibility_margin(p.r, p.epsilon, n, p.Q);
  add("q_feasibility", qm, qm > 0.0, "[r^2-(N-1)(r-eps)^2]Q + [r^2-(r-eps)^2]r^2 > 0");

  const double pb = p_lower_bound(p.r, p.epsilon, n, p.Q, d.Delta);
  add("p_lower_bound", p.P - pb, p.P > pb, "P > [A+Q]Q Delta / ([A+Q]r^2 - (N-1)Q(r-eps)^2)");

  double dm = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) dm = std::min(dm, damping_margin(i, d, scenario.tree));
  add("damping", dm, dm >= -1e-12, "min_i Dbar_i >= 0");

  const double db = decay_lower_bound(d, p.r, p.Q, result.spectral.lambda_L);
  add("decay_rate", p.P - db, p.P >= db,
      "P >= rho(r^2+Q)/(4 lambda_L) max_i (B_i+sigma D_i)/(sigma B_i)");

  double gm = std::numeric_limits<double>::infinity();
  bool gain_ok = true;
  for (int i = 0; i < n; ++i) {
    const double k = gain_K(i, scenario.initial_positions, scenario.tree, d, p, scenario.models);
    const double excess = gain_margin(i, k, scenario.initial_positions, scenario.tree, d, p,
                                      scenario.models) -
                          0.5 * d.rho * scenario.models[i].bounds().lambda_max;
    gm = std::min(gm, excess);
    gain_ok = gain_ok && excess >= -1e-12 * std::max(1.0, k);
  }
  add("gain_schedule", gm, gain_ok, "Kbar_i(0) >= rho lambda_i2 / 2");

  const double delta_now = headroom_delta(d, p, scenario);
  const double gap = std::abs(delta_now - d.Delta);
  add("headroom_fixed_point", -gap, gap <= 1e-12 * std::max(1.0, d.Delta),
      "Delta equals 1/2 sum lambda_i2/(B_i+sigma D_i)|s_i(0)|^2 + f_bar^2/(4 rho Gamma) at the chosen P");

  const double ceiling = p.psi_max() - total_potential(scenario.initial_positions, scenario.tree, p) - d.Delta;
  add("energy_ceiling", ceiling, ceiling > 0.0, "V_p(0) + Delta < psi_max");
  return out;
}

}  // namespace swarmtele
