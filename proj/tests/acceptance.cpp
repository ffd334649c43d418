// Acceptance suite: one line per primary criterion.
//
//   acceptance [--only NAME]... [--expect-fail NAME]...
//
// Exit status is 0 when every selected criterion ends as expected (pass,
// or fail for the names given with --expect-fail).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>
#include <unsupported/Eigen/AutoDiff>

#include "support.hpp"
#include "swarmtele/controller.hpp"
#include "swarmtele/design.hpp"
#include "swarmtele/dynamics.hpp"
#include "swarmtele/graph.hpp"
#include "swarmtele/potential.hpp"
#include "swarmtele/scenario_io.hpp"
#include "swarmtele/simulator.hpp"
#include "swarmtele/verifier.hpp"

namespace fs = std::filesystem;
using namespace swarmtele;
using namespace swarmtele::testing;
using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kRandomRuns = 50;
constexpr int kConfigsPerTopology = 10000;
constexpr int kStatesPerModel = 10000;

struct Outcome {
  bool pass = false;
  std::string summary;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// The 50 seeded random runs, shared by several criteria.

struct RunStats {
  int runs = 0;
  int broken = 0;
  double min_margin = kInf;
  std::string min_margin_run;
  int decay_fail = 0;
  double decay_worst = kInf;
  int iss_fail = 0;
  int iss_skipped = 0;
  double iss_worst = kInf;
  int iss_kappa1_sandwich_fail = 0;
  int iss_kappa2_sandwich_fail = 0;
  int gain_fail = 0;
  double gain_worst_slack = kInf;
  long samples = 0;
  long sandwich_lower_fail = 0;
  long sandwich_upper_fail = 0;
  double sandwich_upper_ratio = 0.0;
  double wall_seconds = 0.0;
};

Scenario acceptance_scenario(int k) {
  // Runs 0..24 on the 5-path, 25..49 on random 5-vertex trees.
  return random_scenario(1000 + static_cast<std::uint64_t>(k), k < kRandomRuns / 2, 5, 30.0);
}

const RunStats& random_runs() {
  static const RunStats stats = [] {
    RunStats st;
    const auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < kRandomRuns; ++k) {
      const Scenario s = acceptance_scenario(k);
      const DesignResult design = design_gains(s);
      const SimTrace trace = Simulator(s, design).run();
      ++st.runs;
      st.samples += static_cast<long>(trace.samples.size());
      if (trace.link_broken) ++st.broken;

      const CheckResult inv = check_invariance(trace, s.r);
      if (inv.worst_margin < st.min_margin) {
        st.min_margin = inv.worst_margin;
        st.min_margin_run = s.name;
      }
      const CheckResult decay = check_decay(trace);
      if (!decay.passed) ++st.decay_fail;
      st.decay_worst = std::min(st.decay_worst, decay.worst_margin);

      if (inv.passed) {
        const CheckResult iss = check_iss(trace);
        if (!iss.passed) ++st.iss_fail;
        st.iss_worst = std::min(st.iss_worst, iss.worst_margin);
        const IssConstants kap = iss_constants(design.design, design.params, design.spectral, s.models);
        bool k1 = true, k2 = true;
        for (const auto& smp : trace.samples) {
          const double phi2 = swarm_phi({smp.x, smp.xdot}, s.tree).squaredNorm();
          k1 = k1 && phi2 <= kap.kappa1 * smp.V + check_tolerance(kap.kappa1 * smp.V);
          k2 = k2 && smp.V <= kap.kappa2 * phi2 + check_tolerance(kap.kappa2 * phi2);
        }
        st.iss_kappa1_sandwich_fail += !k1;
        st.iss_kappa2_sandwich_fail += !k2;
      } else {
        ++st.iss_skipped;
      }

      const CheckResult gain = check_gain_identity(trace);
      if (!gain.passed) ++st.gain_fail;
      st.gain_worst_slack = std::min(st.gain_worst_slack, gain.worst_margin);

      for (const auto& smp : trace.samples) {
        const SandwichCheck sc = check_lemma1(smp.x, s.tree, design.params, design.spectral);
        if (sc.theta_energy < sc.lower_bound * (1.0 - 1e-9)) ++st.sandwich_lower_fail;
        if (sc.theta_energy > sc.upper_bound_literal * (1.0 + 1e-9)) {
          ++st.sandwich_upper_fail;
          st.sandwich_upper_ratio = std::max(st.sandwich_upper_ratio, sc.theta_energy / sc.upper_bound_literal);
        }
      }
    }
    st.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return st;
  }();
  return stats;
}

// ---------------------------------------------------------------------------

Outcome connectivity() {
  const RunStats& st = random_runs();
  const bool pass = st.broken == 0 && st.min_margin > 0.0 && st.runs == kRandomRuns;
  return {pass, std::to_string(st.runs) + " runs x 30 s (25 path, 25 random trees, mixed models), " +
                    std::to_string(st.broken) + " LinkBroken, min margin r - max|x_ij| = " +
                    fmt(st.min_margin) + " (" + st.min_margin_run + "), " +
                    fmt(st.wall_seconds) + " s wall"};
}

Outcome decay() {
  const RunStats& st = random_runs();
  return {st.decay_fail == 0, std::to_string(st.runs - st.decay_fail) + "/" + std::to_string(st.runs) +
                                  " runs satisfy V(t) <= e^{-rho t}V(0) + sup chi at all " +
                                  std::to_string(st.samples) + " samples; worst margin " +
                                  fmt(st.decay_worst)};
}

Outcome sandwich() {
  Rng rng(77);
  std::vector<std::pair<std::string, TreeNetwork>> topologies;
  for (int n : {2, 3, 5, 8}) topologies.emplace_back("path" + std::to_string(n), make_path(n));
  for (int n : {4, 5, 8}) topologies.emplace_back("star" + std::to_string(n), make_star(n));
  for (int k = 0; k < 3; ++k) {
    const int n = 5 + k;
    topologies.emplace_back("tree" + std::to_string(n), random_tree(n, rng));
  }
  long lower_fail = 0, upper_fail = 0, total = 0;
  double worst_ratio = 0.0;
  std::set<std::string> upper_topologies;
  for (const auto& [name, tree] : topologies) {
    const double r = 1.0, eps = 0.2;
    const double Q = select_Q(r, eps, tree.n_vertices());
    const PotentialParams<> params{10.0, Q, r, eps};
    const SpectralConstants spec = spectral_constants(tree);
    for (int c = 0; c < kConfigsPerTopology; ++c) {
      const Eigen::MatrixXd x = positions_within(tree, r * (1.0 - 1e-6), rng);
      const SandwichCheck sc = check_lemma1(x, tree, params, spec);
      ++total;
      if (sc.theta_energy < sc.lower_bound * (1.0 - 1e-9)) ++lower_fail;
      if (sc.theta_energy > sc.upper_bound_literal * (1.0 + 1e-9)) {
        ++upper_fail;
        upper_topologies.insert(name);
        worst_ratio = std::max(worst_ratio, sc.theta_energy / sc.upper_bound_literal);
      }
    }
  }
  const RunStats& st = random_runs();
  const bool pass = lower_fail == 0 && upper_fail == 0 && st.sandwich_lower_fail == 0 &&
                    st.sandwich_upper_fail == 0;
  std::string where;
  for (const auto& t : upper_topologies) where += (where.empty() ? "" : ",") + t;
  return {pass, "lower 4 lambda_L P/(r^2+Q) V_p: " + std::to_string(lower_fail) + "/" +
                    std::to_string(total) + " configs, " + std::to_string(st.sandwich_lower_fail) +
                    "/" + std::to_string(st.samples) + " trace samples violate; upper 4 lambda_L_max P/(r^2+Q) V_p: " +
                    std::to_string(upper_fail) + "/" + std::to_string(total) + " configs [" + where +
                    "], " + std::to_string(st.sandwich_upper_fail) + "/" + std::to_string(st.samples) +
                    " trace samples violate (max ratio " + fmt(std::max(worst_ratio, st.sandwich_upper_ratio)) +
                    ")"};
}

Outcome synchronization() {
  int passed = 0, total = 0;
  double worst_v = 0.0, worst_d = 0.0;
  for (int k = 0; k < 10; ++k) {
    Scenario s = random_scenario(2000 + static_cast<std::uint64_t>(k), k % 2 == 0, 5);
    s.force.kind = ForceKind::zero;
    s.duration = 10.0 / s.heuristics.rho;
    const SimTrace trace = run(s);
    const CheckResult c = check_sync(trace);
    ++total;
    passed += c.passed;
    const auto& first = trace.samples.front();
    const auto& last = trace.samples.back();
    worst_v = std::max(worst_v, last.xdot.colwise().norm().maxCoeff() / first.xdot.colwise().norm().maxCoeff());
    worst_d = std::max(worst_d, last.edge_dist.maxCoeff() / first.edge_dist.maxCoeff());
  }
  return {passed == total, std::to_string(passed) + "/" + std::to_string(total) +
                               " zero-force runs of 10/rho s synchronize; worst final/initial max|xdot| " +
                               fmt(worst_v) + ", max|x_ij| " + fmt(worst_d) + " (need < 1e-3)"};
}

Outcome iss() {
  const RunStats& st = random_runs();
  const bool pass = st.iss_fail == 0 && st.iss_skipped == 0;
  return {pass, std::to_string(st.runs - st.iss_fail - st.iss_skipped) + "/" + std::to_string(st.runs) +
                    " runs satisfy the phi bound pointwise; worst margin " + fmt(st.iss_worst) +
                    "; |phi|^2 <= k1 V violated in " + std::to_string(st.iss_kappa1_sandwich_fail) +
                    " runs, V <= k2 |phi|^2 in " + std::to_string(st.iss_kappa2_sandwich_fail)};
}

Outcome mismatch_and_gain() {
  Rng rng(99);
  long states = 0, fail = 0;
  double worst = kInf;
  for (int k = 0; states < kStatesPerModel; ++k) {
    const Scenario s = random_scenario(3000 + static_cast<std::uint64_t>(k), k % 2 == 0, 5);
    const DesignResult d = design_gains(s);
    for (int c = 0; c < 500; ++c) {
      const Eigen::MatrixXd x = positions_within(s.tree, s.r * (1.0 - 1e-6), rng);
      const Eigen::MatrixXd v = Eigen::MatrixXd::NullaryExpr(2, 5, [&] { return uniform(rng, -1.0, 1.0); });
      for (int i = 0; i < 5; ++i) {
        const Eigen::VectorXd si = surface(v.col(i), theta(i, x, s.tree, d.params), d.design.sigma);
        const double lhs = si.dot(mismatch_delta(i, x, v, s.tree, d.params, s.models[i]));
        const double rhs = mismatch_bound(i, x, v, s.tree, d.design, d.params, s.models);
        if (lhs > rhs + 1e-9 * std::max(1.0, std::abs(rhs))) ++fail;
        worst = std::min(worst, rhs - lhs);
      }
      ++states;
    }
  }
  const RunStats& st = random_runs();
  return {fail == 0 && st.gain_fail == 0,
          "s_i^T Delta_i bound: " + std::to_string(fail) + " violations over " + std::to_string(states) +
              " states x 5 robots (min slack " + fmt(worst) + "); Kbar_i = rho lambda_i2/2 to 1e-12 at every step of " +
              std::to_string(st.runs - st.gain_fail) + "/" + std::to_string(st.runs) + " runs"};
}

double rk4_endpoint_error(double dt) {
  Scenario s;
  s.name = "ballistic";
  s.tree = make_path(2);
  s.models = {RobotModel::point_mass(2.0), RobotModel::point_mass(2.0)};
  s.initial_positions = Eigen::MatrixXd::Zero(2, 2);
  s.initial_positions(0, 1) = 1.0;
  s.initial_velocities = Eigen::MatrixXd::Zero(2, 2);
  s.initial_velocities(1, 0) = 0.3;
  s.r = 1e6;
  s.epsilon = 1.0;
  s.f_bar = 1.0;
  s.force.kind = ForceKind::sinusoid;
  s.force.direction = Eigen::Vector2d(1.0, 0.0);
  s.force.magnitude = 1.0;
  s.force.frequency = 0.3;
  s.force.phase = 0.4;
  s.dt = dt;
  s.duration = 10.0;
  s.negative_control.controller_disabled = true;
  DesignResult d;
  d.design = base_design(s.heuristics, s.tree, s.f_bar);
  d.params = {1.0, 1.0, s.r, s.epsilon};
  d.spectral = spectral_constants(s.tree);
  const SimTrace trace = Simulator(s, d).run();
  const auto& last = trace.samples.back();
  // x(t) = v0 t + A/(m w) [t cos(phi) - (sin(w t + phi) - sin(phi))/w]
  const double m = 2.0, a = 1.0, w = 2.0 * std::numbers::pi * 0.3, phi = 0.4, t = last.t;
  const double x = a / (m * w) * (t * std::cos(phi) - (std::sin(w * t + phi) - std::sin(phi)) / w);
  const double y = 0.3 * t;
  return std::hypot(last.x(0, 0) - x, last.x(1, 0) - y);
}

Outcome dynamics() {
  using AD = Eigen::AutoDiffScalar<Eigen::Matrix<double, 1, 1>>;
  Rng rng(5);
  std::vector<RobotModel> models{RobotModel::point_mass(1.3), RobotModel::two_link(1.0, 1.0, 1.0, 1.0),
                                 RobotModel::two_link(0.5, 1.5, 0.7, 0.9)};
  for (int k = 0; k < 3; ++k) models.push_back(random_model(rng, true));
  long p1 = 0, p2 = 0, p3 = 0, total = 0;
  double worst_skew = 0.0;
  std::normal_distribution<double> normal;
  for (const auto& model : models) {
    const InertiaBounds& b = model.bounds();
    for (int c = 0; c < kStatesPerModel; ++c) {
      const Eigen::Vector2d q(uniform(rng, -4.0, 4.0), uniform(rng, -4.0, 4.0));
      const Eigen::Vector2d qd(3.0 * normal(rng), 3.0 * normal(rng));
      const Eigen::Vector2d z(normal(rng), normal(rng));
      const Eigen::MatrixXd m = mass_matrix(model, q);
      const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
      if (ev.minCoeff() < b.lambda_min * (1 - 1e-12) || ev.maxCoeff() > b.lambda_max * (1 + 1e-12)) ++p1;

      // Mdot along the trajectory q + tau qd via forward-mode AD.
      Eigen::Matrix<AD, 2, 1> qa;
      for (int j = 0; j < 2; ++j) qa[j] = AD(q[j], Eigen::Matrix<double, 1, 1>(qd[j]));
      const auto ma = mass_matrix(model, qa);
      Eigen::Matrix2d mdot;
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) mdot(r, s) = ma(r, s).derivatives()[0];
      const Eigen::MatrixXd cm = coriolis_matrix(model, q, qd);
      const double skew = std::abs(z.dot((mdot - 2.0 * cm) * z)) /
                          (std::max(1.0, mdot.norm() + 2.0 * cm.norm()) * z.squaredNorm());
      worst_skew = std::max(worst_skew, skew);
      if (!(skew < 1e-8)) ++p2;
      if ((cm * z).norm() > b.coriolis * qd.norm() * z.norm() * (1 + 1e-12) + 1e-15) ++p3;
      ++total;
    }
  }
  const double e1 = rk4_endpoint_error(0.1);
  const double e2 = rk4_endpoint_error(0.05);
  const double ratio = e1 / e2;
  const bool pass = p1 == 0 && p2 == 0 && p3 == 0 && ratio > 14.0 && ratio < 18.0;
  return {pass, "P.1 " + std::to_string(p1) + ", P.2 " + std::to_string(p2) + " (max " + fmt(worst_skew) +
                    "), P.3 " + std::to_string(p3) + " violations over " + std::to_string(total) +
                    " states; RK4 error ratio dt 0.1/0.05 = " + fmt(ratio) + " (errors " + fmt(e1) + ", " +
                    fmt(e2) + ")"};
}

double oracle_lambda_L(const Eigen::MatrixXd& laplacian) {
  // General (non-symmetric) solver as an independent route to the spectrum.
  Eigen::EigenSolver<Eigen::MatrixXd> es(laplacian, false);
  std::vector<double> ev;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) ev.push_back(es.eigenvalues()[k].real());
  std::sort(ev.begin(), ev.end());
  return ev[1];
}

Outcome spectral() {
  Rng rng(11);
  double worst_l = 0.0, worst_spec = 0.0, worst_lambda = 0.0, worst_closed = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 11;
    const TreeNetwork tree = random_tree(n, rng);
    Eigen::VectorXd w(tree.n_edges());
    for (auto& v : w) v = uniform(rng, 0.1, 3.0);
    const Eigen::MatrixXd d = incidence_matrix(tree);
    const Eigen::MatrixXd ldw = d * w.asDiagonal() * d.transpose();
    worst_l = std::max(worst_l, (weighted_laplacian(tree, w) - ldw).cwiseAbs().maxCoeff());

    Eigen::VectorXd node = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(d * d.transpose()).eigenvalues();
    Eigen::VectorXd edge = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(edge_laplacian(tree)).eigenvalues();
    worst_spec = std::max(worst_spec, (node.tail(n - 1) - edge).cwiseAbs().maxCoeff());

    worst_lambda = std::max(worst_lambda,
                            std::abs(algebraic_connectivity(tree) - oracle_lambda_L(unweighted_laplacian(tree))));
  }
  for (int n = 2; n <= 12; ++n) {
    worst_closed = std::max(worst_closed, std::abs(algebraic_connectivity(make_path(n)) -
                                                   2.0 * (1.0 - std::cos(std::numbers::pi / n))));
    if (n >= 3) worst_closed = std::max(worst_closed, std::abs(algebraic_connectivity(make_star(n)) - 1.0));
  }
  const bool pass = worst_l <= 1e-12 && worst_spec <= 1e-9 && worst_lambda <= 1e-9 && worst_closed <= 1e-9;
  return {pass, "100 random trees: |L - D W D^T| " + fmt(worst_l) + ", nonzero spectra gap " + fmt(worst_spec) +
                    ", lambda_L vs oracle " + fmt(worst_lambda) + ", path/star closed forms " + fmt(worst_closed)};
}

// Independent re-check of a design report: recomputes every condition
// from the raw numbers in design.json without calling the design code.
std::string recheck_design(const json& rep) {
  const json& sc = rep.at("scenario");
  const json& g = rep.at("design").at("gains");
  const json& p = rep.at("design").at("potential");
  const double r = sc.at("r"), eps = sc.at("epsilon"), f_bar = sc.at("f_bar");
  const double P = p.at("P"), Q = p.at("Q");
  const int n = static_cast<int>(sc.at("robots").size());
  const double rho = g.at("rho"), sigma = g.at("sigma"), Gamma = g.at("Gamma"), Delta = g.at("Delta");
  auto at = [](const json& arr, int i) { return arr.at(i).get<double>(); };
  std::vector<std::vector<int>> nbr(n);
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : sc.at("edges")) {
    const int a = e[0].get<int>() - 1, b = e[1].get<int>() - 1;
    nbr[a].push_back(b);
    nbr[b].push_back(a);
    lap(a, a) += 1;
    lap(b, b) += 1;
    lap(a, b) -= 1;
    lap(b, a) -= 1;
  }
  const double re2 = (r - eps) * (r - eps);
  if (!((r * r - (n - 1) * re2) * Q + (r * r - re2) * r * r > 0)) return "Q inequality fails";
  const double denom = (r * r - re2 + Q) * r * r - (n - 1) * Q * re2;
  if (!(denom > 0 && P > (r * r - re2 + Q) * Q * Delta / denom)) return "P inequality fails";
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j : nbr[i]) {
      sum += at(g["eta"], i) + at(g["gamma"], i) + at(g["zeta"], i) + at(g["eta"], j) + at(g["gamma"], j);
    }
    if (at(g["D"], i) - 2 * sigma * sum < -1e-12) return "Dbar_" + std::to_string(i + 1) + " < 0";
  }
  const double lambda_L = oracle_lambda_L(lap);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double bi = at(g["B"], i), den = bi + sigma * at(g["D"], i);
    worst = std::max(worst, den / (sigma * bi));
  }
  if (P < rho * (r * r + Q) / (4 * lambda_L) * worst * (1 - 1e-12)) return "decay-rate bound on P fails";

  // Headroom fixed point with an independent theta.
  const json& pos = sc.at("initial_state").at("positions");
  const json& vel = sc.at("initial_state").at("velocities");
  double kinetic = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::Vector2d th = Eigen::Vector2d::Zero();
    const Eigen::Vector2d xi(pos[i][0].get<double>(), pos[i][1].get<double>());
    for (int j : nbr[i]) {
      const Eigen::Vector2d xij = xi - Eigen::Vector2d(pos[j][0].get<double>(), pos[j][1].get<double>());
      const double den = r * r - xij.squaredNorm() + Q;
      th += 2 * P * (r * r + Q) / (den * den) * xij;
    }
    const Eigen::Vector2d s = Eigen::Vector2d(vel[i][0].get<double>(), vel[i][1].get<double>()) + sigma * th;
    const double l2 = rep.at("robots").at(i).at("lambda_max");
    kinetic += l2 / (at(g["B"], i) + sigma * at(g["D"], i)) * s.squaredNorm();
  }
  const double delta = 0.5 * kinetic + f_bar * f_bar / (4 * rho * Gamma);
  if (std::abs(delta - Delta) > 1e-9 * std::max(1.0, Delta)) return "Delta is not the fixed point";

  // Reported inertia bounds must enclose the true eigenvalue range.
  for (int i = 0; i < n; ++i) {
    const json& robot = sc.at("robots").at(i);
    const double lo = rep["robots"][i]["lambda_min"], hi = rep["robots"][i]["lambda_max"];
    if (robot.at("kind") == "point_mass") {
      if (lo != robot.at("mass").get<double>() || hi != lo) return "point-mass bounds differ from m";
      continue;
    }
    const RobotModel m = RobotModel::two_link(robot["m1"], robot["m2"], robot["l1"], robot["l2"]);
    for (int k = 0; k <= 2000; ++k) {
      const Eigen::Vector2d q(0.0, -std::numbers::pi + 2 * std::numbers::pi * k / 2000);
      const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mass_matrix(m, q)).eigenvalues();
      if (ev.minCoeff() < lo || ev.maxCoeff() > hi) return "inertia bounds do not enclose M(q)";
    }
  }

  std::set<std::string> need{"q_feasibility", "p_lower_bound", "damping", "decay_rate", "headroom_fixed_point"};
  for (const auto& c : rep.at("conditions")) {
    if (!c.at("satisfied").get<bool>()) return "report marks " + c.at("name").get<std::string>() + " unsatisfied";
    need.erase(c.at("name").get<std::string>());
  }
  if (!need.empty()) return "report omits condition " + *need.begin();
  return {};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SWARMTELE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome design_pipeline() {
  const fs::path tmp = fs::temp_directory_path() / "swarmtele_acceptance_design";
  int checked = 0, infeasible_ok = 0;
  std::string problems;
  for (const auto& entry : fs::directory_iterator(SWARMTELE_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const std::string stem = entry.path().stem().string();
    const fs::path out = tmp / stem;
    fs::remove_all(out);
    const int code = run_cli("design --scenario " + entry.path().string() + " --out " + out.string());
    if (stem.find("epsilon_ge_r") != std::string::npos) {
      if (code == 3) ++infeasible_ok;
      else problems += " " + stem + ":exit " + std::to_string(code);
      continue;
    }
    if (code != 0) {
      problems += " " + stem + ":exit " + std::to_string(code);
      continue;
    }
    std::ifstream in(out / "design.json");
    const std::string why = recheck_design(json::parse(in));
    if (!why.empty()) problems += " " + stem + ":" + why;
    ++checked;
  }
  const bool pass = problems.empty() && checked > 0 && infeasible_ok > 0;
  return {pass, std::to_string(checked) + " bundled designs re-verified independently (Q, P, Dbar_i, decay bound, Delta fixed point); " +
                    std::to_string(infeasible_ok) + " epsilon >= r scenario(s) exit 3" +
                    (problems.empty() ? "" : "; problems:" + problems)};
}

Outcome negative_controls() {
  int scenarios = 0, caught_kinds = 0;
  std::string caught;
  for (const auto& entry : fs::directory_iterator(SWARMTELE_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    Scenario s = load_scenario(entry.path());
    if (!s.negative_control.active()) continue;
    ++scenarios;
    const SimTrace trace = run(s);
    const CheckResult inv = check_invariance(trace, s.r);
    const CheckResult dec = check_decay(trace);
    // The twin without the invalidation has to pass the same two checks,
    // otherwise a failure says nothing about the invalidation.
    Scenario clean = s;
    clean.negative_control = {};
    const SimTrace clean_trace = run(clean);
    const bool clean_ok = check_invariance(clean_trace, clean.r).passed && check_decay(clean_trace).passed;
    const bool fails = !inv.passed || !dec.passed;
    std::string kind;
    if (s.negative_control.schedule == GainSchedule::frozen) kind += "frozen ";
    if (s.negative_control.schedule == GainSchedule::no_lambda) kind += "no_lambda ";
    if (s.negative_control.force_scale >= 3.0) kind += "3f_bar ";
    if (s.negative_control.controller_disabled) kind += "uncontrolled ";
    const bool counts = s.negative_control.schedule == GainSchedule::frozen || s.negative_control.force_scale >= 3.0;
    if (fails && clean_ok && counts) ++caught_kinds;
    caught += std::string(caught.empty() ? "" : "; ") + s.name + " [" + kind.substr(0, kind.size() - 1) + "] " +
              (fails ? std::string(!inv.passed ? "invariance " : "") + (!dec.passed ? "decay " : "") + "fail" : "not caught") +
              (clean_ok ? "" : ", twin also fails");
  }
  return {caught_kinds > 0, std::to_string(scenarios) + " negative-control scenarios, " + std::to_string(caught_kinds) +
                                " frozen/3f_bar caught with a passing twin: " + (caught.empty() ? "none" : caught)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primary acceptance criteria"};
  std::vector<std::string> only, expect_fail;
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--expect-fail", expect_fail, "Criteria known not to hold");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {"connectivity_invariance", connectivity},
      {"lyapunov_decay", decay},
      {"lemma1_sandwich", sandwich},
      {"synchronization", synchronization},
      {"exponential_iss", iss},
      {"mismatch_bound_gain_identity", mismatch_and_gain},
      {"dynamics_properties_rk4", dynamics},
      {"spectral_identities", spectral},
      {"design_pipeline", design_pipeline},
      {"negative_controls", negative_controls},
  };
  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool expected_fail = std::find(expect_fail.begin(), expect_fail.end(), c.name) != expect_fail.end();
    std::printf("[%s] %s: %s%s\n", o.pass ? "PASS" : "FAIL", c.name, o.summary.c_str(),
                expected_fail ? (o.pass ? " (expected to fail)" : " (expected failure)") : "");
    std::fflush(stdout);
    if (o.pass == expected_fail) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
