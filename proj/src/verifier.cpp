#include "swarmtele/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace swarmtele {

bool SimTrace::zero_force() const {
  return std::all_of(samples.begin(), samples.end(),
                     [](const TraceSample& s) { return s.f.squaredNorm() == 0.0; });
}

bool CertificateReport::verdict() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return !c.applicable || c.passed; });
}

const CheckResult* CertificateReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

IssConstants iss_constants(const GainDesign& design, const PotentialParams<>& params,
                           const SpectralConstants& spectral, std::span<const RobotModel> models) {
  const double r2q = params.r * params.r + params.Q;
  const double s2 = design.sigma * design.sigma;
  double inertia_term = 0.0;
  double lambda2 = 0.0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const InertiaBounds& b = models[i].bounds();
    inertia_term =
        std::max(inertia_term, 4.0 * design.coupling_denominator(static_cast<int>(i)) / b.lambda_min);
    lambda2 = std::max(lambda2, b.lambda_max);
  }
  IssConstants k;
  k.kappa1 = std::max(inertia_term, 8.0 * s2 * spectral.lambda_L_max * params.P / r2q) +
             r2q / params.P;
  k.kappa2 = std::max(lambda2, 4.0 * s2 * lambda2 * spectral.lambda_L_max * params.P * params.P /
                                       (r2q * params.Q) +
                                   params.P / params.Q);
  return k;
}

double lyapunov_V(const SwarmState& state, const TreeNetwork& tree, const GainDesign& design,
                  const PotentialParams<>& params, std::span<const RobotModel> models) {
  double kinetic = 0.0;
  for (int i = 0; i < tree.n_vertices(); ++i) {
    const Eigen::VectorXd s =
        surface(state.xdot.col(i), theta(i, state.x, tree, params), design.sigma);
    kinetic += s.dot(mass_matrix(models[i], state.x.col(i)) * s) / design.coupling_denominator(i);
  }
  return 0.5 * kinetic + total_potential(state.x, tree, params);
}

Eigen::VectorXd swarm_phi(const SwarmState& state, const TreeNetwork& tree) {
  const Eigen::Index dof = state.x.rows();
  const Eigen::Index n = state.x.cols();
  Eigen::VectorXd phi(dof * n + dof * tree.n_edges());
  phi.head(dof * n) = state.xdot.reshaped();
  for (int k = 0; k < tree.n_edges(); ++k) {
    const Edge& e = tree.edge(k);
    phi.segment(dof * n + dof * k, dof) = state.x.col(e.head) - state.x.col(e.tail);
  }
  return phi;
}

namespace {

// Tracks the worst (smallest) margin of a family of `value <= bound` tests.
struct Worst {
  double margin = std::numeric_limits<double>::infinity();
  int index = 0;
  double time = 0.0;
  bool ok = true;

  void update(double bound, double value, int k, double t, double tol) {
    const double m = bound - value;
    if (!(m >= -tol)) ok = false;
    if (m < margin || std::isnan(m)) {
      margin = m;
      index = k;
      time = t;
    }
  }

  CheckResult result(std::string name, std::string detail) const {
    CheckResult c;
    c.name = std::move(name);
    c.passed = ok;
    c.worst_margin = margin;
    c.worst_index = index;
    c.worst_time = time;
    c.detail = std::move(detail);
    return c;
  }
};

double sample_force_norm(const TraceSample& s) { return s.f.norm(); }

}  // namespace

CheckResult check_decay(const SimTrace& trace) {
  const GainDesign& d = trace.design.design;
  Worst w;
  if (trace.samples.empty()) return w.result("decay", "empty trace");
  const double v0 = trace.samples.front().V;
  double chi_sup = 0.0;
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const TraceSample& s = trace.samples[k];
    const double fn = sample_force_norm(s);
    chi_sup = std::max(chi_sup, fn * fn / (4.0 * d.rho * d.Gamma));
    const double bound = std::exp(-d.rho * s.t) * v0 + chi_sup;
    w.update(bound, s.V, static_cast<int>(k), s.t, check_tolerance(bound));
  }
  std::ostringstream os;
  os << "V(t) <= exp(-rho t) V(0) + sup chi; V(0)=" << v0 << ", sup chi=" << chi_sup
     << ", worst margin " << w.margin << " at t=" << w.time;
  return w.result("decay", os.str());
}

CheckResult check_invariance(const SimTrace& trace, double r) {
  Worst w;
  double first_violation = std::numeric_limits<double>::quiet_NaN();
  double margin0 = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const TraceSample& s = trace.samples[k];
    const double longest = s.edge_dist.size() ? s.edge_dist.maxCoeff() : 0.0;
    if (k == 0) margin0 = r - longest;
    if (!(longest < r) && std::isnan(first_violation)) first_violation = s.t;
    w.update(r, longest, static_cast<int>(k), s.t, 0.0);
    if (!(longest < r)) w.ok = false;
  }
  if (trace.link_broken) {
    w.ok = false;
    if (std::isnan(first_violation)) first_violation = trace.broken_time;
  }
  std::ostringstream os;
  os << "min margin r - max|x_ij| = " << w.margin << " at t=" << w.time
     << "; margin at t=0: " << margin0;
  if (!w.ok) os << "; first violation at t=" << first_violation;
  if (trace.link_broken) os << " (" << trace.failure << ")";
  CheckResult c = w.result("invariance", os.str());
  if (!w.ok && !std::isnan(first_violation)) c.worst_time = first_violation;
  return c;
}

CheckResult check_iss(const SimTrace& trace) {
  if (!check_invariance(trace, trace.scenario.r).passed) {
    throw PrerequisiteFailed("check_iss: edge-set invariance failed, ISS bound not applicable");
  }
  const auto& models = trace.scenario.models;
  const GainDesign& d = trace.design.design;
  const IssConstants kap =
      iss_constants(d, trace.design.params, trace.design.spectral, models);
  const TreeNetwork& tree = trace.scenario.tree;

  Worst w;
  Worst lower_sandwich;  // |phi|^2 <= kappa1 V
  Worst upper_sandwich;  // V <= kappa2 |phi|^2
  if (trace.samples.empty()) return w.result("iss", "empty trace");
  const double phi0 = swarm_phi({trace.samples[0].x, trace.samples[0].xdot}, tree).norm();
  const double decay_gain = std::sqrt(kap.kappa1 * kap.kappa2);
  const double input_gain = std::sqrt(kap.kappa1 / (4.0 * d.rho * d.Gamma));
  double f_sup = 0.0;
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const TraceSample& s = trace.samples[k];
    f_sup = std::max(f_sup, sample_force_norm(s));
    const double phi = swarm_phi({s.x, s.xdot}, tree).norm();
    const double bound = decay_gain * std::exp(-0.5 * d.rho * s.t) * phi0 + input_gain * f_sup;
    w.update(bound, phi, static_cast<int>(k), s.t, check_tolerance(bound));
    lower_sandwich.update(kap.kappa1 * s.V, phi * phi, static_cast<int>(k), s.t,
                          check_tolerance(kap.kappa1 * s.V));
    upper_sandwich.update(kap.kappa2 * phi * phi, s.V, static_cast<int>(k), s.t,
                          check_tolerance(kap.kappa2 * phi * phi));
  }
  std::ostringstream os;
  os << "|phi(t)| <= sqrt(k1 k2) exp(-rho t/2)|phi(0)| + sqrt(k1/(4 rho Gamma)) sup|f|; kappa1="
     << kap.kappa1 << " kappa2=" << kap.kappa2 << ", worst margin " << w.margin << " at t="
     << w.time << "; |phi|^2<=k1 V " << (lower_sandwich.ok ? "holds" : "VIOLATED")
     << ", V<=k2|phi|^2 " << (upper_sandwich.ok ? "holds" : "VIOLATED");
  return w.result("iss", os.str());
}

CheckResult check_sync(const SimTrace& trace) {
  if (!trace.zero_force()) throw WrongProfile("check_sync: trace has a non-zero user force");
  CheckResult c;
  c.name = "sync";
  if (trace.samples.empty()) {
    c.detail = "empty trace";
    return c;
  }
  const GainDesign& d = trace.design.design;
  const TreeNetwork& tree = trace.scenario.tree;
  auto max_speed = [](const TraceSample& s) {
    return s.xdot.size() ? s.xdot.colwise().norm().maxCoeff() : 0.0;
  };
  auto max_edge = [](const TraceSample& s) {
    return s.edge_dist.size() ? s.edge_dist.maxCoeff() : 0.0;
  };

  // Evaluate at 10/rho, or at the end of a shorter trace.
  const double horizon = 10.0 / d.rho;
  std::size_t end = 0;
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    if (trace.samples[k].t <= horizon + 0.5 * trace.scenario.dt) end = k;
  }
  double peak_speed = 0.0;
  double peak_edge = 0.0;
  for (std::size_t k = 0; k <= end; ++k) {
    peak_speed = std::max(peak_speed, max_speed(trace.samples[k]));
    peak_edge = std::max(peak_edge, max_edge(trace.samples[k]));
  }
  // Reference is the initial value; a start at rest (or coincident) uses the
  // peak over the window instead.
  const double v0 = max_speed(trace.samples.front());
  const double e0 = max_edge(trace.samples.front());
  const double v_ref = v0 > 0.0 ? v0 : peak_speed;
  const double e_ref = e0 > 0.0 ? e0 : peak_edge;
  const double v_end = max_speed(trace.samples[end]);
  const double e_end = max_edge(trace.samples[end]);
  const bool speed_ok = v_ref == 0.0 ? v_end == 0.0 : v_end < 1e-3 * v_ref;
  const bool edge_ok = e_ref == 0.0 ? e_end == 0.0 : e_end < 1e-3 * e_ref;

  const IssConstants kap =
      iss_constants(d, trace.design.params, trace.design.spectral, trace.scenario.models);
  const double phi0 = swarm_phi({trace.samples[0].x, trace.samples[0].xdot}, tree).norm();
  Worst envelope;
  for (std::size_t k = 0; k <= end; ++k) {
    const TraceSample& s = trace.samples[k];
    const double bound = std::sqrt(kap.kappa1 * kap.kappa2) * std::exp(-0.5 * d.rho * s.t) * phi0;
    envelope.update(bound, swarm_phi({s.x, s.xdot}, tree).norm(), static_cast<int>(k), s.t,
                    check_tolerance(bound));
  }

  c.passed = speed_ok && edge_ok && envelope.ok;
  c.worst_margin = std::min({1e-3 * v_ref - v_end, 1e-3 * e_ref - e_end, envelope.margin});
  c.worst_index = static_cast<int>(end);
  c.worst_time = trace.samples[end].t;
  std::ostringstream os;
  os << "at t=" << trace.samples[end].t << ": max|xdot| " << v_end << " vs ref " << v_ref
     << ", max|x_ij| " << e_end << " vs ref " << e_ref << " (need < 1e-3 x ref); exp(-rho t/2) envelope "
     << (envelope.ok ? "holds" : "VIOLATED");
  c.detail = os.str();
  return c;
}

CheckResult check_boundedness(const SimTrace& trace) {
  Worst w;
  if (trace.samples.empty()) return w.result("boundedness", "empty trace");
  const GainDesign& d = trace.design.design;
  const TreeNetwork& tree = trace.scenario.tree;
  const IssConstants kap =
      iss_constants(d, trace.design.params, trace.design.spectral, trace.scenario.models);
  double f_sup = 0.0;
  for (const auto& s : trace.samples) f_sup = std::max(f_sup, sample_force_norm(s));
  const double phi0 = swarm_phi({trace.samples[0].x, trace.samples[0].xdot}, tree).norm();
  const double ceiling = std::sqrt(kap.kappa1 * kap.kappa2) * phi0 +
                         std::sqrt(kap.kappa1 / (4.0 * d.rho * d.Gamma)) * f_sup;
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const TraceSample& s = trace.samples[k];
    double worst = 0.0;
    bool finite = s.xdot.allFinite() && s.edge_dist.allFinite();
    if (s.xdot.size()) worst = std::max(worst, s.xdot.colwise().norm().maxCoeff());
    if (s.edge_dist.size()) worst = std::max(worst, s.edge_dist.maxCoeff());
    w.update(ceiling, finite ? worst : std::numeric_limits<double>::infinity(),
             static_cast<int>(k), s.t, check_tolerance(ceiling));
  }
  std::ostringstream os;
  os << "max |xdot_i|, |x_ij| <= ceiling " << ceiling << "; worst margin " << w.margin
     << " at t=" << w.time;
  return w.result("boundedness", os.str());
}

CheckResult check_sandwich(const SimTrace& trace) {
  Worst lower;
  Worst upper;
  int literal_violations = 0;
  double literal_worst_ratio = 0.0;
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const TraceSample& s = trace.samples[k];
    const SandwichCheck sc =
        check_lemma1(s.x, trace.scenario.tree, trace.design.params, trace.design.spectral);
    lower.update(sc.theta_energy, sc.lower_bound, static_cast<int>(k), s.t,
                 1e-9 * std::max(1.0, sc.lower_bound));
    upper.update(sc.upper_bound_spectral, sc.theta_energy, static_cast<int>(k), s.t,
                 1e-9 * std::max(1.0, sc.upper_bound_spectral));
    if (!sc.upper_literal_holds) {
      ++literal_violations;
      if (sc.upper_bound_literal > 0.0) {
        literal_worst_ratio = std::max(literal_worst_ratio, sc.theta_energy / sc.upper_bound_literal);
      }
    }
  }
  CheckResult c;
  c.name = "sandwich";
  c.passed = lower.ok && upper.ok;
  c.worst_margin = std::min(lower.margin, upper.margin);
  c.worst_index = lower.margin < upper.margin ? lower.index : upper.index;
  c.worst_time = lower.margin < upper.margin ? lower.time : upper.time;
  std::ostringstream os;
  os << "4 lambda_L P/(r^2+Q) V_p <= sum theta^T theta " << (lower.ok ? "holds" : "VIOLATED")
     << " (worst margin " << lower.margin << "); sum theta^T theta <= lambda_L_max sum|grad psi_e|^2 "
     << (upper.ok ? "holds" : "VIOLATED") << "; V_p-form upper bound 4 lambda_L_max P/(r^2+Q) V_p exceeded at "
     << literal_violations << "/" << trace.samples.size() << " samples (max ratio "
     << literal_worst_ratio << ", informational)";
  c.detail = os.str();
  return c;
}

CheckResult check_gain_identity(const SimTrace& trace) {
  Worst w;
  const auto& sc = trace.scenario;
  const GainDesign& d = trace.design.design;
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const TraceSample& s = trace.samples[k];
    for (int i = 0; i < sc.n_robots(); ++i) {
      const double kbar =
          gain_margin(i, s.K[i], s.x, sc.tree, d, trace.design.params, sc.models);
      const double target = 0.5 * d.rho * sc.models[i].bounds().lambda_max;
      const double tol = 1e-12 * std::max(1.0, std::abs(s.K[i]));
      // Two-sided: record |Kbar - target| against the tolerance.
      w.update(tol, std::abs(kbar - target), static_cast<int>(k), s.t, 0.0);
    }
  }
  std::ostringstream os;
  os << "|Kbar_i(t) - rho lambda_i2/2| <= 1e-12 max(1,K_i); worst slack " << w.margin << " at t="
     << w.time;
  CheckResult c = w.result("gain_identity", os.str());
  if (sc.negative_control.schedule != GainSchedule::dynamic || sc.negative_control.controller_disabled) {
    c.applicable = false;
    c.detail = std::string("not applicable: gain schedule is ") + to_string(sc.negative_control.schedule) +
               (sc.negative_control.controller_disabled ? ", controller disabled" : "");
  }
  return c;
}

CheckResult check_consistency(const SimTrace& trace) {
  Worst w;
  const auto& sc = trace.scenario;
  const DesignResult& dr = trace.design;
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const TraceSample& s = trace.samples[k];
    const SwarmState state{s.x, s.xdot};
    const double vp = total_potential(s.x, sc.tree, dr.params);
    const double v = lyapunov_V(state, sc.tree, dr.design, dr.params, sc.models);
    double worst = std::max(std::abs(vp - s.V_p) / std::max(1.0, std::abs(vp)),
                            std::abs(v - s.V) / std::max(1.0, std::abs(v)));
    if (!sc.negative_control.controller_disabled) {
      for (int i = 0; i < sc.n_robots(); ++i) {
        const Eigen::VectorXd u =
            control(i, s.x, s.xdot, sc.tree, dr.design, dr.params, sc.models, s.K[i]).u;
        worst = std::max(worst, (u - s.u.col(i)).norm() / std::max(1.0, u.norm()));
      }
    }
    w.update(1e-10, worst, static_cast<int>(k), s.t, 0.0);
  }
  std::ostringstream os;
  os << "logged V_p, V, u match recomputation to 1e-10 (relative); worst slack " << w.margin;
  return w.result("consistency", os.str());
}

CheckResult check_energy_headroom(const SimTrace& trace) {
  const InvarianceReport r =
      check_prop2_invariance(trace, trace.design.params, trace.design.design.Delta);
  CheckResult c;
  c.name = "energy_headroom";
  c.passed = r.premise_holds && r.conclusion_holds;
  c.worst_margin = std::min(r.energy_margin, r.distance_margin);
  c.worst_index = r.energy_margin < r.distance_margin ? r.energy_index : r.distance_index;
  if (!trace.samples.empty()) c.worst_time = trace.samples[c.worst_index].t;
  c.detail = "V_p(t) <= V_p(0) + Delta and every edge < r: " + r.detail;
  return c;
}

CertificateReport certify(const SimTrace& trace) {
  CertificateReport report;
  const CheckResult invariance = check_invariance(trace, trace.scenario.r);
  report.checks.push_back(invariance);
  report.checks.push_back(check_energy_headroom(trace));
  report.checks.push_back(check_decay(trace));
  if (invariance.passed) {
    report.checks.push_back(check_iss(trace));
  } else {
    CheckResult c;
    c.name = "iss";
    c.applicable = false;
    c.detail = "not applicable: prerequisite (invariance) failed";
    report.checks.push_back(c);
  }
  report.checks.push_back(check_boundedness(trace));
  report.checks.push_back(check_sandwich(trace));
  report.checks.push_back(check_gain_identity(trace));
  report.checks.push_back(check_consistency(trace));
  if (trace.zero_force()) {
    report.checks.push_back(check_sync(trace));
  } else {
    CheckResult c;
    c.name = "sync";
    c.applicable = false;
    c.detail = "not applicable: user force is non-zero";
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace swarmtele
