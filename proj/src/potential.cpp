#include "swarmtele/potential.hpp"

#include <algorithm>
#include <sstream>

#include "swarmtele/trace.hpp"

namespace swarmtele {

double q_feasibility_margin(double r, double epsilon, int n_robots, double Q) {
  const double r2 = r * r;
  const double inner2 = (r - epsilon) * (r - epsilon);
  return (r2 - (n_robots - 1) * inner2) * Q + (r2 - inner2) * r2;
}

double p_lower_bound(double r, double epsilon, int n_robots, double Q, double Delta) {
  const double r2 = r * r;
  const double inner2 = (r - epsilon) * (r - epsilon);
  const double a = r2 - inner2 + Q;
  const double den = a * r2 - (n_robots - 1) * Q * inner2;
  return a * Q * Delta / den;
}

double select_Q(double r, double epsilon, int n_robots) {
  const double r2 = r * r;
  const double inner2 = (r - epsilon) * (r - epsilon);
  const double coefficient = r2 - (n_robots - 1) * inner2;
  if (coefficient >= 0.0) return 1.0;
  const double upper = (r2 - inner2) * r2 / ((n_robots - 1) * inner2 - r2);
  return 0.5 * upper;
}

double select_P(double r, double epsilon, int n_robots, double Q, double Delta,
                double decay_bound) {
  const double bound = std::max(p_lower_bound(r, epsilon, n_robots, Q, Delta), decay_bound);
  return std::max(1.0, 1.05 * bound);
}

InvarianceReport check_prop2_invariance(const SimTrace& trace, const PotentialParams<double>& params,
                                        double Delta) {
  InvarianceReport report;
  if (trace.samples.empty()) {
    report.detail = "empty trace";
    return report;
  }
  const double ceiling = trace.samples.front().V_p + Delta;
  report.energy_margin = ceiling - trace.samples.front().V_p;
  report.distance_margin = params.r;
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const TraceSample& s = trace.samples[k];
    const double energy_margin = ceiling - s.V_p;
    if (energy_margin < report.energy_margin) {
      report.energy_margin = energy_margin;
      report.energy_index = static_cast<int>(k);
    }
    const double longest = s.edge_dist.size() > 0 ? s.edge_dist.maxCoeff() : 0.0;
    if (params.r - longest < report.distance_margin) {
      report.distance_margin = params.r - longest;
      report.distance_index = static_cast<int>(k);
    }
  }
  report.premise_holds = report.energy_margin >= -(1e-9 + 1e-6 * std::abs(ceiling));
  report.conclusion_holds = report.distance_margin > 0.0 && !trace.link_broken;
  std::ostringstream os;
  os << "V_p(0)+Delta=" << ceiling << " min energy margin=" << report.energy_margin
     << " min distance margin=" << report.distance_margin;
  if (trace.link_broken) os << " (run aborted: link broken at t=" << trace.broken_time << ")";
  report.detail = os.str();
  return report;
}

}  // namespace swarmtele
