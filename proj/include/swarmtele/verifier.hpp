#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swarmtele/controller.hpp"
#include "swarmtele/graph.hpp"
#include "swarmtele/potential.hpp"
#include "swarmtele/trace.hpp"

namespace swarmtele {

struct CheckResult {
  std::string name;
  bool passed = false;
  bool applicable = true;
  double worst_margin = 0.0;  // min over samples of (bound - value); negative on failure
  int worst_index = 0;
  double worst_time = 0.0;
  std::string detail;
};

struct CertificateReport {
  std::vector<CheckResult> checks;
  /// Conjunction of every applicable check.
  bool verdict() const;
  const CheckResult* find(const std::string& name) const;
};

/// Comparison-function constants of the exponential ISS bound.
struct IssConstants {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
};

IssConstants iss_constants(const GainDesign& design, const PotentialParams<>& params,
                           const SpectralConstants& spectral, std::span<const RobotModel> models);

/// V = 1/2 sum_i s_i^T M_i s_i / (B_i + sigma D_i) + V_p.
double lyapunov_V(const SwarmState& state, const TreeNetwork& tree, const GainDesign& design,
                  const PotentialParams<>& params, std::span<const RobotModel> models);

/// phi = [stacked velocities; (D^T kron I) x].
Eigen::VectorXd swarm_phi(const SwarmState& state, const TreeNetwork& tree);

/// Relative/absolute tolerance used by the trace checks.
inline double check_tolerance(double bound) { return 1e-9 + 1e-6 * std::abs(bound); }

CheckResult check_decay(const SimTrace& trace);
CheckResult check_invariance(const SimTrace& trace, double r);
/// Throws PrerequisiteFailed when the run did not preserve every edge.
CheckResult check_iss(const SimTrace& trace);
/// Throws WrongProfile when the trace carries a non-zero user force.
CheckResult check_sync(const SimTrace& trace);
CheckResult check_boundedness(const SimTrace& trace);
/// Lower theta-energy bound and the spectral upper bound at every sample.
CheckResult check_sandwich(const SimTrace& trace);
/// Kbar_i(t) = rho lambda_i2 / 2 at every sample (dynamic schedule only).
CheckResult check_gain_identity(const SimTrace& trace);
/// Logged V_p and V equal their recomputation from the logged state.
CheckResult check_consistency(const SimTrace& trace);
CheckResult check_energy_headroom(const SimTrace& trace);

/// Runs every applicable check.
CertificateReport certify(const SimTrace& trace);

}  // namespace swarmtele
