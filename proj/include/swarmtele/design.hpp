#pragma once

#include <string>
#include <vector>

#include "swarmtele/controller.hpp"
#include "swarmtele/graph.hpp"
#include "swarmtele/potential.hpp"
#include "swarmtele/scenario.hpp"

namespace swarmtele {

struct DesignResult {
  GainDesign design;
  PotentialParams<> params;
  SpectralConstants spectral;
  int rounds = 0;          // fixed-point rounds used
  int sigma_halvings = 0;  // restarts with halved sigma
};

/// Runs the five-step gain design for a scenario:
/// heuristics -> damping D_i (Dbar_i = 0) -> Q -> P with the Delta(P) fixed
/// point -> dynamic K_i(t) schedule. Throws DesignInfeasible naming the
/// blocking inequality when no design is found within 64 rounds.
DesignResult design_gains(const Scenario& scenario);

/// GainDesign for given heuristics with D_i at the Dbar_i = 0 equality.
/// Delta is left at zero.
GainDesign base_design(const DesignHeuristics& h, const TreeNetwork& tree, double f_bar);

/// Dbar_i = D_i - 2 sigma sum_j (eta_i + gamma_i + zeta_i + eta_j + gamma_j).
double damping_margin(int i, const GainDesign& design, const TreeNetwork& tree);

/// Lower bound on P ensuring V decays at rate rho.
double decay_lower_bound(const GainDesign& design, double r, double Q, double lambda_L);

/// Delta = 1/2 sum_i lambda_i2/(B_i + sigma D_i) |s_i(0)|^2 + f_bar^2/(4 rho Gamma).
double headroom_delta(const GainDesign& design, const PotentialParams<>& params,
                      const Scenario& scenario);

struct DesignCondition {
  std::string name;
  double margin = 0.0;  // >= 0 (or > 0 for strict conditions) when satisfied
  bool satisfied = false;
  std::string detail;
};

/// Re-evaluates every design condition from the result's numbers.
std::vector<DesignCondition> audit_design(const Scenario& scenario, const DesignResult& result);

}  // namespace swarmtele
