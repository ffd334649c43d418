#include "swarmtele/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "swarmtele/potential.hpp"

namespace swarmtele {

bool TreeNetwork::adjacent(int i, int j) const {
  const auto& nb = neighbors_.at(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<std::pair<int, int>> TreeNetwork::one_based_edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(edges_.size());
  for (const Edge& e : edges_) out.emplace_back(e.tail + 1, e.head + 1);
  return out;
}

namespace {

int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

}  // namespace

TreeNetwork build_tree(int n_vertices, std::span<const std::pair<int, int>> edges) {
  if (n_vertices < 2) throw NotATree("build_tree: need at least 2 vertices");
  if (static_cast<int>(edges.size()) != n_vertices - 1) {
    throw NotATree("build_tree: expected " + std::to_string(n_vertices - 1) + " edges, got " +
                   std::to_string(edges.size()));
  }
  TreeNetwork tree;
  tree.n_ = n_vertices;
  tree.neighbors_.assign(n_vertices, {});
  std::vector<int> parent(n_vertices);
  std::iota(parent.begin(), parent.end(), 0);

  for (const auto& [a, b] : edges) {
    if (a < 1 || a > n_vertices || b < 1 || b > n_vertices) {
      throw BadIndex("build_tree: vertex (" + std::to_string(a) + "," + std::to_string(b) +
                     ") outside 1.." + std::to_string(n_vertices));
    }
    if (a == b) throw NotATree("build_tree: self loop at vertex " + std::to_string(a));
    const int tail = std::min(a, b) - 1;
    const int head = std::max(a, b) - 1;
    const int ra = find_root(parent, tail);
    const int rb = find_root(parent, head);
    if (ra == rb) {
      throw NotATree("build_tree: edge (" + std::to_string(a) + "," + std::to_string(b) +
                     ") closes a cycle");
    }
    parent[ra] = rb;
    tree.edges_.push_back({tail, head});
    tree.neighbors_[tail].push_back(head);
    tree.neighbors_[head].push_back(tail);
  }
  // n-1 edges without a cycle span all vertices, so the graph is connected.
  for (auto& nb : tree.neighbors_) std::sort(nb.begin(), nb.end());
  return tree;
}

TreeNetwork make_path(int n_vertices) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i < n_vertices; ++i) edges.emplace_back(i, i + 1);
  return build_tree(n_vertices, edges);
}

TreeNetwork make_star(int n_vertices) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 2; i <= n_vertices; ++i) edges.emplace_back(1, i);
  return build_tree(n_vertices, edges);
}

double algebraic_connectivity(const TreeNetwork& tree) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(unweighted_laplacian(tree),
                                                           Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[1];
}

SpectralConstants spectral_constants(const TreeNetwork& tree) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(edge_laplacian(tree),
                                                           Eigen::EigenvaluesOnly);
  return {algebraic_connectivity(tree), eig.eigenvalues()[eig.eigenvalues().size() - 1]};
}

SandwichCheck check_lemma1(const Eigen::MatrixXd& positions, const TreeNetwork& tree,
                           const PotentialParams<double>& params) {
  return check_lemma1(positions, tree, params, spectral_constants(tree));
}

SandwichCheck check_lemma1(const Eigen::MatrixXd& positions, const TreeNetwork& tree,
                           const PotentialParams<double>& params,
                           const SpectralConstants& spectral) {
  constexpr double tol = 1e-9;
  const double r2 = params.r * params.r;
  const int dof = static_cast<int>(positions.rows());

  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(dof, tree.n_vertices());
  double grad_energy = 0.0;
  double v_p = 0.0;
  for (const Edge& e : tree.edges()) {
    const Eigen::VectorXd diff = positions.col(e.tail) - positions.col(e.head);
    const double d2 = diff.squaredNorm();
    if (!(d2 < r2)) {
      throw EdgeTooLong("check_lemma1: edge (" + std::to_string(e.tail + 1) + "," +
                        std::to_string(e.head + 1) + ") not shorter than r");
    }
    const Eigen::VectorXd g = grad_psi_weight(d2, params) * diff;
    theta.col(e.tail) += g;
    theta.col(e.head) -= g;
    grad_energy += g.squaredNorm();
    v_p += psi(d2, params);
  }

  SandwichCheck out;
  out.theta_energy = theta.squaredNorm();
  out.potential = v_p;
  const double scale = 4.0 * params.P / (r2 + params.Q);
  out.lower_bound = scale * spectral.lambda_L * v_p;
  out.upper_bound_literal = scale * spectral.lambda_L_max * v_p;
  out.upper_bound_spectral = spectral.lambda_L_max * grad_energy;
  out.holds = out.theta_energy >= out.lower_bound - tol * std::max(1.0, out.lower_bound);
  out.upper_literal_holds =
      out.theta_energy <= out.upper_bound_literal + tol * std::max(1.0, out.upper_bound_literal);
  out.upper_spectral_holds =
      out.theta_energy <= out.upper_bound_spectral + tol * std::max(1.0, out.upper_bound_spectral);
  return out;
}

}  // namespace swarmtele
