#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "swarmtele/errors.hpp"

namespace swarmtele {

template <typename Scalar>
struct PotentialParams;

/// Oriented tree edge. Vertex indices are zero-based; the lower index is
/// always the tail.
struct Edge {
  int tail = 0;
  int head = 0;
};

/// Immutable communication tree E(0) over robots 0..N-1.
class TreeNetwork {
 public:
  TreeNetwork() = default;

  int n_vertices() const { return n_; }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int k) const { return edges_[k]; }

  /// Initial neighbours of vertex i, sorted ascending.
  const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }
  int degree(int i) const { return static_cast<int>(neighbors_[i].size()); }
  bool adjacent(int i, int j) const;

  /// Edge list in the one-based form accepted by build_tree.
  std::vector<std::pair<int, int>> one_based_edges() const;

 private:
  friend TreeNetwork build_tree(int, std::span<const std::pair<int, int>>);

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> neighbors_;
};

/// Validates and orients a tree. `edges` uses one-based vertex labels.
/// Throws BadIndex for labels outside 1..n and NotATree when the edge set
/// is not a spanning tree.
TreeNetwork build_tree(int n_vertices, std::span<const std::pair<int, int>> edges);

TreeNetwork make_path(int n_vertices);
TreeNetwork make_star(int n_vertices);

template <typename Scalar = double>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar = double>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// N x (N-1) incidence matrix: +1 at the head, -1 at the tail of each edge.
template <typename Scalar = double>
DenseMatrix<Scalar> incidence_matrix(const TreeNetwork& tree) {
  DenseMatrix<Scalar> d = DenseMatrix<Scalar>::Zero(tree.n_vertices(), tree.n_edges());
  for (int k = 0; k < tree.n_edges(); ++k) {
    d(tree.edge(k).head, k) = Scalar(1);
    d(tree.edge(k).tail, k) = Scalar(-1);
  }
  return d;
}

/// Weighted Laplacian built entry-wise from the adjacency weights a_ij.
template <typename Scalar = double>
DenseMatrix<Scalar> weighted_laplacian(const TreeNetwork& tree,
                                       const DenseVector<Scalar>& weights) {
  if (weights.size() != tree.n_edges()) {
    throw BadIndex("weighted_laplacian: one weight per edge required");
  }
  const int n = tree.n_vertices();
  DenseMatrix<Scalar> l = DenseMatrix<Scalar>::Zero(n, n);
  for (int k = 0; k < tree.n_edges(); ++k) {
    const Scalar w = weights[k];
    if (!(w > Scalar(0))) throw NonPositiveWeight("weighted_laplacian: weights must be > 0");
    const Edge& e = tree.edge(k);
    l(e.tail, e.head) = -w;
    l(e.head, e.tail) = -w;
    l(e.tail, e.tail) += w;
    l(e.head, e.head) += w;
  }
  return l;
}

/// Degree-minus-adjacency Laplacian with unit weights.
template <typename Scalar = double>
DenseMatrix<Scalar> unweighted_laplacian(const TreeNetwork& tree) {
  return weighted_laplacian<Scalar>(tree, DenseVector<Scalar>::Ones(tree.n_edges()));
}

/// L_e = D^T D, (N-1) x (N-1).
template <typename Scalar = double>
DenseMatrix<Scalar> edge_laplacian(const TreeNetwork& tree) {
  const DenseMatrix<Scalar> d = incidence_matrix<Scalar>(tree);
  return d.transpose() * d;
}

struct SpectralConstants {
  double lambda_L = 0.0;      // second-smallest eigenvalue of the unweighted Laplacian
  double lambda_L_max = 0.0;  // largest eigenvalue of the edge Laplacian
};

double algebraic_connectivity(const TreeNetwork& tree);
SpectralConstants spectral_constants(const TreeNetwork& tree);

/// Both sides of the theta-energy / edge-potential sandwich at one
/// configuration. `theta_energy` is sum_i theta_i^T theta_i.
struct SandwichCheck {
  double theta_energy = 0.0;
  double potential = 0.0;
  double lower_bound = 0.0;           // 4 lambda_L P / (r^2+Q) * V_p
  double upper_bound_literal = 0.0;   // 4 lambda_L_max P / (r^2+Q) * V_p
  double upper_bound_spectral = 0.0;  // lambda_L_max * sum_e |grad psi_e|^2
  bool holds = false;                 // lower bound
  bool upper_literal_holds = false;
  bool upper_spectral_holds = false;
};

/// Evaluates the lower (and both upper) theta-energy bounds at a configuration
/// given as a dof x N matrix (column i = robot i). Throws EdgeTooLong if an
/// edge is at or beyond r. Comparisons use tol * max(1, bound), tol = 1e-9.
SandwichCheck check_lemma1(const Eigen::MatrixXd& positions, const TreeNetwork& tree,
                           const PotentialParams<double>& params);
SandwichCheck check_lemma1(const Eigen::MatrixXd& positions, const TreeNetwork& tree,
                           const PotentialParams<double>& params,
                           const SpectralConstants& spectral);

}  // namespace swarmtele
