#pragma once
// Adjacency matrices of DAGs under a known ordering, and the quantities
// derived from them: influence matrix, implied covariance, skeleton and
// ancestral sets.
//
// Orientation: row i holds the parents of node i, so entry (i, j) is the
// effect of node j on node i. With the nodes in causal order the matrix is
// strictly lower triangular. Indices are 0-based here; the IO layer
// converts to 1-based labels.

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace pendag {

inline constexpr double kDefaultEdgeThreshold = 1e-4;

class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(std::size_t p);
  // Throws DomainError unless `m` is square, finite and strictly lower triangular.
  explicit AdjacencyMatrix(Eigen::MatrixXd m);

  std::size_t size() const noexcept { return static_cast<std::size_t>(m_.rows()); }

  double operator()(std::size_t child, std::size_t parent) const { return m_(child, parent); }
  // Throws DomainError if parent >= child or the weight is not finite.
  void set(std::size_t child, std::size_t parent, double weight);

  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  std::size_t nonzeros() const;

  bool operator==(const AdjacencyMatrix& other) const { return m_ == other.m_; }

 private:
  Eigen::MatrixXd m_;
};

struct DagModel {
  AdjacencyMatrix adjacency;
  Eigen::VectorXd noise_sd;

  std::size_t size() const noexcept { return adjacency.size(); }
  // Throws DomainError on length mismatch or a non-positive noise sd.
  void validate() const;
};

struct Edge {
  std::size_t parent;
  std::size_t child;
  double weight = 1.0;

  friend bool operator==(const Edge& a, const Edge& b) {
    return a.parent == b.parent && a.child == b.child;
  }
};

// Edges kept sorted by (child, parent); parent < child always.
class EdgeSet {
 public:
  EdgeSet() = default;
  // Throws DomainError on parent >= child. Duplicate pairs keep the last weight.
  explicit EdgeSet(std::vector<Edge> edges);

  void insert(Edge e);
  bool contains(std::size_t parent, std::size_t child) const;
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  auto begin() const { return edges_.begin(); }
  auto end() const { return edges_.end(); }

  // True when every pair of *this is also in `other` (weights ignored).
  bool subset_of(const EdgeSet& other) const;

  friend bool operator==(const EdgeSet& a, const EdgeSet& b) { return a.edges_ == b.edges_; }

 private:
  std::vector<Edge> edges_;
};

// (I - A)^{-1} by forward substitution. Unit lower triangular.
Eigen::MatrixXd influence_matrix(const AdjacencyMatrix& a);

// Lambda * diag(noise_sd^2) * Lambda^T.
Eigen::MatrixXd covariance_from_dag(const DagModel& m);

// {(j, i) : |A(i, j)| > threshold}
EdgeSet skeleton(const AdjacencyMatrix& a, double threshold = kDefaultEdgeThreshold);

// Nodes j != i that are ancestors or descendants of i, or share an ancestor
// with i, in the graph of edges with |weight| > threshold. Sorted ascending.
std::vector<std::size_t> ancestral_set(const AdjacencyMatrix& a, std::size_t i,
                                       double threshold = kDefaultEdgeThreshold);

}  // namespace pendag
