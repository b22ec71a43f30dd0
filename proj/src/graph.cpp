#include "pendag/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "pendag/errors.hpp"

namespace pendag {

AdjacencyMatrix::AdjacencyMatrix(std::size_t p) : m_(Eigen::MatrixXd::Zero(p, p)) {
  if (p == 0) throw DomainError("adjacency matrix needs at least one node");
}

AdjacencyMatrix::AdjacencyMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols())
    throw DomainError("adjacency matrix must be square and non-empty");
  for (Eigen::Index j = 0; j < m_.cols(); ++j) {
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
      if (!std::isfinite(m_(i, j))) throw DomainError("adjacency matrix has a non-finite entry");
      if (j >= i && m_(i, j) != 0.0)
        throw DomainError("adjacency matrix must be strictly lower triangular (entry " +
                          std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    }
  }
}

void AdjacencyMatrix::set(std::size_t child, std::size_t parent, double weight) {
  if (child >= size() || parent >= child)
    throw DomainError("edge " + std::to_string(parent + 1) + "->" + std::to_string(child + 1) +
                      " violates the node ordering");
  if (!std::isfinite(weight)) throw DomainError("edge weight must be finite");
  m_(child, parent) = weight;
}

std::size_t AdjacencyMatrix::nonzeros() const {
  return static_cast<std::size_t>((m_.array() != 0.0).count());
}

void DagModel::validate() const {
  if (static_cast<std::size_t>(noise_sd.size()) != adjacency.size())
    throw DomainError("noise_sd length does not match node count");
  for (Eigen::Index i = 0; i < noise_sd.size(); ++i)
    if (!(noise_sd[i] > 0.0) || !std::isfinite(noise_sd[i]))
      throw DomainError("noise_sd must be positive and finite");
}

EdgeSet::EdgeSet(std::vector<Edge> edges) {
  for (const Edge& e : edges) insert(e);
}

void EdgeSet::insert(Edge e) {
  if (e.parent >= e.child)
    throw DomainError("edge " + std::to_string(e.parent + 1) + "->" + std::to_string(e.child + 1) +
                      " violates the node ordering");
  auto key = [](const Edge& x) { return std::pair(x.child, x.parent); };
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e,
                             [&](const Edge& a, const Edge& b) { return key(a) < key(b); });
  if (it != edges_.end() && *it == e)
    it->weight = e.weight;
  else
    edges_.insert(it, e);
}

bool EdgeSet::contains(std::size_t parent, std::size_t child) const {
  const Edge probe{parent, child};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), probe, [](const Edge& a, const Edge& b) {
    return std::pair(a.child, a.parent) < std::pair(b.child, b.parent);
  });
  return it != edges_.end() && *it == probe;
}

bool EdgeSet::subset_of(const EdgeSet& other) const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [&](const Edge& e) { return other.contains(e.parent, e.child); });
}

Eigen::MatrixXd influence_matrix(const AdjacencyMatrix& a) {
  const auto p = static_cast<Eigen::Index>(a.size());
  const Eigen::MatrixXd& A = a.matrix();
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(p, p);
  // Column c solves (I - A) x = e_c; x is zero above row c.
  for (Eigen::Index c = 0; c < p; ++c) {
    lambda(c, c) = 1.0;
    for (Eigen::Index r = c + 1; r < p; ++r) {
      double acc = 0.0;
      for (Eigen::Index j = c; j < r; ++j) acc += A(r, j) * lambda(j, c);
      lambda(r, c) = acc;
    }
  }
  return lambda;
}

Eigen::MatrixXd covariance_from_dag(const DagModel& m) {
  m.validate();
  const Eigen::MatrixXd lambda = influence_matrix(m.adjacency);
  const Eigen::MatrixXd scaled = lambda * m.noise_sd.asDiagonal();
  Eigen::MatrixXd sigma = scaled * scaled.transpose();
  // Symmetrize exactly; the product is symmetric up to rounding only.
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  return sigma;
}

EdgeSet skeleton(const AdjacencyMatrix& a, double threshold) {
  if (!(threshold >= 0.0)) throw DomainError("threshold must be nonnegative");
  EdgeSet out;
  const std::size_t p = a.size();
  for (std::size_t i = 1; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(a(i, j)) > threshold) out.insert({j, i, a(i, j)});
  return out;
}

std::vector<std::size_t> ancestral_set(const AdjacencyMatrix& a, std::size_t i, double threshold) {
  const std::size_t p = a.size();
  if (i >= p) throw IndexOutOfRange("node index out of range");
  if (!(threshold >= 0.0)) throw DomainError("threshold must be nonnegative");

  // anc[r] = ancestors of r including r itself, as a packed bitset.
  const std::size_t words = (p + 63) / 64;
  std::vector<std::uint64_t> anc(p * words, 0);
  auto row = [&](std::size_t r) { return anc.data() + r * words; };
  for (std::size_t r = 0; r < p; ++r) {
    row(r)[r / 64] |= std::uint64_t{1} << (r % 64);
    for (std::size_t j = 0; j < r; ++j) {
      if (std::abs(a(r, j)) <= threshold) continue;
      for (std::size_t w = 0; w < words; ++w) row(r)[w] |= row(j)[w];
    }
  }

  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < p; ++j) {
    if (j == i) continue;
    for (std::size_t w = 0; w < words; ++w) {
      if (row(i)[w] & row(j)[w]) {
        out.push_back(j);
        break;
      }
    }
  }
  return out;
}

}  // namespace pendag
