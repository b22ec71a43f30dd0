#pragma once
// Helpers shared by the unit tests.

#include "doctest.h"
#include "pendag/estimator.hpp"
#include "pendag/graph.hpp"

namespace testing_support {

// Every estimate made in the unit tests goes through here so that its
// optimality conditions are re-checked at 10x the solver tolerance.
inline pendag::EstimateResult audited_estimate(const pendag::DataMatrix& x, const pendag::EstimationConfig& cfg) {
  pendag::EstimateResult r = pendag::estimate(x, cfg);
  const pendag::KktAudit audit = pendag::kkt_audit(x, r, 10.0 * cfg.tol);
  INFO("worst KKT slack " << audit.worst << " in row " << audit.worst_row);
  CHECK(audit.pass);
  return r;
}

inline pendag::AdjacencyMatrix chain(std::size_t p, double rho) {
  pendag::AdjacencyMatrix a(p);
  for (std::size_t i = 1; i < p; ++i) a.set(i, i - 1, rho);
  return a;
}

}  // namespace testing_support
