#pragma once

#include <array>
#include <utility>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "hibreg/types.hpp"

namespace hibreg {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Symmetric binary neighborhood structure over planar site locations.
struct NeighborhoodGraph {
  std::vector<std::array<double, 2>> coordinates;  // km
  SparseMatrix adjacency;  // binary, symmetric, zero diagonal

  int n_sites() const { return static_cast<int>(coordinates.size()); }
  std::vector<std::pair<int, int>> edges() const;  // i < j
  Vector degrees() const;
  bool is_connected() const;
};

/// Adjacency of the Delaunay triangulation of the site coordinates.
///
/// Cocircular point sets have no unique triangulation; a deterministic
/// perturbation indexed by input order breaks ties so the result is
/// reproducible. Throws DomainError when all points are collinear or fewer
/// than 3 are given, and IngestError for (near-)duplicate coordinates.
NeighborhoodGraph delaunay_adjacency(
    const std::vector<std::array<double, 2>>& coords);

/// Rebuild a graph from a persisted edge list.
NeighborhoodGraph graph_from_edges(
    std::vector<std::array<double, 2>> coords,
    const std::vector<std::pair<int, int>>& edges);

/// First-order CAR structure: precision Q = tau2 * (D - rho * A) with D the
/// diagonal of row sums of A. Proper (positive definite) for rho in (0, 1) on
/// a connected graph.
struct CarStructure {
  const NeighborhoodGraph* graph = nullptr;
  double rho = 0.5;
  double precision_scale = 1.0;  // tau2
};

/// tau2 * (D - rho * A). Throws DomainError for rho outside (0, 1) or
/// non-positive tau2.
SparseMatrix car_precision(const CarStructure& car);

/// log N(zeta; 0, Q^{-1}) via sparse Cholesky. Throws NumericError when the
/// factorization fails (invalid rho/graph combination).
double gmrf_logdensity(const Vector& zeta, const CarStructure& car);

/// Reusable GMRF evaluator for a fixed graph. The fill-reducing ordering is
/// computed once; refactorizations reuse it as rho changes. The last
/// factorization is cached per rho. Not thread-safe: samplers own one
/// instance per chain.
class CarDensity {
 public:
  explicit CarDensity(const NeighborhoodGraph& graph);

  int n_sites() const { return n_; }

  /// log det(D - rho * A). Throws NumericError when not positive definite.
  double base_logdet(double rho);

  /// zeta' (D - rho * A) zeta (no factorization needed).
  double quad_form(const Vector& zeta, double rho) const;

  double logdensity(const Vector& zeta, double rho, double tau2);

  /// Draw from N(0, (tau2 (D - rho A))^{-1}) given iid standard normals z.
  Vector sample(double rho, double tau2, const Vector& z);

 private:
  void factorize(double rho);

  int n_ = 0;
  SparseMatrix adjacency_;
  Vector degrees_;
  SparseMatrix base_;  // D - rho * A for the cached rho
  Eigen::SimplicialLLT<SparseMatrix> llt_;
  bool analyzed_ = false;
  double cached_rho_ = -1.0;
  double cached_logdet_ = 0.0;
};

}  // namespace hibreg
