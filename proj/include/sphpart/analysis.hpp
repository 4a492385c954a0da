#pragma once

#include "sphpart/fem.hpp"
#include "sphpart/geom.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sphpart {

// ---------------------------------------------------------------------------
// Energies
// ---------------------------------------------------------------------------

/// ((1/k) sum lambda_i^p)^(1/p); p = +inf gives the maximum.
double power_mean(const std::vector<double>& lambdas, double p);

struct PartitionEnergy {
  int k = 0;
  std::vector<double> lambdas;  // per label, label 1 first
  double Lambda = 0.0;          // max
  std::map<double, double> Lambda_p;
  std::vector<double> residuals;
  std::vector<Eigen::VectorXd> ground_states;  // zero-extended, per label
};

/// Ground-state energy of every domain and the Lambda / Lambda^p functionals.
/// Propagates DomainTooThinError from the domain solves.
PartitionEnergy evaluate_partition(const TriangleMesh& mesh, const PartitionLabeling& labeling,
                                   const std::vector<double>& p_list = {1.0, 2.0}, double tol = 1e-8);
PartitionEnergy evaluate_partition(const TriangleMesh& mesh, const Assembly& assembly,
                                   const PartitionLabeling& labeling, const std::vector<double>& p_list,
                                   double tol = 1e-8);

// ---------------------------------------------------------------------------
// Boundary set and topology
// ---------------------------------------------------------------------------

struct CriticalPoint {
  int vertex;
  int valence;  // nu: boundary-edge incidence
};

struct BoundaryHit {
  int vertex;
  int rho;  // partition-boundary edges arriving at a point of the outer boundary
};

struct BoundaryGraph {
  std::vector<int> edges;     // mesh edges separating two labels inside Omega
  std::vector<int> vertices;  // vertices on those edges (sorted)
  std::vector<CriticalPoint> critical_points;
  std::vector<BoundaryHit> boundary_hits;  // empty when Omega is the sphere
  int b0 = 0;  // components of the outer boundary
  int b1 = 0;  // components of N together with the outer boundary
  int domains = 0;  // labels present inside Omega
};

/// Boundary set N of the labeling. With `omega`, triangles outside it are
/// ignored and edges between omega and its complement form the outer boundary.
BoundaryGraph extract_boundary(const TriangleMesh& mesh, const PartitionLabeling& labeling,
                               const std::optional<DomainMask>& omega = std::nullopt);

struct EulerCheck {
  double predicted;  // b1 - b0 + sum(nu/2 - 1) + (1/2) sum rho + 1
  int actual;        // labels present inside Omega (k on the sphere)
  bool consistent;
};

EulerCheck euler_check(const BoundaryGraph& graph, const PartitionLabeling& labeling);

/// Labels are neighbours when they share at least one mesh edge.
struct NeighborGraph {
  int k = 0;
  std::vector<std::pair<int, int>> edges;  // (i, j), i < j, labels 1-based
  Eigen::MatrixX<bool> adjacency;          // k x k, 0-based
};

NeighborGraph neighbor_graph(const TriangleMesh& mesh, const PartitionLabeling& labeling);
/// Admissible iff the neighbour graph is two-colourable.
bool is_admissible(const NeighborGraph& graph);

struct AntipodalResult {
  bool found = false;
  std::optional<std::pair<int, int>> witness;  // vertex indices
  double distance = 0.0;  // geodesic distance of the witness antipode pair
  double tolerance = 0.0;
};

/// Whether the boundary set meets its antipodal image: some boundary vertex
/// lies within `tol` (default twice the longest edge) of the antipode of
/// another. The witness is the closest such pair.
AntipodalResult antipodal_test(const TriangleMesh& mesh, const BoundaryGraph& graph,
                               std::optional<double> tol = std::nullopt);

// ---------------------------------------------------------------------------
// Nodal sets with inversion symmetry, Courant checks
// ---------------------------------------------------------------------------

struct SymmetricNodalClassification {
  int pairs = 0;      // nodal domains swapped with another one by the antipodal map
  int invariant = 0;  // nodal domains mapped to themselves
  int total = 0;      // 2 pairs + invariant
  bool antisymmetric = false;
};

/// Requires an antipodally symmetric mesh and u(-x) = +-u(x) within 1e-6
/// relative; throws SymmetryError otherwise.
SymmetricNodalClassification classify_symmetric_nodal(const TriangleMesh& mesh, const Eigen::VectorXd& u,
                                                      double eps_rel = 1e-6);

enum class CourantVerdict { Sharp, Strict, Violation };

/// Compares the nodal count of an eigenfunction of the n-th eigenvalue (first
/// index of its cluster) with Courant's bound mu <= n.
CourantVerdict courant_sharp_check(int n, int nodal_count);

std::string to_string(CourantVerdict v);

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

struct OptimizerOptions {
  std::vector<double> p_schedule{1.0, 2.0, 4.0, 8.0};
  std::uint64_t seed = 0;
  int max_outer_iters = 30;
  /// Penalty of the relaxed extension problem, as (penalty_scale / h)^2 with
  /// h the longest mesh edge.
  double penalty_scale = 1.0;
  /// Boundary-vertex moves after the relaxation stages (0 disables).
  int polish_sweeps = 8;
  double tol = 1e-8;
};

struct TraceEntry {
  std::string stage;  // "init", "relax", "polish"
  double p = 0.0;
  int iteration = 0;
  double Lambda_p = 0.0;  // energy at the stage's p (current labeling)
  double Lambda = 0.0;
  int moved = 0;
  bool accepted = true;
};

struct OptimizationResult {
  PartitionLabeling labeling;
  PartitionEnergy energy;
  std::vector<TraceEntry> trace;
};

/// Alternating relaxation for Lambda^p-minimal k-partitions of a closed mesh,
/// seeded with the Voronoi labeling of k random points. Deterministic for a
/// fixed seed. Throws DegeneratePartitionError when a label cannot be kept
/// alive.
OptimizationResult optimize_partition(const TriangleMesh& mesh, int k, const OptimizerOptions& options = {});

/// Keeps the largest edge-connected component of every label and hands the
/// remaining triangles to the adjacent label with the highest score; then
/// removes vertex pinches (a label meeting a vertex in two separate fans).
/// `score(t, label)` ranks candidate labels (higher wins, ties to the lower label).
Eigen::VectorXi repair_connectivity(const TriangleMesh& mesh, Eigen::VectorXi labels, int k,
                                    const std::function<double(int, int)>& score);

/// Voronoi labeling of `sites` (nearest by geodesic distance, ties to the lower index).
Eigen::VectorXi voronoi_labels(const TriangleMesh& mesh, const std::vector<Vec3>& sites);

}  // namespace sphpart
