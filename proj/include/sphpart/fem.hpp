#pragma once

#include "sphpart/geom.hpp"

#include <Eigen/SparseCore>

#include <cstdint>
#include <optional>
#include <vector>

namespace sphpart {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class MassKind { Lumped, Consistent };

/// Piecewise-linear Laplace-Beltrami discretization on the flat triangles.
/// `free_dofs` lists the unconstrained vertices (all of them on a plain mesh;
/// everything but the two poles on a seamed mesh).
struct Assembly {
  SparseMatrix stiffness;
  SparseMatrix mass;
  std::vector<int> free_dofs;
};

/// Cotangent stiffness and lumped (or consistent) mass. On a seamed mesh the
/// couplings across the cut carry a factor -1 and the poles are pinned.
/// Throws AssemblyError for a triangle with area below 1e-14.
Assembly assemble(const TriangleMesh& mesh, MassKind mass_kind = MassKind::Lumped);

/// Principal submatrix on the given index set.
SparseMatrix restrict_to(const SparseMatrix& a, const std::vector<int>& dofs);

struct EigenPair {
  double eigenvalue = 0.0;
  Eigen::VectorXd eigenvector;  // mass-normalized
  double residual = 0.0;        // |A u - lambda B u| / |B u|
};

struct SolverOptions {
  int count = 1;
  double tol = 1e-8;
  /// Spectral shift for the shift-invert iteration. Dirichlet problems are
  /// positive definite and use 0; closed surfaces use -1 for the zero mode.
  double shift = 0.0;
  int max_iterations = 2000;
  /// 0 picks max(count + 4, 2 count).
  int block_size = 0;
  std::uint64_t seed = 0x5eed5eedULL;
  /// Optional starting vectors; they replace the leading random columns.
  Eigen::MatrixXd start;
};

struct EigenSolution {
  std::vector<EigenPair> pairs;  // ascending
  int iterations = 0;
  double max_residual = 0.0;
};

/// The `count` smallest eigenpairs of K u = lambda M u by block shift-invert
/// subspace iteration with Rayleigh-Ritz projection. Deterministic for a
/// fixed seed. Throws ConvergenceError (with the achieved residual) when the
/// iteration budget runs out.
EigenSolution solve_smallest(const SparseMatrix& stiffness, const SparseMatrix& mass,
                             const SolverOptions& options);

/// Eigenpairs of the whole closed mesh (plain: full spectrum; seamed: the
/// antisymmetric spectrum). Eigenvectors are extended to every vertex with
/// zeros at pinned vertices.
EigenSolution solve_mesh_spectrum(const TriangleMesh& mesh, int count, double tol = 1e-8,
                                  MassKind mass_kind = MassKind::Lumped);

/// Vertices whose incident triangles all belong to the mask.
std::vector<int> interior_vertices(const TriangleMesh& mesh, const DomainMask& mask);

/// Dirichlet ground state of the union of masked triangles: the smallest
/// eigenpair restricted to the interior vertices, extended by zero. Throws
/// DomainError for an empty mask and DomainTooThinError when no vertex is
/// interior.
EigenPair domain_ground_state(const TriangleMesh& mesh, const DomainMask& mask, double tol = 1e-8);
/// Same, reusing an existing assembly of `mesh`.
EigenPair domain_ground_state(const TriangleMesh& mesh, const Assembly& assembly,
                              const DomainMask& mask, double tol = 1e-8);

struct NodalCount {
  int count = 0;
  Eigen::VectorXi sign;       // +1, -1 or 0 per vertex
  Eigen::VectorXi component;  // nodal domain id per vertex, -1 on the zero set
};

/// Connected components of the strictly positive and strictly negative vertex
/// sets (mesh-edge adjacency); |u| < eps_rel |u|_inf counts as zero. Throws
/// DegenerateVectorError when every vertex is zero.
NodalCount nodal_domains(const TriangleMesh& mesh, const Eigen::VectorXd& u, double eps_rel = 1e-6);

/// Groups ascending eigenvalues into clusters whose consecutive relative gap
/// is below `rel_gap`; returns (mean value, size) per cluster.
std::vector<std::pair<double, int>> cluster_eigenvalues(const std::vector<double>& values,
                                                        double rel_gap = 1e-3);

}  // namespace sphpart
