#include "sphpart/fem.hpp"

#include "sphpart/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace sphpart {

Assembly assemble(const TriangleMesh& mesh, MassKind mass_kind) {
  const int nv = mesh.num_vertices();
  const auto& tris = mesh.triangles();
  const auto& seam = mesh.seam();
  std::vector<Eigen::Triplet<double>> k_entries;
  std::vector<Eigen::Triplet<double>> m_entries;
  k_entries.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 9);
  m_entries.reserve(static_cast<std::size_t>(mesh.num_triangles()) * (mass_kind == MassKind::Lumped ? 3 : 9));

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    if (area < 1e-14) throw AssemblyError("assemble: degenerate triangle " + std::to_string(t));
    std::array<int, 3> v{tris(t, 0), tris(t, 1), tris(t, 2)};
    std::array<Vec3, 3> p{mesh.vertex(v[0]), mesh.vertex(v[1]), mesh.vertex(v[2])};
    std::array<double, 3> s{1.0, 1.0, 1.0};
    if (seam) {
      for (int c = 0; c < 3; ++c) s[c] = seam->corner_sign(t, c);
    }
    for (int c = 0; c < 3; ++c) {
      // Edge (i, j) is opposite corner c.
      const int i = (c + 1) % 3;
      const int j = (c + 2) % 3;
      const Vec3 e1 = p[i] - p[c];
      const Vec3 e2 = p[j] - p[c];
      const double cot = e1.dot(e2) / e1.cross(e2).norm();
      const double w = 0.5 * cot;
      k_entries.emplace_back(v[i], v[i], w);
      k_entries.emplace_back(v[j], v[j], w);
      k_entries.emplace_back(v[i], v[j], -w * s[i] * s[j]);
      k_entries.emplace_back(v[j], v[i], -w * s[i] * s[j]);
    }
    if (mass_kind == MassKind::Lumped) {
      for (int c = 0; c < 3; ++c) m_entries.emplace_back(v[c], v[c], area / 3.0);
    } else {
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const double m = a == b ? area / 6.0 : area / 12.0 * s[a] * s[b];
          m_entries.emplace_back(v[a], v[b], m);
        }
      }
    }
  }
  Assembly out;
  out.stiffness.resize(nv, nv);
  out.stiffness.setFromTriplets(k_entries.begin(), k_entries.end());
  out.mass.resize(nv, nv);
  out.mass.setFromTriplets(m_entries.begin(), m_entries.end());
  out.free_dofs.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    if (seam && mesh.poles() && (i == (*mesh.poles())[0] || i == (*mesh.poles())[1])) continue;
    out.free_dofs.push_back(i);
  }
  return out;
}

SparseMatrix restrict_to(const SparseMatrix& a, const std::vector<int>& dofs) {
  std::vector<int> local(a.rows(), -1);
  for (std::size_t i = 0; i < dofs.size(); ++i) local[dofs[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (int col = 0; col < a.outerSize(); ++col) {
    if (local[col] < 0) continue;
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      const int row = local[it.row()];
      if (row >= 0) entries.emplace_back(row, local[col], it.value());
    }
  }
  const auto n = static_cast<Eigen::Index>(dofs.size());
  SparseMatrix out(n, n);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

namespace {

// Columns of `y` made orthonormal in the mass inner product.
Eigen::MatrixXd mass_orthonormalize(const Eigen::MatrixXd& y, const SparseMatrix& mass) {
  const Eigen::MatrixXd my = mass * y;
  const Eigen::MatrixXd gram = y.transpose() * my;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() == Eigen::Success) {
    const Eigen::MatrixXd l = llt.matrixL();
    Eigen::MatrixXd q = l.triangularView<Eigen::Lower>().solve(y.transpose()).transpose();
    return q;
  }
  // Rank trouble: modified Gram-Schmidt, twice.
  Eigen::MatrixXd q = y;
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        q.col(j) -= (q.col(i).dot(mass * q.col(j))) * q.col(i);
      }
      const double nrm = std::sqrt(q.col(j).dot(mass * q.col(j)));
      if (nrm > 0.0) q.col(j) /= nrm;
    }
  }
  return q;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

EigenSolution solve_smallest(const SparseMatrix& stiffness, const SparseMatrix& mass,
                             const SolverOptions& options) {
  const auto n = stiffness.rows();
  if (options.count < 1 || options.count > 30) throw DomainError("solve_smallest: count must be in 1..30");
  if (n < options.count) throw DomainError("solve_smallest: fewer unknowns than requested eigenpairs");
  const Eigen::Index block = std::min<Eigen::Index>(
      n, options.block_size > 0 ? options.block_size : std::max(options.count + 4, 2 * options.count));

  SparseMatrix shifted = stiffness - options.shift * mass;
  Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
  if (factor.info() != Eigen::Success) {
    throw ConvergenceError("solve_smallest: factorization of the shifted operator failed",
                           std::numeric_limits<double>::infinity());
  }

  std::mt19937_64 rng(options.seed);
  Eigen::MatrixXd x(n, block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = uniform01(rng) - 0.5;
  }
  if (options.start.size() > 0) {
    if (options.start.rows() != n) throw DomainError("solve_smallest: start block has the wrong row count");
    const Eigen::Index cols = std::min(block, options.start.cols());
    x.leftCols(cols) = options.start.leftCols(cols);
  }
  x = mass_orthonormalize(x, mass);

  EigenSolution out;
  double worst = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::MatrixXd y = factor.solve(mass * x);
    const Eigen::MatrixXd q = mass_orthonormalize(y, mass);
    const Eigen::MatrixXd kq = stiffness * q;
    Eigen::MatrixXd reduced = q.transpose() * kq;
    reduced = 0.5 * (reduced + reduced.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(reduced);
    x = q * ritz.eigenvectors();
    const Eigen::MatrixXd kx = kq * ritz.eigenvectors();
    const Eigen::MatrixXd mx = mass * x;

    worst = 0.0;
    std::vector<EigenPair> pairs;
    pairs.reserve(options.count);
    for (int i = 0; i < options.count; ++i) {
      const double lambda = ritz.eigenvalues()(i);
      const double res = (kx.col(i) - lambda * mx.col(i)).norm() / mx.col(i).norm();
      worst = std::max(worst, res);
      pairs.push_back({lambda, x.col(i), res});
    }
    if (worst <= options.tol) {
      out.pairs = std::move(pairs);
      out.iterations = it;
      out.max_residual = worst;
      return out;
    }
  }
  throw ConvergenceError("solve_smallest: no convergence within " + std::to_string(options.max_iterations) +
                             " iterations (residual " + std::to_string(worst) + ")",
                         worst);
}

EigenSolution solve_mesh_spectrum(const TriangleMesh& mesh, int count, double tol, MassKind mass_kind) {
  const Assembly sys = assemble(mesh, mass_kind);
  SolverOptions opt;
  opt.count = count;
  opt.tol = tol;
  const bool seamed = mesh.seam().has_value();
  opt.shift = seamed ? 0.0 : -1.0;
  EigenSolution sol;
  if (static_cast<int>(sys.free_dofs.size()) == mesh.num_vertices()) {
    sol = solve_smallest(sys.stiffness, sys.mass, opt);
  } else {
    sol = solve_smallest(restrict_to(sys.stiffness, sys.free_dofs), restrict_to(sys.mass, sys.free_dofs), opt);
    for (auto& p : sol.pairs) {
      Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.num_vertices());
      for (std::size_t i = 0; i < sys.free_dofs.size(); ++i) full(sys.free_dofs[i]) = p.eigenvector(i);
      p.eigenvector = std::move(full);
    }
  }
  return sol;
}

std::vector<int> interior_vertices(const TriangleMesh& mesh, const DomainMask& mask) {
  if (mask.size() != mesh.num_triangles()) throw DomainError("interior_vertices: mask size mismatch");
  std::vector<int> out;
  const auto& vt = mesh.topology().vertex_triangles;
  std::vector<char> pinned(mesh.num_vertices(), 0);
  if (mesh.seam() && mesh.poles()) {
    pinned[(*mesh.poles())[0]] = pinned[(*mesh.poles())[1]] = 1;
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (pinned[v]) continue;
    if (std::all_of(vt[v].begin(), vt[v].end(), [&](int t) { return mask(t); })) out.push_back(v);
  }
  return out;
}

EigenPair domain_ground_state(const TriangleMesh& mesh, const DomainMask& mask, double tol) {
  return domain_ground_state(mesh, assemble(mesh), mask, tol);
}

EigenPair domain_ground_state(const TriangleMesh& mesh, const Assembly& assembly, const DomainMask& mask,
                              double tol) {
  if (mask.size() != mesh.num_triangles()) throw DomainError("domain_ground_state: mask size mismatch");
  if (!mask.any()) throw DomainError("domain_ground_state: empty mask");
  const std::vector<int> dofs = interior_vertices(mesh, mask);
  if (dofs.empty()) throw DomainTooThinError("domain_ground_state: no interior vertices");
  SolverOptions opt;
  opt.count = 1;
  opt.tol = tol;
  opt.shift = 0.0;
  opt.block_size = std::min<int>(5, static_cast<int>(dofs.size()));
  EigenPair p;
  if (dofs.size() == 1) {
    const double k = assembly.stiffness.coeff(dofs[0], dofs[0]);
    const double m = assembly.mass.coeff(dofs[0], dofs[0]);
    p.eigenvalue = k / m;
    p.eigenvector = Eigen::VectorXd::Constant(1, 1.0 / std::sqrt(m));
    p.residual = 0.0;
  } else {
    p = solve_smallest(restrict_to(assembly.stiffness, dofs), restrict_to(assembly.mass, dofs), opt).pairs.front();
  }
  Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.num_vertices());
  double sum = 0.0;
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    full(dofs[i]) = p.eigenvector(i);
    sum += p.eigenvector(i);
  }
  // Ground states have one sign; fix it positive.
  if (sum < 0.0) full = -full;
  p.eigenvector = std::move(full);
  return p;
}

NodalCount nodal_domains(const TriangleMesh& mesh, const Eigen::VectorXd& u, double eps_rel) {
  const int nv = mesh.num_vertices();
  if (u.size() != nv) throw DomainError("nodal_domains: vector size does not match the mesh");
  const double cutoff = eps_rel * u.cwiseAbs().maxCoeff();
  NodalCount out;
  out.sign = Eigen::VectorXi::Zero(nv);
  out.component = Eigen::VectorXi::Constant(nv, -1);
  bool any = false;
  for (int v = 0; v < nv; ++v) {
    if (std::abs(u(v)) > cutoff && std::abs(u(v)) > 0.0) {
      out.sign(v) = u(v) > 0.0 ? 1 : -1;
      any = true;
    }
  }
  if (!any) throw DegenerateVectorError("nodal_domains: every vertex is on the zero set");
  const auto& nb = mesh.topology().vertex_neighbors;
  std::vector<int> stack;
  for (int v = 0; v < nv; ++v) {
    if (out.sign(v) == 0 || out.component(v) >= 0) continue;
    const int id = out.count++;
    out.component(v) = id;
    stack.push_back(v);
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b : nb[a]) {
        if (out.component(b) < 0 && out.sign(b) == out.sign(v)) {
          out.component(b) = id;
          stack.push_back(b);
        }
      }
    }
  }
  return out;
}

std::vector<std::pair<double, int>> cluster_eigenvalues(const std::vector<double>& values, double rel_gap) {
  std::vector<std::pair<double, int>> out;
  double sum = 0.0;
  int size = 0;
  double prev = 0.0;
  for (double v : values) {
    if (size > 0 && std::abs(v - prev) > rel_gap * std::max(std::abs(v), 1.0)) {
      out.emplace_back(sum / size, size);
      sum = 0.0;
      size = 0;
    }
    sum += v;
    ++size;
    prev = v;
  }
  if (size > 0) out.emplace_back(sum / size, size);
  return out;
}

}  // namespace sphpart
