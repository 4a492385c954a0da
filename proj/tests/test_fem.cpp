#include "sphpart/errors.hpp"
#include "sphpart/exact.hpp"
#include "sphpart/fem.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sphpart;

namespace {

constexpr double kPi = std::numbers::pi;

DomainMask northern(const TriangleMesh& m) {
  DomainMask mask(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) mask(t) = m.centroid(t).z() > 0.0;
  return mask;
}

Eigen::VectorXd sample(const TriangleMesh& m, double (*f)(double, double)) {
  Eigen::VectorXd u(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) u(v) = f(colatitude(m.vertex(v)), azimuth(m.vertex(v)));
  return u;
}

}  // namespace

TEST_SUITE("fem") {

TEST_CASE("assembly invariants") {
  const TriangleMesh m = build_icosphere(3);
  const Assembly a = assemble(m);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.num_vertices());
  CHECK((a.stiffness * ones).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(Eigen::MatrixXd(a.mass).sum() == doctest::Approx(m.triangle_areas().sum()).epsilon(1e-12));
  CHECK(Eigen::MatrixXd(assemble(m, MassKind::Consistent).mass).sum() ==
        doctest::Approx(m.triangle_areas().sum()).epsilon(1e-12));
  CHECK((Eigen::MatrixXd(a.stiffness) - Eigen::MatrixXd(a.stiffness).transpose()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(a.free_dofs.size() == static_cast<std::size_t>(m.num_vertices()));

  const TriangleMesh s = build_seamed_mesh(2);
  CHECK(assemble(s).free_dofs.size() == static_cast<std::size_t>(s.num_vertices() - 2));
}

TEST_CASE("seamed Rayleigh quotient of the lowest antisymmetric mode") {
  const TriangleMesh m = build_seamed_mesh(3);
  const Assembly a = assemble(m);
  const Eigen::VectorXd u =
      sample(m, [](double th, double ph) { return std::cos(0.5 * ph) * std::sqrt(std::sin(th)); });
  const Eigen::VectorXd uf = u(a.free_dofs);
  const SparseMatrix k = restrict_to(a.stiffness, a.free_dofs);
  const SparseMatrix mm = restrict_to(a.mass, a.free_dofs);
  const double rq = uf.dot(k * uf) / uf.dot(mm * uf);
  CHECK(std::abs(rq - 0.75) < 0.02 * 0.75);
}

TEST_CASE("sphere spectrum by FEM") {
  const TriangleMesh m = build_icosphere(5);
  const EigenSolution sol = solve_mesh_spectrum(m, 9);
  const double exact[] = {0, 2, 2, 2, 6, 6, 6, 6, 6};
  for (int i = 0; i < 9; ++i) {
    const double err = std::abs(sol.pairs[i].eigenvalue - exact[i]) / std::max(exact[i], 1.0);
    CHECK(err < (i < 4 ? 0.01 : 0.015));
    CHECK(sol.pairs[i].residual <= 1e-8);
  }
  // Mass normalization.
  const Assembly a = assemble(m);
  const Eigen::VectorXd& u = sol.pairs[3].eigenvector;
  CHECK(u.dot(a.mass * u) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("antisymmetric spectrum by FEM") {
  const EigenSolution sol = solve_mesh_spectrum(build_seamed_mesh(3), 6);
  const double exact[] = {0.75, 0.75, 3.75, 3.75, 3.75, 3.75};
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(sol.pairs[i].eigenvalue - exact[i]) < 0.02 * exact[i]);
    // No symmetric eigenvalue (0, 2, ...) leaks in.
    CHECK(std::abs(sol.pairs[i].eigenvalue) > 0.5);
    CHECK(std::abs(sol.pairs[i].eigenvalue - 2.0) > 0.5);
    CHECK(sol.pairs[i].residual <= 1e-8);
  }
}

TEST_CASE("Dirichlet ground states of exact domains") {
  const TriangleMesh ico = build_icosphere(5);
  const EigenPair h = domain_ground_state(ico, northern(ico));
  CHECK(std::abs(h.eigenvalue - 2.0) < 0.01 * 2.0);
  CHECK(h.residual <= 1e-8);
  CHECK(h.eigenvector.minCoeff() >= -1e-10);  // ground state keeps one sign

  const TriangleMesh grid = build_latlong_sphere(96, 192);
  const PartitionLabeling y = make_lune_partition(grid, 3);
  for (int j = 1; j <= 3; ++j) {
    CHECK(std::abs(domain_ground_state(grid, y.mask(j)).eigenvalue - 3.75) < 0.01 * 3.75);
  }

  const double s = (1.0 - 1.0 / std::sqrt(3.0)) / 2.0;
  const EigenPair cap = domain_ground_state(ico, make_cap_mask(ico, Vec3::UnitZ(), s));
  CHECK(std::abs(cap.eigenvalue - 6.0) < 0.015 * 6.0);
}

TEST_CASE("domain monotonicity") {
  const TriangleMesh m = build_icosphere(4);
  const Assembly a = assemble(m);
  double prev = INFINITY;
  for (double s : {0.1, 0.2, 0.3, 0.45}) {
    const double l = domain_ground_state(m, a, make_cap_mask(m, Vec3(1, 2, 3).normalized(), s)).eigenvalue;
    CHECK(l < prev);
    prev = l;
  }
}

TEST_CASE("convergence order on the hemisphere") {
  double err[3];
  for (int i = 0; i < 3; ++i) {
    const TriangleMesh m = build_icosphere(4 + i);
    err[i] = std::abs(domain_ground_state(m, northern(m), 1e-10).eigenvalue - 2.0);
  }
  CHECK(err[0] / err[1] >= 3.0);
  CHECK(err[1] / err[2] >= 3.0);
}

TEST_CASE("solver errors") {
  const TriangleMesh m = build_icosphere(2);
  DomainMask none = DomainMask::Constant(m.num_triangles(), false);
  CHECK_THROWS_AS(domain_ground_state(m, none), DomainError);
  DomainMask one = none;
  one(0) = true;
  CHECK_THROWS_AS(domain_ground_state(m, one), DomainTooThinError);
  CHECK_THROWS_AS(solve_mesh_spectrum(m, 0), DomainError);
  CHECK_THROWS_AS(solve_mesh_spectrum(m, 31), DomainError);

  const Assembly a = assemble(m);
  SolverOptions opt;
  opt.count = 4;
  opt.shift = -1.0;
  opt.tol = 1e-300;
  opt.max_iterations = 5;
  try {
    solve_smallest(a.stiffness, a.mass, opt);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.achieved_residual() > 0.0);
    CHECK(std::isfinite(e.achieved_residual()));
  }
  opt.tol = 1e-8;
  opt.max_iterations = 2000;
  opt.start = Eigen::MatrixXd::Ones(3, 1);
  CHECK_THROWS_AS(solve_smallest(a.stiffness, a.mass, opt), DomainError);
}

TEST_CASE("solver is deterministic") {
  const TriangleMesh m = build_icosphere(3);
  const EigenSolution a = solve_mesh_spectrum(m, 4);
  const EigenSolution b = solve_mesh_spectrum(m, 4);
  for (int i = 0; i < 4; ++i) CHECK(a.pairs[i].eigenvalue == b.pairs[i].eigenvalue);
}

TEST_CASE("nodal domains of sampled harmonics") {
  const TriangleMesh m = build_icosphere(4);
  const Eigen::VectorXd z = eval_real_harmonic_at(HarmonicIndex(2, 0), Parity::Cos, m.vertices());
  CHECK(nodal_domains(m, z).count == 2);
  const Eigen::VectorXd s2 = eval_real_harmonic_at(HarmonicIndex(4, 4), Parity::Sin, m.vertices());
  CHECK(nodal_domains(m, s2).count == 4);

  Eigen::VectorXd mix = Eigen::VectorXd::Zero(m.num_vertices());
  const double w[] = {0.3, -1.1, 0.7, 0.2, -0.5, 0.9, 0.4};
  int i = 0;
  for (int tm = 0; tm <= 6; tm += 2) {
    mix += w[i++] * eval_real_harmonic_at(HarmonicIndex(6, tm), Parity::Cos, m.vertices());
    if (tm > 0) mix += w[i++] * eval_real_harmonic_at(HarmonicIndex(6, tm), Parity::Sin, m.vertices());
  }
  const NodalCount c = nodal_domains(m, mix);
  CHECK(c.count >= 2);
  CHECK(c.count <= 8);
  CHECK_THROWS_AS(nodal_domains(m, Eigen::VectorXd::Zero(m.num_vertices())), DegenerateVectorError);
}

TEST_CASE("eigenvalue clustering") {
  const auto c = cluster_eigenvalues({0.0, 2.0, 2.0005, 2.001, 6.0, 6.1});
  REQUIRE(c.size() == 4);
  CHECK(c[0].second == 1);
  CHECK(c[1].second == 3);
  CHECK(c[2].second == 1);
  CHECK(cluster_eigenvalues({0.74, 0.76, 3.7, 3.8}, 0.05).size() == 2);
}

}  // TEST_SUITE
