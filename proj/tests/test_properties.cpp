#include "sphpart/analysis.hpp"
#include "sphpart/bounds.hpp"
#include "sphpart/exact.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace sphpart;

namespace {

constexpr double kPi = std::numbers::pi;

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

Vec3 random_point(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Vec3(n(rng), n(rng), n(rng)).normalized();
}

// Random eigenspace sample of degree ell (twice_ell = 2 ell).
Eigen::VectorXd random_harmonic(const TriangleMesh& m, int ell, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m.num_vertices());
  for (int mm = 0; mm <= ell; ++mm) {
    u += n(rng) * eval_real_harmonic_at(HarmonicIndex(2 * ell, 2 * mm), Parity::Cos, m.vertices());
    if (mm > 0) u += n(rng) * eval_real_harmonic_at(HarmonicIndex(2 * ell, 2 * mm), Parity::Sin, m.vertices());
  }
  return u;
}

// Connected mask grown from a random triangle by picking random frontier
// triangles until the target area is reached.
DomainMask random_blob(const TriangleMesh& m, double area_fraction, std::mt19937_64& rng) {
  const auto& topo = m.topology();
  const double target = area_fraction * m.triangle_areas().sum();
  DomainMask mask = DomainMask::Constant(m.num_triangles(), false);
  std::vector<int> frontier{std::uniform_int_distribution<int>(0, m.num_triangles() - 1)(rng)};
  double area = 0.0;
  while (area < target && !frontier.empty()) {
    const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, frontier.size() - 1)(rng);
    const int t = frontier[pick];
    frontier[pick] = frontier.back();
    frontier.pop_back();
    if (mask(t)) continue;
    mask(t) = true;
    area += m.triangle_area(t);
    for (int c = 0; c < 3; ++c) {
      const int e = topo.triangle_edges(t, c);
      for (int s = 0; s < 2; ++s) {
        const int o = topo.edge_triangles(e, s);
        if (!mask(o)) frontier.push_back(o);
      }
    }
  }
  return mask;
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("power means are monotone in p") {
  const TriangleMesh m = build_icosphere(3);
  const Assembly a = assemble(m);
  std::mt19937_64 rng(11);
  const std::vector<double> ps{1.0, 1.5, 2.0, 4.0, 8.0, INFINITY};
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + trial % 5;
    const PartitionLabeling l = make_lune_partition(m, k, random_rotation(rng));
    const PartitionEnergy e = evaluate_partition(m, a, l, ps);
    double prev = 0.0;
    for (double p : ps) {
      const double v = e.Lambda_p.at(p);
      CHECK(v >= prev * (1.0 - 1e-12));
      prev = v;
    }
    CHECK(e.Lambda_p.at(INFINITY) == e.Lambda);
  }
}

TEST_CASE("caps minimize the characteristic constant") {
  const TriangleMesh m = build_icosphere(4);
  const Assembly a = assemble(m);
  std::mt19937_64 rng(5);
  const double total = m.triangle_areas().sum();
  int n = 0;
  for (double s : {0.1, 0.25, 0.4}) {
    for (int trial = 0; trial < 20; ++trial, ++n) {
      const DomainMask mask = random_blob(m, s, rng);
      const double frac = region_area(m, mask) / total;
      const double alpha = cap_alpha(frac);
      const double bound = alpha * (alpha + 1.0);
      const double lambda = domain_ground_state(m, a, mask).eigenvalue;
      CHECK(lambda >= bound * (1.0 - 0.02));
    }
  }
  CHECK(n == 60);
}

TEST_CASE("inversion is an involution") {
  std::mt19937_64 rng(3);
  for (const TriangleMesh& m : {build_icosphere(3), build_latlong_sphere(16, 32)}) {
    for (int trial = 0; trial < 10; ++trial) {
      const int k = 2 + trial % 6;
      std::vector<Vec3> sites;
      for (int j = 0; j < k; ++j) sites.push_back(random_point(rng));
      Eigen::VectorXi labels = voronoi_labels(m, sites);
      bool all_used = true;
      for (int j = 1; j <= k; ++j) all_used = all_used && (labels.array() == j).any();
      if (!all_used) continue;
      const PartitionLabeling l(labels, k);
      CHECK(inversion_image(inversion_image(l, m), m) == l);
      const DomainMask mask = l.mask(1);
      CHECK((inversion_image(inversion_image(mask, m), m) == mask).all());
    }
  }
}

TEST_CASE("Euler formula holds for constructed partitions") {
  std::mt19937_64 rng(9);
  for (const TriangleMesh& m : {build_latlong_sphere(48, 96), build_icosphere(4)}) {
    for (int k = 2; k <= 8; ++k) {
      const PartitionLabeling l = make_lune_partition(m, k);
      CHECK(euler_check(extract_boundary(m, l), l).consistent);
    }
    const PartitionLabeling t = make_tetrahedral_partition(m);
    CHECK(euler_check(extract_boundary(m, t), t).consistent);
  }
  const TriangleMesh ts = build_tetra_sphere(4);
  const PartitionLabeling t = make_tetrahedral_partition(ts);
  CHECK(euler_check(extract_boundary(ts, t), t).consistent);
}

TEST_CASE("improved Courant bound on random eigenspace samples") {
  const TriangleMesh m = build_icosphere(5);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int ell = 1 + trial % 4;
    const int mu = nodal_domains(m, random_harmonic(m, ell, rng)).count;
    CHECK(mu >= 2);
    CHECK(mu <= nodal_count_bounds(ell).improved);
  }
}

TEST_CASE("antisymmetric eigenvectors have paired nodal domains") {
  const TriangleMesh m = build_icosphere(4);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const int ell = 1 + 2 * (trial % 3);
    const auto c = classify_symmetric_nodal(m, random_harmonic(m, ell, rng));
    CHECK(c.antisymmetric);
    CHECK(c.invariant == 0);
    CHECK(c.total % 2 == 0);
  }
}

}  // TEST_SUITE
