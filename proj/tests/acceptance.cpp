// Acceptance criteria 1-9: one PASS/FAIL line each, nonzero exit on any failure.

#include "sphpart/analysis.hpp"
#include "sphpart/bounds.hpp"
#include "sphpart/exact.hpp"
#include "sphpart/fem.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace sphpart;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void run(int id, const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  o.detail.precision(6);
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %d %s:%s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.str().c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1.0); }

void criterion1(Outcome& o) {
  const auto t0 = Clock::now();
  const auto c = covering_spectrum(4);
  const double expected[][2] = {{0.0, 1}, {0.75, 2}, {2.0, 3}, {3.75, 4}};
  bool levels = c.size() == 4;
  for (int i = 0; levels && i < 4; ++i) {
    levels = c[i].eigenvalue == expected[i][0] && c[i].multiplicity == expected[i][1];
  }
  const int index = first_index_with_multiplicity(c, 3.75);
  const double third_as = nth_antisymmetric_eigenvalue(3);
  const double ms = 1e3 * seconds_since(t0);
  o.detail << " levels (0,1),(3/4,2),(2,3),(15/4,4); 15/4 is eigenvalue #" << index
           << " and third antisymmetric = " << third_as << "; " << ms << " ms";
  o.require(levels, "covering levels");
  o.require(index == 7, "index 7");
  o.require(third_as == 3.75, "third antisymmetric");
  o.require(ms < 1.0, "< 1 ms");
}

void criterion2(Outcome& o) {
  const auto t0 = Clock::now();
  const EigenSolution s = solve_mesh_spectrum(build_icosphere(5), 9);
  const double t = seconds_since(t0);
  const double exact[] = {0, 2, 2, 2, 6, 6, 6, 6, 6};
  double worst = 0.0;
  for (int i = 0; i < 9; ++i) worst = std::max(worst, rel(s.pairs[i].eigenvalue, exact[i]));
  o.detail << " level-5 icosphere, max rel error " << worst << ", " << t << " s";
  o.require(worst < 0.015, "within 1.5%");
  o.require(t < 30.0, "< 30 s");
}

void criterion3(Outcome& o) {
  const auto t0 = Clock::now();
  const EigenSolution s = solve_mesh_spectrum(build_seamed_mesh(3), 6);
  const double t = seconds_since(t0);
  const double exact[] = {0.75, 0.75, 3.75, 3.75, 3.75, 3.75};
  double worst = 0.0;
  for (int i = 0; i < 6; ++i) worst = std::max(worst, std::abs(s.pairs[i].eigenvalue - exact[i]) / exact[i]);
  o.detail << " seamed 64x128, max rel error " << worst << ", " << t << " s";
  o.require(worst < 0.02, "within 2%");
  o.require(t < 60.0, "< 60 s");
}

void criterion4(Outcome& o) {
  const TriangleMesh m = build_latlong_sphere(96, 192);
  const PartitionLabeling y = make_lune_partition(m, 3);
  const PartitionEnergy e = evaluate_partition(m, y);
  const auto [lo, hi] = std::minmax_element(e.lambdas.begin(), e.lambdas.end());
  const double spread = (*hi - *lo) / *lo;
  const BoundaryGraph g = extract_boundary(m, y);
  const EulerCheck eu = euler_check(g, y);
  const bool admissible = is_admissible(neighbor_graph(m, y));
  const AntipodalResult anti = antipodal_test(m, g);
  o.detail << " Lambda " << e.Lambda << ", spread " << spread << ", Euler " << eu.predicted << "/" << eu.actual
           << ", admissible " << admissible << ", antipodal " << anti.found;
  o.require(e.Lambda >= 3.75 * 0.98 && e.Lambda <= 3.75 * 1.02, "Lambda range");
  o.require(spread < 0.01, "lambdas within 1%");
  o.require(eu.consistent && eu.actual == 3, "Euler");
  o.require(!admissible, "not admissible");
  o.require(anti.found, "antipodal");
}

void criterion5(Outcome& o) {
  auto lambda_at = [](int level) {
    const TriangleMesh m = build_tetra_sphere(level);
    return evaluate_partition(m, make_tetrahedral_partition(m), {1.0}).Lambda;
  };
  const double fine = lambda_at(6);
  const double coarse = lambda_at(5);
  const double mesh_tol = std::abs(fine - coarse);
  const double lower = fine - 3.75;
  const double upper = 6.0 - fine;
  o.detail << " Lambda " << fine << " (coarser level " << coarse << "), mesh tolerance " << mesh_tol
           << ", margins " << lower << " and " << upper;
  o.require(fine >= 5.03 && fine <= 5.23, "Lambda in [5.03, 5.23]");
  o.require(lower > 5.0 * mesh_tol && upper > 5.0 * mesh_tol, "margins > 5x mesh tolerance");
}

void criterion6(Outcome& o) {
  const double j0sq = kBesselJ0Zero * kBesselJ0Zero;
  const bool gammas = gamma_k(2).exact == Rational{2, 1} && gamma_k(3).exact == Rational{28, 9} &&
                      gamma_k(4).exact == Rational{15, 4};
  const double h3 = phi_hat3(1.0 / 3.0);
  const double h4 = phi_hat3(0.25);
  const double d3 = std::abs(delta_k(3) - (0.625 * j0sq - 0.25));
  const double d4 = std::abs(delta_k(4) - 4.8035);
  bool same = true;
  for (int k = 3; k <= 50; ++k) same = same && large_k_bound(k) == delta_k(k);
  o.detail << " gamma 2, 28/9, 15/4; Phi_hat(1/3) " << h3 << ", Phi_hat(1/4) " << h4 << ", delta_3 deviation "
           << d3 << ", |delta_4 - 4.8035| " << d4;
  o.require(gammas, "exact gammas");
  o.require(h3 >= 1.4005 && h3 <= 1.4020, "Phi_hat(1/3)");
  o.require(h4 >= 1.7490 && h4 <= 1.7500, "Phi_hat(1/4)");
  o.require(d3 < 1e-12, "delta_3 closed form");
  o.require(d4 < 2e-2, "delta_4");
  o.require(same, "large-k bound equals delta");
}

void criterion7(Outcome& o) {
  const double a1 = std::abs(cap_alpha(0.5) - 1.0);
  const double a2 = std::abs(cap_alpha((1.0 - 1.0 / std::sqrt(3.0)) / 2.0) - 2.0);
  o.detail << " alpha errors " << a1 << ", " << a2 << "; FEM";
  o.require(a1 < 1e-9 && a2 < 1e-9, "alpha goldens");
  const TriangleMesh m = build_icosphere(6);
  const Assembly a = assemble(m);
  const double total = m.triangle_areas().sum();
  for (double s : {0.1, 0.25, 0.4}) {
    const DomainMask mask = make_cap_mask(m, Vec3::UnitZ(), s);
    // Compare against the cap actually resolved by the mesh.
    const double alpha = cap_alpha(region_area(m, mask) / total);
    const double exact = alpha_to_lambda(alpha);
    const double fem = domain_ground_state(m, a, mask).eigenvalue;
    o.detail << " S=" << s << ": " << fem << " vs " << exact << ";";
    o.require(std::abs(fem - exact) / exact < 0.02, "cap S=" + std::to_string(s));
  }
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)).normalized().toRotationMatrix();
}

Eigen::VectorXd random_harmonic(const TriangleMesh& m, int ell, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m.num_vertices());
  for (int mm = 0; mm <= ell; ++mm) {
    u += n(rng) * eval_real_harmonic_at(HarmonicIndex(2 * ell, 2 * mm), Parity::Cos, m.vertices());
    if (mm > 0) u += n(rng) * eval_real_harmonic_at(HarmonicIndex(2 * ell, 2 * mm), Parity::Sin, m.vertices());
  }
  return u;
}

DomainMask random_blob(const TriangleMesh& m, double fraction, std::mt19937_64& rng) {
  const auto& topo = m.topology();
  const double target = fraction * m.triangle_areas().sum();
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
        if (!mask(topo.edge_triangles(e, s))) frontier.push_back(topo.edge_triangles(e, s));
      }
    }
  }
  return mask;
}

void criterion8(Outcome& o) {
  std::mt19937_64 rng(2024);
  const TriangleMesh m3 = build_icosphere(3);
  const Assembly a3 = assemble(m3);
  int monotone = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const PartitionLabeling l = make_lune_partition(m3, 2 + trial % 5, random_rotation(rng));
    const std::vector<double> ps{1.0, 2.0, 4.0, 8.0, INFINITY};
    const PartitionEnergy e = evaluate_partition(m3, a3, l, ps);
    bool ok = true;
    for (std::size_t i = 1; i < ps.size(); ++i) ok = ok && e.Lambda_p.at(ps[i]) >= e.Lambda_p.at(ps[i - 1]) * (1 - 1e-12);
    monotone += ok;
  }
  o.detail << " monotone " << monotone << "/50;";
  o.require(monotone == 50, "power-mean monotonicity");

  const TriangleMesh m4 = build_icosphere(4);
  const Assembly a4 = assemble(m4);
  const double total = m4.triangle_areas().sum();
  int sperner = 0;
  double worst = INFINITY;
  for (int trial = 0; trial < 60; ++trial) {
    const DomainMask mask = random_blob(m4, (trial % 3 == 0) ? 0.1 : (trial % 3 == 1 ? 0.25 : 0.4), rng);
    const double alpha = cap_alpha(region_area(m4, mask) / total);
    const double ratio = domain_ground_state(m4, a4, mask).eigenvalue / alpha_to_lambda(alpha);
    worst = std::min(worst, ratio);
    sperner += ratio >= 0.98;
  }
  o.detail << " Sperner " << sperner << "/60 (min ratio " << worst << ");";
  o.require(sperner == 60, "Sperner");

  int involution = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const PartitionLabeling l = make_lune_partition(m3, 2 + trial % 6, random_rotation(rng));
    involution += inversion_image(inversion_image(l, m3), m3) == l;
  }
  o.detail << " involution " << involution << "/20;";
  o.require(involution == 20, "inversion involution");

  int euler = 0, constructed = 0;
  for (const TriangleMesh& m : {build_latlong_sphere(48, 96), m4, build_tetra_sphere(4)}) {
    std::vector<PartitionLabeling> ls;
    for (int k = 2; k <= 8; ++k) ls.push_back(make_lune_partition(m, k));
    ls.push_back(make_tetrahedral_partition(m));
    for (const auto& l : ls) {
      ++constructed;
      euler += euler_check(extract_boundary(m, l), l).consistent;
    }
  }
  o.detail << " Euler " << euler << "/" << constructed << ";";
  o.require(euler == constructed, "Euler consistency");

  const TriangleMesh m5 = build_icosphere(5);
  int courant = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int ell = 1 + trial % 4;
    courant += nodal_domains(m5, random_harmonic(m5, ell, rng)).count <= nodal_count_bounds(ell).improved;
  }
  o.detail << " improved Courant " << courant << "/100;";
  o.require(courant == 100, "improved Courant bound");

  int paired = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = classify_symmetric_nodal(m4, random_harmonic(m4, 1 + 2 * (trial % 3), rng));
    paired += c.antisymmetric && c.invariant == 0 && c.total % 2 == 0;
  }
  o.detail << " antisymmetric pairing " << paired << "/30";
  o.require(paired == 30, "antisymmetric pairing");
}

void criterion9(Outcome& o) {
  const TriangleMesh m = build_icosphere(4);
  const auto t0 = Clock::now();
  double best[5] = {INFINITY, INFINITY, INFINITY, INFINITY, INFINITY};
  bool antipodal3 = false;
  for (int k = 2; k <= 4; ++k) {
    std::optional<OptimizationResult> winner;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      OptimizerOptions opt;
      opt.seed = seed;
      OptimizationResult r = optimize_partition(m, k, opt);
      if (r.energy.Lambda < best[k]) {
        best[k] = r.energy.Lambda;
        winner = std::move(r);
      }
    }
    if (k == 3) antipodal3 = antipodal_test(m, extract_boundary(m, winner->labeling)).found;
  }
  const double t = seconds_since(t0);
  o.detail << " best Lambda k=2 " << best[2] << ", k=3 " << best[3] << " (antipodal " << antipodal3 << "), k=4 "
           << best[4] << ", " << t << " s";
  o.require(best[2] <= 2.04, "k=2");
  o.require(best[3] <= 3.825 && antipodal3, "k=3");
  o.require(best[4] <= 5.29 && best[4] > 3.80, "k=4");
  o.require(t < 600.0, "< 10 min");
}

}  // namespace

int main() {
  run(1, "exact spectra", criterion1);
  run(2, "FEM sphere spectrum", criterion2);
  run(3, "FEM antisymmetric spectrum", criterion3);
  run(4, "Y-partition", criterion4);
  run(5, "tetrahedral partition", criterion5);
  run(6, "bound goldens", criterion6);
  run(7, "cap solver", criterion7);
  run(8, "property suite", criterion8);
  run(9, "optimizer", criterion9);
  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
