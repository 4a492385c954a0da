#include "sphpart/analysis.hpp"

#include "sphpart/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <queue>

namespace sphpart {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

// Number of components of the graph spanned by `edges` (isolated vertices ignored).
int edge_components(const TriangleMesh& mesh, const std::vector<int>& edges) {
  DisjointSets sets(mesh.num_vertices());
  const auto& ev = mesh.topology().edges;
  for (int e : edges) sets.unite(ev(e, 0), ev(e, 1));
  std::vector<int> roots;
  for (int e : edges) roots.push_back(sets.find(ev(e, 0)));
  std::sort(roots.begin(), roots.end());
  return static_cast<int>(std::unique(roots.begin(), roots.end()) - roots.begin());
}

}  // namespace

double power_mean(const std::vector<double>& lambdas, double p) {
  if (lambdas.empty()) throw DomainError("power_mean: no values");
  if (std::isinf(p)) return *std::max_element(lambdas.begin(), lambdas.end());
  if (!(p > 0.0)) throw DomainError("power_mean: p must be positive");
  double sum = 0.0;
  for (double l : lambdas) sum += std::pow(l, p);
  return std::pow(sum / static_cast<double>(lambdas.size()), 1.0 / p);
}

PartitionEnergy evaluate_partition(const TriangleMesh& mesh, const PartitionLabeling& labeling,
                                   const std::vector<double>& p_list, double tol) {
  return evaluate_partition(mesh, assemble(mesh), labeling, p_list, tol);
}

PartitionEnergy evaluate_partition(const TriangleMesh& mesh, const Assembly& assembly,
                                   const PartitionLabeling& labeling, const std::vector<double>& p_list,
                                   double tol) {
  if (labeling.size() != mesh.num_triangles()) throw DomainError("evaluate_partition: labeling size mismatch");
  const int k = labeling.k();
  std::vector<std::future<EigenPair>> tasks;
  tasks.reserve(k);
  for (int j = 1; j <= k; ++j) {
    tasks.push_back(std::async(std::launch::async, [&, j] {
      return domain_ground_state(mesh, assembly, labeling.mask(j), tol);
    }));
  }
  PartitionEnergy out;
  out.k = k;
  std::exception_ptr failure;
  for (auto& t : tasks) {
    try {
      EigenPair p = t.get();
      out.lambdas.push_back(p.eigenvalue);
      out.residuals.push_back(p.residual);
      out.ground_states.push_back(std::move(p.eigenvector));
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  out.Lambda = *std::max_element(out.lambdas.begin(), out.lambdas.end());
  for (double p : p_list) out.Lambda_p[p] = power_mean(out.lambdas, p);
  return out;
}

BoundaryGraph extract_boundary(const TriangleMesh& mesh, const PartitionLabeling& labeling,
                               const std::optional<DomainMask>& omega) {
  if (labeling.size() != mesh.num_triangles()) throw DomainError("extract_boundary: labeling size mismatch");
  if (omega && omega->size() != mesh.num_triangles()) throw DomainError("extract_boundary: omega size mismatch");
  const auto& topo = mesh.topology();
  auto inside = [&](int t) { return !omega || (*omega)(t); };

  BoundaryGraph g;
  std::vector<int> outer;
  std::vector<int> nu(mesh.num_vertices(), 0);
  std::vector<char> on_outer(mesh.num_vertices(), 0);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const int t0 = topo.edge_triangles(e, 0);
    const int t1 = topo.edge_triangles(e, 1);
    const bool in0 = inside(t0);
    const bool in1 = inside(t1);
    if (in0 && in1 && labeling[t0] != labeling[t1]) {
      g.edges.push_back(e);
      ++nu[topo.edges(e, 0)];
      ++nu[topo.edges(e, 1)];
    } else if (in0 != in1) {
      outer.push_back(e);
      on_outer[topo.edges(e, 0)] = 1;
      on_outer[topo.edges(e, 1)] = 1;
    }
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (nu[v] == 0) continue;
    g.vertices.push_back(v);
    if (on_outer[v]) {
      g.boundary_hits.push_back({v, nu[v]});
    } else if (nu[v] >= 3) {
      g.critical_points.push_back({v, nu[v]});
    }
  }
  g.b0 = edge_components(mesh, outer);
  std::vector<int> all = g.edges;
  all.insert(all.end(), outer.begin(), outer.end());
  g.b1 = edge_components(mesh, all);

  std::vector<char> present(labeling.k() + 1, 0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (inside(t)) present[labeling[t]] = 1;
  }
  g.domains = static_cast<int>(std::count(present.begin(), present.end(), 1));
  return g;
}

EulerCheck euler_check(const BoundaryGraph& graph, const PartitionLabeling& labeling) {
  double predicted = graph.b1 - graph.b0 + 1.0;
  for (const auto& c : graph.critical_points) predicted += 0.5 * c.valence - 1.0;
  for (const auto& z : graph.boundary_hits) predicted += 0.5 * z.rho;
  const int actual = graph.domains > 0 ? graph.domains : labeling.k();
  return {predicted, actual, std::abs(predicted - actual) < 1e-9};
}

NeighborGraph neighbor_graph(const TriangleMesh& mesh, const PartitionLabeling& labeling) {
  const int k = labeling.k();
  NeighborGraph g;
  g.k = k;
  g.adjacency = Eigen::MatrixX<bool>::Constant(k, k, false);
  const auto& et = mesh.topology().edge_triangles;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const int a = labeling[et(e, 0)] - 1;
    const int b = labeling[et(e, 1)] - 1;
    if (a != b) g.adjacency(a, b) = g.adjacency(b, a) = true;
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (g.adjacency(i, j)) g.edges.emplace_back(i + 1, j + 1);
    }
  }
  return g;
}

bool is_admissible(const NeighborGraph& graph) {
  std::vector<int> colour(graph.k, -1);
  for (int s = 0; s < graph.k; ++s) {
    if (colour[s] >= 0) continue;
    colour[s] = 0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (int b = 0; b < graph.k; ++b) {
        if (!graph.adjacency(a, b)) continue;
        if (colour[b] < 0) {
          colour[b] = 1 - colour[a];
          q.push(b);
        } else if (colour[b] == colour[a]) {
          return false;
        }
      }
    }
  }
  return true;
}

AntipodalResult antipodal_test(const TriangleMesh& mesh, const BoundaryGraph& graph, std::optional<double> tol) {
  AntipodalResult r;
  r.tolerance = tol.value_or(2.0 * mesh.max_edge_length());
  r.distance = std::numeric_limits<double>::infinity();
  const auto& vs = graph.vertices;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const Vec3 anti = -mesh.vertex(vs[i]);
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      const double d = geodesic_distance(anti, mesh.vertex(vs[j]));
      if (d < r.distance) {
        r.distance = d;
        r.witness = std::make_pair(vs[i], vs[j]);
      }
    }
  }
  r.found = r.witness.has_value() && r.distance <= r.tolerance;
  if (!r.found) r.witness.reset();
  return r;
}

SymmetricNodalClassification classify_symmetric_nodal(const TriangleMesh& mesh, const Eigen::VectorXd& u,
                                                      double eps_rel) {
  if (u.size() != mesh.num_vertices()) throw DomainError("classify_symmetric_nodal: vector size mismatch");
  const std::vector<int> anti = antipodal_vertex_map(mesh);
  const double scale = u.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw DegenerateVectorError("classify_symmetric_nodal: zero vector");
  double even = 0.0;
  double odd = 0.0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    even = std::max(even, std::abs(u(anti[v]) - u(v)));
    odd = std::max(odd, std::abs(u(anti[v]) + u(v)));
  }
  const double cutoff = 1e-6 * scale;
  SymmetricNodalClassification c;
  if (odd <= cutoff) {
    c.antisymmetric = true;
  } else if (even > cutoff) {
    throw SymmetryError("classify_symmetric_nodal: vector is neither symmetric nor antisymmetric");
  }

  const NodalCount nodal = nodal_domains(mesh, u, eps_rel);
  std::vector<int> image(nodal.count, -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const int a = nodal.component(v);
    if (a >= 0 && image[a] < 0) image[a] = nodal.component(anti[v]);
  }
  for (int a = 0; a < nodal.count; ++a) {
    if (image[a] == a) {
      ++c.invariant;
    } else if (image[a] > a) {
      ++c.pairs;
    }
  }
  c.total = 2 * c.pairs + c.invariant;
  return c;
}

CourantVerdict courant_sharp_check(int n, int nodal_count) {
  if (n < 1 || nodal_count < 1) throw DomainError("courant_sharp_check: index and count must be positive");
  if (nodal_count == n) return CourantVerdict::Sharp;
  return nodal_count < n ? CourantVerdict::Strict : CourantVerdict::Violation;
}

std::string to_string(CourantVerdict v) {
  switch (v) {
    case CourantVerdict::Sharp:
      return "sharp";
    case CourantVerdict::Strict:
      return "strict";
    case CourantVerdict::Violation:
      return "violation";
  }
  return "unknown";
}

Eigen::VectorXi voronoi_labels(const TriangleMesh& mesh, const std::vector<Vec3>& sites) {
  if (sites.empty()) throw DomainError("voronoi_labels: no sites");
  Eigen::VectorXi labels(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Vec3 c = mesh.centroid(t).normalized();
    int best = 0;
    double best_dot = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sites.size(); ++j) {
      const double d = c.dot(sites[j]);
      if (d > best_dot) {
        best_dot = d;
        best = static_cast<int>(j);
      }
    }
    labels(t) = best + 1;
  }
  return labels;
}

}  // namespace sphpart
