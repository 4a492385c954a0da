#include "sphpart/geom.hpp"

#include "sphpart/analysis.hpp"
#include "sphpart/errors.hpp"

#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>

namespace sphpart {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUnitTol = 1e-12;
constexpr double kMatchTol = 1e-9;

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

MeshTopology derive_topology(const IndexTriples& tris, int num_vertices) {
  MeshTopology topo;
  const int nt = static_cast<int>(tris.rows());
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(static_cast<std::size_t>(nt) * 2);
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 2>> owners;
  edges.reserve(static_cast<std::size_t>(nt) * 3 / 2);
  topo.triangle_edges.resize(nt, 3);
  for (int t = 0; t < nt; ++t) {
    for (int c = 0; c < 3; ++c) {
      const int a = tris(t, c);
      const int b = tris(t, (c + 1) % 3);
      auto [it, inserted] = index.try_emplace(edge_key(a, b), static_cast<int>(edges.size()));
      if (inserted) {
        edges.push_back({std::min(a, b), std::max(a, b)});
        owners.push_back({t, -1});
      } else {
        auto& own = owners[it->second];
        if (own[1] != -1) {
          throw Error("mesh", "edge shared by more than two triangles");
        }
        own[1] = t;
      }
      topo.triangle_edges(t, c) = it->second;
    }
  }
  const int ne = static_cast<int>(edges.size());
  topo.edges.resize(ne, 2);
  topo.edge_triangles.resize(ne, 2);
  for (int e = 0; e < ne; ++e) {
    if (owners[e][1] == -1) throw Error("mesh", "mesh is not closed");
    topo.edges(e, 0) = edges[e][0];
    topo.edges(e, 1) = edges[e][1];
    topo.edge_triangles(e, 0) = owners[e][0];
    topo.edge_triangles(e, 1) = owners[e][1];
  }
  topo.vertex_neighbors.assign(num_vertices, {});
  topo.vertex_triangles.assign(num_vertices, {});
  for (int e = 0; e < ne; ++e) {
    topo.vertex_neighbors[edges[e][0]].push_back(edges[e][1]);
    topo.vertex_neighbors[edges[e][1]].push_back(edges[e][0]);
  }
  for (int t = 0; t < nt; ++t) {
    for (int c = 0; c < 3; ++c) topo.vertex_triangles[tris(t, c)].push_back(t);
  }
  return topo;
}

}  // namespace

UnitVector::UnitVector(const Vec3& p) : p_(p) {
  if (std::abs(p.squaredNorm() - 1.0) > kUnitTol) {
    throw DomainError("UnitVector: point is not on the unit sphere");
  }
}

UnitVector UnitVector::normalized(const Vec3& p) {
  if (p.norm() == 0.0) throw DomainError("UnitVector: zero vector");
  return UnitVector(p.normalized());
}

TriangleMesh::TriangleMesh(VertexMatrix vertices, IndexTriples triangles, std::optional<Seam> seam,
                           std::optional<std::array<int, 2>> poles)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      seam_(std::move(seam)),
      poles_(poles) {
  const int nv = num_vertices();
  for (int i = 0; i < nv; ++i) {
    if (std::abs(vertices_.row(i).squaredNorm() - 1.0) > kUnitTol) {
      throw Error("mesh", "vertex " + std::to_string(i) + " is off the unit sphere");
    }
  }
  if (triangles_.size() > 0 && (triangles_.minCoeff() < 0 || triangles_.maxCoeff() >= nv)) {
    throw Error("mesh", "triangle index out of range");
  }
  const int nt = num_triangles();
  areas_.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const Vec3 a = vertex(triangles_(t, 0));
    const Vec3 b = vertex(triangles_(t, 1));
    const Vec3 c = vertex(triangles_(t, 2));
    const Vec3 n = (b - a).cross(c - a);
    if (n.dot(a + b + c) <= 0.0) {
      throw Error("mesh", "triangle " + std::to_string(t) + " is degenerate or inward-facing");
    }
    areas_(t) = 0.5 * n.norm();
    max_edge_ = std::max({max_edge_, (b - a).norm(), (c - b).norm(), (a - c).norm()});
  }
  topology_ = derive_topology(triangles_, nv);
  if (euler_characteristic() != 2) {
    throw Error("mesh", "mesh is not a closed genus-0 surface");
  }
  if (seam_) {
    if (!poles_) throw Error("mesh", "seamed mesh requires pole vertices");
    const auto& path = seam_->path;
    if (path.size() < 2 || path.front() != (*poles_)[0] || path.back() != (*poles_)[1]) {
      throw Error("mesh", "seam must run from the north pole vertex to the south pole vertex");
    }
    std::vector<char> seen(nv, 0);
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (seen[path[i]]) throw Error("mesh", "seam path is not simple");
      seen[path[i]] = 1;
      if (i > 0) {
        const auto& nb = topology_.vertex_neighbors[path[i - 1]];
        if (std::find(nb.begin(), nb.end(), path[i]) == nb.end()) {
          throw Error("mesh", "seam path skips an edge");
        }
      }
    }
    if (seam_->corner_sign.rows() != nt) throw Error("mesh", "seam sign table has wrong size");
  }
}

Vec3 TriangleMesh::centroid(int t) const {
  return (vertex(triangles_(t, 0)) + vertex(triangles_(t, 1)) + vertex(triangles_(t, 2))) / 3.0;
}

double TriangleMesh::triangle_area(int t) const { return areas_(t); }

// ---------------------------------------------------------------------------

namespace {

struct RawMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
};

void orient_outward(RawMesh& m) {
  for (auto& t : m.triangles) {
    const Vec3& a = m.vertices[t[0]];
    const Vec3& b = m.vertices[t[1]];
    const Vec3& c = m.vertices[t[2]];
    if ((b - a).cross(c - a).dot(a + b + c) < 0.0) std::swap(t[1], t[2]);
  }
}

void subdivide(RawMesh& m) {
  std::unordered_map<std::uint64_t, int> midpoint;
  std::vector<std::array<int, 3>> next;
  next.reserve(m.triangles.size() * 4);
  auto mid = [&](int a, int b) {
    auto [it, inserted] = midpoint.try_emplace(edge_key(a, b), static_cast<int>(m.vertices.size()));
    if (inserted) m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
    return it->second;
  };
  for (const auto& t : m.triangles) {
    const int ab = mid(t[0], t[1]);
    const int bc = mid(t[1], t[2]);
    const int ca = mid(t[2], t[0]);
    next.push_back({t[0], ab, ca});
    next.push_back({ab, t[1], bc});
    next.push_back({ca, bc, t[2]});
    next.push_back({ab, bc, ca});
  }
  m.triangles = std::move(next);
}

VertexMatrix to_matrix(const std::vector<Vec3>& v) {
  VertexMatrix out(static_cast<Eigen::Index>(v.size()), 3);
  for (std::size_t i = 0; i < v.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = v[i].transpose();
  return out;
}

IndexTriples to_matrix(const std::vector<std::array<int, 3>>& t) {
  IndexTriples out(static_cast<Eigen::Index>(t.size()), 3);
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (int c = 0; c < 3; ++c) out(static_cast<Eigen::Index>(i), c) = t[i][c];
  }
  return out;
}

}  // namespace

TriangleMesh build_icosphere(int level) {
  if (level < 0) throw DomainError("build_icosphere: negative subdivision level");
  if (level > 8) throw CapacityError("build_icosphere: subdivision level above 8");
  RawMesh m;
  const double z = 1.0 / std::sqrt(5.0);
  const double r = 2.0 / std::sqrt(5.0);
  m.vertices.push_back(Vec3::UnitZ());
  for (int i = 0; i < 5; ++i) {
    const double a = 2.0 * kPi * i / 5.0;
    m.vertices.emplace_back(r * std::cos(a), r * std::sin(a), z);
  }
  for (int i = 0; i < 5; ++i) {
    const double a = 2.0 * kPi * i / 5.0 + kPi / 5.0;
    m.vertices.emplace_back(r * std::cos(a), r * std::sin(a), -z);
  }
  m.vertices.push_back(-Vec3::UnitZ());
  for (int i = 0; i < 5; ++i) {
    const int u0 = 1 + i, u1 = 1 + (i + 1) % 5;
    const int l0 = 6 + i, l1 = 6 + (i + 1) % 5;
    m.triangles.push_back({0, u0, u1});
    m.triangles.push_back({u0, l0, u1});
    m.triangles.push_back({u1, l0, l1});
    m.triangles.push_back({11, l1, l0});
  }
  orient_outward(m);
  for (int i = 0; i < level; ++i) subdivide(m);
  const int south = 11;
  return TriangleMesh(to_matrix(m.vertices), to_matrix(m.triangles), std::nullopt,
                      std::array<int, 2>{0, south});
}

TriangleMesh build_latlong_sphere(int n_theta, int n_phi, bool seamed) {
  if (n_theta < 2 || n_theta % 2 != 0 || n_phi < 4 || n_phi % 2 != 0) {
    throw DomainError("build_latlong_sphere: grid sizes must be even (n_theta >= 2, n_phi >= 4)");
  }
  if (static_cast<long long>(n_theta) * n_phi > 8'000'000) {
    throw CapacityError("build_latlong_sphere: grid too large");
  }
  std::vector<Vec3> verts;
  verts.reserve(static_cast<std::size_t>((n_theta - 1) * n_phi + 2));
  verts.push_back(Vec3::UnitZ());
  for (int i = 1; i < n_theta; ++i) {
    const double theta = kPi * i / n_theta;
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    for (int j = 0; j < n_phi; ++j) {
      if (j == 0) {
        verts.emplace_back(-s, 0.0, c);  // exactly on phi = pi
      } else if (2 * j == n_phi) {
        verts.emplace_back(s, 0.0, c);
      } else {
        const double phi = -kPi + 2.0 * kPi * j / n_phi;
        verts.emplace_back(std::cos(phi) * s, std::sin(phi) * s, c);
      }
    }
  }
  verts.push_back(-Vec3::UnitZ());
  const int north = 0;
  const int south = static_cast<int>(verts.size()) - 1;
  auto id = [&](int i, int j) { return 1 + (i - 1) * n_phi + (j % n_phi); };

  std::vector<std::array<int, 3>> tris;
  std::vector<std::array<signed char, 3>> signs;
  // Corners in column 0 seen from the first column (phi -> -pi) lie across the cut.
  auto sign_of = [&](int v, int column) -> signed char {
    if (column != 0) return 1;
    if (v == north || v == south) return -1;
    return ((v - 1) % n_phi == 0) ? -1 : 1;
  };
  auto push = [&](std::array<int, 3> t, int column) {
    tris.push_back(t);
    signs.push_back({sign_of(t[0], column), sign_of(t[1], column), sign_of(t[2], column)});
  };
  for (int j = 0; j < n_phi; ++j) push({north, id(1, j), id(1, j + 1)}, j);
  for (int i = 1; i + 1 < n_theta; ++i) {
    for (int j = 0; j < n_phi; ++j) {
      const int a = id(i, j), b = id(i, j + 1), c = id(i + 1, j + 1), d = id(i + 1, j);
      if (2 * i < n_theta) {
        push({a, d, c}, j);
        push({a, c, b}, j);
      } else {
        push({a, d, b}, j);
        push({b, d, c}, j);
      }
    }
  }
  for (int j = 0; j < n_phi; ++j) push({south, id(n_theta - 1, j + 1), id(n_theta - 1, j)}, j);

  std::optional<Seam> seam;
  if (seamed) {
    Seam s;
    s.path.push_back(north);
    for (int i = 1; i < n_theta; ++i) s.path.push_back(id(i, 0));
    s.path.push_back(south);
    s.corner_sign.resize(static_cast<Eigen::Index>(signs.size()), 3);
    for (std::size_t t = 0; t < signs.size(); ++t) {
      for (int c = 0; c < 3; ++c) {
        // The poles are pinned, so their sign never matters; keep it +1.
        const int v = tris[t][c];
        s.corner_sign(static_cast<Eigen::Index>(t), c) =
            (v == north || v == south) ? 1 : signs[t][c];
      }
    }
    seam = std::move(s);
  }
  return TriangleMesh(to_matrix(verts), to_matrix(tris), std::move(seam),
                      std::array<int, 2>{north, south});
}

TriangleMesh build_seamed_mesh(int level) {
  if (level < 2) throw DomainError("build_seamed_mesh: level must be at least 2");
  if (level > 8) throw CapacityError("build_seamed_mesh: level above 8");
  const int n_theta = 8 << level;
  return build_latlong_sphere(n_theta, 2 * n_theta, true);
}

std::array<Vec3, 4> tetrahedron_vertices() {
  const double s = 1.0 / std::sqrt(3.0);
  return {Vec3(s, s, s), Vec3(s, -s, -s), Vec3(-s, s, -s), Vec3(-s, -s, s)};
}

TriangleMesh build_tetra_sphere(int level) {
  if (level < 0) throw DomainError("build_tetra_sphere: negative subdivision level");
  if (level > 9) throw CapacityError("build_tetra_sphere: subdivision level above 9");
  RawMesh m;
  for (const Vec3& v : tetrahedron_vertices()) m.vertices.push_back(-v);
  // Face opposite base vertex i is centred on tetrahedron vertex i.
  m.triangles = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
  orient_outward(m);
  for (int i = 0; i < level; ++i) subdivide(m);
  return TriangleMesh(to_matrix(m.vertices), to_matrix(m.triangles));
}

TriangleMesh rotated(const TriangleMesh& mesh, const Mat3& rotation) {
  VertexMatrix v = mesh.vertices() * rotation.transpose();
  v.rowwise().normalize();
  return TriangleMesh(std::move(v), mesh.triangles(), mesh.seam(), mesh.poles());
}

// ---------------------------------------------------------------------------

PartitionLabeling::PartitionLabeling(Eigen::VectorXi labels, int k) : labels_(std::move(labels)), k_(k) {
  if (k < 1) throw DomainError("PartitionLabeling: k must be positive");
  std::vector<char> used(k + 1, 0);
  for (Eigen::Index t = 0; t < labels_.size(); ++t) {
    const int l = labels_(t);
    if (l < 1 || l > k) throw DomainError("PartitionLabeling: label out of range");
    used[l] = 1;
  }
  for (int l = 1; l <= k; ++l) {
    if (!used[l]) throw DegeneratePartitionError("PartitionLabeling: label " + std::to_string(l) + " is empty");
  }
}

PartitionLabeling make_lune_partition(const TriangleMesh& mesh, int k, const Mat3& rotation) {
  if (k < 2) throw DomainError("make_lune_partition: k must be at least 2");
  const Mat3 inverse = rotation.transpose();
  Eigen::VectorXi labels(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Vec3 c = inverse * mesh.centroid(t);
    double a = std::atan2(c.y(), c.x());
    if (a < 0.0) a += 2.0 * kPi;
    int j = static_cast<int>(std::floor(a * k / (2.0 * kPi)));
    labels(t) = std::clamp(j, 0, k - 1) + 1;
  }
  // Sector boundaries that cut across a vertex fan can strand triangles; hand
  // them to the adjacent sector nearest in azimuth.
  auto closeness = [&](int t, int label) {
    const Vec3 c = inverse * mesh.centroid(t);
    const double center = (label - 0.5) * 2.0 * kPi / k;
    const double d = std::remainder(std::atan2(c.y(), c.x()) - center, 2.0 * kPi);
    return -std::abs(d);
  };
  return PartitionLabeling(repair_connectivity(mesh, std::move(labels), k, closeness), k);
}

PartitionLabeling make_tetrahedral_partition(const TriangleMesh& mesh) {
  const auto tv = tetrahedron_vertices();
  Eigen::VectorXi labels(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Vec3 c = mesh.centroid(t).normalized();
    int best = 0;
    double best_d = geodesic_distance(c, tv[0]);
    for (int i = 1; i < 4; ++i) {
      const double d = geodesic_distance(c, tv[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    labels(t) = best + 1;
  }
  return PartitionLabeling(std::move(labels), 4);
}

double cap_radius(double area_fraction) {
  if (!(area_fraction > 0.0 && area_fraction < 1.0)) throw DomainError("cap_radius: S outside (0,1)");
  return std::acos(1.0 - 2.0 * area_fraction);
}

DomainMask make_cap_mask(const TriangleMesh& mesh, const Vec3& center, double area_fraction) {
  const double radius = cap_radius(area_fraction);
  const Vec3 c = center.normalized();
  DomainMask mask(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    mask(t) = geodesic_distance(mesh.centroid(t).normalized(), c) < radius;
  }
  return mask;
}

std::vector<int> antipodal_vertex_map(const TriangleMesh& mesh) {
  // Spatial hash with cells much larger than the tolerance; probe neighbours.
  const double cell = 1e-6;
  auto key = [&](long long i, long long j, long long k) {
    return (static_cast<std::uint64_t>(i + (1 << 20)) << 42) ^
           (static_cast<std::uint64_t>(j + (1 << 20)) << 21) ^ static_cast<std::uint64_t>(k + (1 << 20));
  };
  std::unordered_multimap<std::uint64_t, int> grid;
  const int nv = mesh.num_vertices();
  grid.reserve(static_cast<std::size_t>(nv));
  for (int v = 0; v < nv; ++v) {
    const Vec3 p = mesh.vertex(v);
    grid.emplace(key(std::llround(p.x() / cell), std::llround(p.y() / cell), std::llround(p.z() / cell)), v);
  }
  std::vector<int> map(nv, -1);
  for (int v = 0; v < nv; ++v) {
    const Vec3 q = -mesh.vertex(v);
    const long long i0 = std::llround(q.x() / cell), j0 = std::llround(q.y() / cell),
                    k0 = std::llround(q.z() / cell);
    for (long long di = -1; di <= 1 && map[v] < 0; ++di) {
      for (long long dj = -1; dj <= 1 && map[v] < 0; ++dj) {
        for (long long dk = -1; dk <= 1 && map[v] < 0; ++dk) {
          auto range = grid.equal_range(key(i0 + di, j0 + dj, k0 + dk));
          for (auto it = range.first; it != range.second; ++it) {
            if ((mesh.vertex(it->second) - q).norm() < kMatchTol) {
              map[v] = it->second;
              break;
            }
          }
        }
      }
    }
    if (map[v] < 0) {
      throw SymmetryError("mesh is not antipodally symmetric (vertex " + std::to_string(v) + ")");
    }
  }
  return map;
}

std::vector<int> antipodal_triangle_map(const TriangleMesh& mesh) {
  const auto vmap = antipodal_vertex_map(mesh);
  auto sorted_key = [](std::array<int, 3> t) {
    std::sort(t.begin(), t.end());
    return std::to_string(t[0]) + "," + std::to_string(t[1]) + "," + std::to_string(t[2]);
  };
  const auto& tris = mesh.triangles();
  std::unordered_map<std::string, int> lookup;
  lookup.reserve(static_cast<std::size_t>(mesh.num_triangles()));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    lookup.emplace(sorted_key({tris(t, 0), tris(t, 1), tris(t, 2)}), t);
  }
  std::vector<int> map(mesh.num_triangles(), -1);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    auto it = lookup.find(sorted_key({vmap[tris(t, 0)], vmap[tris(t, 1)], vmap[tris(t, 2)]}));
    if (it == lookup.end()) {
      throw SymmetryError("triangulation is not antipodally symmetric (triangle " + std::to_string(t) + ")");
    }
    map[t] = it->second;
  }
  return map;
}

PartitionLabeling inversion_image(const PartitionLabeling& labeling, const TriangleMesh& mesh) {
  const auto tmap = antipodal_triangle_map(mesh);
  Eigen::VectorXi out(labeling.size());
  for (int t = 0; t < labeling.size(); ++t) out(tmap[t]) = labeling[t];
  return PartitionLabeling(std::move(out), labeling.k());
}

DomainMask inversion_image(const DomainMask& mask, const TriangleMesh& mesh) {
  const auto tmap = antipodal_triangle_map(mesh);
  DomainMask out(mask.size());
  for (Eigen::Index t = 0; t < mask.size(); ++t) out(tmap[t]) = mask(t);
  return out;
}

double region_area(const TriangleMesh& mesh, const DomainMask& mask) {
  if (mask.size() != mesh.num_triangles()) throw DomainError("region_area: mask size mismatch");
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mask(t)) sum += mesh.triangle_area(t);
  }
  return sum;
}

}  // namespace sphpart
