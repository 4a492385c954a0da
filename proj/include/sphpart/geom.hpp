#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

namespace sphpart {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VertexMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using IndexTriples = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;
using IndexPairs = Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor>;

// ---------------------------------------------------------------------------
// Spherical coordinates. Colatitude theta in [0, pi], azimuth phi in (-pi, pi],
// x = cos(phi) sin(theta), y = sin(phi) sin(theta), z = cos(theta).
// ---------------------------------------------------------------------------

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> from_spherical(Scalar theta, Scalar phi) {
  using std::cos;
  using std::sin;
  return {cos(phi) * sin(theta), sin(phi) * sin(theta), cos(theta)};
}

template <typename Derived>
typename Derived::Scalar colatitude(const Eigen::MatrixBase<Derived>& p) {
  using std::atan2;
  using std::hypot;
  return atan2(hypot(p(0), p(1)), p(2));
}

template <typename Derived>
typename Derived::Scalar azimuth(const Eigen::MatrixBase<Derived>& p) {
  using std::atan2;
  return atan2(p(1), p(0));
}

/// Great-circle distance between two unit vectors (arccos of the clamped dot).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar geodesic_distance(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  using std::acos;
  const Scalar d = a.dot(b);
  return acos(std::clamp(d, Scalar(-1), Scalar(1)));
}

/// Point on the unit sphere; construction enforces |p| = 1 within 1e-12.
class UnitVector {
 public:
  explicit UnitVector(const Vec3& p);
  static UnitVector normalized(const Vec3& p);
  static UnitVector spherical(double theta, double phi) {
    return UnitVector(from_spherical(theta, phi));
  }

  const Vec3& vec() const noexcept { return p_; }
  double x() const noexcept { return p_.x(); }
  double y() const noexcept { return p_.y(); }
  double z() const noexcept { return p_.z(); }
  double theta() const { return colatitude(p_); }
  double phi() const { return azimuth(p_); }
  UnitVector antipode() const { return UnitVector(-p_); }

 private:
  Vec3 p_;
};

// ---------------------------------------------------------------------------
// Triangle meshes
// ---------------------------------------------------------------------------

/// Edge structure derived from the triangle list of a closed mesh.
struct MeshTopology {
  IndexPairs edges;           // (v0, v1) with v0 < v1
  IndexPairs edge_triangles;  // the two triangles sharing each edge
  IndexTriples triangle_edges;  // edge of (c0,c1), (c1,c2), (c2,c0)
  std::vector<std::vector<int>> vertex_neighbors;
  std::vector<std::vector<int>> vertex_triangles;
};

/// Antiperiodic identification along a pole-to-pole meridian. The mesh is a
/// single sheet of the double cover; `corner_sign(t, c)` is -1 when corner c of
/// triangle t is a seam vertex seen from the far side of the cut.
struct Seam {
  std::vector<int> path;  // north pole ... south pole
  Eigen::Matrix<signed char, Eigen::Dynamic, 3, Eigen::RowMajor> corner_sign;
};

class TriangleMesh {
 public:
  /// Validates the invariants (unit vertices, positive outward areas,
  /// closed genus-0 surface, simple seam path) and derives the topology.
  TriangleMesh(VertexMatrix vertices, IndexTriples triangles,
               std::optional<Seam> seam = std::nullopt,
               std::optional<std::array<int, 2>> poles = std::nullopt);

  int num_vertices() const { return static_cast<int>(vertices_.rows()); }
  int num_triangles() const { return static_cast<int>(triangles_.rows()); }
  int num_edges() const { return static_cast<int>(topology_.edges.rows()); }
  int euler_characteristic() const { return num_vertices() - num_edges() + num_triangles(); }

  const VertexMatrix& vertices() const noexcept { return vertices_; }
  const IndexTriples& triangles() const noexcept { return triangles_; }
  const MeshTopology& topology() const noexcept { return topology_; }
  const std::optional<Seam>& seam() const noexcept { return seam_; }
  const std::optional<std::array<int, 2>>& poles() const noexcept { return poles_; }

  Vec3 vertex(int i) const { return vertices_.row(i).transpose(); }
  Vec3 centroid(int t) const;
  /// Flat (chordal) triangle area.
  double triangle_area(int t) const;
  const Eigen::VectorXd& triangle_areas() const noexcept { return areas_; }
  double max_edge_length() const noexcept { return max_edge_; }

 private:
  VertexMatrix vertices_;
  IndexTriples triangles_;
  std::optional<Seam> seam_;
  std::optional<std::array<int, 2>> poles_;
  MeshTopology topology_;
  Eigen::VectorXd areas_;
  double max_edge_ = 0.0;
};

/// Icosahedron (one vertex at each pole) subdivided `level` times, vertices
/// projected radially. Throws CapacityError for level > 8.
TriangleMesh build_icosphere(int level);

/// Structured latitude-longitude triangulation with `n_theta` rings of quads
/// and `n_phi` columns; pole caps are triangle fans. Column 0 lies exactly on
/// the meridian phi = pi. The southern half mirrors the northern half through
/// the antipodal map, so the mesh is exactly antipodally symmetric.
TriangleMesh build_latlong_sphere(int n_theta, int n_phi, bool seamed = false);

/// Seamed lat-long mesh with grid (8*2^level) x (16*2^level).
TriangleMesh build_seamed_mesh(int level);

/// Regular tetrahedron subdivided `level` times and projected; its four base
/// faces are exactly the Voronoi cells of `tetrahedron_vertices()`.
TriangleMesh build_tetra_sphere(int level);

/// Vertices of the regular tetrahedron used by the tetrahedral partition.
std::array<Vec3, 4> tetrahedron_vertices();

/// Copy of `mesh` with every vertex rotated by `rotation`.
TriangleMesh rotated(const TriangleMesh& mesh, const Mat3& rotation);

// ---------------------------------------------------------------------------
// Partitions and masks
// ---------------------------------------------------------------------------

/// Per-triangle membership flags.
using DomainMask = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Strong k-partition as a triangle labeling with labels 1..k, each used.
class PartitionLabeling {
 public:
  PartitionLabeling(Eigen::VectorXi labels, int k);

  int k() const noexcept { return k_; }
  const Eigen::VectorXi& labels() const noexcept { return labels_; }
  int operator[](int t) const { return labels_(t); }
  int size() const { return static_cast<int>(labels_.size()); }
  DomainMask mask(int label) const { return labels_.array() == label; }

  friend bool operator==(const PartitionLabeling& a, const PartitionLabeling& b) {
    return a.k_ == b.k_ && a.labels_ == b.labels_;
  }

 private:
  Eigen::VectorXi labels_;
  int k_;
};

/// k equal sectors in azimuth about the rotated z axis: triangle t gets label
/// j when the azimuth of rotation^{-1} * centroid(t) lies in [2pi(j-1)/k, 2pi j/k).
/// Stray components left by this rule are merged into the adjacent sector
/// nearest in azimuth, so every label is edge-connected.
PartitionLabeling make_lune_partition(const TriangleMesh& mesh, int k,
                                      const Mat3& rotation = Mat3::Identity());

/// Nearest-vertex labeling for the inscribed regular tetrahedron.
PartitionLabeling make_tetrahedral_partition(const TriangleMesh& mesh);

/// Triangles whose centroid lies within the cap of area fraction S about `center`.
DomainMask make_cap_mask(const TriangleMesh& mesh, const Vec3& center, double area_fraction);

/// Geodesic radius of the cap with area fraction S (cos r = 1 - 2S).
double cap_radius(double area_fraction);

/// Vertex permutation v -> index of -v. Throws SymmetryError when some vertex
/// has no antipodal partner within 1e-9.
std::vector<int> antipodal_vertex_map(const TriangleMesh& mesh);
/// Triangle permutation induced by the antipodal map.
std::vector<int> antipodal_triangle_map(const TriangleMesh& mesh);

PartitionLabeling inversion_image(const PartitionLabeling& labeling, const TriangleMesh& mesh);
DomainMask inversion_image(const DomainMask& mask, const TriangleMesh& mesh);

/// Sum of flat-triangle areas of the member triangles (steradians).
double region_area(const TriangleMesh& mesh, const DomainMask& mask);

/// Triangles not in `mask`.
inline DomainMask complement(const DomainMask& mask) { return !mask; }

}  // namespace sphpart
