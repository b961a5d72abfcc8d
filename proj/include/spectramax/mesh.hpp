#pragma once
// Closed oriented triangle meshes, canonical test geometries and mesh I/O.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace spectramax {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Face = std::array<int, 3>;

/// Undirected edge (v0 < v1) with one of its half-edges.
struct Edge {
  int v0 = 0;
  int v1 = 0;
  int halfedge = 0;
};

/// Closed, connected, consistently oriented triangle mesh.
///
/// Geometry is stored per face corner so that surfaces with a periodic
/// identification (flat tori) keep their unwrapped triangle shapes; for an
/// ordinary embedded mesh the corners are just the vertex positions. The
/// mesh is immutable after construction.
///
/// Half-edge h = 3*f + i runs from faces[f][i] to faces[f][(i+1)%3].
class TriMesh {
 public:
  /// Validates topology and geometry. Throws TopologyError or DegenerateFace.
  TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces);
  /// Same, with explicit per-face corner coordinates (periodic meshes).
  TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces,
          std::vector<std::array<Vec3, 3>> corners);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_faces() const { return faces_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::array<Vec3, 3>& corners(int f) const { return corners_[f]; }

  int next(int h) const { return h - h % 3 + (h + 1) % 3; }
  int twin(int h) const { return twin_[h]; }
  int tail(int h) const { return faces_[h / 3][h % 3]; }
  int head(int h) const { return faces_[h / 3][(h + 1) % 3]; }

  /// Sorted vertex neighbours.
  std::span<const int> neighbors(int v) const {
    return {adj_.data() + adj_ptr_[v], adj_.data() + adj_ptr_[v + 1]};
  }
  /// Edge ids parallel to neighbors(v).
  std::span<const int> neighbor_edges(int v) const {
    return {adj_edge_.data() + adj_ptr_[v], adj_edge_.data() + adj_ptr_[v + 1]};
  }

  double face_area(int f) const { return face_area_[f]; }
  /// One third of the incident face areas.
  double vertex_area(int v) const { return vertex_area_[v]; }
  const std::vector<double>& vertex_areas() const { return vertex_area_; }
  double total_area() const { return total_area_; }
  double edge_length(int e) const { return edge_length_[e]; }
  double mean_edge_length() const;

  int euler_characteristic() const {
    return static_cast<int>(num_vertices()) - static_cast<int>(num_edges()) +
           static_cast<int>(num_faces());
  }

  /// Uniformly scaled copy.
  TriMesh scaled(double s) const;

  /// FNV-1a digest of faces and corner geometry, rendered as 16 hex digits.
  std::string hash() const;

 private:
  void build();

  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<std::array<Vec3, 3>> corners_;
  std::vector<int> twin_;
  std::vector<Edge> edges_;
  std::vector<int> adj_ptr_, adj_, adj_edge_;
  std::vector<double> face_area_, vertex_area_, edge_length_;
  double total_area_ = 0.0;
};

/// gamma = (2 - V + E - F) / 2.
int genus(const TriMesh& m);

inline constexpr int kDefaultMaxSubdivisions = 7;

/// Subdivided icosahedron with all vertices on the unit sphere.
TriMesh make_icosphere(int subdivisions, int max_subdivisions = kDefaultMaxSubdivisions);

/// Flat torus R^2 / (Z a + Z b) meshed by an n x n grid. Vertices carry plane
/// coordinates (z = 0); faces wrap around combinatorially. Area |det(a, b)|.
TriMesh make_flat_torus(const Vec2& a, const Vec2& b, int n);

/// Torus of revolution with major radius R and minor radius r.
TriMesh make_revolution_torus(double R, double r, int n_major, int n_minor);

/// Genus-2 polyhedron: boundary of a 3 x 5 x 1 block of unit cubes with two
/// cubes removed, each unit square split into resolution^2 grid cells, scaled
/// to unit total area.
TriMesh make_double_torus(int resolution);

/// Graph-Dijkstra distances along mesh edges from one source vertex.
std::vector<double> edge_distances(const TriMesh& m, int source);

/// Up to `count` vertices chosen by farthest-point sampling (start: vertex 0).
std::vector<int> farthest_point_sample(const TriMesh& m, std::size_t count);

/// Connected components of the subgraph induced by vertices with keep[v].
int count_components(const TriMesh& m, std::span<const char> keep);

// ---- I/O ----

enum class MeshFormat { off, obj };

/// ASCII OFF or OBJ with triangular faces. OBJ texture/normal indices are
/// ignored. Throws ParseError, TopologyError or DegenerateFace.
TriMesh load_mesh(std::istream& in, MeshFormat format);
/// Format picked from the extension (.off / .obj).
TriMesh load_mesh_file(const std::string& path);
void save_off(std::ostream& out, const TriMesh& m);

}  // namespace spectramax
