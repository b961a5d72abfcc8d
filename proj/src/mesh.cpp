#include "spectramax/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "spectramax/error.hpp"

namespace spectramax {

namespace {

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

std::vector<std::array<Vec3, 3>> corners_from_vertices(const std::vector<Vec3>& v,
                                                       const std::vector<Face>& f) {
  std::vector<std::array<Vec3, 3>> c(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      if (f[i][k] < 0 || static_cast<std::size_t>(f[i][k]) >= v.size())
        throw TopologyError("face " + std::to_string(i) + " references vertex " +
                            std::to_string(f[i][k]) + " out of range");
      c[i][k] = v[f[i][k]];
    }
  }
  return c;
}

}  // namespace

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  corners_ = corners_from_vertices(vertices_, faces_);
  build();
}

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces,
                 std::vector<std::array<Vec3, 3>> corners)
    : vertices_(std::move(vertices)), faces_(std::move(faces)), corners_(std::move(corners)) {
  if (corners_.size() != faces_.size()) throw TopologyError("corner array does not match faces");
  build();
}

void TriMesh::build() {
  const int nv = static_cast<int>(vertices_.size());
  const int nf = static_cast<int>(faces_.size());
  if (nv == 0 || nf == 0) throw TopologyError("empty mesh");

  for (int f = 0; f < nf; ++f) {
    const Face& t = faces_[f];
    for (int k = 0; k < 3; ++k)
      if (t[k] < 0 || t[k] >= nv)
        throw TopologyError("face " + std::to_string(f) + " references vertex out of range");
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw TopologyError("face " + std::to_string(f) + " repeats a vertex");
  }

  // Undirected edge usage and directed half-edge lookup.
  std::unordered_map<std::uint64_t, int> directed;
  std::unordered_map<std::uint64_t, int> undirected_count;
  directed.reserve(3 * nf);
  undirected_count.reserve(3 * nf);
  for (int h = 0; h < 3 * nf; ++h) {
    const int a = faces_[h / 3][h % 3], b = faces_[h / 3][(h + 1) % 3];
    ++undirected_count[edge_key(std::min(a, b), std::max(a, b))];
  }
  for (const auto& [key, count] : undirected_count) {
    const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    if (count == 1)
      throw TopologyError("boundary edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
    if (count > 2)
      throw TopologyError("non-manifold edge (" + std::to_string(a) + "," + std::to_string(b) +
                          ") shared by " + std::to_string(count) + " faces");
  }
  for (int h = 0; h < 3 * nf; ++h) {
    const int a = faces_[h / 3][h % 3], b = faces_[h / 3][(h + 1) % 3];
    if (!directed.emplace(edge_key(a, b), h).second)
      throw TopologyError("inconsistent orientation at edge (" + std::to_string(a) + "," +
                          std::to_string(b) + ")");
  }

  twin_.assign(3 * nf, -1);
  edges_.clear();
  edges_.reserve(3 * nf / 2);
  std::vector<int> halfedge_edge(3 * nf, -1);
  for (int h = 0; h < 3 * nf; ++h) {
    const int a = faces_[h / 3][h % 3], b = faces_[h / 3][(h + 1) % 3];
    const int t = directed.at(edge_key(b, a));
    twin_[h] = t;
    if (a < b) {
      halfedge_edge[h] = halfedge_edge[t] = static_cast<int>(edges_.size());
      edges_.push_back({a, b, h});
    }
  }

  // Vertex manifoldness: the half-edges leaving v form a single fan.
  std::vector<int> out_count(nv, 0), some_out(nv, -1);
  for (int h = 0; h < 3 * nf; ++h) {
    ++out_count[tail(h)];
    some_out[tail(h)] = h;
  }
  for (int v = 0; v < nv; ++v) {
    if (out_count[v] == 0) throw TopologyError("vertex " + std::to_string(v) + " is unreferenced");
    int h = some_out[v], steps = 0;
    do {
      h = next(next(h));  // incoming half-edge of v in the same face
      h = twin_[h];       // outgoing half-edge of v in the neighbouring face
      ++steps;
    } while (h != some_out[v] && steps <= out_count[v]);
    if (steps != out_count[v])
      throw TopologyError("non-manifold vertex " + std::to_string(v));
  }

  // Adjacency (CSR, sorted).
  std::vector<std::vector<std::pair<int, int>>> nbr(nv);
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    nbr[edges_[e].v0].push_back({edges_[e].v1, e});
    nbr[edges_[e].v1].push_back({edges_[e].v0, e});
  }
  adj_ptr_.assign(nv + 1, 0);
  adj_.clear();
  adj_edge_.clear();
  for (int v = 0; v < nv; ++v) {
    std::sort(nbr[v].begin(), nbr[v].end());
    for (auto [w, e] : nbr[v]) {
      adj_.push_back(w);
      adj_edge_.push_back(e);
    }
    adj_ptr_[v + 1] = static_cast<int>(adj_.size());
  }

  // Connectivity.
  {
    std::vector<char> all(nv, 1);
    if (count_components(*this, all) != 1) throw TopologyError("mesh is not connected");
  }
  const int chi = euler_characteristic();
  if (chi > 2 || chi % 2 != 0)
    throw TopologyError("Euler characteristic " + std::to_string(chi) +
                        " is not that of a closed orientable surface");

  // Geometry.
  face_area_.assign(nf, 0.0);
  vertex_area_.assign(nv, 0.0);
  total_area_ = 0.0;
  for (int f = 0; f < nf; ++f) {
    const auto& c = corners_[f];
    const Vec3 e1 = c[1] - c[0], e2 = c[2] - c[0];
    const double area = 0.5 * e1.cross(e2).norm();
    const double longest =
        std::max({e1.squaredNorm(), e2.squaredNorm(), (c[2] - c[1]).squaredNorm()});
    if (!(area > 1e-12 * longest) || !std::isfinite(area))
      throw DegenerateFace("face " + std::to_string(f) + " has zero area");
    face_area_[f] = area;
    total_area_ += area;
    for (int k = 0; k < 3; ++k) vertex_area_[faces_[f][k]] += area / 3.0;
  }
  edge_length_.assign(edges_.size(), 0.0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const int h = edges_[e].halfedge;
    const auto& c = corners_[h / 3];
    edge_length_[e] = (c[(h % 3 + 1) % 3] - c[h % 3]).norm();
  }
}

double TriMesh::mean_edge_length() const {
  return std::accumulate(edge_length_.begin(), edge_length_.end(), 0.0) /
         static_cast<double>(edge_length_.size());
}

TriMesh TriMesh::scaled(double s) const {
  std::vector<Vec3> v = vertices_;
  for (auto& p : v) p *= s;
  std::vector<std::array<Vec3, 3>> c = corners_;
  for (auto& t : c)
    for (auto& p : t) p *= s;
  return TriMesh(std::move(v), faces_, std::move(c));
}

std::string TriMesh::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  const std::uint64_t counts[2] = {vertices_.size(), faces_.size()};
  mix(counts, sizeof(counts));
  for (const Face& f : faces_) mix(f.data(), sizeof(int) * 3);
  for (const auto& c : corners_)
    for (const Vec3& p : c) mix(p.data(), sizeof(double) * 3);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int genus(const TriMesh& m) { return (2 - m.euler_characteristic()) / 2; }

TriMesh make_icosphere(int subdivisions, int max_subdivisions) {
  if (subdivisions < 0 || subdivisions > max_subdivisions)
    throw LimitExceeded("icosphere subdivisions " + std::to_string(subdivisions) +
                        " outside [0, " + std::to_string(max_subdivisions) + "]");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                         {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                         {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                         {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                         {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                         {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::unordered_map<std::uint64_t, int> mid;
    auto midpoint = [&](int a, int b) {
      const std::uint64_t key = edge_key(std::min(a, b), std::max(a, b));
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<Face> nf;
    nf.reserve(4 * f.size());
    for (const Face& t3 : f) {
      const int a = midpoint(t3[0], t3[1]), b = midpoint(t3[1], t3[2]), c = midpoint(t3[2], t3[0]);
      nf.push_back({t3[0], a, c});
      nf.push_back({t3[1], b, a});
      nf.push_back({t3[2], c, b});
      nf.push_back({a, b, c});
    }
    f = std::move(nf);
  }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh make_flat_torus(const Vec2& a, const Vec2& b, int n) {
  if (n < 4) throw LimitExceeded("flat torus resolution must be at least 4");
  const double det = a.x() * b.y() - a.y() * b.x();
  if (!(std::abs(det) > 1e-12 * a.norm() * b.norm()))
    throw DegenerateLattice("lattice vectors are linearly dependent");
  const bool flip = det < 0;
  auto id = [n](int i, int j) { return ((i % n + n) % n) * n + ((j % n + n) % n); };
  auto pos = [&](int i, int j) {
    const Vec2 p = (static_cast<double>(i) * a + static_cast<double>(j) * b) / n;
    return Vec3(p.x(), p.y(), 0.0);
  };
  std::vector<Vec3> v(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v[id(i, j)] = pos(i, j);
  std::vector<Face> f;
  std::vector<std::array<Vec3, 3>> c;
  f.reserve(2 * n * n);
  c.reserve(2 * n * n);
  auto add = [&](std::array<std::pair<int, int>, 3> ij) {
    if (flip) std::swap(ij[1], ij[2]);
    f.push_back({id(ij[0].first, ij[0].second), id(ij[1].first, ij[1].second),
                 id(ij[2].first, ij[2].second)});
    c.push_back({pos(ij[0].first, ij[0].second), pos(ij[1].first, ij[1].second),
                 pos(ij[2].first, ij[2].second)});
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      add({{{i, j}, {i + 1, j}, {i, j + 1}}});
      add({{{i + 1, j}, {i + 1, j + 1}, {i, j + 1}}});
    }
  return TriMesh(std::move(v), std::move(f), std::move(c));
}

TriMesh make_revolution_torus(double R, double r, int n_major, int n_minor) {
  if (n_major < 3 || n_minor < 3 || !(R > r) || !(r > 0))
    throw LimitExceeded("invalid revolution torus parameters");
  std::vector<Vec3> v;
  v.reserve(static_cast<std::size_t>(n_major) * n_minor);
  for (int i = 0; i < n_major; ++i) {
    const double u = 2.0 * M_PI * i / n_major;
    for (int j = 0; j < n_minor; ++j) {
      const double w = 2.0 * M_PI * j / n_minor;
      v.emplace_back((R + r * std::cos(w)) * std::cos(u), (R + r * std::cos(w)) * std::sin(u),
                     r * std::sin(w));
    }
  }
  auto id = [&](int i, int j) { return (i % n_major) * n_minor + (j % n_minor); };
  std::vector<Face> f;
  for (int i = 0; i < n_major; ++i)
    for (int j = 0; j < n_minor; ++j) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh make_double_torus(int resolution) {
  if (resolution < 1 || resolution > 64) throw LimitExceeded("double torus resolution out of range");
  constexpr int NX = 3, NY = 5;
  auto solid = [](int x, int y, int z) {
    if (x < 0 || x >= NX || y < 0 || y >= NY || z != 0) return false;
    return !(x == 1 && (y == 1 || y == 3));
  };
  const int r = resolution;
  std::map<std::array<int, 3>, int> index;
  std::vector<Vec3> v;
  auto vid = [&](const std::array<int, 3>& p) {
    auto [it, inserted] = index.emplace(p, static_cast<int>(v.size()));
    if (inserted) v.emplace_back(p[0], p[1], p[2]);
    return it->second;
  };
  // Outward normal followed by in-plane directions u, v with u x v = normal.
  struct Dir {
    std::array<int, 3> n, u, w;
  };
  const Dir dirs[6] = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},  {{-1, 0, 0}, {0, 0, 1}, {0, 1, 0}},
                       {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}},  {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},
                       {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},  {{0, 0, -1}, {0, 1, 0}, {1, 0, 0}}};
  std::vector<Face> f;
  for (int x = 0; x < NX; ++x)
    for (int y = 0; y < NY; ++y)
      for (int z = 0; z < 1; ++z) {
        if (!solid(x, y, z)) continue;
        for (const Dir& d : dirs) {
          if (solid(x + d.n[0], y + d.n[1], z + d.n[2])) continue;
          std::array<int, 3> origin{x, y, z};
          for (int k = 0; k < 3; ++k) origin[k] = r * (origin[k] + std::max(d.n[k], 0));
          auto grid = [&](int s, int t) {
            std::array<int, 3> p;
            for (int k = 0; k < 3; ++k) p[k] = origin[k] + s * d.u[k] + t * d.w[k];
            return vid(p);
          };
          for (int s = 0; s < r; ++s)
            for (int t = 0; t < r; ++t) {
              f.push_back({grid(s, t), grid(s + 1, t), grid(s, t + 1)});
              f.push_back({grid(s + 1, t), grid(s + 1, t + 1), grid(s, t + 1)});
            }
        }
      }
  // Unit squares on the boundary: 2*13 (top/bottom) + 16 (outer) + 8 (holes).
  const double scale = 1.0 / (r * std::sqrt(50.0));
  for (auto& p : v) p *= scale;
  return TriMesh(std::move(v), std::move(f));
}

std::vector<double> edge_distances(const TriMesh& m, int source) {
  std::vector<double> dist(m.num_vertices(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    auto nb = m.neighbors(v);
    auto ne = m.neighbor_edges(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const double nd = d + m.edge_length(ne[k]);
      if (nd < dist[nb[k]]) {
        dist[nb[k]] = nd;
        pq.push({nd, nb[k]});
      }
    }
  }
  return dist;
}

std::vector<int> farthest_point_sample(const TriMesh& m, std::size_t count) {
  count = std::min(count, m.num_vertices());
  std::vector<int> picked;
  if (count == 0) return picked;
  picked.push_back(0);
  std::vector<double> best = edge_distances(m, 0);
  while (picked.size() < count) {
    // Ties resolve to the lowest index.
    const int far = static_cast<int>(std::max_element(best.begin(), best.end()) - best.begin());
    if (best[far] <= 0.0) break;
    picked.push_back(far);
    const std::vector<double> d = edge_distances(m, far);
    for (std::size_t v = 0; v < best.size(); ++v) best[v] = std::min(best[v], d[v]);
  }
  return picked;
}

int count_components(const TriMesh& m, std::span<const char> keep) {
  const std::size_t n = m.num_vertices();
  std::vector<char> seen(n, 0);
  std::vector<int> stack;
  int components = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (!keep[s] || seen[s]) continue;
    ++components;
    seen[s] = 1;
    stack.push_back(static_cast<int>(s));
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : m.neighbors(v))
        if (keep[w] && !seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
  }
  return components;
}

}  // namespace spectramax
