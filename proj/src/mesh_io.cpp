#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "spectramax/error.hpp"
#include "spectramax/mesh.hpp"

namespace spectramax {

namespace {

// Next non-empty, non-comment line; false at EOF.
bool next_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

[[noreturn]] void fail(int lineno, const std::string& msg) {
  throw ParseError("line " + std::to_string(lineno) + ": " + msg);
}

TriMesh read_off(std::istream& in) {
  std::string line;
  int lineno = 0;
  if (!next_line(in, line, lineno)) fail(lineno, "empty OFF stream");
  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic.rfind("OFF", 0) != 0) fail(lineno, "missing OFF header");
  long nv = -1, nf = -1, ne = 0;
  if (!(header >> nv)) {
    if (!next_line(in, line, lineno)) fail(lineno, "missing OFF counts");
    std::istringstream counts(line);
    if (!(counts >> nv >> nf)) fail(lineno, "malformed OFF counts");
    counts >> ne;
  } else if (!(header >> nf)) {
    fail(lineno, "malformed OFF counts");
  }
  if (nv <= 0 || nf <= 0) fail(lineno, "OFF counts must be positive");
  std::vector<Vec3> v;
  v.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    if (!next_line(in, line, lineno)) fail(lineno, "unexpected end of vertex list");
    std::istringstream s(line);
    double x, y, z;
    if (!(s >> x >> y >> z)) fail(lineno, "malformed vertex");
    v.emplace_back(x, y, z);
  }
  std::vector<Face> f;
  f.reserve(nf);
  for (long i = 0; i < nf; ++i) {
    if (!next_line(in, line, lineno)) fail(lineno, "unexpected end of face list");
    std::istringstream s(line);
    int k;
    Face t;
    if (!(s >> k)) fail(lineno, "malformed face");
    if (k != 3) fail(lineno, "only triangular faces are supported");
    if (!(s >> t[0] >> t[1] >> t[2])) fail(lineno, "malformed face indices");
    for (int idx : t)
      if (idx < 0 || idx >= nv) fail(lineno, "face index out of range");
    f.push_back(t);
  }
  return TriMesh(std::move(v), std::move(f));
}

int obj_index(const std::string& token, std::size_t nv, int lineno) {
  const std::string head = token.substr(0, token.find('/'));
  int idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stoi(head, &used);
    if (used != head.size()) fail(lineno, "malformed face index '" + token + "'");
  } catch (const std::logic_error&) {
    fail(lineno, "malformed face index '" + token + "'");
  }
  const long resolved = idx > 0 ? idx - 1 : static_cast<long>(nv) + idx;
  if (idx == 0 || resolved < 0 || resolved >= static_cast<long>(nv))
    fail(lineno, "face index out of range");
  return static_cast<int>(resolved);
}

TriMesh read_obj(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::vector<Vec3> v;
  std::vector<Face> f;
  while (next_line(in, line, lineno)) {
    std::istringstream s(line);
    std::string tag;
    s >> tag;
    if (tag == "v") {
      double x, y, z;
      if (!(s >> x >> y >> z)) fail(lineno, "malformed vertex");
      v.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (s >> tok) idx.push_back(obj_index(tok, v.size(), lineno));
      if (idx.size() != 3) fail(lineno, "only triangular faces are supported");
      f.push_back({idx[0], idx[1], idx[2]});
    }
    // vt, vn, o, g, s, usemtl, mtllib: ignored
  }
  if (v.empty() || f.empty()) fail(lineno, "OBJ stream has no geometry");
  return TriMesh(std::move(v), std::move(f));
}

}  // namespace

TriMesh load_mesh(std::istream& in, MeshFormat format) {
  return format == MeshFormat::off ? read_off(in) : read_obj(in);
}

TriMesh load_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file '" + path + "'");
  const auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (auto& c : ext) c = static_cast<char>(std::tolower(c));
  if (ext == "off") return load_mesh(in, MeshFormat::off);
  if (ext == "obj") return load_mesh(in, MeshFormat::obj);
  throw ParseError("unknown mesh extension '" + ext + "'");
}

void save_off(std::ostream& out, const TriMesh& m) {
  out << "OFF\n" << m.num_vertices() << ' ' << m.num_faces() << ' ' << m.num_edges() << '\n';
  out << std::setprecision(17);
  for (const Vec3& p : m.vertices()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const Face& f : m.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

}  // namespace spectramax
