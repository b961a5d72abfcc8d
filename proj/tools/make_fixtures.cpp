// Regenerates the meshes under fixtures/.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "spectramax/mesh.hpp"

namespace {

void write(const std::filesystem::path& p, const spectramax::TriMesh& m) {
  std::ofstream out(p);
  spectramax::save_off(out, m);
}

}  // namespace

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  const fs::path dir = argc > 1 ? argv[1] : "fixtures";
  fs::create_directories(dir);
  using namespace spectramax;

  write(dir / "icosahedron.off", make_icosphere(0));
  write(dir / "sphere162.off", make_icosphere(2));
  // Flat tori wrap through per-face corners, which OFF cannot store; they stay generator specs.
  // r = R / sqrt 2 puts the torus in the square conformal class.
  write(dir / "torus16.off", make_revolution_torus(std::sqrt(2.0), 1.0, 32, 16));
  write(dir / "genus2.off", make_double_torus(2));

  // Two tetrahedra sharing one edge with a third face: edge of valence 3.
  std::ofstream bad(dir / "nonmanifold.obj");
  bad << "# three faces on edge 1-2\n"
         "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nv 0 -1 0\n"
         "f 1 2 3\nf 2 1 4\nf 1 2 5\n";
  std::cout << "fixtures written to " << dir << "\n";
}
