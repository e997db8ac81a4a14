#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "msp/errors.hpp"

namespace msp {

// Conforming triangle mesh. Triangles are counterclockwise; boundary edges are
// oriented so the domain lies on their left and form closed loops.
struct TriMesh {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<std::size_t, 3>> triangles;
  std::vector<std::array<std::size_t, 2>> boundary_edges;

  std::size_t vertex_count() const { return vertices.size(); }
};

inline double triangle_area(const TriMesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles[t];
  const auto& p0 = mesh.vertices[tri[0]];
  const auto& p1 = mesh.vertices[tri[1]];
  const auto& p2 = mesh.vertices[tri[2]];
  return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

inline std::size_t mesh_edge_count(const TriMesh& mesh) {
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& tri : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      std::size_t a = tri[e], b = tri[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.insert({a, b});
    }
  return edges.size();
}

inline int level_from_h(double h) {
  for (int l = 1; l <= 12; ++l)
    if (h == std::ldexp(1.0, -l)) return l;
  throw Error("mesh spacing must be a power-of-two reciprocal 2^-l, l in 1..12");
}

// Uniform triangulation of the unit square (0,1)^2 with spacing h = 2^-level.
// Vertices are ordered lexicographically by (y, x); each grid cell is split
// along its main diagonal (lower-left to upper-right).
inline TriMesh structured_square_mesh(int level) {
  if (level < 1 || level > 12)
    throw Error("structured_square_mesh: level out of range");
  const std::size_t n = std::size_t{1} << level;
  const double h = 1.0 / static_cast<double>(n);
  TriMesh mesh;
  mesh.vertices.reserve((n + 1) * (n + 1));
  for (std::size_t j = 0; j <= n; ++j)
    for (std::size_t i = 0; i <= n; ++i)
      mesh.vertices.push_back({static_cast<double>(i) * h, static_cast<double>(j) * h});
  const auto idx = [n](std::size_t i, std::size_t j) { return j * (n + 1) + i; };
  mesh.triangles.reserve(2 * n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t v00 = idx(i, j), v10 = idx(i + 1, j);
      const std::size_t v01 = idx(i, j + 1), v11 = idx(i + 1, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  for (std::size_t i = 0; i < n; ++i) mesh.boundary_edges.push_back({idx(i, 0), idx(i + 1, 0)});
  for (std::size_t j = 0; j < n; ++j) mesh.boundary_edges.push_back({idx(n, j), idx(n, j + 1)});
  for (std::size_t i = n; i-- > 0;) mesh.boundary_edges.push_back({idx(i + 1, n), idx(i, n)});
  for (std::size_t j = n; j-- > 0;) mesh.boundary_edges.push_back({idx(0, j + 1), idx(0, j)});
  return mesh;
}

// Polygonal approximation of the unit disc: the square mesh is rescaled to
// [-1,1]^2 and every vertex is pulled radially by max(|x|,|y|)/||(x,y)||_2,
// which maps the square's boundary onto the unit circle and keeps angles.
inline TriMesh disc_mesh(int level) {
  TriMesh mesh = structured_square_mesh(level);
  for (auto& v : mesh.vertices) {
    const double x = 2.0 * v[0] - 1.0;
    const double y = 2.0 * v[1] - 1.0;
    const double rinf = std::max(std::abs(x), std::abs(y));
    const double r2 = std::hypot(x, y);
    const double s = r2 > 0.0 ? rinf / r2 : 0.0;
    v = {x * s, y * s};
  }
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    if (!(triangle_area(mesh, t) > 0.0))
      throw DegenerateTriangle("disc_mesh: mapping folded triangle " + std::to_string(t));
  return mesh;
}

// Plain ASCII exchange format: vertex count + coordinates, triangle count +
// index triples, boundary edge count + index pairs.
inline void write_mesh(std::ostream& os, const TriMesh& mesh) {
  os << mesh.vertices.size() << "\n";
  for (const auto& v : mesh.vertices) os << v[0] << " " << v[1] << "\n";
  os << mesh.triangles.size() << "\n";
  for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << mesh.boundary_edges.size() << "\n";
  for (const auto& e : mesh.boundary_edges) os << e[0] << " " << e[1] << "\n";
}

}  // namespace msp
