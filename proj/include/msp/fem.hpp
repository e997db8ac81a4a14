#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "msp/banded_matrix.hpp"
#include "msp/dense_matrix.hpp"
#include "msp/errors.hpp"
#include "msp/mesh.hpp"

namespace msp {

// P1 operators on a triangle mesh: mass M, stiffness K, reaction L = K + M,
// and boundary mass Q (edge integrals along boundary_edges).
struct FemOperators {
  std::shared_ptr<const BandedMatrix> mass;
  std::shared_ptr<const BandedMatrix> stiffness;
  std::shared_ptr<const BandedMatrix> reaction;
  std::shared_ptr<const BandedMatrix> boundary_mass;

  std::size_t dim() const { return mass->dim(); }
};

inline std::size_t mesh_half_bandwidth(const TriMesh& mesh) {
  std::size_t bw = 0;
  for (const auto& tri : mesh.triangles)
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) {
        const std::size_t d = tri[a] > tri[b] ? tri[a] - tri[b] : tri[b] - tri[a];
        bw = std::max(bw, d);
      }
  return bw;
}

// Exact P1 element integrals: local mass (area/12)*(2 on diag, 1 off), local
// stiffness from the constant gradients, boundary edge mass (len/6)*(2,1;1,2).
inline FemOperators assemble(const TriMesh& mesh) {
  const std::size_t n = mesh.vertex_count();
  const std::size_t bw = mesh_half_bandwidth(mesh);
  auto m = std::make_shared<BandedMatrix>(n, bw);
  auto k = std::make_shared<BandedMatrix>(n, bw);
  auto q = std::make_shared<BandedMatrix>(n, bw);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& p0 = mesh.vertices[tri[0]];
    const auto& p1 = mesh.vertices[tri[1]];
    const auto& p2 = mesh.vertices[tri[2]];
    const double area = triangle_area(mesh, t);
    if (!(area > 1e-14))
      throw DegenerateTriangle("assemble: nonpositive area in triangle " +
                               std::to_string(t));
    const double b[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
    const double c[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
    for (int a = 0; a < 3; ++a)
      for (int bb = 0; bb <= a; ++bb) {
        const double mass_val = (area / 12.0) * (a == bb ? 2.0 : 1.0);
        const double stiff_val = (b[a] * b[bb] + c[a] * c[bb]) / (4.0 * area);
        m->add_at(tri[a], tri[bb], mass_val);
        k->add_at(tri[a], tri[bb], stiff_val);
      }
  }
  for (const auto& e : mesh.boundary_edges) {
    const auto& pa = mesh.vertices[e[0]];
    const auto& pb = mesh.vertices[e[1]];
    const double len = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
    q->add_at(e[0], e[0], len / 3.0);
    q->add_at(e[1], e[1], len / 3.0);
    q->add_at(e[0], e[1], len / 6.0);
  }
  auto l = std::make_shared<BandedMatrix>(n, bw);
  l->add_scaled(1.0, *k);
  l->add_scaled(1.0, *m);
  return FemOperators{m, k, l, q};
}

inline Vector interpolate(const TriMesh& mesh,
                          const std::function<double(double, double)>& f) {
  Vector v(mesh.vertex_count());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = f(mesh.vertices[i][0], mesh.vertices[i][1]);
  return v;
}

// Node activity flags for the state-constrained problem; at least one node
// must remain inactive.
struct ActiveSet {
  std::vector<bool> active;

  std::size_t inactive_count() const {
    std::size_t c = 0;
    for (bool a : active)
      if (!a) ++c;
    return c;
  }

  std::vector<std::size_t> inactive_indices() const {
    std::vector<std::size_t> idx;
    idx.reserve(active.size());
    for (std::size_t i = 0; i < active.size(); ++i)
      if (!active[i]) idx.push_back(i);
    return idx;
  }
};

// Nodes within the given Euclidean distance of the origin are active.
inline ActiveSet radius_active_set(const TriMesh& mesh, double radius = 0.5) {
  ActiveSet set;
  set.active.resize(mesh.vertex_count());
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i)
    set.active[i] = std::hypot(mesh.vertices[i][0], mesh.vertices[i][1]) <= radius;
  if (set.inactive_count() == 0)
    throw EmptyInactiveSet("radius_active_set: no inactive nodes");
  return set;
}

// Restrictions used by the quadruple system: M^(i,i), K^(i,i) (inactive rows
// and columns, banded) and M^(i,:) (inactive rows, all columns, dense).
struct InactiveRestriction {
  std::shared_ptr<const BandedMatrix> mass_ii;
  std::shared_ptr<const BandedMatrix> stiffness_ii;
  DenseMatrix mass_rows;
  std::vector<std::size_t> indices;  // ascending inactive node ids
};

inline InactiveRestriction restrict_to_inactive(const FemOperators& fem,
                                                const ActiveSet& set) {
  if (set.active.size() != fem.dim())
    throw DimensionMismatch("restrict_to_inactive: size mismatch");
  const std::vector<std::size_t> keep = set.inactive_indices();
  if (keep.empty()) throw EmptyInactiveSet("restrict_to_inactive: no inactive nodes");
  InactiveRestriction r;
  r.indices = keep;
  r.mass_ii = std::make_shared<BandedMatrix>(restrict_banded(*fem.mass, keep));
  r.stiffness_ii = std::make_shared<BandedMatrix>(restrict_banded(*fem.stiffness, keep));
  r.mass_rows = DenseMatrix(keep.size(), fem.dim());
  for (std::size_t row = 0; row < keep.size(); ++row)
    for (std::size_t col = 0; col < fem.dim(); ++col)
      r.mass_rows(row, col) = fem.mass->get(keep[row], col);
  return r;
}

}  // namespace msp
