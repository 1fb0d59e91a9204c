#include "csfem/vtk.hpp"

#include <cstdio>
#include <vector>

namespace csfem {

namespace {

struct VtkData {
  std::vector<Vec3> points;
  std::vector<std::array<int, 3>> tris;
  std::vector<double> u;
  std::vector<double> gmag;
};

void emit_triangle(VtkData& out, const BrokenSpace& space, const VectorX& u,
                   int patch_id, int cell, const Triangle2& tri) {
  const PatchSpace& ps = space.space_of(patch_id);
  const PatchMesh& mesh = space.mesh_of(patch_id);
  const ParametricPatch& patch = space.patch_of(patch_id);
  std::array<int, 3> ids;
  const Vec2 corners[3] = {tri.a, tri.b, tri.c};
  for (int k = 0; k < 3; ++k) {
    Vec2 ref = corners[k];
    Vec2 unit = mesh.local_coords(cell, ref);
    BasisEval basis = eval_basis(space.degree(), unit);
    double val = 0.0;
    Vec2 g(0, 0);
    const auto& dofs = ps.cell_dofs[cell];
    for (std::size_t l = 0; l < dofs.size(); ++l) {
      double c = u[ps.global_offset + dofs[l]];
      val += c * basis.value[l];
      g += c * Vec2(basis.grad[l].x() / mesh.hx, basis.grad[l].y() / mesh.hy);
    }
    ids[k] = static_cast<int>(out.points.size());
    out.points.push_back(patch.map(ref));
    out.u.push_back(val);
    out.gmag.push_back(patch.push_gradient(ref, g).norm());
  }
  out.tris.push_back(ids);
}

}  // namespace

void export_vtk(const BrokenSpace& space, const VectorX& u,
                const std::string& path) {
  VtkData out;
  const int p = space.degree();
  for (const PatchSpace& ps : space.patch_spaces()) {
    const PatchMesh& mesh = space.mesh_of(ps.patch_id);
    const ParametricPatch& patch = space.patch_of(ps.patch_id);
    for (std::size_t ci = 0; ci < mesh.cells.size(); ++ci) {
      const MeshCell& cell = mesh.cells[ci];
      Box2 box = mesh.cell_box(cell);
      if (!cell.cut) {
        for (int a = 0; a < p; ++a)
          for (int b = 0; b < p; ++b) {
            Vec2 q00 = box.lo + Vec2(a * mesh.hx / p, b * mesh.hy / p);
            Vec2 q11 = box.lo + Vec2((a + 1) * mesh.hx / p, (b + 1) * mesh.hy / p);
            Vec2 q10(q11.x(), q00.y()), q01(q00.x(), q11.y());
            emit_triangle(out, space, u, ps.patch_id, static_cast<int>(ci),
                          {q00, q10, q11});
            emit_triangle(out, space, u, ps.patch_id, static_cast<int>(ci),
                          {q00, q11, q01});
          }
        continue;
      }
      bool has_negative = false;
      for (const ClipTri& ct : cell.clip) has_negative |= ct.sign < 0;
      if (!has_negative) {
        for (const ClipTri& ct : cell.clip)
          emit_triangle(out, space, u, ps.patch_id, static_cast<int>(ci), ct.tri);
        continue;
      }
      // hole-bearing cut cell: sampled subdivision for visualization
      const int s = 4;
      double res = mesh.h / 8.0;
      for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) {
          Vec2 q00 = box.lo + Vec2(a * mesh.hx / s, b * mesh.hy / s);
          Vec2 q11 = box.lo + Vec2((a + 1) * mesh.hx / s, (b + 1) * mesh.hy / s);
          Vec2 q10(q11.x(), q00.y()), q01(q00.x(), q11.y());
          for (const Triangle2& t :
               {Triangle2{q00, q10, q11}, Triangle2{q00, q11, q01}}) {
            if (patch.domain.contains(t.centroid(), res))
              emit_triangle(out, space, u, ps.patch_id, static_cast<int>(ci), t);
          }
        }
    }
  }

  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::fprintf(f, "# vtk DataFile Version 3.0\ncsfem surface solution\nASCII\n");
  std::fprintf(f, "DATASET UNSTRUCTURED_GRID\n");
  std::fprintf(f, "POINTS %zu double\n", out.points.size());
  for (const Vec3& x : out.points)
    std::fprintf(f, "%.12g %.12g %.12g\n", x[0], x[1], x[2]);
  std::fprintf(f, "CELLS %zu %zu\n", out.tris.size(), 4 * out.tris.size());
  for (const auto& t : out.tris)
    std::fprintf(f, "3 %d %d %d\n", t[0], t[1], t[2]);
  std::fprintf(f, "CELL_TYPES %zu\n", out.tris.size());
  for (std::size_t i = 0; i < out.tris.size(); ++i) std::fprintf(f, "5\n");
  std::fprintf(f, "POINT_DATA %zu\n", out.points.size());
  std::fprintf(f, "SCALARS u double 1\nLOOKUP_TABLE default\n");
  for (double v : out.u) std::fprintf(f, "%.12g\n", v);
  std::fprintf(f, "SCALARS grad_magnitude double 1\nLOOKUP_TABLE default\n");
  for (double v : out.gmag) std::fprintf(f, "%.12g\n", v);
  std::fclose(f);
}

}  // namespace csfem
