#include "csfem/fe_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace csfem {

namespace {

// 1D Lagrange basis on equispaced nodes of [0,1], p in {1,2}.
void lagrange_1d(int p, double t, double* val, double* d1, double* d2) {
  if (p == 1) {
    val[0] = 1.0 - t;
    val[1] = t;
    d1[0] = -1.0;
    d1[1] = 1.0;
    d2[0] = d2[1] = 0.0;
  } else if (p == 2) {
    val[0] = 2.0 * (t - 0.5) * (t - 1.0);
    val[1] = 4.0 * t * (1.0 - t);
    val[2] = 2.0 * t * (t - 0.5);
    d1[0] = 4.0 * t - 3.0;
    d1[1] = 4.0 - 8.0 * t;
    d1[2] = 4.0 * t - 1.0;
    d2[0] = 4.0;
    d2[1] = -8.0;
    d2[2] = 4.0;
  } else {
    throw std::invalid_argument("unsupported polynomial degree (p must be 1 or 2)");
  }
}

}  // namespace

BasisEval eval_basis(int p, const Vec2& unit_pt) {
  double vx[3], dx[3], hx[3], vy[3], dy[3], hy[3];
  lagrange_1d(p, unit_pt.x(), vx, dx, hx);
  lagrange_1d(p, unit_pt.y(), vy, dy, hy);
  const int n1 = p + 1;
  BasisEval out;
  out.value.resize(n1 * n1);
  out.grad.resize(n1 * n1);
  out.deriv2.resize(n1 * n1);
  for (int b = 0; b < n1; ++b)
    for (int a = 0; a < n1; ++a) {
      int l = b * n1 + a;
      out.value[l] = vx[a] * vy[b];
      out.grad[l] = Vec2(dx[a] * vy[b], vx[a] * dy[b]);
      out.deriv2[l] = Vec2(hx[a] * vy[b], vx[a] * hy[b]);
    }
  return out;
}

BrokenSpace::BrokenSpace(const CompositeSurface& surface,
                         const std::vector<PatchMesh>& meshes, int degree)
    : surface_(&surface), meshes_(&meshes), degree_(degree) {
  if (degree != 1 && degree != 2)
    throw std::invalid_argument("unsupported polynomial degree (p must be 1 or 2)");
  if (surface.patches.size() != meshes.size())
    throw std::invalid_argument("one mesh per patch required");

  const int p = degree;
  int offset = 0;
  for (std::size_t pi = 0; pi < surface.patches.size(); ++pi) {
    const PatchMesh& mesh = meshes[pi];
    PatchSpace ps;
    ps.patch_id = surface.patches[pi].id;
    ps.global_offset = offset;

    const int gy_count = mesh.ny * p;  // lattice rows before wrap
    auto lattice_key = [&](int gx, int gy) {
      if (mesh.periodic_y) gy = ((gy % gy_count) + gy_count) % gy_count;
      return static_cast<long long>(gy) * (mesh.nx * p + 1) + gx;
    };

    // lexicographic DOF numbering over needed lattice nodes: eta-major
    std::map<long long, int> node_id;
    for (const MeshCell& cell : mesh.cells)
      for (int b = 0; b <= p; ++b)
        for (int a = 0; a <= p; ++a)
          node_id.emplace(lattice_key(cell.ix * p + a, cell.iy * p + b), -1);
    int next = 0;
    for (auto& kv : node_id) kv.second = next++;
    ps.n_dofs = next;

    ps.dof_ref.resize(ps.n_dofs);
    for (const auto& kv : node_id) {
      long long gy = kv.first / (mesh.nx * p + 1);
      long long gx = kv.first % (mesh.nx * p + 1);
      ps.dof_ref[kv.second] =
          mesh.origin + Vec2(static_cast<double>(gx) * mesh.hx / p,
                             static_cast<double>(gy) * mesh.hy / p);
    }

    ps.cell_dofs.resize(mesh.cells.size());
    for (std::size_t ci = 0; ci < mesh.cells.size(); ++ci) {
      const MeshCell& cell = mesh.cells[ci];
      auto& dofs = ps.cell_dofs[ci];
      dofs.resize((p + 1) * (p + 1));
      for (int b = 0; b <= p; ++b)
        for (int a = 0; a <= p; ++a)
          dofs[b * (p + 1) + a] =
              node_id.at(lattice_key(cell.ix * p + a, cell.iy * p + b));
    }

    offset += ps.n_dofs;
    spaces_.push_back(std::move(ps));
  }
  n_dofs_ = offset;
}

int BrokenSpace::index_of(int patch_id) const {
  for (std::size_t i = 0; i < spaces_.size(); ++i)
    if (spaces_[i].patch_id == patch_id) return static_cast<int>(i);
  throw std::invalid_argument("unknown patch id in space");
}

const PatchSpace& BrokenSpace::space_of(int patch_id) const {
  return spaces_[index_of(patch_id)];
}

VectorX interpolate(const BrokenSpace& space,
                    const std::function<double(const Vec3&)>& v) {
  VectorX out(space.n_dofs());
  for (const PatchSpace& ps : space.patch_spaces()) {
    const ParametricPatch& patch = space.patch_of(ps.patch_id);
    for (int i = 0; i < ps.n_dofs; ++i)
      out[ps.global_offset + i] = v(patch.map(ps.dof_ref[i]));
  }
  return out;
}

FieldEval eval_field(const BrokenSpace& space, const VectorX& coeffs,
                     int patch_id, const Vec2& ref_pt) {
  const PatchSpace& ps = space.space_of(patch_id);
  const PatchMesh& mesh = space.mesh_of(patch_id);
  int cell = mesh.locate(ref_pt);
  if (cell < 0) throw GeometryError("point not inside any active cell");
  Vec2 unit = mesh.local_coords(cell, ref_pt);
  BasisEval basis = eval_basis(space.degree(), unit);
  FieldEval fe;
  for (std::size_t l = 0; l < basis.value.size(); ++l) {
    double c = coeffs[ps.global_offset + ps.cell_dofs[cell][l]];
    fe.value += c * basis.value[l];
    fe.ref_grad += c * Vec2(basis.grad[l].x() / mesh.hx, basis.grad[l].y() / mesh.hy);
  }
  fe.surf_grad = space.patch_of(patch_id).push_gradient(ref_pt, fe.ref_grad);
  return fe;
}

}  // namespace csfem
