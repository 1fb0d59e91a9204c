#pragma once

#include <vector>

#include "csfem/composite_surface.hpp"
#include "csfem/mesh.hpp"

namespace csfem {

// Values and reference-cell derivatives of all (p+1)^2 tensor Lagrange shape
// functions at a point of the unit cell. Local index l = b*(p+1) + a.
struct BasisEval {
  std::vector<double> value;
  std::vector<Vec2> grad;    // d/dxi, d/deta on the unit cell
  std::vector<Vec2> deriv2;  // pure second derivatives (d2/dxi2, d2/deta2)
};

BasisEval eval_basis(int p, const Vec2& unit_pt);

// Q_p space on one patch mesh: continuous inside the patch, DOFs on active
// cell nodes only, eta-periodic node identification on tube patches.
struct PatchSpace {
  int patch_id = -1;
  int n_dofs = 0;
  int global_offset = 0;
  std::vector<std::vector<int>> cell_dofs;  // per active cell, local->patch dof
  std::vector<Vec2> dof_ref;                // patch dof -> reference coords
};

// Broken composite space: direct sum of per-patch spaces, no DOFs shared
// between patches.
class BrokenSpace {
 public:
  BrokenSpace(const CompositeSurface& surface,
              const std::vector<PatchMesh>& meshes, int degree);

  int degree() const { return degree_; }
  int n_dofs() const { return n_dofs_; }
  const std::vector<PatchSpace>& patch_spaces() const { return spaces_; }
  const PatchSpace& space_of(int patch_id) const;
  const PatchMesh& mesh_of(int patch_id) const { return (*meshes_)[index_of(patch_id)]; }
  const ParametricPatch& patch_of(int patch_id) const {
    return surface_->patch(patch_id);
  }
  const CompositeSurface& surface() const { return *surface_; }
  const std::vector<PatchMesh>& meshes() const { return *meshes_; }

 private:
  int index_of(int patch_id) const;
  const CompositeSurface* surface_ = nullptr;
  const std::vector<PatchMesh>* meshes_ = nullptr;
  int degree_ = 1;
  int n_dofs_ = 0;
  std::vector<PatchSpace> spaces_;
};

// Nodal interpolation of an ambient function (evaluated through the patch
// maps; nodes outside the domain use the smooth extension).
VectorX interpolate(const BrokenSpace& space,
                    const std::function<double(const Vec3&)>& v);

// Evaluation of a coefficient vector as a field on the surface.
struct FieldEval {
  double value = 0.0;
  Vec2 ref_grad{0, 0};
  Vec3 surf_grad{0, 0, 0};
};

FieldEval eval_field(const BrokenSpace& space, const VectorX& coeffs,
                     int patch_id, const Vec2& ref_pt);

}  // namespace csfem
