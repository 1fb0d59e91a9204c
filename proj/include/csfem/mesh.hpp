#pragma once

#include <vector>

#include "csfem/composite_surface.hpp"
#include "csfem/patch.hpp"

namespace csfem {

enum class MeshMode { Matching, NonMatching, Cut };

// One signed triangle of a cut cell's integration region. Holes in the
// reference domain subtract with sign -1.
struct ClipTri {
  Triangle2 tri;
  double sign = 1.0;
};

struct MeshCell {
  int ix = 0, iy = 0;
  bool cut = false;
  std::vector<ClipTri> clip;  // empty for full interior cells
};

// Interior face between two active cells; normal along `axis`.
struct MeshFace {
  int cell_a = -1, cell_b = -1;
  int axis = 0;          // 0: normal along xi, 1: normal along eta
  Vec2 p0, p1;           // endpoints in reference coordinates
  bool wraps = false;    // periodic face between last and first row
};

struct PatchMesh {
  int patch_id = -1;
  MeshMode mode = MeshMode::Matching;
  double h = 0.0;        // nominal mesh parameter (hx == hy)
  double hx = 0.0, hy = 0.0;
  Vec2 origin{0, 0};
  int nx = 0, ny = 0;
  bool periodic_y = false;
  double period = 0.0;

  std::vector<MeshCell> cells;      // active cells only
  std::vector<int> active_of_grid;  // nx*ny -> active index or -1
  std::vector<MeshFace> stab_faces;
  int n_cut = 0;
  double covered_area = 0.0;  // signed clip areas plus full cells
  double domain_area = 0.0;

  int grid_index(int ix, int iy) const { return iy * nx + ix; }
  Box2 cell_box(const MeshCell& c) const {
    Box2 b;
    b.lo = origin + Vec2(c.ix * hx, c.iy * hy);
    b.hi = b.lo + Vec2(hx, hy);
    return b;
  }
  double wrap_eta(double eta) const;
  // Active cell whose closure contains p (eta wrapped); -1 if none.
  int locate(const Vec2& p) const;
  Vec2 local_coords(int active_idx, const Vec2& p) const;  // unit cell coords
};

// Cell ∩ loop-interior as a signed triangulation (plain fan on convex
// clips); signed sums reproduce the clipped integrals exactly.
std::vector<ClipTri> clip_cell(const Box2& cell, const Polyline& loop,
                               double area_tol = -1.0);

// Cell ∩ domain as signed triangles (outer loop positive, holes negative).
std::vector<ClipTri> clip_cell_signed(const Box2& cell, const PolyDomain& domain);

PatchMesh build_mesh(const ParametricPatch& patch, double h, MeshMode mode,
                     const Vec2& offset_frac = Vec2(0, 0),
                     double poly_resolution = -1.0);

struct MeshConfig {
  double h = 0.25;
  MeshMode mode = MeshMode::Cut;
  Vec2 offset_frac{0.0, 0.0};
  // Non-matching mode meshes alternate patches at these h multiples.
  std::vector<double> nonmatching_factors{1.0, 0.5};
  double poly_resolution = -1.0;
};

std::vector<PatchMesh> mesh_surface(const CompositeSurface& surface,
                                    const MeshConfig& config);

}  // namespace csfem
