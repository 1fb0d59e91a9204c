#include "csfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace csfem {

static constexpr double kSliverFraction = 1e-14;  // of h^2

std::vector<ClipTri> clip_cell(const Box2& cell, const Polyline& loop,
                               double area_tol) {
  Polyline clipped = clip_polyline_to_box(loop, cell);
  if (clipped.size() < 3) return {};
  double cell_area = cell.width() * cell.height();
  double tol = area_tol >= 0 ? area_tol : kSliverFraction * cell_area;
  if (std::abs(shoelace_area(clipped)) <= tol) return {};
  std::vector<ClipTri> out;
  for (const SignedTri& st : fan_triangulation(clipped))
    out.push_back({st.tri, st.sign});
  return out;
}

std::vector<ClipTri> clip_cell_signed(const Box2& cell,
                                      const PolyDomain& domain) {
  std::vector<ClipTri> out;
  for (std::size_t li = 0; li < domain.loops.size(); ++li) {
    double sign = (li == 0) ? 1.0 : -1.0;
    for (const ClipTri& ct : clip_cell(cell, domain.loops[li], 0.0))
      out.push_back({ct.tri, sign * ct.sign});
  }
  return out;
}

double PatchMesh::wrap_eta(double eta) const {
  if (!periodic_y) return eta;
  double t = std::fmod(eta - origin.y(), period);
  if (t < 0) t += period;
  return origin.y() + t;
}

int PatchMesh::locate(const Vec2& p) const {
  double y = wrap_eta(p.y());
  auto clampi = [](int v, int lo, int hi) { return std::max(lo, std::min(hi, v)); };
  int ix = clampi(static_cast<int>(std::floor((p.x() - origin.x()) / hx)), 0, nx - 1);
  int iy = clampi(static_cast<int>(std::floor((y - origin.y()) / hy)), 0, ny - 1);
  double tol = 1e-9 * h;
  for (int ring = 0; ring <= 2; ++ring) {
    for (int dy = -ring; dy <= ring; ++dy)
      for (int dx = -ring; dx <= ring; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
        int jx = ix + dx;
        int jy = iy + dy;
        if (periodic_y) jy = (jy % ny + ny) % ny;
        if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;
        int a = active_of_grid[grid_index(jx, jy)];
        if (a < 0) continue;
        Box2 b = cell_box(cells[a]);
        double yy = y;
        if (periodic_y) {
          // the wrapped point may sit one period off from this cell's box
          if (yy < b.lo.y() - 0.5 * period) yy += period;
          if (yy > b.hi.y() + 0.5 * period) yy -= period;
        }
        if (p.x() >= b.lo.x() - tol && p.x() <= b.hi.x() + tol &&
            yy >= b.lo.y() - tol && yy <= b.hi.y() + tol)
          return a;
      }
  }
  return -1;
}

Vec2 PatchMesh::local_coords(int active_idx, const Vec2& p) const {
  Box2 b = cell_box(cells[active_idx]);
  double y = wrap_eta(p.y());
  if (periodic_y) {
    if (y < b.lo.y() - 0.5 * period) y += period;
    if (y > b.hi.y() + 0.5 * period) y -= period;
  }
  return Vec2((p.x() - b.lo.x()) / hx, (y - b.lo.y()) / hy);
}

namespace {

// Scanline acceleration: per grid row, sorted x-crossings of the boundary
// with the row's center line, plus a near-boundary cell mask.
struct GridClassifier {
  std::vector<std::vector<double>> row_crossings;
  std::vector<char> near_boundary;  // per grid cell

  GridClassifier(const PolyDomain& pd, const Vec2& origin, double hx, double hy,
                 int nx, int ny) {
    row_crossings.assign(ny, {});
    near_boundary.assign(static_cast<std::size_t>(nx) * ny, 0);
    for (const Polyline& loop : pd.loops) {
      const std::size_t n = loop.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = loop[i];
        const Vec2& b = loop[(i + 1) % n];
        // mark near-boundary cells covered by this edge's bbox
        double x0 = std::min(a.x(), b.x()), x1 = std::max(a.x(), b.x());
        double y0 = std::min(a.y(), b.y()), y1 = std::max(a.y(), b.y());
        int cx0 = std::max(0, static_cast<int>(std::floor((x0 - origin.x()) / hx - 1e-12)));
        int cx1 = std::min(nx - 1, static_cast<int>(std::floor((x1 - origin.x()) / hx + 1e-12)));
        int cy0 = std::max(0, static_cast<int>(std::floor((y0 - origin.y()) / hy - 1e-12)));
        int cy1 = std::min(ny - 1, static_cast<int>(std::floor((y1 - origin.y()) / hy + 1e-12)));
        for (int cy = cy0; cy <= cy1; ++cy)
          for (int cx = cx0; cx <= cx1; ++cx)
            near_boundary[static_cast<std::size_t>(cy) * nx + cx] = 1;
        // row-center crossings
        int r0 = std::max(0, static_cast<int>(std::floor((y0 - origin.y()) / hy - 0.5)));
        int r1 = std::min(ny - 1, static_cast<int>(std::floor((y1 - origin.y()) / hy + 0.5)));
        for (int r = r0; r <= r1; ++r) {
          double yc = origin.y() + (r + 0.5) * hy;
          if ((a.y() > yc) != (b.y() > yc)) {
            double x = a.x() + (yc - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
            row_crossings[r].push_back(x);
          }
        }
      }
    }
    for (auto& row : row_crossings) std::sort(row.begin(), row.end());
  }

  bool center_inside(int ix, int iy, const Vec2& origin, double hx) const {
    double xc = origin.x() + (ix + 0.5) * hx;
    const auto& row = row_crossings[iy];
    auto it = std::upper_bound(row.begin(), row.end(), xc);
    return ((row.end() - it) % 2) == 1;  // odd crossings to the right
  }
};

}  // namespace

PatchMesh build_mesh(const ParametricPatch& patch, double h, MeshMode mode,
                     const Vec2& offset_frac, double poly_resolution) {
  const ReferenceDomain& dom = patch.domain;
  Box2 box = dom.bounding_box();
  if (h <= 0) throw GeometryError("mesh parameter must be positive");
  if (h > dom.diameter())
    throw GeometryError("mesh parameter larger than domain diameter");

  PatchMesh m;
  m.patch_id = patch.id;
  m.mode = mode;
  m.periodic_y = dom.periodic_eta;

  if (dom.periodic_eta) {
    m.period = dom.eta_max - dom.eta_min;
    int ncells = std::max(3, static_cast<int>(std::llround(m.period / h)));
    m.hy = m.period / ncells;
    m.hx = m.hy;
    m.ny = ncells;
  } else {
    m.hx = m.hy = h;
  }
  m.h = m.hx;

  const double snap = 1e-9 * std::max(1.0, dom.diameter());
  if (mode == MeshMode::Matching || mode == MeshMode::NonMatching) {
    // grid must tile the bounding box and the boundary must lie on grid lines
    for (const auto& loop : dom.loops)
      for (const auto& seg : loop.segments) {
        if (!seg.straight)
          throw GeometryError("matching mode requires straight, axis-aligned boundary");
        Vec2 a = seg.curve.at(0.0), b = seg.curve.at(1.0);
        if (std::abs(a.x() - b.x()) > snap && std::abs(a.y() - b.y()) > snap)
          throw GeometryError("matching mode requires axis-aligned boundary");
      }
    double wx = box.width() / m.hx, wy = box.height() / m.hy;
    if (std::abs(wx - std::llround(wx)) > 1e-9 || std::abs(wy - std::llround(wy)) > 1e-9)
      throw GeometryError("mesh parameter does not tile the domain in matching mode");
    m.origin = box.lo;
    m.nx = static_cast<int>(std::llround(wx));
    m.ny = static_cast<int>(std::llround(wy));
  } else {
    double ox = offset_frac.x() * m.hx;
    double oy = dom.periodic_eta ? 0.0 : offset_frac.y() * m.hy;
    m.origin = Vec2(box.lo.x() - ox, dom.periodic_eta ? dom.eta_min : box.lo.y() - oy);
    m.nx = static_cast<int>(std::ceil((box.hi.x() - m.origin.x()) / m.hx - 1e-12));
    if (!dom.periodic_eta)
      m.ny = static_cast<int>(std::ceil((box.hi.y() - m.origin.y()) / m.hy - 1e-12));
    m.nx = std::max(m.nx, 1);
    m.ny = std::max(m.ny, 1);
  }

  double res = poly_resolution > 0
                   ? poly_resolution
                   : std::min(m.h / 4.0, m.h * m.h / 4.0);
  const PolyDomain& pd = dom.polygonize(res);
  m.domain_area = pd.area;

  GridClassifier cls(pd, m.origin, m.hx, m.hy, m.nx, m.ny);
  m.active_of_grid.assign(static_cast<std::size_t>(m.nx) * m.ny, -1);

  const double cell_area = m.hx * m.hy;
  for (int iy = 0; iy < m.ny; ++iy)
    for (int ix = 0; ix < m.nx; ++ix) {
      std::size_t gi = static_cast<std::size_t>(iy) * m.nx + ix;
      MeshCell cell;
      cell.ix = ix;
      cell.iy = iy;
      Box2 cb;
      cb.lo = m.origin + Vec2(ix * m.hx, iy * m.hy);
      cb.hi = cb.lo + Vec2(m.hx, m.hy);
      if (!cls.near_boundary[gi]) {
        if (!cls.center_inside(ix, iy, m.origin, m.hx)) continue;
        m.active_of_grid[gi] = static_cast<int>(m.cells.size());
        m.covered_area += cell_area;
        m.cells.push_back(std::move(cell));
        continue;
      }
      auto clip = clip_cell_signed(cb, pd);
      double area = 0.0;
      for (const auto& ct : clip) area += ct.sign * ct.tri.area();
      if (area <= kSliverFraction * cell_area) continue;  // sliver policy
      if (area >= cell_area * (1.0 - 1e-12)) {
        // boundary only touches the cell edge; treat as a full cell
        m.active_of_grid[gi] = static_cast<int>(m.cells.size());
        m.covered_area += cell_area;
        m.cells.push_back(std::move(cell));
        continue;
      }
      cell.cut = true;
      cell.clip = std::move(clip);
      m.active_of_grid[gi] = static_cast<int>(m.cells.size());
      m.covered_area += area;
      ++m.n_cut;
      m.cells.push_back(std::move(cell));
    }

  if (m.cells.empty()) throw GeometryError("mesh has no active cells");
  if (std::abs(m.covered_area - m.domain_area) >
      1e-8 * std::max(m.domain_area, 1e-30)) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "active cells do not cover the reference domain "
                  "(covered %.12g of %.12g, patch %d, h %.6g)",
                  m.covered_area, m.domain_area, m.patch_id, m.h);
    throw GeometryError(msg);
  }

  // stabilization face set: interior faces touching at least one cut cell
  auto add_face = [&](int a, int b, int axis, const Vec2& p0, const Vec2& p1,
                      bool wraps) {
    if (a < 0 || b < 0) return;
    if (!m.cells[a].cut && !m.cells[b].cut) return;
    m.stab_faces.push_back({a, b, axis, p0, p1, wraps});
  };
  for (int iy = 0; iy < m.ny; ++iy)
    for (int ix = 0; ix < m.nx; ++ix) {
      int a = m.active_of_grid[m.grid_index(ix, iy)];
      if (a < 0) continue;
      Box2 cb = m.cell_box(m.cells[a]);
      if (ix + 1 < m.nx) {
        int b = m.active_of_grid[m.grid_index(ix + 1, iy)];
        add_face(a, b, 0, Vec2(cb.hi.x(), cb.lo.y()), cb.hi, false);
      }
      if (iy + 1 < m.ny) {
        int b = m.active_of_grid[m.grid_index(ix, iy + 1)];
        add_face(a, b, 1, Vec2(cb.lo.x(), cb.hi.y()), cb.hi, false);
      } else if (m.periodic_y && m.ny > 1) {
        int b = m.active_of_grid[m.grid_index(ix, 0)];
        add_face(a, b, 1, Vec2(cb.lo.x(), cb.hi.y()), cb.hi, true);
      }
    }
  return m;
}

std::vector<PatchMesh> mesh_surface(const CompositeSurface& surface,
                                    const MeshConfig& config) {
  std::vector<PatchMesh> meshes;
  meshes.reserve(surface.patches.size());
  for (std::size_t i = 0; i < surface.patches.size(); ++i) {
    double h = config.h;
    MeshMode mode = config.mode;
    if (config.mode == MeshMode::NonMatching && !config.nonmatching_factors.empty())
      h *= config.nonmatching_factors[i % config.nonmatching_factors.size()];
    Vec2 off = (mode == MeshMode::Cut) ? config.offset_frac : Vec2(0, 0);
    meshes.push_back(build_mesh(surface.patches[i], h, mode, off,
                                config.poly_resolution));
  }
  return meshes;
}

}  // namespace csfem
