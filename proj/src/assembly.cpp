#include "csfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "csfem/interface_curve.hpp"

namespace csfem {

ProblemData::ProblemData() {
  f = [](int, const Vec3&) { return 0.0; };
  g_D = [](const Vec3&) { return 0.0; };
  g_N = [](int, const Vec3&) { return 0.0; };
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SpMat from_triplets(int n, Triplets& trips) {
  SpMat m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

int default_order(int requested, int fallback) {
  return requested > 0 ? requested : fallback;
}

// Orientation sign of the outward reference conormal relative to the
// rotated trace tangent; constant along a smooth boundary trace.
double trace_orientation(const ParametricPatch& patch, const Curve2& trace) {
  int votes = 0;
  for (double t : {0.21, 0.43, 0.57, 0.79, 0.5}) {
    try {
      Vec2 nu_ref = reference_conormal(patch, trace, t);
      Vec2 tau = trace.tangent(t).normalized();
      double s = nu_ref.dot(Vec2(tau.y(), -tau.x()));
      votes += (s > 0) ? 1 : -1;
    } catch (const GeometryError&) {
      // sample landed on a polygonization kink; skip
    }
  }
  if (votes == 0)
    throw GeometryError("cannot orient boundary trace");
  return votes > 0 ? 1.0 : -1.0;
}

}  // namespace

namespace {

// Crossings of a scalar function with grid lines o + k*h over [t0,t1] where
// the function is monotone; bisection per straddled line.
void monotone_crossings(const std::function<double(double)>& f, double t0,
                        double t1, double f0, double f1, double o, double hh,
                        std::vector<double>& out) {
  if (f0 == f1) return;
  int k_lo = static_cast<int>(std::ceil((std::min(f0, f1) - o) / hh - 1e-12));
  int k_hi = static_cast<int>(std::floor((std::max(f0, f1) - o) / hh + 1e-12));
  for (int k = k_lo; k <= k_hi; ++k) {
    double line = o + k * hh;
    double ta = t0, tb = t1, fa = f0 - line, fb = f1 - line;
    if (fa == 0.0) {
      out.push_back(ta);
      continue;
    }
    if (fb == 0.0) {
      out.push_back(tb);
      continue;
    }
    if (fa * fb > 0.0) continue;
    for (int it = 0; it < 60; ++it) {
      double tm = 0.5 * (ta + tb);
      double fm = f(tm) - line;
      if (fa * fm <= 0.0) {
        tb = tm;
        fb = fm;
      } else {
        ta = tm;
        fa = fm;
      }
    }
    out.push_back(0.5 * (ta + tb));
  }
}

}  // namespace

std::vector<double> trace_breakpoints(const PatchMesh& mesh,
                                      const Curve2& trace) {
  std::vector<double> breaks{0.0, 1.0};
  double len_est = 0.0;
  Vec2 prev = trace.at(0.0);
  const int coarse = 64;
  for (int i = 1; i <= coarse; ++i) {
    Vec2 p = trace.at(static_cast<double>(i) / coarse);
    len_est += (p - prev).norm();
    prev = p;
  }
  int n = std::max(256, static_cast<int>(std::ceil(8.0 * len_est / mesh.h)));
  std::vector<Vec2> samples(n + 1);
  for (int i = 0; i <= n; ++i)
    samples[i] = trace.at(static_cast<double>(i) / n);

  for (int axis = 0; axis < 2; ++axis) {
    double o = axis == 0 ? mesh.origin.x() : mesh.origin.y();
    double hh = axis == 0 ? mesh.hx : mesh.hy;
    auto f = [&](double t) {
      Vec2 p = trace.at(t);
      return axis == 0 ? p.x() : p.y();
    };
    // split the sample sequence into monotone runs; refine each interior
    // extremum by ternary search so tangential grid-line touches are caught
    std::vector<double> nodes{0.0};
    std::vector<double> fvals{axis == 0 ? samples[0].x() : samples[0].y()};
    auto coord = [&](int i) {
      return axis == 0 ? samples[i].x() : samples[i].y();
    };
    for (int i = 1; i < n; ++i) {
      double dl = coord(i) - coord(i - 1);
      double dr = coord(i + 1) - coord(i);
      if (dl == 0.0 || dr == 0.0 || (dl > 0) == (dr > 0)) continue;
      // extremum inside (t_{i-1}, t_{i+1})
      bool maximum = dl > 0;
      double a = static_cast<double>(i - 1) / n;
      double b = static_cast<double>(i + 1) / n;
      for (int it = 0; it < 80; ++it) {
        double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        bool keep_left = maximum ? f(m1) > f(m2) : f(m1) < f(m2);
        if (keep_left)
          b = m2;
        else
          a = m1;
      }
      double text = 0.5 * (a + b);
      nodes.push_back(text);
      fvals.push_back(f(text));
    }
    nodes.push_back(1.0);
    fvals.push_back(coord(n));
    // monotone pieces between consecutive nodes, subdivided by the original
    // samples for bracketing robustness
    for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
      double t0 = nodes[s], t1 = nodes[s + 1];
      if (t1 - t0 < 1e-14) continue;
      int sub = std::max(1, static_cast<int>(std::ceil((t1 - t0) * n)));
      double fp = f(t0);
      for (int i = 1; i <= sub; ++i) {
        double tb = t0 + (t1 - t0) * i / sub;
        double fb = f(tb);
        monotone_crossings(f, t0 + (t1 - t0) * (i - 1) / sub, tb, fp, fb, o,
                           hh, breaks);
        fp = fb;
      }
      breaks.push_back(t0);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) { return b - a < 1e-12; }),
               breaks.end());
  if (breaks.back() < 1.0 - 1e-12) breaks.push_back(1.0);
  return breaks;
}

namespace {

std::vector<CurveQP> curve_quadrature_impl(
    const BrokenSpace& space, const Curve3* master,
    const std::vector<std::pair<int, const Curve2*>>& member_traces,
    int order) {
  // merged break points from every member patch
  std::vector<double> breaks;
  for (const auto& [patch_id, trace] : member_traces) {
    auto b = trace_breakpoints(space.mesh_of(patch_id), *trace);
    breaks.insert(breaks.end(), b.begin(), b.end());
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) { return b - a < 1e-12; }),
               breaks.end());

  // per-trace conormal orientation and pushforward machinery
  struct MemberCtx {
    int patch_id;
    const Curve2* trace;
    const ParametricPatch* patch;
    const PatchMesh* mesh;
    double orient;
  };
  std::vector<MemberCtx> ctx;
  for (const auto& [patch_id, trace] : member_traces) {
    const ParametricPatch& patch = space.patch_of(patch_id);
    ctx.push_back({patch_id, trace, &patch, &space.mesh_of(patch_id),
                   trace_orientation(patch, *trace)});
  }

  // sub-split panels so no member traverses more than half a cell per
  // panel; keeps the per-panel integrand variation small on curved traces
  double h_min = 1e300;
  for (const MemberCtx& m : ctx) h_min = std::min(h_min, m.mesh->h);
  std::vector<double> panels;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    double t0 = breaks[s];
    double t1 = breaks[s + 1];
    panels.push_back(t0);
    if (t1 - t0 < 1e-12) continue;
    double len = 0.0;
    for (const MemberCtx& m : ctx) {
      double lm = 0.0;
      Vec2 prev = m.trace->at(t0);
      for (int i = 1; i <= 8; ++i) {
        Vec2 p = m.trace->at(t0 + (t1 - t0) * i / 8.0);
        lm += (p - prev).norm();
        prev = p;
      }
      len = std::max(len, lm);
    }
    int sub = std::max(1, static_cast<int>(std::ceil(len / (0.25 * h_min))));
    for (int i = 1; i < sub; ++i)
      panels.push_back(t0 + (t1 - t0) * i / sub);
  }
  panels.push_back(breaks.back());

  const QuadRule1D& rule = gauss_rule_1d(order);
  std::vector<CurveQP> out;
  for (std::size_t s = 0; s + 1 < panels.size(); ++s) {
    double t0 = panels[s];
    double t1 = panels[s + 1];
    if (t1 - t0 < 1e-12) continue;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      CurveQP qp;
      qp.t = t0 + rule.points[q] * (t1 - t0);
      double speed;
      if (master) {
        qp.x = master->at(qp.t);
        speed = master->tangent(qp.t).norm();
      } else {
        // single-member boundary curve; physical speed via the patch map
        const MemberCtx& m = ctx.front();
        Vec2 r = m.trace->at(qp.t);
        qp.x = m.patch->map(r);
        speed = (m.patch->jacobian(r) * m.trace->tangent(qp.t)).norm();
      }
      qp.weight = rule.weights[q] * (t1 - t0) * speed;

      for (std::size_t mi = 0; mi < ctx.size(); ++mi) {
        const MemberCtx& m = ctx[mi];
        TraceEval te;
        te.member = static_cast<int>(mi);
        te.patch_id = m.patch_id;
        te.ref = m.trace->at(qp.t);
        te.cell = m.mesh->locate(te.ref);
        if (te.cell < 0)
          throw GeometryError("interface quadrature point outside active mesh");
        te.unit = m.mesh->local_coords(te.cell, te.ref);
        Vec2 tau = m.trace->tangent(qp.t).normalized();
        Vec2 nu_ref = m.orient * Vec2(tau.y(), -tau.x());
        Mat32 J = m.patch->jacobian(te.ref);
        Mat2 G = J.transpose() * J;
        te.nu = (J * G.inverse() * nu_ref).normalized();
        te.mu = m.patch->mu(qp.x);
        te.h = m.mesh->h;
        qp.members.push_back(te);
      }
      out.push_back(std::move(qp));
    }
  }
  return out;
}

}  // namespace

std::vector<CurveQP> interface_quadrature(const BrokenSpace& space,
                                          const InterfaceCurve& iface,
                                          int order) {
  std::vector<std::pair<int, const Curve2*>> traces;
  for (const auto& tr : iface.traces) traces.emplace_back(tr.patch, &tr.curve);
  return curve_quadrature_impl(space, &iface.master, traces, order);
}

std::vector<CurveQP> boundary_quadrature(const BrokenSpace& space,
                                         const BoundaryCurve& bc, int order) {
  std::vector<std::pair<int, const Curve2*>> traces{{bc.patch, &bc.curve}};
  return curve_quadrature_impl(space, nullptr, traces, order);
}

// ---------------------------------------------------------------------------
// volume
// ---------------------------------------------------------------------------

namespace {

template <typename PointFn>
void for_each_volume_point(const BrokenSpace& space, int order,
                           const PointFn& fn) {
  // fn(patch_space_index, cell_index, ref_point, weight_including_measure)
  for (std::size_t pi = 0; pi < space.patch_spaces().size(); ++pi) {
    const PatchSpace& ps = space.patch_spaces()[pi];
    const PatchMesh& mesh = space.mesh_of(ps.patch_id);
    const QuadRule& cell_rule = cell_quadrature(order);
    for (std::size_t ci = 0; ci < mesh.cells.size(); ++ci) {
      const MeshCell& cell = mesh.cells[ci];
      Box2 box = mesh.cell_box(cell);
      if (!cell.cut) {
        for (std::size_t q = 0; q < cell_rule.points.size(); ++q) {
          Vec2 ref = box.lo + Vec2(cell_rule.points[q].x() * mesh.hx,
                                   cell_rule.points[q].y() * mesh.hy);
          fn(pi, ci, ref, cell_rule.weights[q] * mesh.hx * mesh.hy);
        }
      } else {
        for (const ClipTri& ct : cell.clip) {
          QuadRule tri_rule = triangle_quadrature(ct.tri, order);
          for (std::size_t q = 0; q < tri_rule.points.size(); ++q)
            fn(pi, ci, tri_rule.points[q], ct.sign * tri_rule.weights[q]);
        }
      }
    }
  }
}

}  // namespace

SpMat assemble_volume(const BrokenSpace& space, const ProblemData& problem) {
  const int p = space.degree();
  const int order = default_order(problem.volume_order, 2 * p + 4);
  Triplets trips;
  for_each_volume_point(space, order, [&](std::size_t pi, int ci,
                                          const Vec2& ref, double w) {
    const PatchSpace& ps = space.patch_spaces()[pi];
    const PatchMesh& mesh = space.mesh_of(ps.patch_id);
    const ParametricPatch& patch = space.patch_of(ps.patch_id);
    Vec2 unit = mesh.local_coords(ci, ref);
    BasisEval basis = eval_basis(p, unit);
    Mat32 J = patch.jacobian(ref);
    Mat2 G = J.transpose() * J;
    double det = G.determinant();
    if (det <= ParametricPatch::kDetTol)
      throw GeometryError("degenerate metric in volume assembly");
    Mat2 Ginv = G.inverse();
    double mu = patch.mu(patch.map(ref));
    double scale = w * mu * std::sqrt(det);
    const auto& dofs = ps.cell_dofs[ci];
    std::vector<Vec2> g(dofs.size());
    for (std::size_t l = 0; l < dofs.size(); ++l)
      g[l] = Vec2(basis.grad[l].x() / mesh.hx, basis.grad[l].y() / mesh.hy);
    for (std::size_t i = 0; i < dofs.size(); ++i)
      for (std::size_t j = 0; j < dofs.size(); ++j) {
        double v = scale * g[i].dot(Ginv * g[j]);
        if (v != 0.0)
          trips.emplace_back(ps.global_offset + dofs[i],
                             ps.global_offset + dofs[j], v);
      }
  });
  return from_triplets(space.n_dofs(), trips);
}

// ---------------------------------------------------------------------------
// interface terms
// ---------------------------------------------------------------------------

namespace {

// Per-member basis data at one interface quadrature point.
struct MemberBasis {
  const PatchSpace* ps;
  std::vector<int> dofs;          // global
  std::vector<double> value;
  std::vector<double> flux;       // nu . mu grad_Omega(phi)
};

MemberBasis member_basis(const BrokenSpace& space, const TraceEval& te) {
  MemberBasis mb;
  mb.ps = &space.space_of(te.patch_id);
  const PatchMesh& mesh = space.mesh_of(te.patch_id);
  const ParametricPatch& patch = space.patch_of(te.patch_id);
  BasisEval basis = eval_basis(space.degree(), te.unit);
  const auto& cd = mb.ps->cell_dofs[te.cell];
  mb.dofs.resize(cd.size());
  mb.value.resize(cd.size());
  mb.flux.resize(cd.size());
  Mat32 J = patch.jacobian(te.ref);
  Mat2 Ginv = (J.transpose() * J).inverse();
  for (std::size_t l = 0; l < cd.size(); ++l) {
    mb.dofs[l] = mb.ps->global_offset + cd[l];
    mb.value[l] = basis.value[l];
    Vec2 gr(basis.grad[l].x() / mesh.hx, basis.grad[l].y() / mesh.hy);
    mb.flux[l] = te.mu * te.nu.dot(J * (Ginv * gr));
  }
  return mb;
}

// Union-of-members local dof map with per-member rows for value, flux and
// jump (v_k - <v>).
struct InterfaceLocal {
  std::vector<int> dofs;  // global
  std::vector<std::vector<double>> value, flux, jump;
  double h_pen = 0.0;
  std::vector<double> mu;
};

InterfaceLocal interface_local(const BrokenSpace& space, const CurveQP& qp,
                               const std::vector<double>& weights) {
  InterfaceLocal loc;
  std::vector<MemberBasis> mbs;
  mbs.reserve(qp.members.size());
  std::map<int, int> index;
  for (const TraceEval& te : qp.members) {
    mbs.push_back(member_basis(space, te));
    loc.h_pen = std::max(loc.h_pen, te.h);
    loc.mu.push_back(te.mu);
    for (int d : mbs.back().dofs)
      index.emplace(d, -1);
  }
  int next = 0;
  for (auto& kv : index) kv.second = next++;
  loc.dofs.resize(next);
  for (const auto& kv : index) loc.dofs[kv.second] = kv.first;

  const std::size_t M = mbs.size();
  loc.value.assign(M, std::vector<double>(next, 0.0));
  loc.flux.assign(M, std::vector<double>(next, 0.0));
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t l = 0; l < mbs[m].dofs.size(); ++l) {
      int u = index.at(mbs[m].dofs[l]);
      loc.value[m][u] += mbs[m].value[l];
      loc.flux[m][u] += mbs[m].flux[l];
    }
  loc.jump.assign(M, std::vector<double>(next, 0.0));
  for (std::size_t m = 0; m < M; ++m)
    for (int u = 0; u < next; ++u) {
      double avg = 0.0;
      for (std::size_t mm = 0; mm < M; ++mm)
        avg += weights[mm] * loc.value[mm][u];
      loc.jump[m][u] = loc.value[m][u] - avg;
    }
  return loc;
}

}  // namespace

std::pair<SpMat, SpMat> assemble_interface(const BrokenSpace& space,
                                           const ProblemData& problem) {
  const int p = space.degree();
  const int order = default_order(problem.interface_order, 2 * p + 4);
  Triplets cons_trips, pen_trips;
  for (const InterfaceCurve& iface : space.surface().interfaces) {
    auto qps = interface_quadrature(space, iface, order);
    for (const CurveQP& qp : qps) {
      InterfaceLocal loc = interface_local(space, qp, iface.weights);
      const std::size_t n = loc.dofs.size();
      const std::size_t M = qp.members.size();
      Eigen::MatrixXd cons = Eigen::MatrixXd::Zero(n, n);
      Eigen::MatrixXd pen = Eigen::MatrixXd::Zero(n, n);
      for (std::size_t m = 0; m < M; ++m) {
        double pen_coef = qp.weight * problem.beta * loc.mu[m] / loc.h_pen;
        for (std::size_t i = 0; i < n; ++i) {
          double fi = loc.flux[m][i];
          double ji = loc.jump[m][i];
          for (std::size_t j = 0; j < n; ++j) {
            cons(i, j) -= qp.weight * (fi * loc.jump[m][j] + ji * loc.flux[m][j]);
            pen(i, j) += pen_coef * ji * loc.jump[m][j];
          }
        }
      }
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (cons(i, j) != 0.0)
            cons_trips.emplace_back(loc.dofs[i], loc.dofs[j], cons(i, j));
          if (pen(i, j) != 0.0)
            pen_trips.emplace_back(loc.dofs[i], loc.dofs[j], pen(i, j));
        }
    }
  }
  return {from_triplets(space.n_dofs(), cons_trips),
          from_triplets(space.n_dofs(), pen_trips)};
}

std::pair<SpMat, VectorX> assemble_dirichlet(const BrokenSpace& space,
                                             const ProblemData& problem) {
  const int p = space.degree();
  const int order = default_order(problem.interface_order, 2 * p + 4);
  Triplets trips;
  VectorX vec = VectorX::Zero(space.n_dofs());
  for (const BoundaryCurve& bc : space.surface().dirichlet) {
    auto qps = boundary_quadrature(space, bc, order);
    for (const CurveQP& qp : qps) {
      MemberBasis mb = member_basis(space, qp.members.front());
      const TraceEval& te = qp.members.front();
      double pen = problem.beta * te.mu / te.h;
      double gd = problem.g_D(qp.x);
      const std::size_t n = mb.dofs.size();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          double v = qp.weight * (-mb.flux[i] * mb.value[j] -
                                  mb.value[i] * mb.flux[j] +
                                  pen * mb.value[i] * mb.value[j]);
          if (v != 0.0) trips.emplace_back(mb.dofs[i], mb.dofs[j], v);
        }
        vec[mb.dofs[i]] += qp.weight * gd * (pen * mb.value[i] - mb.flux[i]);
      }
    }
  }
  return {from_triplets(space.n_dofs(), trips), vec};
}

VectorX assemble_load(const BrokenSpace& space, const ProblemData& problem) {
  const int p = space.degree();
  const int order = default_order(problem.volume_order, 2 * p + 4);
  VectorX vec = VectorX::Zero(space.n_dofs());
  for_each_volume_point(space, order, [&](std::size_t pi, int ci,
                                          const Vec2& ref, double w) {
    const PatchSpace& ps = space.patch_spaces()[pi];
    const PatchMesh& mesh = space.mesh_of(ps.patch_id);
    const ParametricPatch& patch = space.patch_of(ps.patch_id);
    Vec3 x = patch.map(ref);
    double fv = problem.f(ps.patch_id, x);
    if (fv == 0.0) return;
    double scale = w * fv * patch.measure(ref);
    BasisEval basis = eval_basis(p, mesh.local_coords(ci, ref));
    const auto& dofs = ps.cell_dofs[ci];
    for (std::size_t l = 0; l < dofs.size(); ++l)
      vec[ps.global_offset + dofs[l]] += scale * basis.value[l];
  });

  const int border = default_order(problem.interface_order, 2 * p + 4);
  for (const BoundaryCurve& bc : space.surface().neumann) {
    auto qps = boundary_quadrature(space, bc, border);
    for (const CurveQP& qp : qps) {
      MemberBasis mb = member_basis(space, qp.members.front());
      double gn = problem.g_N(bc.patch, qp.x);
      for (std::size_t i = 0; i < mb.dofs.size(); ++i)
        vec[mb.dofs[i]] += qp.weight * gn * mb.value[i];
    }
  }

  vec += assemble_dirichlet(space, problem).second;
  return vec;
}

// ---------------------------------------------------------------------------
// stabilization
// ---------------------------------------------------------------------------

namespace {

struct FacePair {
  const PatchSpace* ps;
  const PatchMesh* mesh;
  std::vector<int> dofs;            // union, patch-local
  std::vector<int> map_a, map_b;    // cell-local -> union
};

FacePair face_union(const BrokenSpace& space, const PatchSpace& ps,
                    const PatchMesh& mesh, const MeshFace& face) {
  FacePair fp;
  fp.ps = &ps;
  fp.mesh = &mesh;
  const auto& da = ps.cell_dofs[face.cell_a];
  const auto& db = ps.cell_dofs[face.cell_b];
  std::map<int, int> index;
  for (int d : da) index.emplace(d, -1);
  for (int d : db) index.emplace(d, -1);
  int next = 0;
  for (auto& kv : index) kv.second = next++;
  fp.dofs.resize(next);
  for (const auto& kv : index) fp.dofs[kv.second] = kv.first;
  fp.map_a.resize(da.size());
  fp.map_b.resize(db.size());
  for (std::size_t l = 0; l < da.size(); ++l) fp.map_a[l] = index.at(da[l]);
  for (std::size_t l = 0; l < db.size(); ++l) fp.map_b[l] = index.at(db[l]);
  (void)space;
  return fp;
}

}  // namespace

SpMat assemble_stab_jump(const BrokenSpace& space,
                         const std::vector<double>& gamma, int face_order) {
  const int p = space.degree();
  const int order = default_order(face_order, 2 * p);
  const QuadRule1D& rule = gauss_rule_1d(order);
  Triplets trips;
  for (const PatchSpace& ps : space.patch_spaces()) {
    const PatchMesh& mesh = space.mesh_of(ps.patch_id);
    const ParametricPatch& patch = space.patch_of(ps.patch_id);
    for (const MeshFace& face : mesh.stab_faces) {
      FacePair fp = face_union(space, ps, mesh, face);
      const std::size_t n = fp.dofs.size();
      Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
      double face_len = (face.p1 - face.p0).norm();
      Vec2 tau = (face.p1 - face.p0) / face_len;
      double hn = face.axis == 0 ? mesh.hx : mesh.hy;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        Vec2 pt = face.p0 + rule.points[q] * (face.p1 - face.p0);
        // physical arc measure and mu keep the penalty commensurate with
        // the mu-weighted Nitsche flux terms on any metric
        double arc = (patch.jacobian(pt) * tau).norm();
        double w = rule.weights[q] * face_len * arc * patch.mu(patch.map(pt));
        Vec2 unit_a = mesh.local_coords(face.cell_a, pt);
        Vec2 unit_b = mesh.local_coords(face.cell_b, pt);
        BasisEval ba = eval_basis(p, unit_a);
        BasisEval bb = eval_basis(p, unit_b);
        for (int k = 1; k <= p; ++k) {
          double gk = gamma.empty()
                          ? 0.0
                          : gamma[std::min<std::size_t>(k - 1, gamma.size() - 1)];
          if (gk == 0.0) continue;
          double coef = w * gk * std::pow(mesh.h, 2 * k - 1);
          std::vector<double> jump(n, 0.0);
          for (std::size_t l = 0; l < ba.value.size(); ++l) {
            double da = (k == 1)
                            ? (face.axis == 0 ? ba.grad[l].x() : ba.grad[l].y()) / hn
                            : (face.axis == 0 ? ba.deriv2[l].x() : ba.deriv2[l].y()) / (hn * hn);
            double db = (k == 1)
                            ? (face.axis == 0 ? bb.grad[l].x() : bb.grad[l].y()) / hn
                            : (face.axis == 0 ? bb.deriv2[l].x() : bb.deriv2[l].y()) / (hn * hn);
            jump[fp.map_a[l]] -= da;
            jump[fp.map_b[l]] += db;
          }
          for (std::size_t i = 0; i < n; ++i) {
            if (jump[i] == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j)
              local(i, j) += coef * jump[i] * jump[j];
          }
        }
      }
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (local(i, j) != 0.0)
            trips.emplace_back(ps.global_offset + fp.dofs[i],
                               ps.global_offset + fp.dofs[j], local(i, j));
    }
  }
  return from_triplets(space.n_dofs(), trips);
}

SpMat assemble_stab_gradvar(const BrokenSpace& space, int face_order) {
  const int p = space.degree();
  const int order = default_order(face_order, 2 * p + 2);
  const QuadRule& rule = cell_quadrature(order);
  Triplets trips;
  const int n1 = (p + 1) * (p + 1);
  const int nm = n1 - 1;  // monomials minus the constant
  for (const PatchSpace& ps : space.patch_spaces()) {
    const PatchMesh& mesh = space.mesh_of(ps.patch_id);
    const ParametricPatch& patch = space.patch_of(ps.patch_id);
    for (const MeshFace& face : mesh.stab_faces) {
      FacePair fp = face_union(space, ps, mesh, face);
      const std::size_t n = fp.dofs.size();
      Vec2 center = 0.5 * (face.p0 + face.p1);
      double scale = mesh.h;

      Eigen::MatrixXd Kvv = Eigen::MatrixXd::Zero(n, n);
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nm, n);
      Eigen::MatrixXd Gq = Eigen::MatrixXd::Zero(nm, nm);

      for (int side = 0; side < 2; ++side) {
        int ci = side == 0 ? face.cell_a : face.cell_b;
        const auto& lmap = side == 0 ? fp.map_a : fp.map_b;
        Box2 box = mesh.cell_box(mesh.cells[ci]);
        double y_shift = 0.0;
        if (face.wraps && side == 1) y_shift = mesh.period;  // unwrapped coords
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
          Vec2 unit = rule.points[q];
          Vec2 ref_cell(box.lo.x() + unit.x() * mesh.hx,
                        box.lo.y() + unit.y() * mesh.hy);
          // weighted local projection: mu and the surface measure keep the
          // penalty commensurate with the physical Nitsche terms
          double w = rule.weights[q] * mesh.hx * mesh.hy *
                     patch.mu(patch.map(ref_cell)) * patch.measure(ref_cell);
          Vec2 ref(ref_cell.x(), ref_cell.y() + y_shift);
          Vec2 sc = (ref - center) / scale;
          BasisEval basis = eval_basis(p, unit);
          std::vector<Vec2> gphi(basis.value.size());
          for (std::size_t l = 0; l < gphi.size(); ++l)
            gphi[l] = Vec2(basis.grad[l].x() / mesh.hx,
                           basis.grad[l].y() / mesh.hy);
          // monomials x^a y^b, constant skipped; index m = b*(p+1)+a - 1
          std::vector<Vec2> gq(nm);
          int m = 0;
          for (int b = 0; b <= p; ++b)
            for (int a = 0; a <= p; ++a) {
              if (a == 0 && b == 0) continue;
              double xa = std::pow(sc.x(), a);
              double yb = std::pow(sc.y(), b);
              double dxa = a > 0 ? a * std::pow(sc.x(), a - 1) : 0.0;
              double dyb = b > 0 ? b * std::pow(sc.y(), b - 1) : 0.0;
              gq[m++] = Vec2(dxa * yb, xa * dyb) / scale;
            }
          for (std::size_t i = 0; i < gphi.size(); ++i)
            for (std::size_t j = 0; j < gphi.size(); ++j)
              Kvv(lmap[i], lmap[j]) += w * gphi[i].dot(gphi[j]);
          for (int a = 0; a < nm; ++a) {
            for (int b = 0; b < nm; ++b) Gq(a, b) += w * gq[a].dot(gq[b]);
            for (std::size_t i = 0; i < gphi.size(); ++i)
              B(a, lmap[i]) += w * gq[a].dot(gphi[i]);
          }
        }
      }

      Eigen::LDLT<Eigen::MatrixXd> ldlt(Gq);
      if (ldlt.info() != Eigen::Success) {
        std::fprintf(stderr,
                     "csfem: singular local projection on patch %d face; skipped\n",
                     ps.patch_id);
        continue;
      }
      Eigen::MatrixXd local = Kvv - B.transpose() * ldlt.solve(B);
      local = 0.5 * (local + local.transpose()).eval();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (local(i, j) != 0.0)
            trips.emplace_back(ps.global_offset + fp.dofs[i],
                               ps.global_offset + fp.dofs[j], local(i, j));
    }
  }
  return from_triplets(space.n_dofs(), trips);
}

// ---------------------------------------------------------------------------
// system composition, action, DG comparison
// ---------------------------------------------------------------------------

AssembledSystem assemble_system(const BrokenSpace& space,
                                const ProblemData& problem) {
  if (problem.beta <= 0.0)
    throw std::invalid_argument("Nitsche penalty beta must be positive");
  for (double g : problem.gamma)
    if (g < 0.0)
      throw std::invalid_argument("stabilization parameters must be nonnegative");
  AssembledSystem sys;
  sys.n = space.n_dofs();
  sys.beta = problem.beta;
  sys.gamma = problem.gamma;
  sys.stabilizer = problem.stabilizer;
  sys.volume = assemble_volume(space, problem);
  auto [cons, pen] = assemble_interface(space, problem);
  sys.interface_consistency = std::move(cons);
  sys.interface_penalty = std::move(pen);
  auto [dmat, dvec] = assemble_dirichlet(space, problem);
  sys.dirichlet = std::move(dmat);
  switch (problem.stabilizer) {
    case StabilizerKind::None:
      sys.stabilization = SpMat(sys.n, sys.n);
      break;
    case StabilizerKind::Jump:
      sys.stabilization = assemble_stab_jump(space, problem.gamma,
                                             problem.face_order);
      break;
    case StabilizerKind::GradVar:
      // scaled by 2*gamma_1: on the worst one-face kink mode the
      // gradient-variation form is exactly half as strong as the jump form,
      // so this calibration gives both stabilizers the same coercivity
      // margin at a given gamma
      sys.stabilization =
          2.0 * (problem.gamma.empty() ? 1.0 : problem.gamma[0]) *
          assemble_stab_gradvar(space, problem.face_order);
      break;
  }
  sys.A = sys.volume + sys.interface_consistency + sys.interface_penalty +
          sys.dirichlet + sys.stabilization;
  sys.A.makeCompressed();
  sys.b = assemble_load(space, problem);
  (void)dvec;  // already included via assemble_load
  return sys;
}

VectorX assemble_action(const BrokenSpace& space, const ProblemData& problem,
                        const ExactSolution& exact) {
  const int p = space.degree();
  VectorX act = VectorX::Zero(space.n_dofs());

  const int order = default_order(problem.volume_order, 2 * p + 4);
  for_each_volume_point(space, order, [&](std::size_t pi, int ci,
                                          const Vec2& ref, double w) {
    const PatchSpace& ps = space.patch_spaces()[pi];
    const PatchMesh& mesh = space.mesh_of(ps.patch_id);
    const ParametricPatch& patch = space.patch_of(ps.patch_id);
    Vec3 x = patch.map(ref);
    Vec3 gu = exact.grad(x);
    Mat32 J = patch.jacobian(ref);
    Mat2 G = J.transpose() * J;
    Mat2 Ginv = G.inverse();
    double mu = patch.mu(x);
    double scale = w * mu * std::sqrt(G.determinant());
    BasisEval basis = eval_basis(p, mesh.local_coords(ci, ref));
    const auto& dofs = ps.cell_dofs[ci];
    for (std::size_t l = 0; l < dofs.size(); ++l) {
      Vec2 gr(basis.grad[l].x() / mesh.hx, basis.grad[l].y() / mesh.hy);
      act[ps.global_offset + dofs[l]] += scale * gu.dot(J * (Ginv * gr));
    }
  });

  const int border = default_order(problem.interface_order, 2 * p + 4);
  for (const InterfaceCurve& iface : space.surface().interfaces) {
    auto qps = interface_quadrature(space, iface, border);
    for (const CurveQP& qp : qps) {
      InterfaceLocal loc = interface_local(space, qp, iface.weights);
      // traces of the ambient exact field agree across members
      double uval = exact.value(qp.x);
      double avg = 0.0;
      for (std::size_t m = 0; m < qp.members.size(); ++m)
        avg += iface.weights[m] * uval;
      for (std::size_t m = 0; m < qp.members.size(); ++m) {
        const TraceEval& te = qp.members[m];
        double flux_u = te.mu * te.nu.dot(exact.grad(qp.x));
        double jump_u = uval - avg;  // zero up to rounding
        double pen_coef = qp.weight * problem.beta * te.mu / loc.h_pen;
        for (std::size_t i = 0; i < loc.dofs.size(); ++i) {
          act[loc.dofs[i]] -= qp.weight * (flux_u * loc.jump[m][i] +
                                           jump_u * loc.flux[m][i]);
          act[loc.dofs[i]] += pen_coef * jump_u * loc.jump[m][i];
        }
      }
    }
  }

  for (const BoundaryCurve& bc : space.surface().dirichlet) {
    auto qps = boundary_quadrature(space, bc, border);
    for (const CurveQP& qp : qps) {
      MemberBasis mb = member_basis(space, qp.members.front());
      const TraceEval& te = qp.members.front();
      double pen = problem.beta * te.mu / te.h;
      double uval = exact.value(qp.x);
      double flux_u = te.mu * te.nu.dot(exact.grad(qp.x));
      for (std::size_t i = 0; i < mb.dofs.size(); ++i)
        act[mb.dofs[i]] += qp.weight * (-flux_u * mb.value[i] -
                                        uval * mb.flux[i] +
                                        pen * uval * mb.value[i]);
    }
  }
  return act;
}

DgEquivalenceReport flat_dg_equivalence(const BrokenSpace& space,
                                        const ProblemData& problem) {
  if (space.surface().interfaces.size() != 1 ||
      space.surface().interfaces.front().member_count() != 2)
    throw GeometryError("DG comparison needs exactly one two-member interface");
  const InterfaceCurve& iface = space.surface().interfaces.front();
  const int p = space.degree();
  const int order = default_order(problem.interface_order, 2 * p + 4);

  auto qps = interface_quadrature(space, iface, order);
  // coplanarity and constant-mu preconditions
  for (std::size_t s = 0; s < qps.size(); s += std::max<std::size_t>(1, qps.size() / 7)) {
    const CurveQP& qp = qps[s];
    if ((qp.members[0].nu + qp.members[1].nu).norm() > 1e-9)
      throw GeometryError("DG comparison requires coplanar patches (nu2 = -nu1)");
    if (std::abs(qp.members[0].mu - qp.members[1].mu) > 1e-13)
      throw GeometryError("DG comparison requires constant mu");
  }

  const double a1 = iface.weights[0];
  const double a2 = iface.weights[1];
  Triplets cons_trips, pen_trips;
  for (const CurveQP& qp : qps) {
    InterfaceLocal loc = interface_local(space, qp, iface.weights);
    const std::size_t n = loc.dofs.size();
    const double mu = qp.members[0].mu;
    double pen_coef =
        qp.weight * problem.beta * mu / loc.h_pen * (a1 * a1 + a2 * a2);
    for (std::size_t i = 0; i < n; ++i) {
      double jr_i = loc.value[0][i] - loc.value[1][i];           // [v]
      double af_i = a2 * loc.flux[0][i] - a1 * loc.flux[1][i];   // {nu.sigma}
      for (std::size_t j = 0; j < n; ++j) {
        double jr_j = loc.value[0][j] - loc.value[1][j];
        double af_j = a2 * loc.flux[0][j] - a1 * loc.flux[1][j];
        double c = -qp.weight * (af_i * jr_j + jr_i * af_j);
        double pe = pen_coef * jr_i * jr_j;
        if (c != 0.0) cons_trips.emplace_back(loc.dofs[i], loc.dofs[j], c);
        if (pe != 0.0) pen_trips.emplace_back(loc.dofs[i], loc.dofs[j], pe);
      }
    }
  }
  SpMat cons_dg = from_triplets(space.n_dofs(), cons_trips);
  SpMat pen_dg = from_triplets(space.n_dofs(), pen_trips);

  auto [cons, pen] = assemble_interface(space, problem);
  auto max_abs = [](const SpMat& m) {
    double v = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it)
        v = std::max(v, std::abs(it.value()));
    return v;
  };
  DgEquivalenceReport rep;
  SpMat dc = cons - cons_dg;
  SpMat dp = pen - pen_dg;
  rep.consistency_diff = max_abs(dc) / std::max(max_abs(cons), 1e-300);
  rep.penalty_diff = max_abs(dp) / std::max(max_abs(pen), 1e-300);
  return rep;
}

}  // namespace csfem
