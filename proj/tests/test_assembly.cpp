#include <cmath>
#include <random>

#include "csfem/builders.hpp"
#include "csfem/manufactured.hpp"
#include "csfem/solve.hpp"
#include "csfem/study.hpp"
#include "doctest.h"

using namespace csfem;

namespace {

double max_abs(const SpMat& m) {
  double v = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      v = std::max(v, std::abs(it.value()));
  return v;
}

// two-cell strip with the left cell flagged cut, for face-term hand checks
struct TwoCellFixture {
  CompositeSurface surface;
  std::vector<PatchMesh> meshes;

  explicit TwoCellFixture(double h, double len) {
    surface.name = "two_cell";
    surface.patches.push_back(flat_patch(0, Vec2(0, 0), Vec2(2 * h, len),
                                         Vec3(0, 0, 0), Vec3(1, 0, 0),
                                         Vec3(0, 1, 0)));
    surface.dirichlet.push_back(
        {0, line_segment(Vec2(0, len), Vec2(0, 0))});
    PatchMesh m = build_mesh(surface.patches[0], h, MeshMode::Matching);
    REQUIRE(m.cells.size() == 2 * static_cast<std::size_t>(std::llround(len / h)));
    // flag the left column cut so its faces enter the stabilization set
    for (MeshCell& c : m.cells)
      if (c.ix == 0) c.cut = true;
    m.stab_faces.clear();
    for (int iy = 0; iy < m.ny; ++iy) {
      int a = m.active_of_grid[m.grid_index(0, iy)];
      int b = m.active_of_grid[m.grid_index(1, iy)];
      Box2 cb = m.cell_box(m.cells[a]);
      m.stab_faces.push_back(
          {a, b, 0, Vec2(cb.hi.x(), cb.lo.y()), cb.hi, false});
    }
    meshes.push_back(std::move(m));
  }
};

}  // namespace

TEST_CASE("volume form: constants, flat linear field, cylinder field") {
  // constant annihilation and unit energy on the unit square
  CompositeSurface s = flat_square_surface();
  std::vector<PatchMesh> meshes = {
      build_mesh(s.patches[0], 0.5, MeshMode::Matching)};
  BrokenSpace space(s, meshes, 1);
  ProblemData pd;
  SpMat K = assemble_volume(space, pd);

  VectorX ones = interpolate(space, [](const Vec3&) { return 1.0; });
  CHECK((K * ones).lpNorm<Eigen::Infinity>() < 1e-12);

  VectorX xi = interpolate(space, [](const Vec3& x) { return x[0]; });
  CHECK(xi.dot(K * xi) == doctest::Approx(1.0).epsilon(1e-12));

  // open cylindrical strip theta in [0,2pi], z in [0,pi]: energy of v = theta
  // equals Theta * L / R
  const double R = 1.5, L = M_PI;
  CompositeSurface cs;
  cs.name = "strip";
  cs.patches.push_back(cylinder_strip_patch(0, R, 0, 2 * M_PI, 0, L));
  cs.dirichlet.push_back({0, line_segment(Vec2(0, 0), Vec2(0, L))});
  std::vector<PatchMesh> cmesh = {
      build_mesh(cs.patches[0], 2 * M_PI / 16, MeshMode::Matching)};
  BrokenSpace cspace(cs, cmesh, 2);
  SpMat Kc = assemble_volume(cspace, pd);
  VectorX theta = VectorX::Zero(cspace.n_dofs());
  const PatchSpace& ps = cspace.space_of(0);
  for (int i = 0; i < ps.n_dofs; ++i) theta[i] = ps.dof_ref[i].x();
  CHECK(theta.dot(Kc * theta) ==
        doctest::Approx(2 * M_PI * L / R).epsilon(1e-10));
}

TEST_CASE("interface matrices annihilate continuous functions") {
  // With matching meshes and shared nodal values the jump v_k - <v> vanishes
  // identically: the penalty kills v elementwise, and every form term that
  // carries a jump factor of v or w vanishes, so the consistency form is
  // zero on continuous pairs.
  for (Vec2 alpha : {Vec2(0.5, 0.5), Vec2(0.3, 0.7)}) {
    CompositeSurface s = flat_two_patch_surface(0.5, alpha);
    MeshConfig cfg;
    cfg.h = 0.25;
    cfg.mode = MeshMode::Matching;
    auto meshes = mesh_surface(s, cfg);
    BrokenSpace space(s, meshes, 2);
    ProblemData pd;
    auto [cons, pen] = assemble_interface(space, pd);
    VectorX v = interpolate(space, [](const Vec3& x) {
      return std::sin(x[0] + 0.5 * x[1]) + x[0] * x[1];
    });
    double scale = std::max(max_abs(cons), max_abs(pen));
    CHECK((pen * v).lpNorm<Eigen::Infinity>() < 1e-11 * scale);
    for (auto w_fn : {+[](const Vec3& x) { return std::cos(2 * x[0]) * x[1]; },
                      +[](const Vec3& x) { return x[0] - 3 * x[1] * x[1]; },
                      +[](const Vec3&) { return 1.0; }}) {
      VectorX w = interpolate(space, w_fn);
      CHECK(std::abs(w.dot(cons * v)) <
            1e-11 * scale * v.norm() * w.norm());
      CHECK(std::abs(w.dot(pen * v)) < 1e-11 * scale * v.norm() * w.norm());
    }
  }
}

TEST_CASE("coplanar penalty form reduces to the weighted jump form") {
  const double beta = 100.0, h = 0.25;
  for (Vec2 alpha : {Vec2(0.5, 0.5), Vec2(0.3, 0.7), Vec2(1.0, 0.0)}) {
    CompositeSurface s = flat_two_patch_surface(0.5, alpha);
    MeshConfig cfg;
    cfg.h = h;
    cfg.mode = MeshMode::Matching;
    auto meshes = mesh_surface(s, cfg);
    BrokenSpace space(s, meshes, 1);
    ProblemData pd;
    pd.beta = beta;
    auto [cons, pen] = assemble_interface(space, pd);
    // v = indicator of patch 0: [v] = 1 along the interface
    VectorX v = VectorX::Zero(space.n_dofs());
    const PatchSpace& p0 = space.space_of(0);
    for (int i = 0; i < p0.n_dofs; ++i) v[p0.global_offset + i] = 1.0;
    double expect =
        beta / h * (alpha.x() * alpha.x() + alpha.y() * alpha.y()) * 1.0;
    CHECK(v.dot(pen * v) == doctest::Approx(expect).epsilon(1e-11));
  }
}

TEST_CASE("DG equivalence on matching and non-matching meshes") {
  for (const char* mode : {"matching", "nonmatching"}) {
    for (Vec2 alpha : {Vec2(0.5, 0.5), Vec2(1.0, 0.0), Vec2(0.3, 0.7)}) {
      CompositeSurface s = flat_two_patch_surface(0.5, alpha);
      MeshConfig cfg;
      cfg.h = 0.25;
      cfg.mode = parse_mesh_mode(mode);
      auto meshes = mesh_surface(s, cfg);
      BrokenSpace space(s, meshes, 2);
      ProblemData pd;
      DgEquivalenceReport rep = flat_dg_equivalence(space, pd);
      CHECK(rep.consistency_diff < 1e-11);
      CHECK(rep.penalty_diff < 1e-11);
    }
  }
}

TEST_CASE("DG comparison rejects non-coplanar patches") {
  CompositeSurface s = build_flat_junction(2, {0.0, M_PI / 2});
  MeshConfig cfg;
  cfg.h = 0.25;
  cfg.mode = MeshMode::Matching;
  auto meshes = mesh_surface(s, cfg);
  BrokenSpace space(s, meshes, 1);
  ProblemData pd;
  CHECK_THROWS_AS(flat_dg_equivalence(space, pd), GeometryError);
}

TEST_CASE("Dirichlet data vector vanishes for zero data") {
  CompositeSurface s = flat_square_surface();
  std::vector<PatchMesh> meshes = {
      build_mesh(s.patches[0], 0.25, MeshMode::Matching)};
  BrokenSpace space(s, meshes, 2);
  ProblemData pd;  // g_D = 0
  auto [mat, vec] = assemble_dirichlet(space, pd);
  CHECK(vec.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(max_abs(mat) > 0.0);
  SpMat diff = SpMat(mat.transpose()) - mat;
  CHECK(max_abs(diff) < 1e-12 * max_abs(mat));
}

TEST_CASE("load vector: partition of unity and doubled-order stability") {
  CompositeSurface s = flat_square_surface();
  std::vector<PatchMesh> meshes = {
      build_mesh(s.patches[0], 0.25, MeshMode::Matching)};
  BrokenSpace space(s, meshes, 1);
  ProblemData pd;
  pd.f = [](int, const Vec3&) { return 1.0; };
  VectorX b = assemble_load(space, pd);
  CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-12));

  // cylinders manufactured load: total integral stable under doubling order
  ManufacturedCase mc = make_case("intersecting_cylinders");
  MeshConfig cfg;
  cfg.h = 0.3;
  cfg.mode = MeshMode::Cut;
  cfg.offset_frac = Vec2(1.0 / 3, 0);
  auto cmeshes = mesh_surface(mc.surface, cfg);
  BrokenSpace cspace(mc.surface, cmeshes, 2);
  ProblemData pda = mc.problem();
  ProblemData pdb = mc.problem();
  pdb.volume_order = 2 * (2 * 2 + 4);
  pdb.interface_order = 2 * (2 * 2 + 4);
  VectorX ba = assemble_load(cspace, pda);
  VectorX bb = assemble_load(cspace, pdb);
  VectorX ones = VectorX::Ones(cspace.n_dofs());
  double scale = ba.cwiseAbs().sum();
  CHECK(std::abs(ba.dot(ones) - bb.dot(ones)) < 1e-10 * scale);
}

TEST_CASE("composite integrals are invariant under quadrature doubling") {
  ManufacturedCase mc = make_case("intersecting_cylinders");
  MeshConfig cfg;
  cfg.h = 0.3;
  cfg.mode = MeshMode::Cut;
  cfg.offset_frac = Vec2(1.0 / 3, 0);
  auto meshes = mesh_surface(mc.surface, cfg);
  BrokenSpace space(mc.surface, meshes, 2);
  ProblemData base = mc.problem();
  ProblemData dbl = mc.problem();
  dbl.volume_order = 2 * (2 * 2 + 4);
  dbl.interface_order = 2 * (2 * 2 + 4);
  dbl.face_order = 2 * (2 * 2);
  AssembledSystem sa = assemble_system(space, base);
  AssembledSystem sb = assemble_system(space, dbl);
  std::mt19937 rng(17);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 5; ++rep) {
    VectorX v(space.n_dofs()), w(space.n_dofs());
    for (int i = 0; i < v.size(); ++i) {
      v[i] = g(rng);
      w[i] = g(rng);
    }
    double fa = v.dot(sa.A * w);
    double fb = v.dot(sb.A * w);
    double scale = std::abs(v.dot(sa.A * v)) + std::abs(w.dot(sa.A * w));
    CHECK(std::abs(fa - fb) < 1e-10 * scale);
    CHECK(std::abs(v.dot(sa.b) - v.dot(sb.b)) <
          1e-10 * (sa.b.norm() * v.norm() + 1e-30));
  }
}

TEST_CASE("system symmetry and stabilization positive semidefiniteness") {
  ManufacturedCase mc = make_case("intersecting_cylinders");
  MeshConfig cfg;
  cfg.h = 0.4;
  cfg.mode = MeshMode::Cut;
  cfg.offset_frac = Vec2(0.3, 0);
  auto meshes = mesh_surface(mc.surface, cfg);
  BrokenSpace space(mc.surface, meshes, 2);
  AssembledSystem sys = assemble_system(space, mc.problem());
  SpMat asym = SpMat(sys.A.transpose()) - sys.A;
  CHECK(max_abs(asym) < 1e-12 * max_abs(sys.A));

  std::mt19937 rng(11);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 20; ++rep) {
    VectorX v(space.n_dofs());
    for (int i = 0; i < v.size(); ++i) v[i] = g(rng);
    CHECK(v.dot(sys.stabilization * v) > -1e-10 * v.squaredNorm());
  }
}

TEST_CASE("jump stabilizer: annihilation and the two-cell hand value") {
  // global polynomials of degree <= p are annihilated on a cut mesh
  CompositeSurface s = flat_square_surface();
  std::vector<PatchMesh> meshes = {
      build_mesh(s.patches[0], 0.25, MeshMode::Cut, Vec2(0.37, 0.21))};
  for (int p : {1, 2}) {
    BrokenSpace space(s, meshes, p);
    SpMat S = assemble_stab_jump(space, {1e-2, 1e-2});
    VectorX v = p == 1
                    ? interpolate(space, [](const Vec3& x) { return x[0]; })
                    : interpolate(space, [](const Vec3& x) {
                        return x[0] * x[0] + 0.5 * x[0] * x[1] - x[1];
                      });
    double sv = v.dot(S * v);
    CHECK(std::abs(sv) < (p == 1 ? 1e-13 : 1e-12) * std::max(1.0, max_abs(S)));
  }

  // hand-computed kink: v = xi on the left cell and 2 xi - h on the right
  const double h = 0.25, len = 0.75;
  TwoCellFixture fix(h, len);
  BrokenSpace space1(fix.surface, fix.meshes, 1);
  const double gamma1 = 1e-2;
  SpMat S = assemble_stab_jump(space1, {gamma1});
  VectorX v = interpolate(space1, [h](const Vec3& x) {
    return x[0] <= h ? x[0] : 2 * x[0] - h;
  });
  CHECK(v.dot(S * v) == doctest::Approx(gamma1 * h * len).epsilon(1e-12));
}

TEST_CASE("gradient-variation stabilizer: annihilation and kink positivity") {
  CompositeSurface s = flat_square_surface();
  std::vector<PatchMesh> meshes = {
      build_mesh(s.patches[0], 0.25, MeshMode::Cut, Vec2(0.37, 0.21))};
  BrokenSpace space(s, meshes, 2);
  SpMat S = assemble_stab_gradvar(space);
  VectorX v = interpolate(space, [](const Vec3& x) {
    return x[0] * x[0] * x[1] * x[1] - 2 * x[0] * x[1] + x[1];
  });
  CHECK(std::abs(v.dot(S * v)) < 1e-12 * std::max(1.0, max_abs(S)));

  TwoCellFixture fix(0.25, 0.5);
  BrokenSpace space1(fix.surface, fix.meshes, 1);
  SpMat Sk = assemble_stab_gradvar(space1);
  VectorX kink = interpolate(space1, [](const Vec3& x) {
    return x[0] <= 0.25 ? x[0] : 3 * x[0] - 0.5;
  });
  CHECK(kink.dot(Sk * kink) > 1e-8);
}

TEST_CASE("stabilizer swap changes the converged L2 error by < 20%") {
  ManufacturedCase mc = make_case("flat_square");
  double finest[2] = {0, 0};
  int si = 0;
  for (const char* stab : {"jump", "gradvar"}) {
    RunConfig cfg;
    cfg.case_name = "flat_square";
    cfg.degree = 2;
    cfg.levels = {0.2, 0.1, 0.05};
    cfg.mesh_mode = "cut";
    cfg.cut_offset = Vec2(0.3, 0.3);
    cfg.stabilizer = stab;
    cfg.compute_condition = false;
    StudyResult res = run_convergence(cfg);
    finest[si++] = res.levels.back().report.l2_error;
  }
  CHECK(std::abs(finest[0] - finest[1]) < 0.2 * std::max(finest[0], finest[1]));
}

TEST_CASE("coercivity: lambda_min positive at beta=100 and monotone in beta") {
  CompositeSurface s = flat_square_surface();
  std::vector<PatchMesh> meshes = {
      build_mesh(s.patches[0], 0.25, MeshMode::Cut, Vec2(0.3, 0.3))};
  BrokenSpace space(s, meshes, 1);
  std::vector<double> lmin;
  for (double beta : {10.0, 100.0, 1000.0}) {
    ProblemData pd;
    pd.beta = beta;
    AssembledSystem sys = assemble_system(space, pd);
    InertiaReport rep = inertia(sys.A);
    REQUIRE(rep.factorized);
    CHECK(rep.n_nonpositive == 0);
    lmin.push_back(smallest_eigenvalue(sys.A));
  }
  CHECK(lmin[0] > 0.0);
  CHECK(lmin[1] >= lmin[0] * (1 - 1e-9));
  CHECK(lmin[2] >= lmin[1] * (1 - 1e-9));
}

TEST_CASE("inverse inequality stays bounded under refinement") {
  // generalized Rayleigh quotient max_v h |nu.sigma(v)|^2_Gamma /
  // (|v|_a^2 + |v|_s^2) on a cut flat patch
  CompositeSurface s = flat_square_surface();
  std::vector<double> quotients;
  for (double h : {0.2, 0.1, 0.05}) {
    std::vector<PatchMesh> meshes = {
        build_mesh(s.patches[0], h, MeshMode::Cut, Vec2(0.3, 0.3))};
    BrokenSpace space(s, meshes, 1);
    ProblemData pd;
    SpMat D = assemble_volume(space, pd) + assemble_stab_jump(space, pd.gamma);

    // boundary flux mass matrix h * (flux, flux)
    std::vector<Eigen::Triplet<double>> trips;
    for (const BoundaryCurve& bc : s.dirichlet) {
      auto qps = boundary_quadrature(space, bc, 6);
      for (const CurveQP& qp : qps) {
        const TraceEval& te = qp.members.front();
        const PatchSpace& ps = space.space_of(te.patch_id);
        const PatchMesh& mesh = space.mesh_of(te.patch_id);
        const ParametricPatch& patch = space.patch_of(te.patch_id);
        BasisEval basis = eval_basis(1, te.unit);
        Mat32 J = patch.jacobian(te.ref);
        Mat2 Gi = (J.transpose() * J).inverse();
        const auto& dofs = ps.cell_dofs[te.cell];
        std::vector<double> flux(dofs.size());
        for (std::size_t l = 0; l < dofs.size(); ++l) {
          Vec2 gr(basis.grad[l].x() / mesh.hx, basis.grad[l].y() / mesh.hy);
          flux[l] = te.mu * te.nu.dot(J * (Gi * gr));
        }
        for (std::size_t i = 0; i < dofs.size(); ++i)
          for (std::size_t j = 0; j < dofs.size(); ++j)
            trips.emplace_back(ps.global_offset + dofs[i],
                               ps.global_offset + dofs[j],
                               qp.weight * h * flux[i] * flux[j]);
      }
    }
    SpMat B(space.n_dofs(), space.n_dofs());
    B.setFromTriplets(trips.begin(), trips.end());

    // deflate constants out of the denominator
    VectorX q = VectorX::Ones(space.n_dofs()).normalized();
    double scale = 0.0;
    for (int k = 0; k < D.outerSize(); ++k)
      for (SpMat::InnerIterator it(D, k); it; ++it)
        if (it.row() == it.col()) scale += it.value();
    scale /= space.n_dofs();
    SpMat Dreg = D + SpMat((scale * q * q.transpose()).sparseView());

    Eigen::SimplicialLDLT<SpMat> ldlt(Dreg);
    REQUIRE(ldlt.info() == Eigen::Success);
    VectorX v = VectorX::Random(space.n_dofs()).normalized();
    double lam = 0.0;
    for (int it = 0; it < 600; ++it) {
      VectorX w = ldlt.solve(B * v);
      double n = w.norm();
      if (n < 1e-300) break;
      v = w / n;
      lam = v.dot(B * v) / v.dot(Dreg * v);
    }
    quotients.push_back(lam);
  }
  for (double q : quotients) CHECK(q > 0.0);
  double qmin = *std::min_element(quotients.begin(), quotients.end());
  double qmax = *std::max_element(quotients.begin(), quotients.end());
  CHECK(qmax / qmin < 3.0);
}

TEST_CASE("stabilization norm of the interpolant decays at rate >= p") {
  CompositeSurface s = flat_square_surface();
  std::vector<double> hs = {0.2, 0.1, 0.05};
  for (int p : {1, 2}) {
    std::vector<double> vals;
    for (double h : hs) {
      std::vector<PatchMesh> meshes = {
          build_mesh(s.patches[0], h, MeshMode::Cut, Vec2(0.3, 0.3))};
      BrokenSpace space(s, meshes, p);
      SpMat S = assemble_stab_jump(space, {1e-2, 1e-2});
      VectorX v = interpolate(space, [](const Vec3& x) {
        return std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]);
      });
      vals.push_back(std::sqrt(std::max(0.0, v.dot(S * v))));
    }
    double slope = fit_slope(hs, vals);
    CHECK(slope > p - 0.25);
  }
}
