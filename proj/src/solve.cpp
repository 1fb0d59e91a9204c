#include "csfem/solve.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <random>

#include "csfem/interface_curve.hpp"

namespace csfem {

VectorX solve(const AssembledSystem& system) {
  Eigen::SimplicialLDLT<SpMat> ldlt(system.A);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("factorization failed: system matrix is singular or indefinite");
  for (int i = 0; i < system.n; ++i)
    if (ldlt.vectorD()[i] <= 0.0)
      throw SolverError(
          "system matrix not positive definite (beta too small or missing stabilization)");
  VectorX u = ldlt.solve(system.b);
  double bn = system.b.norm();
  double res = (system.A * u - system.b).norm() / (bn > 0 ? bn : 1.0);
  if (res > 1e-10)
    throw SolverError("direct solve residual exceeds tolerance");
  return u;
}

InertiaReport inertia(const SpMat& A) {
  InertiaReport rep;
  Eigen::SimplicialLDLT<SpMat> ldlt(A);
  if (ldlt.info() != Eigen::Success) return rep;
  rep.factorized = true;
  for (int i = 0; i < A.rows(); ++i)
    if (ldlt.vectorD()[i] <= 0.0) ++rep.n_nonpositive;
  return rep;
}

namespace {

VectorX random_unit(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  VectorX v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v.normalized();
}

}  // namespace

double smallest_eigenvalue(const SpMat& A, unsigned seed, double tol,
                           int max_iter) {
  Eigen::SimplicialLDLT<SpMat> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("factorization failed in eigenvalue estimate");
  VectorX v = random_unit(static_cast<int>(A.rows()), seed);
  double lambda = 0.0, prev = 1e300;
  for (int it = 0; it < max_iter; ++it) {
    VectorX w = ldlt.solve(v);
    double n = w.norm();
    if (n == 0.0) throw SolverError("inverse iteration degenerated");
    v = w / n;
    lambda = v.dot(A * v);
    if (std::abs(lambda - prev) <= tol * std::abs(lambda)) return lambda;
    prev = lambda;
  }
  return lambda;
}

double condition_number(const SpMat& A, unsigned seed, double tol,
                        int max_iter) {
  const int n = static_cast<int>(A.rows());
  if (n == 0) throw SolverError("empty matrix");

  // largest eigenvalue: power iteration with Rayleigh quotients
  VectorX v = random_unit(n, seed);
  double lmax = 0.0, prev = 1e300;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    VectorX w = A * v;
    double nw = w.norm();
    if (nw == 0.0) throw SolverError("power iteration degenerated");
    v = w / nw;
    lmax = v.dot(A * v);
    if (std::abs(lmax - prev) <= tol * std::abs(lmax)) {
      converged = true;
      break;
    }
    prev = lmax;
  }
  if (!converged)
    throw SolverError("power iteration did not converge for lambda_max");

  // smallest eigenvalue: inverse power iteration via the factorization
  Eigen::SimplicialLDLT<SpMat> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("factorization failed in condition number");
  v = random_unit(n, seed + 1);
  double lmin = 0.0;
  prev = 1e300;
  converged = false;
  for (int it = 0; it < max_iter; ++it) {
    VectorX w = ldlt.solve(v);
    double nw = w.norm();
    if (nw == 0.0) throw SolverError("inverse iteration degenerated");
    v = w / nw;
    lmin = v.dot(A * v);
    if (std::abs(lmin - prev) <= tol * std::abs(lmin)) {
      converged = true;
      break;
    }
    prev = lmin;
  }
  if (!converged)
    throw SolverError("power iteration did not converge for lambda_min");
  if (lmin == 0.0) throw SolverError("singular matrix in condition number");
  return std::abs(lmax) / std::abs(lmin);
}

ErrorNorms error_norms(const BrokenSpace& space, const VectorX& u,
                       const ExactSolution& exact, int order_multiplier) {
  const int p = space.degree();
  const int vorder = order_multiplier * (2 * p + 4);
  ErrorNorms out;
  double l2_sq = 0.0, energy_sq = 0.0;

  // volume contributions
  for (const PatchSpace& ps : space.patch_spaces()) {
    const PatchMesh& mesh = space.mesh_of(ps.patch_id);
    const ParametricPatch& patch = space.patch_of(ps.patch_id);
    const QuadRule& rule = cell_quadrature(vorder);
    auto accumulate = [&](int ci, const Vec2& ref, double w) {
      Vec2 unit = mesh.local_coords(ci, ref);
      BasisEval basis = eval_basis(p, unit);
      double uh = 0.0;
      Vec2 gh(0, 0);
      const auto& dofs = ps.cell_dofs[ci];
      for (std::size_t l = 0; l < dofs.size(); ++l) {
        double c = u[ps.global_offset + dofs[l]];
        uh += c * basis.value[l];
        gh += c * Vec2(basis.grad[l].x() / mesh.hx, basis.grad[l].y() / mesh.hy);
      }
      Vec3 x = patch.map(ref);
      Vec3 n = patch.normal(ref);
      Vec3 gu = exact.grad(x);
      Vec3 gu_t = gu - n * n.dot(gu);
      Vec3 ge = patch.push_gradient(ref, gh) - gu_t;
      double e = uh - exact.value(x);
      double mu = patch.mu(x);
      double dA = w * patch.measure(ref);
      l2_sq += dA * e * e;
      energy_sq += dA * mu * ge.squaredNorm();
    };
    for (std::size_t ci = 0; ci < mesh.cells.size(); ++ci) {
      const MeshCell& cell = mesh.cells[ci];
      Box2 box = mesh.cell_box(cell);
      if (!cell.cut) {
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
          Vec2 ref = box.lo + Vec2(rule.points[q].x() * mesh.hx,
                                   rule.points[q].y() * mesh.hy);
          accumulate(static_cast<int>(ci), ref, rule.weights[q] * mesh.hx * mesh.hy);
        }
      } else {
        for (const ClipTri& ct : cell.clip) {
          QuadRule tri = triangle_quadrature(ct.tri, vorder);
          for (std::size_t q = 0; q < tri.points.size(); ++q)
            accumulate(static_cast<int>(ci), tri.points[q], ct.sign * tri.weights[q]);
        }
      }
    }
  }

  // interface terms: h |nu.grad e|^2 + h^{-1} |e_k - <e>|^2 per member
  const int border = order_multiplier * (2 * p + 4);
  for (const InterfaceCurve& iface : space.surface().interfaces) {
    auto qps = interface_quadrature(space, iface, border);
    for (const CurveQP& qp : qps) {
      double h_pen = 0.0;
      for (const TraceEval& te : qp.members) h_pen = std::max(h_pen, te.h);
      // member traces of the discrete solution
      std::vector<double> uh(qp.members.size());
      std::vector<double> flux_e(qp.members.size());
      for (std::size_t m = 0; m < qp.members.size(); ++m) {
        const TraceEval& te = qp.members[m];
        FieldEval fe = eval_field(space, u, te.patch_id, te.ref);
        uh[m] = fe.value;
        const ParametricPatch& patch = space.patch_of(te.patch_id);
        Vec3 n = patch.normal(te.ref);
        Vec3 gu = exact.grad(qp.x);
        Vec3 gu_t = gu - n * n.dot(gu);
        flux_e[m] = te.nu.dot(fe.surf_grad - gu_t);
      }
      double avg = 0.0;
      for (std::size_t m = 0; m < qp.members.size(); ++m)
        avg += iface.weights[m] * uh[m];
      for (std::size_t m = 0; m < qp.members.size(); ++m) {
        double jump = uh[m] - avg;  // exact part cancels in the jump
        energy_sq += qp.weight * (h_pen * flux_e[m] * flux_e[m] +
                                  jump * jump / h_pen);
      }
    }
  }

  // Dirichlet terms: h |nu.grad e|^2 + h^{-1} |e|^2
  for (const BoundaryCurve& bc : space.surface().dirichlet) {
    auto qps = boundary_quadrature(space, bc, border);
    for (const CurveQP& qp : qps) {
      const TraceEval& te = qp.members.front();
      FieldEval fe = eval_field(space, u, te.patch_id, te.ref);
      const ParametricPatch& patch = space.patch_of(te.patch_id);
      Vec3 n = patch.normal(te.ref);
      Vec3 gu = exact.grad(qp.x);
      Vec3 gu_t = gu - n * n.dot(gu);
      double flux_e = te.nu.dot(fe.surf_grad - gu_t);
      double e = fe.value - exact.value(qp.x);
      energy_sq += qp.weight * (te.h * flux_e * flux_e + e * e / te.h);
    }
  }

  out.l2 = std::sqrt(l2_sq);
  out.energy = std::sqrt(energy_sq);
  return out;
}

double kirchhoff_residual(const BrokenSpace& space, const VectorX& u,
                          const InterfaceCurve& iface, int order) {
  const int p = space.degree();
  int o = order > 0 ? order : 2 * (2 * p + 4);
  auto qps = interface_quadrature(space, iface, o);
  double sq = 0.0;
  for (const CurveQP& qp : qps) {
    double flux_sum = 0.0;
    for (const TraceEval& te : qp.members) {
      FieldEval fe = eval_field(space, u, te.patch_id, te.ref);
      flux_sum += te.mu * te.nu.dot(fe.surf_grad);
    }
    sq += qp.weight * flux_sum * flux_sum;
  }
  return std::sqrt(sq);
}

double jump_residual(const BrokenSpace& space, const VectorX& u,
                     const InterfaceCurve& iface, int order) {
  const int p = space.degree();
  int o = order > 0 ? order : 2 * (2 * p + 4);
  auto qps = interface_quadrature(space, iface, o);
  std::vector<double> sq(iface.traces.size(), 0.0);
  for (const CurveQP& qp : qps) {
    std::vector<double> uh(qp.members.size());
    for (std::size_t m = 0; m < qp.members.size(); ++m)
      uh[m] = eval_field(space, u, qp.members[m].patch_id, qp.members[m].ref).value;
    double avg = 0.0;
    for (std::size_t m = 0; m < qp.members.size(); ++m)
      avg += iface.weights[m] * uh[m];
    for (std::size_t m = 0; m < qp.members.size(); ++m)
      sq[m] += qp.weight * (uh[m] - avg) * (uh[m] - avg);
  }
  double worst = 0.0;
  for (double s : sq) worst = std::max(worst, std::sqrt(s));
  return worst;
}

}  // namespace csfem
