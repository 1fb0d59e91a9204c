#pragma once

#include <Eigen/Sparse>

#include "csfem/fe_space.hpp"
#include "csfem/quadrature.hpp"

namespace csfem {

using SpMat = Eigen::SparseMatrix<double>;

enum class StabilizerKind { None, Jump, GradVar };

struct ProblemData {
  std::function<double(int, const Vec3&)> f;    // load, per patch
  std::function<double(const Vec3&)> g_D;       // Dirichlet data
  std::function<double(int, const Vec3&)> g_N;  // Neumann data, per patch
  double beta = 100.0;
  std::vector<double> gamma = {1e-2, 1e-2};  // gamma_k, k = 1..p
  StabilizerKind stabilizer = StabilizerKind::Jump;
  int volume_order = -1;     // defaults to 2p+4
  int interface_order = -1;  // defaults to 2p+4 (curved traces need margin)
  int face_order = -1;       // defaults to 2p

  ProblemData();
};

struct AssembledSystem {
  int n = 0;
  SpMat A;
  VectorX b;
  // retained parts: A = volume + interface_consistency + interface_penalty
  //                     + dirichlet + stabilization
  SpMat volume, interface_consistency, interface_penalty, dirichlet,
      stabilization;
  double beta = 100.0;
  std::vector<double> gamma;
  StabilizerKind stabilizer = StabilizerKind::Jump;
};

// Quadrature along an interface (or boundary curve), shared across all
// member patches so multi-patch sums use identical points.
struct TraceEval {
  int member = 0;
  int patch_id = -1;
  int cell = -1;
  Vec2 ref;
  Vec2 unit;
  Vec3 nu;
  double mu = 1.0;
  double h = 0.0;
};

struct CurveQP {
  double t = 0.0;
  double weight = 0.0;  // physical arc-length weight
  Vec3 x;
  std::vector<TraceEval> members;
};

std::vector<CurveQP> interface_quadrature(const BrokenSpace& space,
                                          const InterfaceCurve& iface,
                                          int order);
std::vector<CurveQP> boundary_quadrature(const BrokenSpace& space,
                                         const BoundaryCurve& bc, int order);

// Split points of a trace against its mesh's grid lines (plus 0 and 1).
std::vector<double> trace_breakpoints(const PatchMesh& mesh,
                                      const Curve2& trace);

SpMat assemble_volume(const BrokenSpace& space, const ProblemData& problem);
std::pair<SpMat, SpMat> assemble_interface(const BrokenSpace& space,
                                           const ProblemData& problem);
std::pair<SpMat, VectorX> assemble_dirichlet(const BrokenSpace& space,
                                             const ProblemData& problem);
VectorX assemble_load(const BrokenSpace& space, const ProblemData& problem);
SpMat assemble_stab_jump(const BrokenSpace& space,
                         const std::vector<double>& gamma, int face_order = -1);
SpMat assemble_stab_gradvar(const BrokenSpace& space, int face_order = -1);

AssembledSystem assemble_system(const BrokenSpace& space,
                                const ProblemData& problem);

// Galerkin action a_h(u, phi_i) of a smooth exact field, for the residual
// consistency diagnostic r = b - action.
VectorX assemble_action(const BrokenSpace& space, const ProblemData& problem,
                        const ExactSolution& exact);

struct DgEquivalenceReport {
  double consistency_diff = 0.0;  // relative to max |entry|
  double penalty_diff = 0.0;
};

// Interface matrices of the convex-average form against the directly
// assembled average/jump form on a flat two-patch interface.
DgEquivalenceReport flat_dg_equivalence(const BrokenSpace& space,
                                        const ProblemData& problem);

}  // namespace csfem
