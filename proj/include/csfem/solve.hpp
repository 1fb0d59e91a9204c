#pragma once

#include "csfem/assembly.hpp"

namespace csfem {

// Direct symmetric solve; throws SolverError when the factorization fails
// or the matrix is not positive definite (beta too small or missing
// stabilization).
VectorX solve(const AssembledSystem& system);

struct InertiaReport {
  bool factorized = false;
  int n_nonpositive = 0;  // count of nonpositive LDLT pivots
};

InertiaReport inertia(const SpMat& A);

// Smallest eigenvalue (signed) by inverse iteration through an LDLT
// factorization; works for indefinite A as long as it factorizes.
double smallest_eigenvalue(const SpMat& A, unsigned seed = 7u,
                           double tol = 1e-6, int max_iter = 20000);

// lambda_max / lambda_min of symmetric positive definite A via power
// iteration on A and on A^{-1}; relative eigenvalue tolerance `tol`.
double condition_number(const SpMat& A, unsigned seed = 7u, double tol = 1e-4,
                        int max_iter = 10000);

struct ErrorNorms {
  double l2 = 0.0;
  double energy = 0.0;  // broken energy norm with interface/boundary terms
};

ErrorNorms error_norms(const BrokenSpace& space, const VectorX& u,
                       const ExactSolution& exact, int order_multiplier = 2);

double kirchhoff_residual(const BrokenSpace& space, const VectorX& u,
                          const InterfaceCurve& iface, int order = -1);

double jump_residual(const BrokenSpace& space, const VectorX& u,
                     const InterfaceCurve& iface, int order = -1);

struct SolveReport {
  int dofs = 0;
  double h = 0.0;
  double l2_error = 0.0;
  double energy_error = 0.0;
  double stab_energy = 0.0;
  double condition_number = 0.0;
  std::vector<double> kirchhoff_residuals;
  std::vector<double> jump_residuals;
  double solve_residual = 0.0;
  double wall_time_sec = 0.0;
  struct MeshSummary {
    int patch = 0;
    double h = 0.0;
    int active_cells = 0;
    int cut_cells = 0;
  };
  std::vector<MeshSummary> mesh_summary;
};

}  // namespace csfem
