#pragma once

#include <memory>
#include <string>
#include <vector>

#include "csfem/manufactured.hpp"
#include "csfem/solve.hpp"

namespace csfem {

struct RunConfig {
  std::string case_name = "flat_square";
  int degree = 2;
  std::vector<double> levels = {0.4, 0.2, 0.1};  // h per refinement level
  std::string mesh_mode = "cut";                 // matching|nonmatching|cut
  Vec2 cut_offset{1.0 / 3.0, 1.0 / 3.0};         // fraction of h
  double beta = 100.0;
  std::vector<double> gamma = {1e-2, 1e-2};
  std::string stabilizer = "jump";  // jump|gradvar|none
  std::vector<double> average_weights;  // empty: keep case defaults
  std::string output_dir = ".";
  int volume_order = -1;
  int interface_order = -1;
  int face_order = -1;
  unsigned seed = 7;
  bool compute_condition = true;
};

MeshMode parse_mesh_mode(const std::string& s);
StabilizerKind parse_stabilizer(const std::string& s);

struct LevelResult {
  double h = 0.0;
  SolveReport report;
};

struct StudyResult {
  std::vector<LevelResult> levels;
  double l2_slope = 0.0;
  double energy_slope = 0.0;
  double cond_slope = 0.0;
};

// Least-squares slope of log(y) against log(x) over the last
// min(3, n) points.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// A solved problem with everything the post-processing needs; allocate on
// the heap and do not move (the space points into mc and meshes).
struct SolveContext {
  ManufacturedCase mc;
  std::vector<PatchMesh> meshes;
  std::unique_ptr<BrokenSpace> space;
  AssembledSystem system;
  VectorX solution;
  SolveReport report;
};

std::unique_ptr<SolveContext> solve_case(const ManufacturedCase& mc,
                                         const RunConfig& config, double h);

// One solve at mesh size h; the report carries errors, residuals and
// (optionally) the condition number.
SolveReport run_single(const ManufacturedCase& mc, const RunConfig& config,
                       double h);

StudyResult run_convergence(const RunConfig& config,
                            const std::string& csv_path = "",
                            const std::string& json_path = "");

StudyResult run_condition_study(const RunConfig& config,
                                const std::string& csv_path = "");

// CSV rows in the fixed schema; wall_time is the only non-deterministic
// column and comes last.
std::string csv_header();
std::string csv_row(const LevelResult& level);

ManufacturedCase case_with_overrides(const RunConfig& config);

}  // namespace csfem
