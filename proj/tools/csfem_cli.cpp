// Command-line front end: single solves, refinement studies, beta/gamma
// sweeps, DG-equivalence checks; writes CSV tables, JSON reports, VTK
// surface fields and optional Matrix Market dumps.

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "CLI11.hpp"
#include "csfem/io.hpp"
#include "csfem/vtk.hpp"

using namespace csfem;

namespace {

void add_common_flags(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--case", cfg.case_name,
                  "flat_square|flat_two_patch|flat_triple_junction|"
                  "sharp_edge_L|intersecting_cylinders");
  cmd->add_option("-p,--degree", cfg.degree, "polynomial degree (1 or 2)");
  cmd->add_option("--levels", cfg.levels, "mesh sizes h, coarse to fine");
  cmd->add_option("--mode", cfg.mesh_mode, "matching|nonmatching|cut");
  cmd->add_option("--offset", [&cfg](const std::vector<std::string>& v) {
        if (v.size() != 2) return false;
        cfg.cut_offset = Vec2(std::stod(v[0]), std::stod(v[1]));
        return true;
      },
      "cut-grid offset as fractions of h (two values)")
      ->expected(2);
  cmd->add_option("--beta", cfg.beta, "Nitsche penalty parameter");
  cmd->add_option("--gamma", cfg.gamma, "stabilization parameters gamma_k");
  cmd->add_option("--stabilizer", cfg.stabilizer, "jump|gradvar|none");
  cmd->add_option("--weights", cfg.average_weights,
                  "convex average weights per interface member");
  cmd->add_option("-o,--output-dir", cfg.output_dir, "output directory");
  cmd->add_option("--seed", cfg.seed, "seed for randomized estimators");
  cmd->add_option("--quad-volume", cfg.volume_order, "volume quadrature order");
  cmd->add_option("--quad-interface", cfg.interface_order,
                  "interface quadrature order");
  cmd->add_option("--config", config_path, "JSON config file (overrides flags)");
}

RunConfig finalize_config(RunConfig cfg, const std::string& config_path) {
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot read config " + config_path);
    nlohmann::json j;
    in >> j;
    cfg = config_from_json(j);
  }
  std::filesystem::create_directories(cfg.output_dir);
  return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

int cmd_solve(const RunConfig& cfg, bool dump_matrix) {
  ManufacturedCase mc = case_with_overrides(cfg);
  double h = cfg.levels.empty() ? 0.2 : cfg.levels.back();
  auto ctx = solve_case(mc, cfg, h);
  nlohmann::json j;
  j["config"] = config_to_json(cfg);
  j["dofs"] = ctx->report.dofs;
  j["h"] = ctx->report.h;
  j["l2_error"] = ctx->report.l2_error;
  j["energy_error"] = ctx->report.energy_error;
  j["stab_energy"] = ctx->report.stab_energy;
  j["condition_number"] = ctx->report.condition_number;
  j["kirchhoff_residuals"] = ctx->report.kirchhoff_residuals;
  j["jump_residuals"] = ctx->report.jump_residuals;
  j["solve_residual"] = ctx->report.solve_residual;
  j["wall_time_sec"] = ctx->report.wall_time_sec;
  nlohmann::json meshes = nlohmann::json::array();
  for (const auto& ms : ctx->report.mesh_summary)
    meshes.push_back({{"patch", ms.patch},
                      {"h", ms.h},
                      {"active_cells", ms.active_cells},
                      {"cut_cells", ms.cut_cells}});
  j["meshes"] = meshes;
  std::ofstream(out_path(cfg, "report.json")) << j.dump(2) << "\n";
  export_vtk(*ctx->space, ctx->solution, out_path(cfg, "solution.vtk"));
  if (dump_matrix) {
    write_matrix_market(ctx->system.A, out_path(cfg, "system.mtx"));
    write_matrix_market(ctx->system.b, out_path(cfg, "load.mtx"));
  }
  std::printf("case=%s p=%d h=%g dofs=%d l2=%.3e energy=%.3e cond=%.3e\n",
              cfg.case_name.c_str(), cfg.degree, h, ctx->report.dofs,
              ctx->report.l2_error, ctx->report.energy_error,
              ctx->report.condition_number);
  return 0;
}

int cmd_converge(const RunConfig& cfg) {
  StudyResult res = run_convergence(cfg, out_path(cfg, "convergence.csv"),
                                    out_path(cfg, "report.json"));
  std::printf("case=%s p=%d levels=%zu l2_slope=%.3f energy_slope=%.3f\n",
              cfg.case_name.c_str(), cfg.degree, res.levels.size(),
              res.l2_slope, res.energy_slope);
  return 0;
}

int cmd_condition(const RunConfig& cfg) {
  StudyResult res = run_condition_study(cfg, out_path(cfg, "condition.csv"));
  std::printf("case=%s p=%d cond_slope=%.3f\n", cfg.case_name.c_str(),
              cfg.degree, res.cond_slope);
  return 0;
}

int cmd_dg_equiv(const RunConfig& cfg) {
  Vec2 alpha(0.5, 0.5);
  if (cfg.average_weights.size() == 2)
    alpha = Vec2(cfg.average_weights[0], cfg.average_weights[1]);
  CompositeSurface surf = flat_two_patch_surface(0.5, alpha);
  MeshConfig mcfg;
  mcfg.h = cfg.levels.empty() ? 0.25 : cfg.levels.back();
  mcfg.mode = parse_mesh_mode(cfg.mesh_mode);
  mcfg.offset_frac = cfg.cut_offset;
  auto meshes = mesh_surface(surf, mcfg);
  BrokenSpace space(surf, meshes, cfg.degree);
  ProblemData pd;
  pd.beta = cfg.beta;
  DgEquivalenceReport rep = flat_dg_equivalence(space, pd);
  std::printf("alpha=(%g,%g) mode=%s consistency_diff=%.3e penalty_diff=%.3e\n",
              alpha.x(), alpha.y(), cfg.mesh_mode.c_str(),
              rep.consistency_diff, rep.penalty_diff);
  return rep.consistency_diff < 1e-11 && rep.penalty_diff < 1e-11 ? 0 : 1;
}

// Qualitative junction demo: f = 0, +-1 Dirichlet data on the outer edges
// of two fan patches, visual output only.
int cmd_demo(const RunConfig& cfg) {
  CompositeSurface surf =
      build_flat_junction(3, {0.0, 2.0 * M_PI / 3.0, 4.0 * M_PI / 3.0});
  MeshConfig mcfg;
  mcfg.h = cfg.levels.empty() ? 0.05 : cfg.levels.back();
  mcfg.mode = parse_mesh_mode(cfg.mesh_mode);
  mcfg.offset_frac = cfg.cut_offset;
  auto meshes = mesh_surface(surf, mcfg);
  BrokenSpace space(surf, meshes, cfg.degree);
  ProblemData pd;
  pd.beta = cfg.beta;
  pd.gamma = cfg.gamma;
  pd.stabilizer = parse_stabilizer(cfg.stabilizer);
  pd.g_D = [](const Vec3& x) {
    // +1 on the outer rim of the first patch (y ~ 0, x > 0), -1 on the
    // second patch's rim, 0 elsewhere
    if (std::abs(x[1]) < 1e-9 && x[0] > 0.5) return 1.0;
    if (x[1] > 0.4 && x[0] < 0.0) return -1.0;
    return 0.0;
  };
  AssembledSystem sys = assemble_system(space, pd);
  VectorX u = solve(sys);
  export_vtk(space, u, out_path(cfg, "demo.vtk"));
  std::printf("demo written to %s\n", out_path(cfg, "demo.vtk").c_str());
  return 0;
}

int cmd_dump_matrix(const RunConfig& cfg) {
  ManufacturedCase mc = case_with_overrides(cfg);
  double h = cfg.levels.empty() ? 0.2 : cfg.levels.back();
  auto ctx = solve_case(mc, cfg, h);
  write_matrix_market(ctx->system.A, out_path(cfg, "system.mtx"));
  write_matrix_market(ctx->system.b, out_path(cfg, "load.mtx"));
  std::printf("matrix written to %s (n=%d)\n",
              out_path(cfg, "system.mtx").c_str(), ctx->report.dofs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nitsche solver for elliptic problems on composite surfaces"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  bool dump = false;

  CLI::App* solve_cmd = app.add_subcommand("solve", "single solve at the finest level");
  solve_cmd->add_flag("--dump-matrix", dump, "also write system.mtx");
  CLI::App* conv_cmd = app.add_subcommand("converge", "refinement study");
  CLI::App* cond_cmd = app.add_subcommand("condition", "condition-number study");
  CLI::App* dg_cmd = app.add_subcommand("dg-equiv", "flat interface DG comparison");
  CLI::App* demo_cmd = app.add_subcommand("demo", "qualitative junction demo");
  CLI::App* dump_cmd = app.add_subcommand("dump-matrix", "write the system matrix");
  for (CLI::App* c : {solve_cmd, conv_cmd, cond_cmd, dg_cmd, demo_cmd, dump_cmd})
    add_common_flags(c, cfg, config_path);

  CLI11_PARSE(app, argc, argv);

  try {
    cfg = finalize_config(cfg, config_path);
    if (solve_cmd->parsed()) return cmd_solve(cfg, dump);
    if (conv_cmd->parsed()) return cmd_converge(cfg);
    if (cond_cmd->parsed()) return cmd_condition(cfg);
    if (dg_cmd->parsed()) return cmd_dg_equiv(cfg);
    if (demo_cmd->parsed()) return cmd_demo(cfg);
    if (dump_cmd->parsed()) return cmd_dump_matrix(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
