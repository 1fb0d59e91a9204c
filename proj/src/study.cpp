#include "csfem/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "json.hpp"

namespace csfem {

MeshMode parse_mesh_mode(const std::string& s) {
  if (s == "matching") return MeshMode::Matching;
  if (s == "nonmatching") return MeshMode::NonMatching;
  if (s == "cut") return MeshMode::Cut;
  throw std::invalid_argument("unknown mesh mode: " + s);
}

StabilizerKind parse_stabilizer(const std::string& s) {
  if (s == "jump") return StabilizerKind::Jump;
  if (s == "gradvar") return StabilizerKind::GradVar;
  if (s == "none") return StabilizerKind::None;
  throw std::invalid_argument("unknown stabilizer: " + s);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  std::size_t use = std::min<std::size_t>(3, n);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = n - use; i < n; ++i) {
    double lx = std::log(x[i]);
    double ly = std::log(std::max(y[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double m = static_cast<double>(use);
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ManufacturedCase case_with_overrides(const RunConfig& config) {
  ManufacturedCase mc = make_case(config.case_name);
  if (!config.average_weights.empty()) {
    for (InterfaceCurve& iface : mc.surface.interfaces) {
      if (config.average_weights.size() !=
          static_cast<std::size_t>(iface.member_count()))
        throw std::invalid_argument("average weight count does not match interface");
      iface.weights = config.average_weights;
    }
  }
  return mc;
}

std::unique_ptr<SolveContext> solve_case(const ManufacturedCase& mc,
                                         const RunConfig& config, double h) {
  auto t0 = std::chrono::steady_clock::now();

  auto ctx = std::make_unique<SolveContext>();
  ctx->mc = mc;

  MeshConfig mcfg;
  mcfg.h = h;
  mcfg.mode = parse_mesh_mode(config.mesh_mode);
  mcfg.offset_frac = config.cut_offset;
  ctx->meshes = mesh_surface(ctx->mc.surface, mcfg);
  ctx->space = std::make_unique<BrokenSpace>(ctx->mc.surface, ctx->meshes,
                                             config.degree);

  ProblemData pd = ctx->mc.problem(config.beta, config.gamma,
                                   parse_stabilizer(config.stabilizer));
  pd.volume_order = config.volume_order;
  pd.interface_order = config.interface_order;
  pd.face_order = config.face_order;

  ctx->system = assemble_system(*ctx->space, pd);
  ctx->solution = solve(ctx->system);

  SolveReport rep;
  rep.dofs = ctx->space->n_dofs();
  rep.h = h;
  ErrorNorms en = error_norms(*ctx->space, ctx->solution, ctx->mc.exact());
  rep.l2_error = en.l2;
  rep.energy_error = en.energy;
  rep.stab_energy = std::sqrt(
      std::max(0.0, ctx->solution.dot(ctx->system.stabilization * ctx->solution)));
  rep.solve_residual = (ctx->system.A * ctx->solution - ctx->system.b).norm() /
                       std::max(ctx->system.b.norm(), 1e-300);
  if (config.compute_condition)
    rep.condition_number = condition_number(ctx->system.A, config.seed);
  for (const InterfaceCurve& iface : ctx->mc.surface.interfaces) {
    rep.kirchhoff_residuals.push_back(
        kirchhoff_residual(*ctx->space, ctx->solution, iface));
    rep.jump_residuals.push_back(
        jump_residual(*ctx->space, ctx->solution, iface));
  }
  for (const PatchMesh& m : ctx->meshes) {
    SolveReport::MeshSummary ms;
    ms.patch = m.patch_id;
    ms.h = m.h;
    ms.active_cells = static_cast<int>(m.cells.size());
    ms.cut_cells = m.n_cut;
    rep.mesh_summary.push_back(ms);
  }
  rep.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  ctx->report = rep;
  return ctx;
}

SolveReport run_single(const ManufacturedCase& mc, const RunConfig& config,
                       double h) {
  return solve_case(mc, config, h)->report;
}

std::string csv_header() {
  return "# csfem convergence table, schema=1\n"
         "h,dofs,l2_error,energy_error,cond,kirchhoff_max,wall_time\n";
}

std::string csv_row(const LevelResult& level) {
  double kmax = 0.0;
  for (double k : level.report.kirchhoff_residuals) kmax = std::max(kmax, k);
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.6f\n",
                level.h, level.report.dofs, level.report.l2_error,
                level.report.energy_error, level.report.condition_number,
                kmax, level.report.wall_time_sec);
  return buf;
}

namespace {

nlohmann::json report_to_json(const SolveReport& rep) {
  nlohmann::json j;
  j["dofs"] = rep.dofs;
  j["h"] = rep.h;
  j["l2_error"] = rep.l2_error;
  j["energy_error"] = rep.energy_error;
  j["stab_energy"] = rep.stab_energy;
  j["condition_number"] = rep.condition_number;
  j["kirchhoff_residuals"] = rep.kirchhoff_residuals;
  j["jump_residuals"] = rep.jump_residuals;
  j["solve_residual"] = rep.solve_residual;
  j["wall_time_sec"] = rep.wall_time_sec;
  nlohmann::json meshes = nlohmann::json::array();
  for (const auto& ms : rep.mesh_summary) {
    meshes.push_back({{"patch", ms.patch},
                      {"h", ms.h},
                      {"active_cells", ms.active_cells},
                      {"cut_cells", ms.cut_cells}});
  }
  j["meshes"] = meshes;
  return j;
}

}  // namespace

StudyResult run_convergence(const RunConfig& config,
                            const std::string& csv_path,
                            const std::string& json_path) {
  if (config.levels.size() < 3)
    throw std::invalid_argument("at least three refinement levels required");
  ManufacturedCase mc = case_with_overrides(config);

  std::ofstream csv;
  if (!csv_path.empty()) {
    csv.open(csv_path);
    csv << csv_header();
    csv.flush();
  }

  StudyResult out;
  try {
    for (double h : config.levels) {
      LevelResult lr;
      lr.h = h;
      lr.report = run_single(mc, config, h);
      out.levels.push_back(lr);
      if (csv.is_open()) {
        csv << csv_row(lr);
        csv.flush();  // partial table survives a failed finer level
      }
    }
  } catch (...) {
    if (csv.is_open()) csv.flush();
    throw;
  }

  std::vector<double> hs, l2s, ens, conds;
  for (const auto& lr : out.levels) {
    hs.push_back(lr.h);
    l2s.push_back(lr.report.l2_error);
    ens.push_back(lr.report.energy_error);
    conds.push_back(lr.report.condition_number);
  }
  if (hs.size() >= 2) {
    out.l2_slope = fit_slope(hs, l2s);
    out.energy_slope = fit_slope(hs, ens);
    if (config.compute_condition) out.cond_slope = fit_slope(hs, conds);
  }

  if (!json_path.empty()) {
    nlohmann::json j;
    j["case"] = config.case_name;
    j["degree"] = config.degree;
    j["mesh_mode"] = config.mesh_mode;
    j["stabilizer"] = config.stabilizer;
    j["beta"] = config.beta;
    j["gamma"] = config.gamma;
    j["l2_slope"] = out.l2_slope;
    j["energy_slope"] = out.energy_slope;
    j["cond_slope"] = out.cond_slope;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& lr : out.levels) rows.push_back(report_to_json(lr.report));
    j["levels"] = rows;
    std::ofstream(json_path) << j.dump(2) << "\n";
  }
  return out;
}

StudyResult run_condition_study(const RunConfig& config,
                                const std::string& csv_path) {
  RunConfig c = config;
  c.compute_condition = true;
  return run_convergence(c, csv_path, "");
}

}  // namespace csfem
