#include "csfem/io.hpp"

#include <cstdio>
#include <fstream>

namespace csfem {

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["case"] = c.case_name;
  j["degree"] = c.degree;
  j["levels"] = c.levels;
  j["mesh_mode"] = c.mesh_mode;
  j["cut_offset"] = {c.cut_offset.x(), c.cut_offset.y()};
  j["beta"] = c.beta;
  j["gamma"] = c.gamma;
  j["stabilizer"] = c.stabilizer;
  j["average_weights"] = c.average_weights;
  j["output_dir"] = c.output_dir;
  j["volume_order"] = c.volume_order;
  j["interface_order"] = c.interface_order;
  j["face_order"] = c.face_order;
  j["seed"] = c.seed;
  j["compute_condition"] = c.compute_condition;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  if (j.contains("case")) c.case_name = j["case"].get<std::string>();
  if (j.contains("degree")) c.degree = j["degree"].get<int>();
  if (j.contains("levels")) c.levels = j["levels"].get<std::vector<double>>();
  if (j.contains("mesh_mode")) c.mesh_mode = j["mesh_mode"].get<std::string>();
  if (j.contains("cut_offset")) {
    auto v = j["cut_offset"].get<std::vector<double>>();
    if (v.size() != 2) throw std::invalid_argument("cut_offset needs 2 entries");
    c.cut_offset = Vec2(v[0], v[1]);
  }
  if (j.contains("beta")) c.beta = j["beta"].get<double>();
  if (j.contains("gamma")) c.gamma = j["gamma"].get<std::vector<double>>();
  if (j.contains("stabilizer")) c.stabilizer = j["stabilizer"].get<std::string>();
  if (j.contains("average_weights"))
    c.average_weights = j["average_weights"].get<std::vector<double>>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("volume_order")) c.volume_order = j["volume_order"].get<int>();
  if (j.contains("interface_order"))
    c.interface_order = j["interface_order"].get<int>();
  if (j.contains("face_order")) c.face_order = j["face_order"].get<int>();
  if (j.contains("seed")) c.seed = j["seed"].get<unsigned>();
  if (j.contains("compute_condition"))
    c.compute_condition = j["compute_condition"].get<bool>();
  return c;
}

CompositeSurface surface_from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "flat_square") {
    std::vector<int> neumann;
    if (j.contains("neumann_edges"))
      neumann = j["neumann_edges"].get<std::vector<int>>();
    return flat_square_surface(neumann);
  }
  if (kind == "flat_two_patch") {
    double split = j.value("split", 0.5);
    Vec2 alpha(0.5, 0.5);
    if (j.contains("alpha")) {
      auto v = j["alpha"].get<std::vector<double>>();
      alpha = Vec2(v.at(0), v.at(1));
    }
    return flat_two_patch_surface(split, alpha);
  }
  if (kind == "flat_junction" || kind == "sharp_edge_L") {
    std::vector<double> angles = {0.0, M_PI / 2.0};
    if (j.contains("angles")) angles = j["angles"].get<std::vector<double>>();
    return build_flat_junction(static_cast<int>(angles.size()), angles,
                               j.value("width", 1.0), j.value("height", 1.0));
  }
  if (kind == "intersecting_cylinders") {
    return build_cylinder_intersection(
        j.value("R1", 1.5), j.value("R2", 2.0),
        j.value("theta", 2.0 * M_PI / 3.0), j.value("z0", 0.15),
        j.value("pad", 0.75));
  }
  throw std::invalid_argument("unknown surface kind: " + kind);
}

void write_matrix_market(const VectorX& b, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::fprintf(f, "%%%%MatrixMarket matrix array real general\n");
  std::fprintf(f, "%ld 1\n", static_cast<long>(b.size()));
  for (long i = 0; i < b.size(); ++i) std::fprintf(f, "%.17g\n", b[i]);
  std::fclose(f);
}

void write_matrix_market(const SpMat& A, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::fprintf(f, "%%%%MatrixMarket matrix coordinate real general\n");
  std::fprintf(f, "%ld %ld %ld\n", static_cast<long>(A.rows()),
               static_cast<long>(A.cols()), static_cast<long>(A.nonZeros()));
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      std::fprintf(f, "%ld %ld %.17g\n", static_cast<long>(it.row() + 1),
                   static_cast<long>(it.col() + 1), it.value());
  std::fclose(f);
}

}  // namespace csfem
