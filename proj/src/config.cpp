#include <json.hpp>

#include "riscim/experiments.hpp"
#include "riscim/io.hpp"

namespace riscim {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

Vec3 parse_vec3(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) bad(key + " must be a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

RoiBox parse_roi(const json& j) {
  RoiBox roi;
  if (j.contains("center_m")) roi.center = parse_vec3(j["center_m"], "roi.center_m");
  if (j.contains("extent_x_m")) roi.extent_x = j["extent_x_m"].get<double>();
  if (j.contains("extent_y_m")) roi.extent_y = j["extent_y_m"].get<double>();
  if (j.contains("extent_z_m")) roi.extent_z = j["extent_z_m"].get<double>();
  return roi;
}

void parse_scene(const json& j, SceneConfig& s) {
  if (j.contains("panel_rows")) s.panel_rows = j["panel_rows"].get<int>();
  if (j.contains("panel_cols")) s.panel_cols = j["panel_cols"].get<int>();
  if (j.contains("element_spacing_m"))
    s.element_spacing = j["element_spacing_m"].get<double>();
  if (j.contains("tx_panels")) {
    s.tx_grid_rows = j["tx_panels"].value("rows", s.tx_grid_rows);
    s.tx_grid_cols = j["tx_panels"].value("cols", s.tx_grid_cols);
  }
  if (j.contains("rx_panels")) {
    s.rx_grid_rows = j["rx_panels"].value("rows", s.rx_grid_rows);
    s.rx_grid_cols = j["rx_panels"].value("cols", s.rx_grid_cols);
  }
  if (j.contains("panel_gap_x_m")) s.gap_x = j["panel_gap_x_m"].get<double>();
  if (j.contains("panel_gap_y_m")) s.gap_y = j["panel_gap_y_m"].get<double>();
  if (j.contains("tx_antenna_m"))
    s.tx_antenna = parse_vec3(j["tx_antenna_m"], "scene.tx_antenna_m");
  if (j.contains("rx_antenna_m"))
    s.rx_antenna = parse_vec3(j["rx_antenna_m"], "scene.rx_antenna_m");
  if (j.contains("roi")) s.roi = parse_roi(j["roi"]);
  if (j.contains("frequencies_hz")) {
    const json& f = j["frequencies_hz"];
    if (f.is_array()) {
      s.frequencies = f.get<std::vector<double>>();
    } else if (f.is_object()) {
      const double start = f.value("start", 5.9e9);
      const double stop = f.value("stop", 6.1e9);
      const int count = f.value("count", 5);
      if (count < 1) bad("frequencies_hz.count must be >= 1");
      s.frequencies.clear();
      for (int i = 0; i < count; ++i)
        s.frequencies.push_back(
            count == 1 ? (start + stop) / 2
                       : start + (stop - start) * i / (count - 1));
    } else {
      bad("frequencies_hz must be an array or {start, stop, count}");
    }
  }
  if (j.contains("design_frequency_hz"))
    s.design_frequency = j["design_frequency_hz"].get<double>();
}

void parse_target(const json& j, TargetMap& t) {
  if (j.contains("scatterers")) {
    t.scatterers.clear();
    for (const json& s : j["scatterers"]) {
      Scatterer sc;
      sc.position = parse_vec3(s.at("position_m"), "scatterer.position_m");
      if (s.contains("reflectivity")) {
        const json& r = s["reflectivity"];
        if (r.is_number()) {
          sc.reflectivity = Complex(r.get<double>(), 0.0);
        } else if (r.is_array() && r.size() == 2) {
          sc.reflectivity = Complex(r[0].get<double>(), r[1].get<double>());
        } else {
          bad("reflectivity must be a number or [re, im]");
        }
      }
      t.scatterers.push_back(sc);
    }
    if (t.scatterers.empty()) bad("target.scatterers must be non-empty");
  }
}

void parse_strategy(const json& j, MaskStrategy& s) {
  if (j.contains("strategy"))
    s.kind = mask_kind_from_name(j["strategy"].get<std::string>());
  if (j.contains("c_max")) {
    s.c_max = j["c_max"].get<double>();
    if (s.c_max < 0.0 || s.c_max > 1.0) bad("masks.c_max must be in [0, 1]");
  }
  if (j.contains("randomize_angles"))
    s.randomize_angles = j["randomize_angles"].get<bool>();
  if (j.contains("randomize_offsets"))
    s.randomize_offsets = j["randomize_offsets"].get<bool>();
  if (j.contains("scan_rows")) s.scan_rows = j["scan_rows"].get<int>();
  if (j.contains("scan_cols")) s.scan_cols = j["scan_cols"].get<int>();
}

void parse_solver(const json& j, SolverOptions& s) {
  if (j.contains("method"))
    s.method = recon_method_from_name(j["method"].get<std::string>());
  if (j.contains("tol")) {
    s.tol = j["tol"].get<double>();
    if (!(s.tol > 0)) bad("solver.tol must be positive");
  }
  if (j.contains("max_iter")) {
    s.max_iter = j["max_iter"].get<int>();
    if (s.max_iter < 1) bad("solver.max_iter must be >= 1");
  }
  if (j.contains("tikhonov")) {
    s.tikhonov = j["tikhonov"].get<double>();
    if (s.tikhonov < 0) bad("solver.tikhonov must be non-negative");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  ExperimentConfig cfg;
  cfg.target = paper_target();
  if (json_text.empty()) {
    Scene::build(cfg.scene);  // still validate the defaults
    return cfg;
  }
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    if (j.contains("scene")) parse_scene(j["scene"], cfg.scene);
    if (j.contains("target")) parse_target(j["target"], cfg.target);
    if (j.contains("masks")) {
      parse_strategy(j["masks"], cfg.strategy);
      if (j["masks"].contains("count")) {
        cfg.mask_count = j["masks"]["count"].get<int>();
        if (cfg.mask_count < 1) bad("masks.count must be >= 1");
      }
    }
    if (j.contains("measurement")) {
      cfg.snr_db = j["measurement"].value("snr_db", cfg.snr_db);
    }
    if (j.contains("solver")) parse_solver(j["solver"], cfg.solver);
    if (j.contains("inverse_grid")) {
      cfg.inverse_nx = j["inverse_grid"].value("nx", cfg.inverse_nx);
      cfg.inverse_ny = j["inverse_grid"].value("ny", cfg.inverse_ny);
      if (cfg.inverse_nx < 2 || cfg.inverse_ny < 2)
        bad("inverse_grid dimensions must be >= 2");
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("clutter")) {
      const json& c = j["clutter"];
      if (c.contains("y_positions_m"))
        cfg.clutter_y = c["y_positions_m"].get<std::vector<double>>();
      if (c.contains("reflectivity"))
        cfg.clutter_reflectivity = Complex(c["reflectivity"].get<double>(), 0.0);
      if (c.contains("snr_db")) cfg.clutter_snr_db = c["snr_db"].get<double>();
      if (c.contains("mask_count")) {
        cfg.clutter_mask_count = c["mask_count"].get<int>();
        if (cfg.clutter_mask_count < 1) bad("clutter.mask_count must be >= 1");
      }
      if (cfg.clutter_y.empty()) bad("clutter.y_positions_m must be non-empty");
    }
    if (j.contains("roi_sweep")) {
      cfg.roi_sweep.clear();
      for (const json& r : j["roi_sweep"]) cfg.roi_sweep.push_back(parse_roi(r));
    }
    if (j.contains("fields")) {
      const json& f = j["fields"];
      cfg.fields.panels = f.value("panels", cfg.fields.panels);
      cfg.fields.offset_variants =
          f.value("offset_variants", cfg.fields.offset_variants);
      cfg.fields.angle_variants =
          f.value("angle_variants", cfg.fields.angle_variants);
      cfg.fields.frequency_sweep =
          f.value("frequency_sweep", cfg.fields.frequency_sweep);
      cfg.fields.window_scale = f.value("window_scale", cfg.fields.window_scale);
      cfg.fields.window_nx = f.value("window_nx", cfg.fields.window_nx);
      cfg.fields.window_ny = f.value("window_ny", cfg.fields.window_ny);
      if (cfg.fields.window_scale < 1.0) bad("fields.window_scale must be >= 1");
      if (cfg.fields.window_nx < 2 || cfg.fields.window_ny < 2)
        bad("fields.window dimensions must be >= 2");
    }
    if (j.contains("svd")) {
      const json& s = j["svd"];
      cfg.svd.mask_count = s.value("mask_count", cfg.svd.mask_count);
      cfg.svd.single_frequency =
          s.value("single_frequency", cfg.svd.single_frequency);
      cfg.svd.include_random = s.value("include_random", cfg.svd.include_random);
      if (cfg.svd.mask_count < 2) bad("svd.mask_count must be >= 2");
    }
  } catch (const json::exception& e) {
    bad(std::string("config: ") + e.what());
  }
  Scene::build(cfg.scene);  // validate geometry early, before any run starts
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  return parse_config(read_text_file(path));
}

std::string canonical_config(const ExperimentConfig& c) {
  ordered_json j;
  ordered_json scene;
  scene["panel_rows"] = c.scene.panel_rows;
  scene["panel_cols"] = c.scene.panel_cols;
  scene["element_spacing_m"] = c.scene.element_spacing;
  scene["tx_panels"] = {{"rows", c.scene.tx_grid_rows},
                        {"cols", c.scene.tx_grid_cols}};
  scene["rx_panels"] = {{"rows", c.scene.rx_grid_rows},
                        {"cols", c.scene.rx_grid_cols}};
  scene["panel_gap_x_m"] = c.scene.gap_x;
  scene["panel_gap_y_m"] = c.scene.gap_y;
  scene["tx_antenna_m"] = {c.scene.tx_antenna.x(), c.scene.tx_antenna.y(),
                           c.scene.tx_antenna.z()};
  scene["rx_antenna_m"] = {c.scene.rx_antenna.x(), c.scene.rx_antenna.y(),
                           c.scene.rx_antenna.z()};
  scene["roi"] = {{"center_m",
                   {c.scene.roi.center.x(), c.scene.roi.center.y(),
                    c.scene.roi.center.z()}},
                  {"extent_x_m", c.scene.roi.extent_x},
                  {"extent_y_m", c.scene.roi.extent_y},
                  {"extent_z_m", c.scene.roi.extent_z}};
  scene["frequencies_hz"] = c.scene.frequencies;
  scene["design_frequency_hz"] = c.scene.design_frequency;
  j["scene"] = scene;

  ordered_json target = ordered_json::array();
  for (const Scatterer& s : c.target.scatterers)
    target.push_back({{"position_m",
                       {s.position.x(), s.position.y(), s.position.z()}},
                      {"reflectivity",
                       {s.reflectivity.real(), s.reflectivity.imag()}}});
  j["target"] = target;

  j["masks"] = {{"strategy", mask_kind_name(c.strategy.kind)},
                {"count", c.mask_count},
                {"c_max", c.strategy.c_max},
                {"randomize_angles", c.strategy.randomize_angles},
                {"randomize_offsets", c.strategy.randomize_offsets},
                {"scan_rows", c.strategy.scan_rows},
                {"scan_cols", c.strategy.scan_cols}};
  j["measurement"] = {{"snr_db", c.snr_db}};
  j["solver"] = {{"method", recon_method_name(c.solver.method)},
                 {"tol", c.solver.tol},
                 {"max_iter", c.solver.max_iter},
                 {"tikhonov", c.solver.tikhonov}};
  j["inverse_grid"] = {{"nx", c.inverse_nx}, {"ny", c.inverse_ny}};
  j["clutter"] = {{"y_positions_m", c.clutter_y},
                  {"reflectivity", c.clutter_reflectivity.real()},
                  {"snr_db", c.clutter_snr_db},
                  {"mask_count", c.clutter_mask_count}};
  ordered_json sweep = ordered_json::array();
  for (const RoiBox& r : c.roi_sweep)
    sweep.push_back(
        {{"center_m", {r.center.x(), r.center.y(), r.center.z()}},
         {"extent_x_m", r.extent_x},
         {"extent_y_m", r.extent_y},
         {"extent_z_m", r.extent_z}});
  j["roi_sweep"] = sweep;
  j["fields"] = {{"panels", c.fields.panels},
                 {"offset_variants", c.fields.offset_variants},
                 {"angle_variants", c.fields.angle_variants},
                 {"frequency_sweep", c.fields.frequency_sweep},
                 {"window_scale", c.fields.window_scale},
                 {"window_nx", c.fields.window_nx},
                 {"window_ny", c.fields.window_ny}};
  j["svd"] = {{"mask_count", c.svd.mask_count},
              {"single_frequency", c.svd.single_frequency},
              {"include_random", c.svd.include_random}};
  j["seed"] = c.seed;
  return j.dump();
}

}  // namespace riscim
