// halbach: command-line front end.
//
// Exit codes: 0 success, 2 configuration error, 3 domain error,
// 4 reproduction band failure. Errors go to stderr as
// "error category=<Kind> message=<text>".

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "halbach.hpp"

namespace fs = std::filesystem;
using namespace halbach;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDomain = 3;
constexpr int kExitBand = 4;

struct DesignArgs {
  std::string preset = "optimized_s3_1";
  std::string design_file;
  std::string rotation_plane;
};

void add_design_args(CLI::App* sub, DesignArgs& d) {
  sub->add_option("--preset", d.preset, "naive_s2 | rhombic_s3 | optimized_s3_1")->capture_default_str();
  sub->add_option("--design", d.design_file, "JSON design file (overrides --preset)");
  sub->add_option("--rotation-plane", d.rotation_plane, "override: yz | xy");
}

DesignParams resolve_design(const DesignArgs& d) {
  io::json j = d.design_file.empty() ? io::json{{"preset", d.preset}} : io::read_json_file(d.design_file);
  if (!d.rotation_plane.empty()) j["rotation_plane"] = d.rotation_plane;
  return io::parse_design(j);
}

double length_arg(const std::string& s, const char* what) { return io::parse_length(io::json(s), what); }

Vec3 point_arg(const std::string& s, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');) v.push_back(length_arg(part, what));
  if (v.size() != 3) io::parse_fail(std::string("'") + what + "' expects x,y,z");
  return {v[0], v[1], v[2]};
}

AxisRange range_arg(const std::string& s, const char* what) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 3) io::parse_fail(std::string("'") + what + "' expects lo:hi:count");
  AxisRange r{length_arg(parts[0], what), length_arg(parts[1], what), 0};
  try {
    r.count = std::stoul(parts[2]);
  } catch (const std::exception&) {
    io::parse_fail(std::string("'") + what + "': bad count");
  }
  return r;
}

std::pair<double, double> window_arg(const std::string& s, const char* what) {
  const auto sep = s.find(':');
  if (sep == std::string::npos) io::parse_fail(std::string("'") + what + "' expects lo:hi");
  return {length_arg(s.substr(0, sep), what), length_arg(s.substr(sep + 1), what)};
}

struct Output {
  std::string dir = ".";

  std::string path(const std::string& name) const { return (fs::path(dir) / name).string(); }

  void prepare() const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::FileIO, "cannot create output directory '" + dir + "'");
  }

  void write(const std::string& name, const std::string& text) const {
    io::write_text_file(path(name), text);
    std::cout << "wrote=" << name << '\n';
  }

  void lock(const DesignParams& p) const { write("design.lock", io::design_lock_text(p)); }
};

std::string profile_text(const FieldProfile& prof) {
  std::ostringstream os;
  io::write_profile_csv(os, prof);
  return os.str();
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigParse:
    case ErrorKind::FileIO:
    case ErrorKind::InvalidParams: return kExitConfig;
    default: return kExitDomain;
  }
}

void report_error(std::string_view category, const std::string& message) {
  std::cerr << "error category=" << category << " message=" << message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-layer Halbach array field analysis"};
  app.require_subcommand(1);
  unsigned workers = 0;
  app.add_option("--workers", workers, "parallel evaluation workers (0 = hardware concurrency)");
  Output out;
  app.add_option("--out-dir", out.dir, "directory for output files")->capture_default_str();

  DesignArgs design;

  // field
  auto* field_cmd = app.add_subcommand("field", "B at one point");
  add_design_args(field_cmd, design);
  std::string point_s;
  field_cmd->add_option("--point", point_s, "x,y,z (lengths accept m/mm/um)")->required();

  // line
  auto* line_cmd = app.add_subcommand("line", "B along a straight line, CSV");
  add_design_args(line_cmd, design);
  std::string line_start = "0,0.5mm,0.05mm", line_end = "0,0.5mm,10mm";
  std::size_t line_n = 996;
  bool line_grad = false;
  line_cmd->add_option("--start", line_start)->capture_default_str();
  line_cmd->add_option("--end", line_end)->capture_default_str();
  line_cmd->add_option("--n", line_n, "sample count")->capture_default_str();
  line_cmd->add_flag("--gradient", line_grad, "append dBz/dz column");

  // grid
  auto* grid_cmd = app.add_subcommand("grid", "B on a plane, CSV");
  add_design_args(grid_cmd, design);
  std::string plane_s = "x=0", grid_u, grid_v;
  grid_cmd->add_option("--plane", plane_s, "axis=value, e.g. y=0.5mm")->capture_default_str();
  grid_cmd->add_option("--u", grid_u, "first in-plane axis lo:hi:count");
  grid_cmd->add_option("--v", grid_v, "second in-plane axis lo:hi:count");

  // null
  auto* null_cmd = app.add_subcommand("null", "effective null on the ion-height corridor");
  add_design_args(null_cmd, design);
  std::string null_window = "0.05mm:6mm", null_y;
  NullSearchOptions nopt;
  double null_threshold_g = 1.0;
  null_cmd->add_option("--window", null_window, "z range lo:hi")->capture_default_str();
  null_cmd->add_option("--y", null_y, "corridor height (default: design ion height)");
  null_cmd->add_option("--threshold-G", null_threshold_g, "effective-null threshold")->capture_default_str();

  // extinction
  auto* ext_cmd = app.add_subcommand("extinction", "weak-side reach of the near field");
  add_design_args(ext_cmd, design);
  double ext_threshold_g = 1.0;
  std::string ext_zmax = "100mm";
  ext_cmd->add_option("--threshold-G", ext_threshold_g)->capture_default_str();
  ext_cmd->add_option("--z-max", ext_zmax)->capture_default_str();

  // exposure
  auto* exp_cmd = app.add_subcommand("exposure", "Lorentz force and phase along a shuttling path");
  add_design_args(exp_cmd, design);
  std::string path_file, exp_from = "0,0.5mm,10mm", exp_to = "0,0.5mm,1.6mm", exp_pitch = "10um";
  double exp_speed = 1.6, sensitivity = 1.0;
  exp_cmd->add_option("--path", path_file, "JSON path file {waypoints, speed}");
  exp_cmd->add_option("--from", exp_from)->capture_default_str();
  exp_cmd->add_option("--to", exp_to)->capture_default_str();
  exp_cmd->add_option("--speed", exp_speed, "m/s")->capture_default_str();
  exp_cmd->add_option("--pitch", exp_pitch)->capture_default_str();
  exp_cmd->add_option("--sensitivity", sensitivity, "phase per tesla-second")->capture_default_str();

  // sweep / descent
  std::string sweep_file;
  std::size_t sweep_axis = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "one-parameter coarse/fine sweep");
  sweep_cmd->add_option("--config", sweep_file, "JSON sweep config");
  sweep_cmd->add_option("--axis", sweep_axis, "index into the config's axes")->capture_default_str();
  auto* descent_cmd = app.add_subcommand("descent", "coordinate descent over all axes");
  descent_cmd->add_option("--config", sweep_file, "JSON sweep config");

  // scene
  auto* scene_cmd = app.add_subcommand("scene", "corridor exposure of a multi-module layout");
  std::string scene_file, scene_pitch = "20mm";
  bool scene_arms = false;
  double scene_threshold_g = 1.0;
  scene_cmd->add_option("--config", scene_file, "JSON scene file (default: nine-junction preset)");
  scene_cmd->add_option("--pitch", scene_pitch, "nine-junction module pitch")->capture_default_str();
  scene_cmd->add_flag("--optional-arms", scene_arms, "add the optional central-row modules");
  scene_cmd->add_option("--threshold-G", scene_threshold_g)->capture_default_str();

  // reproduce
  auto* rep_cmd = app.add_subcommand("reproduce", "regenerate figures and check acceptance bands");
  std::string target_s = "all";
  rep_cmd->add_option("target", target_s, "fig3|fig4|fig6|fig9|lorentz_s1|optimum_s3_1|extinction|all")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("ConfigParse", e.what());
    return kExitConfig;
  }

  try {
    set_default_workers(workers);
    out.prepare();

    if (*field_cmd) {
      const DesignParams p = resolve_design(design);
      const Vec3 pt = point_arg(point_s, "point");
      const Vec3 b = field_of_assembly(build_dual_layer(p), pt);
      io::KeyValue kv;
      kv.add("x_mm", units::to_mm(pt.x)).add("y_mm", units::to_mm(pt.y)).add("z_mm", units::to_mm(pt.z))
          .add("Bx_G", units::to_gauss(b.x)).add("By_G", units::to_gauss(b.y)).add("Bz_G", units::to_gauss(b.z))
          .add("Bmag_G", units::to_gauss(norm(b)));
      std::cout << kv.str();
      out.lock(p);
    } else if (*line_cmd) {
      const DesignParams p = resolve_design(design);
      const LineSpec spec{point_arg(line_start, "start"), point_arg(line_end, "end"), line_n};
      out.write("line.csv", profile_text(sample_line(build_dual_layer(p), spec, line_grad)));
      out.lock(p);
    } else if (*grid_cmd) {
      const DesignParams p = resolve_design(design);
      const auto eq = plane_s.find('=');
      if (eq != 1 || std::string("xyz").find(plane_s[0]) == std::string::npos)
        io::parse_fail("'plane' expects x=..., y=... or z=...");
      GridSpec g;
      g.normal = static_cast<Axis>(plane_s[0] - 'x');
      g.value = length_arg(plane_s.substr(2), "plane");
      const AxisRange defaults[] = {{-8e-3, 8e-3, 81}, {-2e-3, 4e-3, 61}, {0.05e-3, 10e-3, 200}};
      const int n = static_cast<int>(g.normal);
      g.u = grid_u.empty() ? defaults[n == 0 ? 1 : 0] : range_arg(grid_u, "u");
      g.v = grid_v.empty() ? defaults[n == 2 ? 1 : 2] : range_arg(grid_v, "v");
      out.write("grid.csv", profile_text(sample_grid(build_dual_layer(p), g)));
      out.lock(p);
    } else if (*null_cmd) {
      const DesignParams p = resolve_design(design);
      nopt.null_threshold = null_threshold_g * units::gauss;
      const double y = null_y.empty() ? p.ion_height : length_arg(null_y, "y");
      const Assembly a = build_dual_layer(p);
      out.lock(p);
      NullReport r = find_null(a, y, window_arg(null_window, "window"), nopt);
      r.axial_gradient = axial_gradient_at_null(a, r);
      const std::string text = io::null_report_kv(r).str();
      std::cout << text;
      out.write("null.txt", text);
    } else if (*ext_cmd) {
      const DesignParams p = resolve_design(design);
      const Extinction ex = extinction_distance(build_dual_layer(p), p.ion_height, ext_threshold_g * units::gauss,
                                                length_arg(ext_zmax, "z-max"));
      io::KeyValue kv;
      kv.add("threshold_G", ext_threshold_g).add("extinction_mm", units::to_mm(ex.distance))
          .add("always_below", ex.always_below);
      std::cout << kv.str();
      out.write("extinction.txt", kv.str());
      out.lock(p);
    } else if (*exp_cmd) {
      const DesignParams p = resolve_design(design);
      const ShuttlePath path = path_file.empty()
                                   ? ShuttlePath{{point_arg(exp_from, "from"), point_arg(exp_to, "to")}, exp_speed}
                                   : io::parse_path(io::read_json_file(path_file));
      const double pitch = length_arg(exp_pitch, "pitch");
      const Assembly a = build_dual_layer(p);
      const ExposureProfile prof = path_exposure(a, ytterbium_171(), path, pitch);
      std::ostringstream os;
      io::write_exposure_csv(os, prof);
      out.write("exposure.csv", os.str());
      io::KeyValue kv;
      kv.add("peak_force_N", prof.peak_force)
          .add("peak_force_x_mm", units::to_mm(prof.peak_force_position.x))
          .add("peak_force_y_mm", units::to_mm(prof.peak_force_position.y))
          .add("peak_force_z_mm", units::to_mm(prof.peak_force_position.z))
          .add("peak_B_G", units::to_gauss(prof.peak_B))
          .add("phase", phase_accumulation(a, path, sensitivity, pitch));
      std::cout << kv.str();
      out.write("exposure.txt", kv.str());
      out.lock(p);
    } else if (*sweep_cmd || *descent_cmd) {
      const io::SweepConfig cfg = sweep_file.empty() ? io::SweepConfig{} : io::parse_sweep(io::read_json_file(sweep_file));
      std::vector<SweepParam> cols;
      for (const auto& ax : cfg.axes) cols.push_back(ax.param);
      SweepResult res;
      std::string stem;
      if (*sweep_cmd) {
        if (sweep_axis >= cfg.axes.size()) io::parse_fail("'--axis' out of range");
        res = sweep_1d(cfg.base, cfg.axes[sweep_axis], cfg.objective);
        stem = "sweep";
      } else {
        res = coordinate_descent(cfg.base, cfg.axes, cfg.objective, cfg.descent);
        stem = "descent";
      }
      std::ostringstream os;
      io::write_trace_csv(os, res, cols);
      out.write(stem + "_trace.csv", os.str());
      const std::string summary = io::incumbent_kv(res, cols).str();
      std::cout << summary;
      out.write(stem + "_incumbent.txt", summary);
      out.lock(res.incumbent ? res.best().eval.params : cfg.base);
      if (!res.incumbent) {
        report_error(to_string(ErrorKind::NoFeasiblePoint), "no feasible candidate in the sweep");
        return kExitDomain;
      }
    } else if (*scene_cmd) {
      Scene scene;
      if (scene_file.empty()) {
        JunctionGridOptions jo;
        jo.pitch = length_arg(scene_pitch, "pitch");
        jo.optional_center_arms = scene_arms;
        scene = nine_junction_preset(jo);
      } else {
        scene = io::parse_scene(io::read_json_file(scene_file));
      }
      const auto reports = corridor_report(scene, scene_threshold_g * units::gauss);
      std::ostringstream os;
      os << "corridor,max_B_G,max_x_mm,max_y_mm,max_z_mm,gate_clearance_mm,flagged_samples,flagged\n";
      for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        os << i << ',' << io::fmt9(units::to_gauss(r.max_B)) << ',' << io::fmt9(units::to_mm(r.max_location.x)) << ','
           << io::fmt9(units::to_mm(r.max_location.y)) << ',' << io::fmt9(units::to_mm(r.max_location.z)) << ','
           << io::fmt9(units::to_mm(r.gate_clearance)) << ',' << r.flagged_samples << ','
           << (r.flagged ? "true" : "false") << '\n';
      }
      out.write("scene_corridors.csv", os.str());
      io::KeyValue kv;
      kv.add("placements", static_cast<double>(scene.placements.size()))
          .add("corridors", static_cast<double>(scene.corridors.size()));
      std::cout << kv.str();
    } else if (*rep_cmd) {
      const auto target = parse_target(target_s);
      if (!target) io::parse_fail("unknown reproduce target '" + target_s + "'");
      ReproduceOptions ro;
      ro.out_dir = out.dir;
      const Report rep = reproduce(*target, ro);
      std::cout << rep.str();
      return rep.all_pass() ? 0 : kExitBand;
    }
  } catch (const Error& e) {
    report_error(to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    report_error("Internal", e.what());
    return kExitDomain;
  }
  return 0;
}
