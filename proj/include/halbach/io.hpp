// Config parsing (JSON), design.lock echo files, CSV and key-value reports.
//
// Number formatting is fixed at 9 significant digits ("%.9g") with negative
// zero printed as 0, so identical inputs give byte-identical files. The lock
// file stores SI doubles at round-trip precision instead.

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "halbach/analysis.hpp"
#include "halbach/design.hpp"
#include "halbach/errors.hpp"
#include "halbach/ion.hpp"
#include "halbach/optimizer.hpp"
#include "halbach/scene.hpp"
#include "halbach/vec3.hpp"

namespace halbach::io {

using json = nlohmann::json;

inline std::string fmt9(double v) {
  if (v == 0.0) v = 0.0;  // drops the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// ---------------------------------------------------------------- parsing

[[noreturn]] inline void parse_fail(const std::string& what) { throw Error(ErrorKind::ConfigParse, what); }

/// Splits "1.5mm" into (1.5, "mm"). Whitespace between number and unit is allowed.
inline std::pair<double, std::string> split_quantity(std::string_view text, std::string_view key) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    parse_fail("'" + std::string(key) + "': cannot parse number from \"" + s + "\"");
  }
  std::string unit = s.substr(used);
  const auto first = unit.find_first_not_of(" \t");
  unit = first == std::string::npos ? std::string{} : unit.substr(first, unit.find_last_not_of(" \t") - first + 1);
  if (!std::isfinite(v)) parse_fail("'" + std::string(key) + "': non-finite value");
  return {v, unit};
}

/// Length in meters: a bare number is meters; strings may carry m, mm or um.
inline double parse_length(const json& j, std::string_view key) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) parse_fail("'" + std::string(key) + "': expected a length");
  const auto [v, unit] = split_quantity(j.get<std::string>(), key);
  if (unit.empty() || unit == "m") return v;
  if (unit == "mm") return v * units::mm;
  if (unit == "um") return v * units::um;
  parse_fail("'" + std::string(key) + "': unknown length unit \"" + unit + "\"");
}

/// Angle in radians: a bare number is radians; strings may carry rad or deg.
inline double parse_angle(const json& j, std::string_view key) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) parse_fail("'" + std::string(key) + "': expected an angle");
  const auto [v, unit] = split_quantity(j.get<std::string>(), key);
  if (unit.empty() || unit == "rad") return v;
  if (unit == "deg") return v * std::numbers::pi / 180.0;
  parse_fail("'" + std::string(key) + "': unknown angle unit \"" + unit + "\"");
}

/// Flux density in tesla: bare number is tesla; strings may carry T or G.
inline double parse_flux(const json& j, std::string_view key) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) parse_fail("'" + std::string(key) + "': expected a flux density");
  const auto [v, unit] = split_quantity(j.get<std::string>(), key);
  if (unit.empty() || unit == "T") return v;
  if (unit == "G") return v * units::gauss;
  parse_fail("'" + std::string(key) + "': unknown flux unit \"" + unit + "\"");
}

inline double parse_number(const json& j, std::string_view key) {
  if (!j.is_number()) parse_fail("'" + std::string(key) + "': expected a number");
  return j.get<double>();
}

inline Vec3 parse_point(const json& j, std::string_view key) {
  if (!j.is_array() || j.size() != 3) parse_fail("'" + std::string(key) + "': expected [x, y, z]");
  return {parse_length(j[0], key), parse_length(j[1], key), parse_length(j[2], key)};
}

inline Preset parse_preset(std::string_view name) {
  for (Preset p : {Preset::naive_s2, Preset::rhombic_s3, Preset::optimized_s3_1})
    if (to_string(p) == name) return p;
  parse_fail("unknown preset \"" + std::string(name) + "\" (naive_s2, rhombic_s3, optimized_s3_1)");
}

inline void require_object(const json& j, std::string_view what) {
  if (!j.is_object()) parse_fail(std::string(what) + " must be a JSON object");
}

/// Reads a design object. "preset" selects the starting point; every other
/// key overrides one DesignParams field. Unknown keys are rejected.
inline DesignParams parse_design(const json& j, DesignParams base = {}) {
  require_object(j, "design");
  if (auto it = j.find("preset"); it != j.end()) {
    if (!it->is_string()) parse_fail("'preset' must be a string");
    base = preset_params(parse_preset(it->get<std::string>()));
  }
  DesignParams p = base;
  for (const auto& [key, v] : j.items()) {
    if (key == "preset") continue;
    if (key == "n_segments") {
      if (!v.is_number_integer()) parse_fail("'n_segments' must be an integer");
      p.n_segments = v.get<int>();
    } else if (key == "cuboid_size") {
      require_object(v, "cuboid_size");
      for (const auto& [k2, v2] : v.items()) {
        if (k2 == "width_x") p.cuboid_size.x = parse_length(v2, k2);
        else if (k2 == "height_y") p.cuboid_size.y = parse_length(v2, k2);
        else if (k2 == "depth_z") p.cuboid_size.z = parse_length(v2, k2);
        else parse_fail("unknown key 'cuboid_size." + k2 + "'");
      }
    } else if (key == "center_style") {
      const auto s = v.is_string() ? v.get<std::string>() : std::string{};
      if (s == "cuboid") p.center_style = CenterStyle::cuboid;
      else if (s == "rhombic") p.center_style = CenterStyle::rhombic;
      else parse_fail("'center_style' must be \"cuboid\" or \"rhombic\"");
    } else if (key == "rhombus_diagonals") {
      require_object(v, "rhombus_diagonals");
      for (const auto& [k2, v2] : v.items()) {
        if (k2 == "transverse") p.rhombus_diagonals.transverse = parse_length(v2, k2);
        else if (k2 == "axial") p.rhombus_diagonals.axial = parse_length(v2, k2);
        else parse_fail("unknown key 'rhombus_diagonals." + k2 + "'");
      }
    } else if (key == "rhombus_height") {
      p.rhombus_height = parse_length(v, key);
    } else if (key == "spacing") {
      p.spacing = parse_length(v, key);
    } else if (key == "rotation_step") {
      p.rotation_step = parse_angle(v, key);
    } else if (key == "rotation_plane") {
      const auto s = v.is_string() ? v.get<std::string>() : std::string{};
      if (s == "yz") p.rotation_plane = RotationPlane::yz;
      else if (s == "xy") p.rotation_plane = RotationPlane::xy;
      else parse_fail("'rotation_plane' must be \"yz\" or \"xy\"");
    } else if (key == "br_lower") {
      p.br_lower = parse_flux(v, key);
    } else if (key == "br_upper") {
      p.br_upper = parse_flux(v, key);
    } else if (key == "separation") {
      p.separation = parse_length(v, key);
    } else if (key == "axial_offset_upper") {
      p.axial_offset_upper = parse_length(v, key);
    } else if (key == "ion_height") {
      p.ion_height = parse_length(v, key);
    } else {
      parse_fail("unknown design key '" + key + "'");
    }
  }
  try {
    validate(p);
  } catch (const Error& e) {
    parse_fail(std::string("design: ") + e.what());
  }
  return p;
}

/// Exact SI echo of a design; parse_design(design_lock(p)) == p.
inline json design_lock(const DesignParams& p) {
  json j;
  j["n_segments"] = p.n_segments;
  j["cuboid_size"] = {{"width_x", p.cuboid_size.x}, {"height_y", p.cuboid_size.y}, {"depth_z", p.cuboid_size.z}};
  j["center_style"] = std::string(to_string(p.center_style));
  j["rhombus_diagonals"] = {{"transverse", p.rhombus_diagonals.transverse}, {"axial", p.rhombus_diagonals.axial}};
  j["rhombus_height"] = p.rhombus_height;
  j["spacing"] = p.spacing;
  j["rotation_step"] = p.rotation_step;
  j["rotation_plane"] = std::string(to_string(p.rotation_plane));
  j["br_lower"] = p.br_lower;
  j["br_upper"] = p.br_upper;
  j["separation"] = p.separation;
  j["axial_offset_upper"] = p.axial_offset_upper;
  j["ion_height"] = p.ion_height;
  return j;
}

inline std::string design_lock_text(const DesignParams& p) { return design_lock(p).dump(2) + "\n"; }

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileIO, "cannot open '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail("'" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::FileIO, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::FileIO, "write failed for '" + path + "'");
}

inline ShuttlePath parse_path(const json& j) {
  require_object(j, "path");
  ShuttlePath path;
  for (const auto& [key, v] : j.items()) {
    if (key == "waypoints") {
      if (!v.is_array()) parse_fail("'waypoints' must be an array");
      for (const auto& w : v) path.waypoints.push_back(parse_point(w, "waypoints"));
    } else if (key == "speed") {
      path.speed = parse_number(v, key);
    } else {
      parse_fail("unknown path key '" + key + "'");
    }
  }
  try {
    validate(path);
  } catch (const Error& e) {
    parse_fail(std::string("path: ") + e.what());
  }
  return path;
}

inline int parse_yaw(const json& j) {
  const double deg = parse_number(j, "yaw");
  for (int q = 0; q < 4; ++q)
    if (deg == 90.0 * q) return q;
  parse_fail("'yaw' must be one of 0, 90, 180, 270 degrees");
}

/// Scene config: either {"nine_junction": {...}} or explicit
/// {"placements": [...], "corridors": [...]}.
inline Scene parse_scene(const json& j) {
  require_object(j, "scene");
  if (auto it = j.find("nine_junction"); it != j.end()) {
    if (j.size() != 1) parse_fail("'nine_junction' cannot be combined with other scene keys");
    require_object(*it, "nine_junction");
    JunctionGridOptions opt;
    for (const auto& [key, v] : it->items()) {
      if (key == "pitch") opt.pitch = parse_length(v, key);
      else if (key == "optional_center_arms") {
        if (!v.is_boolean()) parse_fail("'optional_center_arms' must be a boolean");
        opt.optional_center_arms = v.get<bool>();
      } else if (key == "gate_standoff") opt.gate_standoff = parse_length(v, key);
      else if (key == "design") opt.design = parse_design(v);
      else parse_fail("unknown nine_junction key '" + key + "'");
    }
    try {
      return nine_junction_preset(opt);
    } catch (const Error& e) {
      parse_fail(std::string("nine_junction: ") + e.what());
    }
  }
  Scene s;
  for (const auto& [key, v] : j.items()) {
    if (key == "placements") {
      if (!v.is_array()) parse_fail("'placements' must be an array");
      for (const auto& pj : v) {
        require_object(pj, "placement");
        ModulePlacement m;
        for (const auto& [k2, v2] : pj.items()) {
          if (k2 == "design") m.design = parse_design(v2);
          else if (k2 == "translation") m.translation = parse_point(v2, k2);
          else if (k2 == "yaw") m.yaw_quarter_turns = parse_yaw(v2);
          else if (k2 == "label") {
            if (!v2.is_string()) parse_fail("'label' must be a string");
            m.label = v2.get<std::string>();
          }
          else if (k2 == "gate_standoff") m.gate_standoff = parse_length(v2, k2);
          else if (k2 == "optional") {
            if (!v2.is_boolean()) parse_fail("'optional' must be a boolean");
            m.optional_arm = v2.get<bool>();
          }
          else parse_fail("unknown placement key '" + k2 + "'");
        }
        s.placements.push_back(std::move(m));
      }
    } else if (key == "corridors") {
      if (!v.is_array()) parse_fail("'corridors' must be an array");
      for (const auto& c : v) s.corridors.push_back(parse_path(c));
    } else {
      parse_fail("unknown scene key '" + key + "'");
    }
  }
  return s;
}

inline SweepParam parse_sweep_param(std::string_view name) {
  for (SweepParam p : {SweepParam::separation, SweepParam::axial_offset_upper, SweepParam::spacing,
                       SweepParam::br_upper, SweepParam::rhombus_axial})
    if (to_string(p) == name) return p;
  parse_fail("unknown sweep parameter \"" + std::string(name) + "\"");
}

inline double parse_param_value(SweepParam p, const json& j, std::string_view key) {
  return p == SweepParam::br_upper ? parse_flux(j, key) : parse_length(j, key);
}

struct SweepConfig {
  DesignParams base = preset_params(Preset::rhombic_s3);
  std::vector<SweepAxis> axes = default_descent_axes();
  Objective objective;
  DescentOptions descent;
};

inline SweepConfig parse_sweep(const json& j) {
  require_object(j, "sweep config");
  SweepConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "base") {
      c.base = parse_design(v);
    } else if (key == "axes") {
      if (!v.is_array() || v.empty()) parse_fail("'axes' must be a non-empty array");
      c.axes.clear();
      for (const auto& aj : v) {
        require_object(aj, "axis");
        if (!aj.contains("param") || !aj["param"].is_string()) parse_fail("axis needs a 'param' name");
        SweepAxis ax;
        ax.param = parse_sweep_param(aj["param"].get<std::string>());
        for (const auto& [k2, v2] : aj.items()) {
          if (k2 == "param") continue;
          if (k2 == "lower") ax.lower = parse_param_value(ax.param, v2, k2);
          else if (k2 == "upper") ax.upper = parse_param_value(ax.param, v2, k2);
          else if (k2 == "coarse_step") ax.coarse_step = parse_param_value(ax.param, v2, k2);
          else if (k2 == "fine_step") ax.fine_step = parse_param_value(ax.param, v2, k2);
          else parse_fail("unknown axis key '" + k2 + "'");
        }
        try {
          validate(ax);
        } catch (const Error& e) {
          parse_fail(std::string("axis: ") + e.what());
        }
        c.axes.push_back(ax);
      }
    } else if (key == "objective") {
      require_object(v, "objective");
      for (const auto& [k2, v2] : v.items()) {
        if (k2 == "null_threshold") c.objective.null_threshold = parse_flux(v2, k2);
        else if (k2 == "compensable_limit") c.objective.compensable_limit = parse_flux(v2, k2);
        else if (k2 == "min_clearance") c.objective.min_clearance = parse_length(v2, k2);
        else if (k2 == "approach_from_z") c.objective.approach_from_z = parse_length(v2, k2);
        else if (k2 == "scan_pitch") c.objective.scan_pitch = parse_length(v2, k2);
        else if (k2 == "null_window") {
          if (!v2.is_array() || v2.size() != 2) parse_fail("'null_window' must be [lo, hi]");
          c.objective.null_window = {parse_length(v2[0], k2), parse_length(v2[1], k2)};
        } else parse_fail("unknown objective key '" + k2 + "'");
      }
      try {
        validate(c.objective);
      } catch (const Error& e) {
        parse_fail(std::string("objective: ") + e.what());
      }
    } else if (key == "descent") {
      require_object(v, "descent");
      for (const auto& [k2, v2] : v.items()) {
        if (k2 == "max_rounds") {
          if (!v2.is_number_integer() || v2.get<int>() < 0) parse_fail("'max_rounds' must be an integer >= 0");
          c.descent.max_rounds = v2.get<int>();
        } else if (k2 == "min_improvement") c.descent.min_improvement = parse_number(v2, k2);
        else parse_fail("unknown descent key '" + k2 + "'");
      }
    } else {
      parse_fail("unknown sweep key '" + key + "'");
    }
  }
  return c;
}

// ---------------------------------------------------------------- output

inline constexpr std::string_view kProfileHeader = "x_mm,y_mm,z_mm,Bx_G,By_G,Bz_G,Bmag_G";

inline void write_profile_csv(std::ostream& os, const FieldProfile& prof) {
  const bool grad = !prof.dBz_dz.empty();
  os << kProfileHeader << (grad ? ",dBz_dz_T_per_m" : "") << '\n';
  for (std::size_t i = 0; i < prof.size(); ++i) {
    const Vec3& p = prof.positions[i];
    const Vec3& b = prof.B[i];
    os << fmt9(units::to_mm(p.x)) << ',' << fmt9(units::to_mm(p.y)) << ',' << fmt9(units::to_mm(p.z)) << ','
       << fmt9(units::to_gauss(b.x)) << ',' << fmt9(units::to_gauss(b.y)) << ',' << fmt9(units::to_gauss(b.z)) << ','
       << fmt9(units::to_gauss(norm(b)));
    if (grad) os << ',' << fmt9(prof.dBz_dz[i]);
    os << '\n';
  }
}

inline void write_exposure_csv(std::ostream& os, const ExposureProfile& prof) {
  os << "s_mm,t_us,x_mm,y_mm,z_mm,Bmag_G,F_N\n";
  for (const auto& s : prof.samples)
    os << fmt9(units::to_mm(s.s)) << ',' << fmt9(s.t * 1e6) << ',' << fmt9(units::to_mm(s.position.x)) << ','
       << fmt9(units::to_mm(s.position.y)) << ',' << fmt9(units::to_mm(s.position.z)) << ','
       << fmt9(units::to_gauss(norm(s.B))) << ',' << fmt9(norm(s.force)) << '\n';
}

/// Swept parameter columns use mm for lengths and T for remanence.
inline std::string param_column(SweepParam p) {
  return "param_" + std::string(to_string(p)) + (p == SweepParam::br_upper ? "_T" : "_mm");
}

inline double param_display(SweepParam p, double v) { return p == SweepParam::br_upper ? v : units::to_mm(v); }

inline void write_trace_csv(std::ostream& os, const SweepResult& res, const std::vector<SweepParam>& columns) {
  for (auto p : columns) os << param_column(p) << ',';
  os << "gradient_T_per_m,residual_G,maxBy_G,maxBz_G,feasible,reason\n";
  for (const auto& t : res.trace) {
    for (auto p : columns) os << fmt9(param_display(p, param_value(t.eval.params, p))) << ',';
    const double residual = t.eval.null ? units::to_gauss(t.eval.null->residual_mag) : NAN;
    os << fmt9(t.eval.gradient) << ',' << (t.eval.null ? fmt9(residual) : std::string("nan")) << ','
       << fmt9(units::to_gauss(t.eval.approach.max_by)) << ',' << fmt9(units::to_gauss(t.eval.approach.max_bz)) << ','
       << (t.eval.feasible ? "true" : "false") << ',' << t.eval.reason << '\n';
  }
}

/// Ordered "key=value" lines.
class KeyValue {
 public:
  KeyValue& add(std::string key, std::string value) {
    lines_.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  KeyValue& add(std::string key, double value) { return add(std::move(key), fmt9(value)); }
  KeyValue& add(std::string key, bool value) { return add(std::move(key), std::string(value ? "true" : "false")); }
  KeyValue& add(std::string key, const char* value) { return add(std::move(key), std::string(value)); }

  std::string str() const {
    std::string out;
    for (const auto& [k, v] : lines_) out += k + "=" + v + "\n";
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

inline KeyValue null_report_kv(const NullReport& r) {
  KeyValue kv;
  kv.add("position_x_mm", units::to_mm(r.position.x))
      .add("position_y_mm", units::to_mm(r.position.y))
      .add("position_z_mm", units::to_mm(r.position.z))
      .add("distance_from_edge_mm", units::to_mm(r.distance_from_edge))
      .add("residual_Bx_G", units::to_gauss(r.residual_B.x))
      .add("residual_By_G", units::to_gauss(r.residual_B.y))
      .add("residual_Bz_G", units::to_gauss(r.residual_B.z))
      .add("residual_G", units::to_gauss(r.residual_mag))
      .add("gradient_T_per_m", r.axial_gradient)
      .add("is_effective_null", r.is_effective_null);
  return kv;
}

inline KeyValue incumbent_kv(const SweepResult& res, const std::vector<SweepParam>& columns) {
  KeyValue kv;
  kv.add("evaluations", static_cast<double>(res.trace.size()));
  if (!res.incumbent) return kv.add("feasible", false).add("error", std::string(to_string(ErrorKind::NoFeasiblePoint)));
  const auto& best = res.best().eval;
  kv.add("feasible", true);
  for (auto p : columns) kv.add(param_column(p), param_display(p, param_value(best.params, p)));
  kv.add("gradient_T_per_m", best.gradient);
  if (best.null) {
    kv.add("null_z_mm", units::to_mm(best.null->position.z)).add("residual_G", units::to_gauss(best.null->residual_mag));
  }
  kv.add("maxBx_G", units::to_gauss(best.approach.max_bx))
      .add("maxBy_G", units::to_gauss(best.approach.max_by))
      .add("maxBz_G", units::to_gauss(best.approach.max_bz));
  return kv;
}

}  // namespace halbach::io
