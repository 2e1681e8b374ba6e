// One-command reproduction targets. Each target writes its CSV/summary files
// into an output directory and appends band checks to a Report. File content
// depends only on the inputs, never on timing or worker count.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "halbach/analysis.hpp"
#include "halbach/design.hpp"
#include "halbach/errors.hpp"
#include "halbach/io.hpp"
#include "halbach/ion.hpp"
#include "halbach/optimizer.hpp"

namespace halbach {

enum class Target { fig3, fig4, fig6, fig9, lorentz_s1, optimum_s3_1, extinction, all };

constexpr std::string_view to_string(Target t) {
  switch (t) {
    case Target::fig3: return "fig3";
    case Target::fig4: return "fig4";
    case Target::fig6: return "fig6";
    case Target::fig9: return "fig9";
    case Target::lorentz_s1: return "lorentz_s1";
    case Target::optimum_s3_1: return "optimum_s3_1";
    case Target::extinction: return "extinction";
    case Target::all: return "all";
  }
  return "?";
}

inline std::optional<Target> parse_target(std::string_view s) {
  for (Target t : {Target::fig3, Target::fig4, Target::fig6, Target::fig9, Target::lorentz_s1, Target::optimum_s3_1,
                   Target::extinction, Target::all})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

struct BandCheck {
  std::string criterion;  // acceptance number, e.g. "2"
  std::string name;
  std::string measured;
  std::string band;
  bool pass = false;
  std::string note;
};

struct Report {
  std::vector<BandCheck> checks;
  std::vector<std::string> files;  // relative to the output directory, in write order

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  std::string str() const {
    std::string out;
    for (const auto& c : checks) {
      out += (c.pass ? "PASS" : "FAIL");
      out += " criterion=" + c.criterion + " check=" + c.name + " measured=" + c.measured + " band=" + c.band;
      if (!c.note.empty()) out += " note=" + c.note;
      out += '\n';
    }
    out += std::string("overall=") + (all_pass() ? "PASS" : "FAIL") + "\n";
    return out;
  }
};

struct ReproduceOptions {
  std::filesystem::path out_dir = "reproduce_out";
  /// Replaces every built design with this assembly (error-path testing).
  std::optional<Assembly> assembly_override;
  NullSearchOptions null_options;
  std::pair<double, double> null_window{0.05e-3, 6e-3};
  double profile_pitch = 10e-6;
  double approach_from_z = 10e-3;
  double extinction_threshold = 1e-4;
};

namespace detail {

inline std::string in_band(double lo, double hi) { return "[" + io::fmt9(lo) + "," + io::fmt9(hi) + "]"; }

class Reproducer {
 public:
  explicit Reproducer(ReproduceOptions opt) : opt_(std::move(opt)) {
    std::error_code ec;
    std::filesystem::create_directories(opt_.out_dir, ec);
    if (ec) throw Error(ErrorKind::FileIO, "cannot create output directory '" + opt_.out_dir.string() + "'");
  }

  Report run(Target t) {
    switch (t) {
      case Target::fig3: fig3(); break;
      case Target::fig4: fig4(); break;
      case Target::fig6: fig6(); break;
      case Target::fig9: fig9(); break;
      case Target::lorentz_s1: lorentz(); break;
      case Target::optimum_s3_1: optimum(); break;
      case Target::extinction: extinction(); break;
      case Target::all:
        lorentz();
        fig3();
        fig4();
        fig6();
        fig9();
        optimum();
        extinction();
        mirror();
        break;
    }
    write("report.txt", report_.str());
    return report_;
  }

 private:
  Assembly assembly(const DesignParams& p, std::string label) const {
    if (opt_.assembly_override) return *opt_.assembly_override;
    return build_dual_layer(p, std::move(label));
  }

  void write(const std::string& name, const std::string& text) {
    io::write_text_file((opt_.out_dir / name).string(), text);
    report_.files.push_back(name);
  }

  void check(std::string crit, std::string name, double measured, double lo, double hi, std::string note = {},
             bool strict_hi = false) {
    const bool ok = measured >= lo && (strict_hi ? measured < hi : measured <= hi);
    report_.checks.push_back({std::move(crit), std::move(name), io::fmt9(measured), in_band(lo, hi), ok,
                              std::move(note)});
  }

  void failure(std::string crit, std::string name, const Error& e, std::string note = {}) {
    std::string what = e.what();
    for (auto& ch : what)
      if (ch == ' ') ch = '_';
    report_.checks.push_back({std::move(crit), std::move(name), "error:" + std::string(to_string(e.kind())),
                              "n/a", false, note.empty() ? what : note + ";" + what});
  }

  void profile(const Assembly& a, const DesignParams& p, const std::string& stem) {
    const auto n = static_cast<std::size_t>(std::round((opt_.null_window.second - opt_.null_window.first) /
                                                       opt_.profile_pitch)) + 1;
    const LineSpec line{{0.0, p.ion_height, opt_.null_window.first}, {0.0, p.ion_height, opt_.null_window.second}, n};
    std::ostringstream os;
    io::write_profile_csv(os, sample_line(a, line, true));
    write(stem + "_profile.csv", os.str());
  }

  /// Design echo, corridor profile and null search; throws NoNullFound.
  NullReport null_of(const Assembly& a, const DesignParams& p, const std::string& stem) {
    write(stem + "_design.lock", io::design_lock_text(p));
    profile(a, p, stem);
    NullReport r = find_null(a, p.ion_height, opt_.null_window, opt_.null_options);
    r.axial_gradient = axial_gradient_at_null(a, r);
    write(stem + "_null.txt", io::null_report_kv(r).str());
    return r;
  }

  void fig3() {
    const DesignParams p = preset_params(Preset::naive_s2);
    const Assembly a = assembly(p, "naive_s2");
    const GridSpec g{Axis::x, 0.0, {-2e-3, 4e-3, 61}, {0.05e-3, 10e-3, 200}};
    try {
      std::ostringstream os;
      io::write_profile_csv(os, sample_grid(a, g));
      write("fig3_grid.csv", os.str());
    } catch (const Error& e) {
      failure("fig3", "fig3_grid", e);
    }
  }

  /// Criterion 2 with the rotation-plane fallback: the default plane first,
  /// then the other one; the first match is recorded.
  void fig4() {
    const DesignParams base = preset_params(Preset::naive_s2);
    const RotationPlane order[] = {base.rotation_plane,
                                   base.rotation_plane == RotationPlane::xy ? RotationPlane::yz : RotationPlane::xy};
    for (RotationPlane rp : order) {
      DesignParams p = base;
      p.rotation_plane = rp;
      const std::string stem = "fig4_" + std::string(to_string(rp));
      const std::size_t before = report_.checks.size();
      try {
        const Assembly a = assembly(p, stem);
        const auto r = null_of(a, p, stem);
        const std::string note = "rotation_plane=" + std::string(to_string(rp));
        check("2", "naive_null_distance_mm", units::to_mm(r.distance_from_edge), 1.3, 1.9, note);
        check("2", "naive_null_residual_G", units::to_gauss(r.residual_mag), 0.0, 5.0, note, true);
        check("2", "naive_gradient_T_per_m", std::abs(r.axial_gradient), 75.0, 110.0, note);
      } catch (const Error& e) {
        failure("2", "naive_null", e, "rotation_plane=" + std::string(to_string(rp)));
      }
      bool ok = true;
      for (std::size_t i = before; i < report_.checks.size(); ++i) ok = ok && report_.checks[i].pass;
      if (ok) {
        report_.checks.push_back({"2", "rotation_plane_match", std::string(to_string(rp)), "yz|xy", true, {}});
        return;
      }
      if (opt_.assembly_override) return;  // the plane is irrelevant for a fixed assembly
    }
    report_.checks.push_back({"2", "rotation_plane_match", "none", "yz|xy", false, "neither_interpretation_matched"});
  }

  void fig6() {
    const DesignParams p = preset_params(Preset::rhombic_s3);
    try {
      const Assembly a = assembly(p, "rhombic_s3");
      const auto r = null_of(a, p, "fig6");
      check("3", "rhombic_null_distance_mm", units::to_mm(r.distance_from_edge), 1.6, 2.4);
      check("3", "rhombic_gradient_T_per_m", std::abs(r.axial_gradient), 7.0, 13.0);
    } catch (const Error& e) {
      failure("3", "rhombic_null", e);
    }
  }

  void optimized_checks(const std::string& stem) {
    const DesignParams p = preset_params(Preset::optimized_s3_1);
    try {
      const Assembly a = assembly(p, "optimized_s3_1");
      const auto r = null_of(a, p, stem);
      check("4", "optimized_gradient_T_per_m", std::abs(r.axial_gradient), 40.8, 61.2);
      check("4", "optimized_residual_G", units::to_gauss(r.residual_mag), 0.0,
            units::to_gauss(opt_.null_options.null_threshold), {}, true);
      const auto ap = approach_offsets(a, p.ion_height, opt_.approach_from_z, r, opt_.profile_pitch);
      io::KeyValue kv;
      kv.add("from_z_mm", units::to_mm(opt_.approach_from_z))
          .add("maxBx_G", units::to_gauss(ap.max_bx))
          .add("maxBy_G", units::to_gauss(ap.max_by))
          .add("maxBz_G", units::to_gauss(ap.max_bz));
      write(stem + "_approach.txt", kv.str());
      check("4", "approach_maxBy_G", units::to_gauss(ap.max_by), 40.0, 60.0);
      check("4", "approach_maxBz_G", units::to_gauss(ap.max_bz), 44.0, 60.0);
    } catch (const Error& e) {
      failure("4", "optimized_null", e);
    }
  }

  void fig9() { optimized_checks("fig9"); }

  void optimum() {
    optimized_checks("optimum_s3_1");
    const auto axes = default_descent_axes();
    std::vector<SweepParam> cols;
    for (const auto& ax : axes) cols.push_back(ax.param);
    Objective obj;
    obj.null_window = opt_.null_window;
    obj.null_threshold = opt_.null_options.null_threshold;
    obj.approach_from_z = opt_.approach_from_z;
    const Evaluator eval = opt_.assembly_override
                               ? Evaluator([](const DesignParams& p) {
                                   CandidateEval e;
                                   e.params = p;
                                   e.reason = std::string(to_string(ErrorKind::NoNullFound));
                                   return e;
                                 })
                               : Evaluator([obj](const DesignParams& p) { return evaluate_candidate(p, obj); });
    const SweepResult res = coordinate_descent(preset_params(Preset::rhombic_s3), axes, eval);
    std::ostringstream os;
    io::write_trace_csv(os, res, cols);
    write("optimum_s3_1_trace.csv", os.str());
    write("optimum_s3_1_incumbent.txt", io::incumbent_kv(res, cols).str());
    if (!res.incumbent) {
      failure("6", "descent_incumbent", Error(ErrorKind::NoFeasiblePoint, "no feasible candidate"));
      return;
    }
    const CandidateEval& best = res.best().eval;
    check("6", "descent_separation_mm", units::to_mm(best.params.separation), 2.0, 2.5);
    check("6", "descent_axial_offset_mm", units::to_mm(best.params.axial_offset_upper), -0.1, 0.1);
    check("6", "descent_objective_T_per_m", best.objective(), 45.0, std::numeric_limits<double>::infinity());
  }

  void lorentz() {
    const LorentzEstimate e = lorentz_estimate(ytterbium_171(), 1.6, 0.25);
    io::KeyValue kv;
    kv.add("force_N", e.force).add("acceleration_m_per_s2", e.acceleration).add("ratio_radial", e.ratio_radial)
        .add("ratio_axial", e.ratio_axial);
    write("lorentz_s1.txt", kv.str());
    check("1", "lorentz_force_N", e.force, 6.4e-20 * 0.98, 6.4e-20 * 1.02);
    check("1", "lorentz_acceleration_m_per_s2", e.acceleration, 2.3e5 * 0.98, 2.3e5 * 1.02);
  }

  void extinction() {
    io::KeyValue kv;
    for (Preset pr : {Preset::naive_s2, Preset::optimized_s3_1}) {
      const DesignParams p = preset_params(pr);
      const std::string name(to_string(pr));
      try {
        const Assembly a = assembly(p, name);
        const Extinction ex = extinction_distance(a, p.ion_height, opt_.extinction_threshold);
        kv.add(name + "_extinction_mm", units::to_mm(ex.distance)).add(name + "_always_below", ex.always_below);
        check("5", name + "_extinction_mm", units::to_mm(ex.distance), 7.0 / 1.5, 7.0 * 1.5);
      } catch (const Error& e) {
        failure("5", name + "_extinction", e);
      }
    }
    write("extinction.txt", kv.str());
  }

  /// Mirror plane x = 0: B_x must vanish on every preset.
  void mirror() {
    for (Preset pr : {Preset::naive_s2, Preset::rhombic_s3, Preset::optimized_s3_1}) {
      const DesignParams p = preset_params(pr);
      try {
        const Assembly a = assembly(p, std::string(to_string(pr)));
        const GridSpec g{Axis::x, 0.0, {-1.5e-3, 3.5e-3, 21}, {0.05e-3, 8e-3, 41}};
        const auto prof = sample_grid(a, g);
        double worst = 0.0;
        for (const auto& b : prof.B) worst = std::max(worst, std::abs(b.x));
        check("7", std::string(to_string(pr)) + "_mirror_Bx_T", worst, 0.0, 1e-7);
      } catch (const Error& e) {
        failure("7", std::string(to_string(pr)) + "_mirror", e);
      }
    }
  }

  ReproduceOptions opt_;
  Report report_;
};

}  // namespace detail

/// Runs a target, writing report.txt plus per-target artifacts to opt.out_dir.
/// Domain failures inside a target become failed checks, never exceptions.
inline Report reproduce(Target t, ReproduceOptions opt = {}) { return detail::Reproducer(std::move(opt)).run(t); }

}  // namespace halbach
