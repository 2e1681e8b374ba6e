#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "halbach/io.hpp"
#include "halbach/reproduce.hpp"

using namespace halbach;
namespace fs = std::filesystem;

namespace {

void expect_config_error(auto&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected ConfigParse";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigParse) << e.what();
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("halbach_test_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(Io, NineSignificantDigitsAndNoNegativeZero) {
  EXPECT_EQ(io::fmt9(-0.0), "0");
  EXPECT_EQ(io::fmt9(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(io::fmt9(6.40870654321e-20), "6.40870654e-20");
  EXPECT_EQ(io::fmt9(1600.0), "1600");
}

TEST(Io, LengthUnits) {
  EXPECT_DOUBLE_EQ(io::parse_length(io::json("1.5mm"), "x"), 1.5e-3);
  EXPECT_DOUBLE_EQ(io::parse_length(io::json("500 um"), "x"), 500e-6);
  EXPECT_DOUBLE_EQ(io::parse_length(io::json("0.002m"), "x"), 0.002);
  EXPECT_DOUBLE_EQ(io::parse_length(io::json(0.003), "x"), 0.003);
  expect_config_error([] { io::parse_length(io::json("3 furlongs"), "x"); });
  expect_config_error([] { io::parse_length(io::json("mm"), "x"); });
  expect_config_error([] { io::parse_length(io::json(true), "x"); });
  EXPECT_DOUBLE_EQ(io::parse_angle(io::json("90deg"), "a"), std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(io::parse_flux(io::json("60G"), "b"), 6e-3);
}

TEST(Io, DesignLockRoundTrip) {
  for (Preset pr : {Preset::naive_s2, Preset::rhombic_s3, Preset::optimized_s3_1}) {
    const DesignParams p = preset_params(pr);
    EXPECT_EQ(io::parse_design(io::json::parse(io::design_lock_text(p))), p);
  }
  DesignParams odd = preset_params(Preset::optimized_s3_1);
  odd.separation = 2.0e-3 / 3.0 + 1.1e-3;
  odd.axial_offset_upper = -1e-4 / 7.0;
  odd.rotation_step = 0.1 + 1e-17;
  odd.rotation_plane = RotationPlane::yz;
  EXPECT_EQ(io::parse_design(io::json::parse(io::design_lock_text(odd))), odd);
}

TEST(Io, DesignOverridesPreset) {
  const auto j = io::json::parse(R"({"preset": "naive_s2", "separation": "2.5mm", "rotation_step": "45deg",
                                     "cuboid_size": {"width_x": "0.5mm"}, "rotation_plane": "yz"})");
  const DesignParams p = io::parse_design(j);
  EXPECT_EQ(p.center_style, CenterStyle::cuboid);
  EXPECT_DOUBLE_EQ(p.separation, 2.5e-3);
  EXPECT_EQ(p.rotation_plane, RotationPlane::yz);
}

TEST(Io, DesignRejectsBadInput) {
  expect_config_error([] { io::parse_design(io::json::parse(R"({"sepration": 1})")); });
  expect_config_error([] { io::parse_design(io::json::parse(R"({"preset": "nope"})")); });
  expect_config_error([] { io::parse_design(io::json::parse(R"({"n_segments": 8})")); });
  expect_config_error([] { io::parse_design(io::json::parse(R"({"rotation_plane": "xz"})")); });
  expect_config_error([] { io::parse_design(io::json::parse("[1, 2]")); });
}

TEST(Io, FileErrors) {
  try {
    io::read_json_file("/nonexistent/dir/file.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FileIO);
  }
  const fs::path d = scratch_dir("badjson");
  fs::create_directories(d);
  io::write_text_file((d / "bad.json").string(), "{ not json");
  expect_config_error([&] { io::read_json_file((d / "bad.json").string()); });
}

TEST(Io, ProfileCsvFormat) {
  FieldProfile prof;
  prof.positions = {{0.0, 0.5e-3, 1.6e-3}, {-0.0, 0.5e-3, 2e-3}};
  prof.B = {{-0.0, 1e-4, -2.5e-3}, {0.0, 0.0, 1.0 / 3.0}};
  std::ostringstream os;
  io::write_profile_csv(os, prof);
  EXPECT_EQ(os.str(),
            "x_mm,y_mm,z_mm,Bx_G,By_G,Bz_G,Bmag_G\n"
            "0,0.5,1.6,0,1,-25,25.019992\n"
            "0,0.5,2,0,0,3333.33333,3333.33333\n");
  prof.dBz_dz = {90.0, -1.5};
  std::ostringstream os2;
  io::write_profile_csv(os2, prof);
  EXPECT_EQ(os2.str().substr(0, os2.str().find('\n')), "x_mm,y_mm,z_mm,Bx_G,By_G,Bz_G,Bmag_G,dBz_dz_T_per_m");
}

TEST(Io, ExposureAndTraceHeaders) {
  std::ostringstream os;
  io::write_exposure_csv(os, ExposureProfile{});
  EXPECT_EQ(os.str(), "s_mm,t_us,x_mm,y_mm,z_mm,Bmag_G,F_N\n");
  std::ostringstream tr;
  io::write_trace_csv(tr, SweepResult{}, {SweepParam::separation, SweepParam::br_upper});
  EXPECT_EQ(tr.str(),
            "param_separation_mm,param_br_upper_T,gradient_T_per_m,residual_G,maxBy_G,maxBz_G,feasible,reason\n");
}

TEST(Io, NullReportKeyValue) {
  NullReport r;
  r.position = {0, 0.5e-3, 1.6e-3};
  r.distance_from_edge = 1.6e-3;
  r.axial_gradient = 90.0;
  r.residual_mag = 2e-5;
  const std::string s = io::null_report_kv(r).str();
  EXPECT_NE(s.find("distance_from_edge_mm=1.6\n"), std::string::npos);
  EXPECT_NE(s.find("gradient_T_per_m=90\n"), std::string::npos);
  EXPECT_NE(s.find("residual_G=0.2\n"), std::string::npos);
}

TEST(Io, SceneConfig) {
  const auto j = io::json::parse(R"({
    "placements": [{"design": {"preset": "naive_s2"}, "translation": ["0mm", 0, "30mm"], "yaw": 180, "label": "a"}],
    "corridors": [{"waypoints": [["-5mm", "0.5mm", "5mm"], ["5mm", "0.5mm", "5mm"]], "speed": 1.6}]})");
  const Scene s = io::parse_scene(j);
  ASSERT_EQ(s.placements.size(), 1u);
  EXPECT_EQ(s.placements[0].yaw_quarter_turns, 2);
  EXPECT_DOUBLE_EQ(s.placements[0].translation.z, 30e-3);
  ASSERT_EQ(s.corridors.size(), 1u);
  expect_config_error([] { io::parse_scene(io::json::parse(R"({"placements": [{"yaw": 45}]})")); });
  const Scene nine = io::parse_scene(io::json::parse(R"({"nine_junction": {"pitch": "25mm"}})"));
  EXPECT_EQ(nine.placements.size(), 6u);
  expect_config_error([] { io::parse_scene(io::json::parse(R"({"nine_junction": {"pitch": "10mm"}})")); });
}

TEST(Io, SweepConfig) {
  const auto j = io::json::parse(R"({
    "base": {"preset": "rhombic_s3"},
    "axes": [{"param": "separation", "lower": "1.5mm", "upper": "3.5mm", "coarse_step": "0.25mm", "fine_step": "0.05mm"},
             {"param": "br_upper", "lower": 0, "upper": 1, "coarse_step": 0.1, "fine_step": 0.02}],
    "objective": {"compensable_limit": "60G", "null_window": ["0.05mm", "6mm"]},
    "descent": {"max_rounds": 2}})");
  const io::SweepConfig c = io::parse_sweep(j);
  ASSERT_EQ(c.axes.size(), 2u);
  EXPECT_DOUBLE_EQ(c.axes[0].coarse_step, 0.25e-3);
  EXPECT_DOUBLE_EQ(c.axes[1].upper, 1.0);
  EXPECT_DOUBLE_EQ(c.objective.compensable_limit, 6e-3);
  EXPECT_EQ(c.descent.max_rounds, 2);
  expect_config_error([] { io::parse_sweep(io::json::parse(R"({"axes": [{"param": "height"}]})")); });
  expect_config_error([] {
    io::parse_sweep(io::json::parse(R"({"axes": [{"param": "spacing", "lower": 2, "upper": 1,
                                                  "coarse_step": 0.1, "fine_step": 0.1}]})"));
  });
}

TEST(Reproduce, LorentzTargetPasses) {
  ReproduceOptions opt;
  opt.out_dir = scratch_dir("lorentz");
  const Report r = reproduce(Target::lorentz_s1, opt);
  ASSERT_EQ(r.checks.size(), 2u);
  EXPECT_TRUE(r.all_pass());
  EXPECT_TRUE(fs::exists(opt.out_dir / "lorentz_s1.txt"));
  EXPECT_EQ(slurp(opt.out_dir / "report.txt"), r.str());
}

TEST(Reproduce, EmptyOverrideIsStructuredFailure) {
  ReproduceOptions opt;
  opt.out_dir = scratch_dir("empty");
  opt.assembly_override = Assembly({}, "empty");
  Report r;
  ASSERT_NO_THROW(r = reproduce(Target::fig4, opt));
  EXPECT_FALSE(r.all_pass());
  ASSERT_FALSE(r.checks.empty());
  EXPECT_EQ(r.checks[0].measured, "error:NoNullFound");
}

TEST(Reproduce, TargetNames) {
  EXPECT_EQ(parse_target("fig9"), Target::fig9);
  EXPECT_EQ(parse_target("all"), Target::all);
  EXPECT_FALSE(parse_target("fig5").has_value());
}
