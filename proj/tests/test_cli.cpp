#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

/// Runs the CLI with stderr merged into stdout.
CliResult cli(const std::string& args) {
  const std::string cmd = std::string(HALBACH_CLI_PATH) + " " + args + " 2>&1";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("halbach_cli_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Cli, GridCsvContract) {
  const fs::path d = scratch("grid");
  const CliResult r = cli("--out-dir " + d.string() + " grid --preset naive_s2 --plane y=0.5mm --u=-4mm:4mm:9 --v 0.1mm:5mm:7");
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream in(d / "grid.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "x_mm,y_mm,z_mm,Bx_G,By_G,Bz_G,Bmag_G");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 9u * 7u);
  EXPECT_TRUE(fs::exists(d / "design.lock"));
}

TEST(Cli, FieldPrintsKeyValues) {
  const CliResult r = cli("--out-dir " + scratch("field").string() + " field --preset naive_s2 --point 0,0.5mm,1.6mm");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("Bmag_G="), std::string::npos);
  EXPECT_NE(r.out.find("z_mm=1.6\n"), std::string::npos);
}

TEST(Cli, ConfigErrorsExitTwo) {
  const fs::path d = scratch("cfg");
  CliResult r = cli("--out-dir " + d.string() + " field --preset bogus --point 0,1mm,1mm");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("error category=ConfigParse"), std::string::npos);
  r = cli("--out-dir " + d.string() + " field --design /nonexistent.json --point 0,1mm,1mm");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("error category=FileIO"), std::string::npos);
  r = cli("--no-such-flag");
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, DomainErrorsExitThree) {
  const CliResult r = cli("--out-dir " + scratch("dom").string() + " field --point 0,-0.5mm,-0.5mm");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("error category=PointInsideOrOnMagnet"), std::string::npos);
  EXPECT_EQ(r.out.find("terminate"), std::string::npos);
}

TEST(Cli, LineWithGradientColumn) {
  const fs::path d = scratch("line");
  const CliResult r = cli("--out-dir " + d.string() + " line --preset optimized_s3_1 --n 11 --gradient");
  ASSERT_EQ(r.code, 0) << r.out;
  const std::string csv = slurp(d / "line.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x_mm,y_mm,z_mm,Bx_G,By_G,Bz_G,Bmag_G,dBz_dz_T_per_m");
}

TEST(Cli, ReproduceLorentzAndDeterminism) {
  const fs::path a = scratch("rep_a"), b = scratch("rep_b");
  const CliResult ra = cli("--out-dir " + a.string() + " reproduce lorentz_s1");
  const CliResult rb = cli("--workers 1 --out-dir " + b.string() + " reproduce lorentz_s1");
  EXPECT_EQ(ra.code, 0) << ra.out;
  EXPECT_EQ(ra.out, rb.out);
  EXPECT_EQ(slurp(a / "lorentz_s1.txt"), slurp(b / "lorentz_s1.txt"));
}

TEST(Cli, SceneWritesCorridorCsv) {
  const fs::path d = scratch("scene");
  const CliResult r = cli("--out-dir " + d.string() + " scene --optional-arms");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("placements=8"), std::string::npos);
  EXPECT_TRUE(fs::exists(d / "scene_corridors.csv"));
}
