#include <sys/wait.h>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fringemag/csv.hpp"

namespace {

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string command = std::string(FRINGEMAG_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buffer{};
  std::size_t n = 0;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) r.out.append(buffer.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "fringemag_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, VisibilityAtZeroCurrentWithoutBackground) {
  const CliRun r = run("visibility -c cs_coils.cfg --current 0 --background-gradient 0");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out).at("v_over_v0").get<double>(), 1.0);
}

TEST(Cli, CFactorReportsBothUnits) {
  const CliRun r = run("c-factor -c cs_coils.cfg --current 1");
  ASSERT_EQ(r.status, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  const double gm = j.at("permanent").at("G_m").get<double>();
  EXPECT_NEAR(gm, 10.3, 1.03);
  EXPECT_NEAR(j.at("permanent").at("T_m").get<double>(), gm * 1e-4, 1e-12);
}

TEST(Cli, ReproduceCesiumFigure) {
  const auto dir = scratch() / "fig2";
  const CliRun r = run("reproduce fig2-cs --out-dir " + dir.string());
  ASSERT_EQ(r.status, 0) << r.out;
  const auto curve = fringemag::read_curve(dir / "fig2_cs_380.csv");
  bool found = false;
  for (std::size_t i = 0; i < curve.abscissa.size(); ++i) {
    if (std::abs(curve.abscissa[i] - 4.25) < 1e-9) {
      EXPECT_NEAR(curve.v_over_v0[i], 0.125, 0.005);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_TRUE(std::filesystem::exists(dir / "fig2_cs_270.csv"));
}

TEST(Cli, OutputIsDeterministic) {
  const std::string args = "visibility -c tempo_magnet.cfg --threads 2 -o -";
  const CliRun a = run(args);
  const CliRun b = run(args);
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.out.empty());
}

TEST(Cli, FringeFitReport) {
  const auto path = scratch() / "scan.csv";
  {
    std::ofstream out(path);
    out << "position_m,counts\n";
    for (int i = 0; i < 40; ++i) {
      const double x = 2 * 266e-9 * i / 40;
      out << x << "," << 100 + 20 * std::sin(2 * 3.141592653589793 * x / 266e-9 + 0.3) << "\n";
    }
  }
  const CliRun r = run("fringe-fit " + path.string());
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NEAR(nlohmann::json::parse(r.out).at("visibility").get<double>(), 0.2, 1e-4);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("visibility --current 1").status, 1);
  EXPECT_EQ(run("reproduce fig9").status, 1);
  const auto bad = scratch() / "bad.cfg";
  std::ofstream(bad) << "experiment: x\nunknown_key: 1\n";
  EXPECT_EQ(run("visibility -c " + bad.string() + " --current 1").status, 2);
  EXPECT_EQ(run("fringe-fit /nonexistent/scan.csv").status, 4);
  EXPECT_EQ(run("visibility -c /nonexistent/none.cfg --current 1").status, 4);
}
