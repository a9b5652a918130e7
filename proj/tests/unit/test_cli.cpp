#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using namespace scottlab;
using namespace scottlab::cli;

namespace {

RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "scottlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_config(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("scottlab_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Cli, ParsesFlags) {
  const auto c = parse({"spectrum", "--gamma", "0.3,0.5", "--ell", "1", "--nmax", "2",
                        "--potential", "exp:1", "--lambda", "0.01", "-q"});
  EXPECT_EQ(c.command, "spectrum");
  EXPECT_EQ(c.gammas, (std::vector<double>{0.3, 0.5}));
  EXPECT_EQ(*c.ell, 1);
  EXPECT_EQ(*c.n_max, 2);
  ASSERT_EQ(c.potentials.size(), 1u);
  EXPECT_EQ(c.potentials[0], TestPotential::exponential(1.0));
  EXPECT_TRUE(c.quiet);
}

TEST(Cli, FlagsOverrideConfigFile) {
  const auto dir = scratch("config");
  const auto file = dir / "run.conf";
  std::ofstream(file) << "# comment\ngamma = 0.3\nnmax=4  # trailing\nsymbol=schroedinger\n";
  const auto c = parse({"spectrum", "--config", file.string(), "--gamma", "0.5"});
  EXPECT_EQ(c.gammas, (std::vector<double>{0.5}));
  EXPECT_EQ(*c.n_max, 4);
  EXPECT_EQ(c.symbol, "schroedinger");
  std::filesystem::remove_all(dir);
}

TEST(Cli, RejectsUnknownConfigKey) {
  const auto dir = scratch("badkey");
  const auto file = dir / "run.conf";
  std::ofstream(file) << "gamma=0.5\ncolour=blue\n";
  try {
    parse({"spectrum", "--config", file.string()});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST(Cli, RejectsSupercriticalCoupling) {
  try {
    parse({"spectrum", "--gamma", "0.7"});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("2/pi"), std::string::npos);
  }
  EXPECT_THROW(parse({"frobnicate"}), ConfigError);
  EXPECT_THROW(parse({"spectrum", "--symbol", "dirac"}), ConfigError);
  EXPECT_THROW(parse({"spectrum", "--points", "10"}), ConfigError);
  EXPECT_THROW(parse({"spectrum", "--gamma", "abc"}), ConfigError);
}

TEST(Cli, GridSelection) {
  RunConfig c;
  c.command = "spectrum";
  const auto g = grid_for(c, 0.5);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.1);
  EXPECT_NEAR(g.r_max(), 400.0, 1e-9);
  c.r_max = 40.0;
  c.points = 399;
  EXPECT_NEAR(grid_for(c, 0.5).spacing(), 0.1, 1e-12);
}

TEST(Cli, SpectrumCsv) {
  const auto c = parse({"spectrum", "--gamma", "0.5", "--ell", "0", "--nmax", "1", "--rmax", "80",
                        "--points", "799", "--symbol", "schroedinger", "-q"});
  std::ostringstream out, log;
  ASSERT_EQ(run(c, out, log), 0) << log.str();
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "symbol,gamma,ell,potential,lambda,n,energy,schroedinger_energy,localization");
  EXPECT_EQ(lines[1].rfind("schroedinger,0.5,0,", 0), 0u);
}

TEST(Cli, DensityBlocks) {
  const auto c = parse({"density", "--gamma", "0.5", "--ellmax", "2", "--nmax", "1", "--rmax",
                        "120", "--points", "399", "-q"});
  std::ostringstream out, log;
  ASSERT_EQ(run(c, out, log), 0) << log.str();
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 1u + 4u * 399u);
  EXPECT_EQ(lines[0], "r,rho,ell,n_max,gamma");
  std::map<std::string, int> blocks;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> fields;
    std::stringstream ss(lines[i]);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    ASSERT_EQ(fields.size(), 5u);
    ++blocks[fields[2]];
  }
  EXPECT_EQ(blocks["0"], 399);
  EXPECT_EQ(blocks["1"], 399);
  EXPECT_EQ(blocks["2"], 399);
  EXPECT_EQ(blocks["total"], 399);
}

TEST(Cli, WarmCacheIsReportedAndIdentical) {
  const auto dir = scratch("cache");
  auto c = parse({"spectrum", "--gamma", "0.5", "--ell", "1", "--nmax", "2", "--rmax", "40",
                  "--points", "399", "--cache-dir", dir.string()});
  std::ostringstream cold, cold_log, warm, warm_log;
  ASSERT_EQ(run(c, cold, cold_log), 0);
  ASSERT_EQ(run(c, warm, warm_log), 0);
  EXPECT_EQ(cold.str(), warm.str());
  EXPECT_NE(warm_log.str().find("cache hit"), std::string::npos);
  EXPECT_NE(warm_log.str().find("0 computed"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Cli, AtomicOutputFile) {
  const auto dir = scratch("out");
  const auto path = dir / "spectrum.csv";
  const auto c = parse({"spectrum", "--gamma", "0.5", "--ell", "0", "--nmax", "0", "--rmax", "40",
                        "--points", "399", "--out", path.string(), "-q"});
  std::ostringstream out, log;
  ASSERT_EQ(run(c, out, log), 0);
  EXPECT_TRUE(out.str().empty());
  EXPECT_TRUE(std::filesystem::exists(path));
  std::filesystem::remove_all(dir);
}
