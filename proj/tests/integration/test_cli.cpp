// End-to-end checks of the homest binary plus in-process checks of config resolution.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "config.hpp"

namespace fs = std::filesystem;
using namespace homest::cli;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("homest_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + HOMEST_BINARY + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Rows of a CSV written by the tool, comment lines dropped; the first row is the header.
std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return k;
  }
  ADD_FAILURE() << "no column " << name;
  return 0;
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
  const ExperimentConfig d;
  const Json j = to_json(d);
  EXPECT_EQ(to_json(from_json(j)), j);
  EXPECT_EQ(from_json(Json::object()).simulation.n_traj, d.simulation.n_traj);
}

TEST(Config, RejectsUnknownKeysAndWrongTypes) {
  try {
    from_json(Json::parse(R"({"model": {"omegaa": 1}})"));
    FAIL() << "accepted an unknown key";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("model.omegaa"), std::string::npos) << e.what();
  }
  EXPECT_THROW(from_json(Json::parse(R"({"simulation": {"n_traj": -1}})")), ConfigError);
  EXPECT_THROW(from_json(Json::parse(R"({"simulation": {"n_traj": 2.5}})")), ConfigError);
  EXPECT_THROW(from_json(Json::parse(R"({"model": {"omega": "big"}})")), ConfigError);
  EXPECT_THROW(from_json(Json::parse(R"({"model": {"efficiency": 1.5}})")), ConfigError);
  EXPECT_THROW(from_json(Json::parse(R"({"analysis": {"checkpoints": [1, "x"]}})")), ConfigError);
  EXPECT_THROW(from_json(Json::parse(R"({"output": {"format": "xml"}})")), ConfigError);
}

TEST(Config, ResolutionOrder) {
  const fs::path dir = scratch("resolve");
  fs::create_directories(dir);
  const fs::path file = dir / "c.json";
  std::ofstream(file) << R"({"model": {"omega": 2.0, "phase": 0.5}, "workers": 3})";
  ::setenv("HOMEST_WORKERS", "2", 1);
  const ExperimentConfig c = resolve_config(file, {"model.omega=3", "output.format=json"}, "elsewhere");
  ::unsetenv("HOMEST_WORKERS");
  EXPECT_EQ(c.model.omega, 3.0);
  EXPECT_EQ(c.model.phase, 0.5);
  EXPECT_EQ(c.workers, 2u);
  EXPECT_EQ(c.output.format, "json");
  EXPECT_EQ(c.output.directory, "elsewhere");
  EXPECT_THROW(resolve_config(file, {"model.omega"}, ""), ConfigError);
  EXPECT_THROW(resolve_config(file, {"nope.x=1"}, ""), ConfigError);
}

TEST(Binary, SimulateWritesCompleteDeterministicOutput) {
  const fs::path a = scratch("sim_a");
  const std::string args = "simulate --set simulation.n_traj=3 --set simulation.duration=1 --out " + a.string();
  ASSERT_EQ(run(args), 0);
  for (const char* f : {"trajectories.csv", "summary.json", "config.resolved.json"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
  }
  for (const auto& e : fs::directory_iterator(a)) EXPECT_NE(e.path().extension(), ".partial");
  const auto rows = read_csv(a / "trajectories.csv");
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.size(), 1u + 3u * 1000u);
  EXPECT_EQ(rows[0][0], "stream");

  const std::string first = slurp(a / "trajectories.csv");
  ASSERT_EQ(run(args), 0);
  EXPECT_TRUE(slurp(a / "trajectories.csv") == first);
  // the worker count is part of the embedded config line, so compare the data only
  ASSERT_EQ(run(args, "HOMEST_WORKERS=1"), 0);
  EXPECT_TRUE(read_csv(a / "trajectories.csv") == rows);

  // the resolved config replays the run
  const fs::path b = scratch("sim_b");
  ASSERT_EQ(run("simulate --config " + (a / "config.resolved.json").string() + " --out " + b.string()), 0);
  EXPECT_TRUE(read_csv(b / "trajectories.csv") == rows);
}

TEST(Binary, ExitCodes) {
  const fs::path d = scratch("codes");
  EXPECT_EQ(run("simulate --set model.omegaa=1 --out " + d.string()), 2);
  EXPECT_FALSE(fs::exists(d));
  EXPECT_EQ(run("correlate --set analysis.dtau=0.0333 --set simulation.n_traj=2 --out " + d.string()), 2);
  EXPECT_FALSE(fs::exists(d));
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("simulate --config /nonexistent.json"), 2);
  EXPECT_EQ(run("simulate --set simulation.duration=0.5 --out /proc/homest_nope"), 4);
  EXPECT_EQ(run("spectrum --print-config"), 0);
  EXPECT_FALSE(fs::exists("out/spectrum.csv"));
}

TEST(Binary, SweepPicksQuadratureAtResonantDrive) {
  const fs::path d = scratch("sweep");
  ASSERT_EQ(run("sweep --set analysis.sweep.omegas=[1.0] --set analysis.sweep.phase_points=33 --out " + d.string()), 0);
  const auto rows = read_csv(d / "sweep_argmax.csv");
  ASSERT_EQ(rows.size(), 2u);
  const double phase = std::stod(rows[1][column(rows[0], "phase")]);
  const double cell = std::numbers::pi / 32.0;
  EXPECT_LE(std::abs(phase - std::numbers::pi / 2), cell + 1e-12);
  const auto sweep = read_csv(d / "sweep.csv");
  EXPECT_EQ(sweep.size(), 1u + 33u);
}

TEST(Binary, FisherReportIsConsistent) {
  const fs::path d = scratch("fisher");
  ASSERT_EQ(run("fisher --set simulation.n_traj=50 --set simulation.duration=2 --set analysis.checkpoints=[1,2] --out " +
                d.string()),
            0);
  const auto rows = read_csv(d / "fisher.csv");
  ASSERT_EQ(rows.size(), 3u);
  const auto& h = rows[0];
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double t = std::stod(rows[r][column(h, "time")]);
    EXPECT_TRUE(std::isfinite(std::stod(rows[r][column(h, "estimate")])));
    EXPECT_NEAR(std::stod(rows[r][column(h, "qfi_reference")]), 4.0 * t, 1e-12);
  }
  EXPECT_TRUE(fs::exists(d / "summary.json"));
}

TEST(Binary, BayesCorrelateSpectrumRun) {
  const fs::path b = scratch("bayes");
  ASSERT_EQ(run("bayes --set simulation.n_traj=2 --set simulation.duration=2 --set analysis.grid.points=21 "
                "--set analysis.checkpoints=[0,1,2] --out " + b.string()),
            0);
  EXPECT_EQ(read_csv(b / "posterior_summary.csv").size(), 1u + 2u * 3u);

  const fs::path c = scratch("correlate");
  ASSERT_EQ(run("correlate --set simulation.n_traj=4 --set simulation.duration=5 --set analysis.lags=10 --out " +
                c.string()),
            0);
  EXPECT_EQ(read_csv(c / "correlation.csv").size(), 11u);
  EXPECT_EQ(read_csv(c / "covariance.csv").size(), 1u + 11u * 11u);

  const fs::path s = scratch("spectrum");
  ASSERT_EQ(run("spectrum --set analysis.omega_points=101 --set output.format=json --out " + s.string()), 0);
  const Json j = Json::parse(slurp(s / "spectrum.json"));
  EXPECT_EQ(j["columns"]["omega"].size(), 101u);
  EXPECT_EQ(j["schema"], 1);
}
