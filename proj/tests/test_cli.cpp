#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "hive/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hive_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome hivesim(const std::string& args) const {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + HIVESIM_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  Outcome hivesim(const std::string& sub, const fs::path& config, const fs::path& out, const std::string& extra = "") const {
    return hivesim(sub + " --config \"" + config.string() + "\" --out-dir \"" + out.string() + "\" " + extra);
  }

  fs::path write_config(const std::string& name, const json& j) const {
    const auto p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  static std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
  }

  static std::vector<std::vector<double>> rows(const fs::path& p) { return hive::io::read_numeric_csv(p); }

  fs::path dir_;
};

json worked_example() {
  return json::parse(R"({"model": {"type": "homogeneous", "zeta": {"point": 1875}, "r": 0.8, "eta": {"point": 63}},
                         "simulation": {"horizon": 30, "replications": 4, "seed": 1}})");
}

json toy_cyclic(int period) {
  json values = json::array();
  for (int i = 0; i < period; ++i) values.push_back(i % 2 == 0 ? 0.0 : 1.0);
  json j{{"model", {{"type", "cyclic"}, {"period", period}, {"profile", {{"values", values}}}, {"amplitude", 30}, {"base", 10},
                    {"r", 0.5}, {"eta", {{"point", 3}}}}},
         {"simulation", {{"horizon", 40}, {"replications", 5}, {"seed", 8}, {"extinction_threshold", 20}}}};
  return j;
}

json small_poisson() {
  return json::parse(R"({"model": {"type": "homogeneous", "zeta": {"poisson": 10}, "r": 1, "eta": {"point": 9}},
                         "simulation": {"horizon": 40, "replications": 50, "seed": 3, "extinction_threshold": 90},
                         "extinction": {"window": [20, 40], "sweep": [9, 10, 11]}})");
}

}  // namespace

TEST_F(Cli, StationaryWorkedExample) {
  const auto r = hivesim("stationary", write_config("c.json", worked_example()), dir_ / "out");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);
  EXPECT_EQ(r.out.rfind("stationary: ", 0), 0u);
  const auto j = json::parse(slurp(dir_ / "out" / "stationary.json"));
  EXPECT_EQ(j.at("mean").get<double>(), 96000.0);
  EXPECT_NEAR(j.at("variance").get<double>(), 64 * 1875 * 0.8 * 0.2, 1e-6);
  EXPECT_TRUE(j.at("poisson_mean").is_null());
  EXPECT_EQ(first_line(dir_ / "out" / "stationary_pmf.csv"), "k,prob");
  EXPECT_EQ(first_line(dir_ / "out" / "renewal.csv"), "n,H");
  const auto pmf = rows(dir_ / "out" / "stationary_pmf.csv");
  double total = 0, mean = 0;
  for (const auto& row : pmf) {
    total += row[1];
    mean += row[0] * row[1];
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(mean, 96000.0, 1e-6 * 96000);
  for (std::size_t i = 1; i < pmf.size(); ++i) EXPECT_EQ(pmf[i][0], pmf[i - 1][0] + 1);
}

TEST_F(Cli, StationaryEmptyColony) {
  auto c = worked_example();
  c["model"]["r"] = 0;
  ASSERT_EQ(hivesim("stationary", write_config("c.json", c), dir_ / "out").code, 0);
  const auto j = json::parse(slurp(dir_ / "out" / "stationary.json"));
  EXPECT_EQ(j.at("mean").get<double>(), 0.0);
  EXPECT_EQ(j.at("variance").get<double>(), 0.0);
  EXPECT_EQ(slurp(dir_ / "out" / "stationary_pmf.csv"), "k,prob\n0,1\n");
}

TEST_F(Cli, StationaryPoissonMeanAndRandomInterval) {
  auto c = small_poisson();
  ASSERT_EQ(hivesim("stationary", write_config("c.json", c), dir_ / "a").code, 0);
  EXPECT_NEAR(json::parse(slurp(dir_ / "a" / "stationary.json")).at("poisson_mean").get<double>(), 100.0, 1e-9);
  c["model"]["tau"] = {{"pmf", {{"min_value", 1}, {"probs", {0.5, 0.5}}}}};
  ASSERT_EQ(hivesim("stationary", write_config("c.json", c), dir_ / "b").code, 0);
  EXPECT_FALSE(fs::exists(dir_ / "b" / "stationary_pmf.csv"));
  EXPECT_NEAR(json::parse(slurp(dir_ / "b" / "stationary.json")).at("mean").get<double>(), 100.0 / 1.5, 1e-9);
}

TEST_F(Cli, ExitCodes) {
  auto c = worked_example();
  c["model"]["tau"] = {{"point", 2}};
  const auto periodic = hivesim("stationary", write_config("p.json", c), dir_ / "out");
  EXPECT_EQ(periodic.code, 3);
  EXPECT_NE(periodic.err.find("PeriodicSupport"), std::string::npos) << periodic.err;

  c = worked_example();
  c["simulation"]["horizon"] = 0;
  EXPECT_EQ(hivesim("simulate", write_config("h.json", c), dir_ / "out").code, 2);

  c = worked_example();
  c["model"]["flavour"] = "sweet";
  EXPECT_EQ(hivesim("stationary", write_config("k.json", c), dir_ / "out").code, 2);

  EXPECT_EQ(hivesim("stationary", write_config("cyc.json", toy_cyclic(4)), dir_ / "out").code, 2);
  EXPECT_EQ(hivesim("simulate --out-dir x").code, 2);
  EXPECT_EQ(hivesim("frobnicate").code, 2);
  EXPECT_EQ(hivesim("stationary", dir_ / "missing.json", dir_ / "out").code, 2);
  EXPECT_EQ(hivesim("extinction", write_config("noext.json", worked_example()), dir_ / "out").code, 2);

  auto e = small_poisson();
  e["simulation"].erase("extinction_threshold");
  EXPECT_EQ(hivesim("extinction", write_config("nothr.json", e), dir_ / "out").code, 3);
}

TEST_F(Cli, CyclicToyAndConstantProfiles) {
  ASSERT_EQ(hivesim("cyclic", write_config("c.json", toy_cyclic(7)), dir_ / "a").code, 0);
  EXPECT_EQ(first_line(dir_ / "a" / "mean_profile.csv"), "day,mean");
  EXPECT_EQ(first_line(dir_ / "a" / "poisson_mean.csv"), "day,poisson_mean");
  const auto profile = rows(dir_ / "a" / "mean_profile.csv");
  ASSERT_EQ(profile.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(profile[i][0], static_cast<double>(i + 1));

  auto flat = toy_cyclic(5);
  flat["model"]["amplitude"] = 0;
  ASSERT_EQ(hivesim("cyclic", write_config("f.json", flat), dir_ / "b").code, 0);
  for (const auto& row : rows(dir_ / "b" / "mean_profile.csv")) EXPECT_NEAR(row[1], 10.0 * 4, 1e-9);
}

TEST_F(Cli, CyclicRecipeVariantsOrderedByLifetime) {
  ASSERT_EQ(hivesim("cyclic", fs::path(RECIPES_DIR) / "fig2.json", dir_ / "out").code, 0);
  double prev = 0.0;
  for (const char* label : {"xi50", "xi60", "xi70", "xi80"}) {
    const auto path = dir_ / "out" / ("mean_profile_" + std::string(label) + ".csv");
    ASSERT_TRUE(fs::exists(path)) << path;
    const auto r = rows(path);
    ASSERT_EQ(r.size(), 365u);
    double peak = 0.0;
    for (const auto& row : r) peak = std::max(peak, row[1]);
    EXPECT_GT(peak, prev) << label;
    prev = peak;
  }
}

TEST_F(Cli, SimulateOutputsAndDeterminism) {
  auto c = toy_cyclic(6);
  c["simulation"]["swarm"] = {{"threshold", 60}, {"leave_probability", 0.5}};
  const auto cfg = write_config("c.json", c);
  ASSERT_EQ(hivesim("simulate", cfg, dir_ / "a").code, 0);
  ASSERT_EQ(hivesim("simulate", cfg, dir_ / "b", "--threads 3").code, 0);
  ASSERT_EQ(hivesim("simulate", cfg, dir_ / "c", "--seed-override 99").code, 0);
  for (const char* f : {"traces.csv", "summary.csv", "summary.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  EXPECT_NE(slurp(dir_ / "a" / "traces.csv"), slurp(dir_ / "c" / "traces.csv"));

  EXPECT_EQ(first_line(dir_ / "a" / "traces.csv"), "replication,day,count,swarmed,extinct");
  EXPECT_EQ(first_line(dir_ / "a" / "summary.csv"), "day,mean,sd");
  const auto traces = rows(dir_ / "a" / "traces.csv");
  ASSERT_EQ(traces.size(), 5u * 40u);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    EXPECT_EQ(traces[i][0], static_cast<double>(i / 40));
    EXPECT_EQ(traces[i][1], static_cast<double>(i % 40 + 1));
    EXPECT_GE(traces[i][2], 0.0);
    if (i % 40 > 0 && traces[i - 1][4] == 1.0) {
      EXPECT_EQ(traces[i][4], 1.0);
    }
  }
  const auto summary = rows(dir_ / "a" / "summary.csv");
  ASSERT_EQ(summary.size(), 40u);
  for (std::size_t d = 0; d < 40; ++d) {
    double m = 0;
    for (std::size_t rep = 0; rep < 5; ++rep) m += traces[rep * 40 + d][2] / 5.0;
    EXPECT_NEAR(summary[d][1], m, 1e-9);
  }
  const auto j = json::parse(slurp(dir_ / "a" / "summary.json"));
  EXPECT_EQ(j.at("days"), 40);
  EXPECT_GE(j.at("extinction_fraction").get<double>(), 0.0);
  EXPECT_LE(j.at("extinction_fraction").get<double>(), 1.0);
  EXPECT_TRUE(j.contains("swarm_events"));
}

TEST_F(Cli, SimulateSwarmRecipeRecovers) {
  ASSERT_EQ(hivesim("simulate", fs::path(RECIPES_DIR) / "fig5.json", dir_ / "out").code, 0);
  const auto j = json::parse(slurp(dir_ / "out" / "summary.json"));
  EXPECT_GE(j.at("swarm_events").get<int>(), 1);
  ASSERT_TRUE(j.at("recovery").is_object());
  EXPECT_EQ(j.at("recovery").at("recovered"), j.at("recovery").at("events"));
  EXPECT_LE(j.at("recovery").at("max_delay").get<int>(), 81);
  const auto traces = rows(dir_ / "out" / "traces.csv");
  EXPECT_EQ(traces.size(), 450u);
}

TEST_F(Cli, ExtinctionTable) {
  auto c = small_poisson();
  ASSERT_EQ(hivesim("extinction", write_config("c.json", c), dir_ / "a").code, 0);
  EXPECT_EQ(first_line(dir_ / "a" / "extinction.csv"), "L,probability,std_error,analytic_lower_bound");
  const auto t = rows(dir_ / "a" / "extinction.csv");
  ASSERT_EQ(t.size(), 3u);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(t[i][0], 9.0 + static_cast<double>(i));
    EXPECT_GE(t[i][1], 0.0);
    EXPECT_LE(t[i][1], 1.0);
    EXPECT_FALSE(std::isnan(t[i][3]));
    if (i > 0) {
      EXPECT_LE(t[i][1], t[i - 1][1] + 2 * std::hypot(t[i][2], t[i - 1][2]));
    }
  }

  c["extinction"]["threshold"] = 0;
  ASSERT_EQ(hivesim("extinction", write_config("z.json", c), dir_ / "b").code, 0);
  for (const auto& row : rows(dir_ / "b" / "extinction.csv")) EXPECT_EQ(row[1], 0.0);

  c["extinction"]["sweep"] = {10};
  ASSERT_EQ(hivesim("extinction", write_config("one.json", c), dir_ / "c").code, 0);
  EXPECT_EQ(rows(dir_ / "c" / "extinction.csv").size(), 1u);

  auto cyc = toy_cyclic(6);
  cyc["extinction"] = {{"window", {10, 40}}, {"sweep", {5, 50}}};
  ASSERT_EQ(hivesim("extinction", write_config("cyc.json", cyc), dir_ / "d").code, 0);
  const auto ct = rows(dir_ / "d" / "extinction.csv");
  ASSERT_EQ(ct.size(), 2u);
  EXPECT_GE(ct[0][1], ct[1][1]);
}

TEST_F(Cli, ValidateReport) {
  const auto clean = hivesim("validate --out-dir \"" + (dir_ / "a").string() + "\"");
  ASSERT_EQ(clean.code, 0) << clean.out << clean.err;
  const auto report = json::parse(slurp(dir_ / "a" / "validation.json"));
  ASSERT_GE(report.at("checks").size(), 10u);
  for (const auto& c : report.at("checks")) {
    EXPECT_TRUE(c.at("passed").get<bool>()) << c.dump();
    EXPECT_FALSE(c.at("name").get<std::string>().empty());
  }

  const auto faulty = write_config("f.json", json::parse(R"({"validation": {"renewal_perturbation": 0.001}})"));
  const auto bad = hivesim("validate", faulty, dir_ / "b");
  EXPECT_EQ(bad.code, 1);
  bool variance_failed = false;
  const auto perturbed = json::parse(slurp(dir_ / "b" / "validation.json"));
  for (const auto& c : perturbed.at("checks"))
    if (c.at("name") == "variance_enumeration") variance_failed = !c.at("passed").get<bool>();
  EXPECT_TRUE(variance_failed);
}

TEST_F(Cli, DensityCurvesIntegrateToOne) {
  ASSERT_EQ(hivesim("density", fs::path(RECIPES_DIR) / "fig1.json", dir_ / "out").code, 0);
  for (const char* omega : {"10", "20", "30", "40"}) {
    const auto path = dir_ / "out" / ("density_" + std::string(omega) + ".csv");
    ASSERT_TRUE(fs::exists(path)) << path;
    EXPECT_EQ(first_line(path), "x,density");
    const auto r = rows(path);
    double area = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) area += 0.5 * (r[i][0] - r[i - 1][0]) * (r[i][1] + r[i - 1][1]);
    EXPECT_NEAR(area, 1.0, 0.01) << omega;
  }
}
