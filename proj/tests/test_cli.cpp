#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using rocketopt::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "rocketopt");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("rocketopt_cli_" + name);
  fs::remove_all(d);
  return d.string();
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path);
  return nlohmann::json::parse(f);
}

}  // namespace

TEST(Cli, InvalidInputExitsTwo) {
  EXPECT_EQ(call({"ocp0", "tc5"}).code, 2);
  EXPECT_EQ(call({"solve-indirect", "tc1", "v0=abc"}).code, 2);
  EXPECT_EQ(call({"solve-indirect", "tc1", "nope=1"}).code, 2);
  EXPECT_EQ(call({"frobnicate"}).code, 2);
  EXPECT_EQ(call({}).code, 2);
  const Outcome o = call({"ocp0", "tc5"});
  const auto j = nlohmann::json::parse(o.err);
  EXPECT_EQ(j.at("error"), "invalid-input");
}

TEST(Cli, Ocp0PrintsClosedForm) {
  const Outcome o = call({"ocp0", "tc1", "v0=1000"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto j = nlohmann::json::parse(o.out);
  EXPECT_TRUE(j.at("checks").at("passed").get<bool>());
  EXPECT_GT(j.at("t_f").get<double>(), 0.0);
  EXPECT_EQ(j.at("e_star").size(), 3u);
}

TEST(Cli, SolveIndirectWritesArtifactsDeterministically) {
  const std::string a = fresh_dir("a"), b = fresh_dir("b");
  const Outcome oa = call({"solve-indirect", "tc1", "v0=1000", "-o", a});
  const Outcome ob = call({"solve-indirect", "tc1", "v0=1000", "-o", b});
  ASSERT_EQ(oa.code, 0) << oa.err;
  ASSERT_EQ(ob.code, 0) << ob.err;
  for (const char* f : {"trajectory.csv", "events.csv", "summary.json"}) {
    EXPECT_TRUE(fs::exists(fs::path(a) / f)) << f;
  }
  auto ja = read_json(a + "/summary.json"), jb = read_json(b + "/summary.json");
  EXPECT_TRUE(ja.at("lambda3_star").is_null());
  EXPECT_EQ(ja.at("switch_times").size(), 2u);
  ja.erase("wall_time_s");
  jb.erase("wall_time_s");
  EXPECT_EQ(ja.dump(), jb.dump());

  // analyze re-reads the CSV and finds the same events.
  const Outcome an = call({"analyze", a + "/trajectory.csv"});
  ASSERT_EQ(an.code, 0) << an.err;
  const auto rep = nlohmann::json::parse(an.out);
  ASSERT_EQ(rep.at("events").size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(rep["events"][i]["t"].get<double>(),
                ja["switch_times"][i].get<double>(), 1e-6);
    EXPECT_EQ(rep["events"][i]["classification"], "order-1");
  }
  EXPECT_FALSE(rep.at("chattering").at("flagged").get<bool>());
}

TEST(Cli, ConfigFileIsRead) {
  const std::string d = fresh_dir("cfg");
  fs::create_directories(d);
  std::ofstream(d + "/run.cfg") << "scenario = tc3\nv0 = 1500\n";
  const Outcome o = call({"ocp0", "-c", d + "/run.cfg"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(nlohmann::json::parse(o.out).at("scenario"), "tc3");
  EXPECT_EQ(call({"ocp0", "-c", d + "/missing.cfg"}).code, 2);
}

TEST(Cli, StallExitsThreeWithSubOptimalOutput) {
  const std::string d = fresh_dir("stall");
  const Outcome o = call({"solve-indirect", "tc2", "v0=2000", "-o", d});
  ASSERT_EQ(o.code, 3) << o.err;
  const auto err = nlohmann::json::parse(o.err);
  EXPECT_EQ(err.at("error"), "continuation-stall");
  EXPECT_EQ(err.at("stage"), 3);
  EXPECT_TRUE(err.at("control_continuous").get<bool>());
  EXPECT_TRUE(fs::exists(fs::path(d) / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(fs::path(d) / "error.json"));
  const auto s = read_json(d + "/summary.json");
  EXPECT_FALSE(s.at("lambda3_star").is_null());
  EXPECT_LT(s.at("lambda3_star").get<double>(), 1.0);
}
