#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "shiproll/cli.hpp"
#include "support.hpp"

using namespace shiproll;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "shiproll");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path write_config(const fs::path& dir, const Json& j, const std::string& name = "config.json") {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::set<std::string> listing(const fs::path& dir) {
  std::set<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) out.insert(fs::relative(e.path(), dir).string());
  return out;
}

Json small_sim(std::size_t n_paths = 8, double t_end = 20.0) {
  return Json{{"n_paths", n_paths}, {"t_end", t_end}, {"dt", 0.01}, {"seed", 11}, {"record_stride", 10}};
}

Json linear_fpk_config() {
  return Json{{"ship", {{"lambda1", 0.2}, {"lambda2", 0.0}, {"c1", 1.0}, {"c3", -1.0}, {"c5", 0.0}, {"phi_v", 1.0}}},
              {"fpk2d", {{"n1", 64}, {"n2", 64}, {"t_end", 60.0}, {"sample_every", 0.5}}}};
}

}  // namespace

TEST(Cli, VersionFlag) {
  const CliResult r = run({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("shiproll 0.1.0"), std::string::npos);
  EXPECT_NE(r.out.find("config schema 1"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"simulate"}).code, 2);
  EXPECT_EQ(run({"launch", "--config", "x", "--out", "y"}).code, 2);
}

TEST(Cli, MissingConfigNamesThePath) {
  const fs::path dir = test::scratch_dir("cli_missing");
  const CliResult r = run({"simulate", "--config", (dir / "nope.json").string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nope.json"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, InvalidConfigsExitTwo) {
  const fs::path dir = test::scratch_dir("cli_invalid");
  const fs::path zero = write_config(dir, Json{{"sim", {{"n_paths", 0}}}}, "zero.json");
  CliResult r = run({"simulate", "--config", zero.string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("n_paths"), std::string::npos) << r.err;

  const fs::path unknown = write_config(dir, Json{{"ship", {{"lambda9", 1.0}}}}, "unknown.json");
  r = run({"simulate", "--config", unknown.string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("lambda9"), std::string::npos) << r.err;

  std::ofstream(dir / "broken.json") << "{\"ship\": ";
  EXPECT_EQ(run({"simulate", "--config", (dir / "broken.json").string(), "--out", (dir / "out").string()}).code, 2);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, FitFilterRoundTrip) {
  const fs::path dir = test::scratch_dir("cli_fit");
  const FilterParams truth{0.9216, 0.6144, 2.1568, 0.56, 0.3};
  SpectrumSamples target{log_spaced(0.1, 3.0, 50), {}};
  for (double w : target.omegas) target.values.push_back(filter_gain_sq(truth, w));
  write_spectrum_csv(dir / "target.csv", target);
  const FilterParams start{truth.v0 * 1.05, truth.v1 * 0.95, truth.v2 * 1.04, truth.v3 * 0.96, truth.gamma * 1.05};
  const fs::path cfg = write_config(dir, Json{{"filter", start}, {"spectrum", {{"init_from_config", true}}}});
  const CliResult r = run({"fit-filter", "--config", cfg.string(), "--target", (dir / "target.csv").string(), "--out",
                     (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err << r.out;
  const Json rep = read_json_file(dir / "out" / "fit_report.json");
  EXPECT_LT(rep.at("relative_rms_error").get<double>(), 1e-3);
  EXPECT_TRUE(rep.at("hurwitz").get<bool>());
  const FilterParams fitted = read_json_file(dir / "out" / "filter.json").get<FilterParams>();
  EXPECT_NEAR(fitted.v0, truth.v0, 1e-3);
  EXPECT_NEAR(fitted.v3, truth.v3, 1e-3);
  EXPECT_TRUE(fs::exists(dir / "out" / "fitted.csv"));
}

TEST(Cli, FitFilterSeaSpectrum) {
  const fs::path dir = test::scratch_dir("cli_fit_sea");
  const fs::path cfg = write_config(dir, Json{{"wave", {{"hs", 4.0}, {"g", 9.81}}}});
  const CliResult r = run({"fit-filter", "--config", cfg.string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err << r.out;
  EXPECT_EQ(read_json_file(dir / "out" / "fit_report.json").at("target"), "pierson_moskowitz");
}

TEST(Cli, FitFilterDegenerateAndMalformedTargets) {
  const fs::path dir = test::scratch_dir("cli_fit_bad");
  const fs::path cfg = write_config(dir, Json::object());
  std::ofstream(dir / "zero.csv") << "omega,value\n0.5,0\n1,0\n1.5,0\n2,0\n2.5,0\n3,0\n";
  CliResult r = run({"fit-filter", "--config", cfg.string(), "--target", (dir / "zero.csv").string(), "--out",
               (dir / "out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("degenerate"), std::string::npos) << r.err;

  std::ofstream(dir / "bad.csv") << "omega,value\n0.5,1\n1,x\n";
  r = run({"fit-filter", "--config", cfg.string(), "--target", (dir / "bad.csv").string(), "--out",
           (dir / "out2").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.csv:3"), std::string::npos) << r.err;

  r = run({"fit-filter", "--config", cfg.string(), "--target", (dir / "absent.csv").string(), "--out",
           (dir / "out3").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("absent.csv"), std::string::npos) << r.err;
}

TEST(Cli, SimulateIsByteIdenticalAcrossRunsAndThreads) {
  const fs::path dir = test::scratch_dir("cli_sim");
  Json j{{"ship", {{"phi_v", 0.5}}}, {"filter", {{"gamma", 0.8}}}, {"sim", small_sim(12, 40.0)},
         {"simulate", {{"write_trajectories", true}}}};
  j["sim"]["threads"] = 1;
  const fs::path one = write_config(dir, j, "one.json");
  j["sim"]["threads"] = 4;
  const fs::path four = write_config(dir, j, "four.json");
  ASSERT_EQ(run({"simulate", "--config", one.string(), "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(run({"simulate", "--config", one.string(), "--out", (dir / "b").string()}).code, 0);
  ASSERT_EQ(run({"simulate", "--config", four.string(), "--out", (dir / "c").string()}).code, 0);
  const auto files = listing(dir / "a");
  EXPECT_TRUE(files.count("summary.json"));
  EXPECT_TRUE(files.count("first_passage.csv"));
  EXPECT_TRUE(files.count("trajectories/path_00.csv"));
  EXPECT_EQ(listing(dir / "b"), files);
  EXPECT_EQ(listing(dir / "c"), files);
  for (const auto& f : files) {
    if (fs::is_directory(dir / "a" / f)) continue;
    EXPECT_EQ(test::slurp(dir / "a" / f), test::slurp(dir / "b" / f)) << f;
    EXPECT_EQ(test::slurp(dir / "a" / f), test::slurp(dir / "c" / f)) << f;
  }
}

TEST(Cli, SilentSeaNeverCapsizes) {
  const fs::path dir = test::scratch_dir("cli_silent");
  const fs::path cfg = write_config(dir, Json{{"filter", {{"gamma", 0.0}}}, {"sim", small_sim()},
                                              {"simulate", {{"write_trajectories", true}}}});
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir / "out").string()}).code, 0);
  const Json summary = read_json_file(dir / "out" / "summary.json");
  EXPECT_EQ(summary.at("n_capsized"), 0);
  EXPECT_TRUE(summary.at("capsize_times").empty());
  const std::string traj = test::slurp(dir / "out" / "trajectories" / "path_0.csv");
  std::istringstream lines(traj);
  std::string line;
  std::getline(lines, line);
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    EXPECT_EQ(line.substr(line.find(',')), ",0,0,0,0,0,0") << line;
    ++rows;
  }
  EXPECT_EQ(rows, 201u);
}

TEST(Cli, BlowupExitsOneNamingPathAndTime) {
  const fs::path dir = test::scratch_dir("cli_blowup");
  Json sim = small_sim(2, 1.0);
  sim["initial"] = {1e300, 1.0, 0, 0, 0, 0};
  const fs::path cfg = write_config(
      dir, Json{{"ship", {{"c1", 1e200}, {"c3", 0.0}, {"phi_v", 1e305}}}, {"filter", {{"gamma", 0.0}}}, {"sim", sim}});
  const CliResult r = run({"simulate", "--config", cfg.string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("path 0"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("t="), std::string::npos) << r.err;
}

TEST(Cli, DensityWritesGridAndSidecar) {
  const fs::path dir = test::scratch_dir("cli_density");
  const fs::path cfg =
      write_config(dir, Json{{"sim", small_sim(50, 10.0)}, {"density", {{"t", 5.0}, {"n_bins", 8}}}});
  const CliResult r = run({"density", "--config", cfg.string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json side = read_json_file(dir / "out" / "density.json");
  EXPECT_EQ(side.at("t"), 5.0);
  EXPECT_EQ(side.at("axes").size(), 2u);
  const std::string csv = test::slurp(dir / "out" / "density.csv");
  EXPECT_EQ(csv.rfind("x,y,p\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 65);

  const fs::path late = write_config(dir, Json{{"sim", small_sim(5, 10.0)}, {"density", {{"t", 50.0}}}}, "late.json");
  EXPECT_EQ(run({"density", "--config", late.string(), "--out", (dir / "late").string()}).code, 2);
}

TEST(Cli, ConvergeDecaysOnLinearModel) {
  const fs::path dir = test::scratch_dir("cli_converge");
  const fs::path cfg = write_config(dir, linear_fpk_config());
  const CliResult r = run({"converge", "--config", cfg.string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json decay = read_json_file(dir / "out" / "decay.json");
  EXPECT_GT(decay.at("r_squared").get<double>(), 0.99);
  EXPECT_GT(decay.at("alpha_hat").get<double>(), 0.0);
  EXPECT_EQ(test::slurp(dir / "out" / "distance.csv").rfind("t,distance\n", 0), 0u);
  EXPECT_EQ(listing(dir / "out"), (std::set<std::string>{"decay.json", "distance.csv", "final.csv", "reference.csv"}));
}

TEST(Cli, ConvergeFailures) {
  const fs::path dir = test::scratch_dir("cli_converge_bad");
  Json on_ref = linear_fpk_config();
  on_ref["fpk2d"]["initial"] = "reference";
  on_ref["fpk2d"]["n1"] = 32;
  on_ref["fpk2d"]["n2"] = 32;
  CliResult r = run({"converge", "--config", write_config(dir, on_ref, "ref.json").string(), "--out",
               (dir / "ref").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("logarithm"), std::string::npos) << r.err;

  Json nonlinear = linear_fpk_config();
  nonlinear["ship"]["lambda2"] = 0.1;
  nonlinear["fpk2d"]["reference"] = "analytic";
  r = run({"converge", "--config", write_config(dir, nonlinear, "nl.json").string(), "--out", (dir / "nl").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("closed form"), std::string::npos) << r.err;

  Json big_step = linear_fpk_config();
  big_step["fpk2d"]["dt"] = 1.0;
  r = run({"converge", "--config", write_config(dir, big_step, "dt.json").string(), "--out", (dir / "dt").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("admissible dt"), std::string::npos) << r.err;

  Json bad_initial = linear_fpk_config();
  bad_initial["fpk2d"]["initial"] = "somewhere";
  r = run({"converge", "--config", write_config(dir, bad_initial, "init.json").string(), "--out",
           (dir / "init").string()});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, CapsizeReportsHazard) {
  const fs::path dir = test::scratch_dir("cli_capsize");
  Json sim{{"n_paths", 400}, {"t_end", 120.0}, {"dt", 0.01}, {"seed", 3}, {"record_stride", 12000}};
  const fs::path cfg = write_config(dir, Json{{"filter", {{"gamma", 0.06}}}, {"sim", sim}});
  const CliResult r = run({"capsize", "--config", cfg.string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json h = read_json_file(dir / "out" / "hazard.json");
  EXPECT_GE(h.at("n_events").get<int>(), 20);
  EXPECT_EQ(h.at("interval_rates").size(), 5u);
  EXPECT_TRUE(h.contains("constant_rate"));
}

TEST(Cli, CapsizeWithTooFewEventsExitsOne) {
  const fs::path dir = test::scratch_dir("cli_capsize_few");
  const fs::path cfg = write_config(dir, Json{{"sim", small_sim(4, 30.0)}, {"filter", {{"gamma", 0.01}}}});
  const CliResult r = run({"capsize", "--config", cfg.string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("events"), std::string::npos) << r.err;
}

TEST(Cli, WritesOnlyInsideOutDir) {
  const fs::path dir = test::scratch_dir("cli_confined");
  const fs::path cfg = write_config(
      dir, Json{{"filter", {{"gamma", 0.05}}}, {"sim", small_sim(4, 10.0)}, {"density", {{"n_bins", 4}}}});
  const auto before = listing(dir);
  for (const char* cmd : {"simulate", "density"})
  {
    const CliResult r = run({cmd, "--config", cfg.string(), "--out", (dir / "out" / cmd).string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  std::set<std::string> added;
  for (const auto& f : listing(dir))
    if (!before.count(f)) added.insert(f);
  for (const auto& f : added) EXPECT_EQ(f.rfind("out", 0), 0u) << f;
}

TEST(Cli, ConfigRoundTripsThroughJson) {
  const fs::path dir = test::scratch_dir("cli_roundtrip");
  const Json j{{"ship", {{"lambda1", 0.15}, {"damping_form", "Cubic"}, {"lambda3", 0.05}}},
               {"sim", small_sim()},
               {"fpk2d", {{"n1", 48}, {"reference", "analytic"}, {"initial_sd", {0.2, 0.3}}}},
               {"density", {{"axes", {{{"min", -1}, {"max", 1}, {"n_bins", 4}}, {{"min", -2}, {"max", 2}, {"n_bins", 4}}}}}},
               {"capsize", {{"t_start", 5.0}, {"t_end", 15.0}}}};
  const RunConfig a = load_run_config(write_config(dir, j));
  const Json once = a;
  const RunConfig b = load_run_config(write_config(dir, once, "again.json"));
  EXPECT_EQ(Json(b).dump(), once.dump());
  EXPECT_EQ(b.fpk2d.n1, 48u);
  EXPECT_EQ(b.ship.damping_form, DampingForm::Cubic);
}
