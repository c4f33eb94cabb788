#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chfem/errors.hpp"
#include "chfem/experiment.hpp"

using namespace chfem;
namespace fs = std::filesystem;

namespace {

const char* kSampleConfig = R"(
# peakon refinement study
[run]
subcommand = converge
scheme = modified
T = 1.0
courant = 0.1
tau = 1.0
projection = h1

[space]
r = 4
levels = 160, 320
domain = -40, 40

[profile]
name = peakon
c = 1.0
center = 0.0

[output]
dir = out_test
normalized = true
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("config round trip is the identity") {
  const ExperimentConfig c1 = parse_config(kSampleConfig);
  const std::string s1 = serialize_config(c1);
  const ExperimentConfig c2 = parse_config(s1);
  const std::string s2 = serialize_config(c2);
  CHECK(s1 == s2);
  CHECK(c2.run.scheme == Scheme::modified);
  CHECK(c2.levels == std::vector<int>{160, 320});
  CHECK(c2.run.profile.amplitudes == std::vector<double>{1.0});
}

TEST_CASE("config errors carry location information") {
  CHECK_THROWS_WITH_AS(parse_config("[run]\nbogus = 1\n", "x.cfg"),
                       doctest::Contains("x.cfg:2"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nT = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\ndt = 0.1\ncourant = 1.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nscheme = standard\n[space]\nr = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[space]\nlevels = 64, 32\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("no_section = 1\n"), ConfigError);
}

TEST_CASE("T = 0 run dumps the initial projection") {
  ExperimentConfig cfg;
  cfg.run.scheme = Scheme::modified;
  cfg.run.r = 3;
  cfg.run.N = 64;
  cfg.run.a = -40;
  cfg.run.b = 40;
  cfg.run.T = 0.0;
  cfg.run.profile.name = "peakon";
  cfg.run.profile.amplitudes = {1.0};
  cfg.run.profile.centers = {0.0};
  cfg.out_dir = (fs::temp_directory_path() / "chfem_t0_run").string();
  fs::remove_all(cfg.out_dir);
  const RunResult res = run_experiment(cfg);
  CHECK(res.status == RunStatus::ok);
  REQUIRE(fs::exists(fs::path(cfg.out_dir) / "profile_t0.csv"));

  // the dump must match the direct projection sampled on the same grid
  const SplineSpace space = build_space(cfg.run);
  const CoefficientArray u =
      h1_project(space, make_profile(cfg.run.profile), default_rule(3));
  std::ifstream in(fs::path(cfg.out_dir) / "profile_t0.csv");
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "x,u,m");
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string sx, su;
    std::getline(ls, sx, ',');
    std::getline(ls, su, ',');
    const double x = std::stod(sx);
    CHECK(std::stod(su) == doctest::Approx(eval_spline(u, x, 0)).epsilon(1e-9));
    ++rows;
  }
  CHECK(rows == 64 * 10 + 1);
}

TEST_CASE("identical configs produce identical output files") {
  ExperimentConfig cfg;
  cfg.run.scheme = Scheme::standard;
  cfg.run.r = 4;
  cfg.run.N = 64;
  cfg.run.a = -40;
  cfg.run.b = 40;
  cfg.run.T = 0.5;
  cfg.run.dt = 0.125;
  cfg.run.profile.name = "peakon";
  cfg.run.profile.amplitudes = {1.0};
  cfg.run.profile.centers = {0.0};
  const fs::path base = fs::temp_directory_path() / "chfem_repro";
  fs::remove_all(base);
  ExperimentConfig a = cfg, b = cfg;
  a.out_dir = (base / "a").string();
  b.out_dir = (base / "b").string();
  run_experiment(a);
  run_experiment(b);
  for (const char* name : {"trajectory.csv", "invariants.csv", "indicators.csv", "status.csv"}) {
    CAPTURE(name);
    CHECK(slurp(base / "a" / name) == slurp(base / "b" / name));
  }
}

TEST_CASE("converge writes rates and hits the smooth order") {
  ExperimentConfig cfg;
  cfg.run.scheme = Scheme::modified;
  cfg.run.r = 4;
  cfg.run.a = -50;
  cfg.run.b = 50;
  cfg.run.T = 0.25;
  cfg.run.courant = 0.4;  // dt = h/10 at V = 4
  cfg.run.profile.name = "smooth-tw";
  cfg.run.profile.kappa = 1.0;
  cfg.run.profile.V = 4.0;
  cfg.levels = {125, 250, 500};
  cfg.out_dir = (fs::temp_directory_path() / "chfem_conv").string();
  fs::remove_all(cfg.out_dir);
  const ConvergeResult res = converge_experiment(cfg, 0);
  REQUIRE(res.levels.size() == 3);
  REQUIRE(res.u_l2_rate[2].has_value());
  CHECK(std::abs(*res.u_l2_rate[2] - 4.0) < 0.4);
  REQUIRE(fs::exists(fs::path(cfg.out_dir) / "rates.csv"));
  std::string header;
  std::ifstream in(fs::path(cfg.out_dir) / "rates.csv");
  std::getline(in, header);
  CHECK(header == "N,M,h,dt,u_l2,u_l2_rate,u_linf,u_linf_rate,u_h1,u_h1_rate");

  // --levels k truncation
  const ConvergeResult res2 = converge_experiment(cfg, 2);
  CHECK(res2.levels.size() == 2);
}

TEST_CASE("stability subcommand writes its row") {
  ExperimentConfig cfg;
  cfg.run.scheme = Scheme::modified;
  cfg.run.r = 2;
  cfg.run.N = 100;
  cfg.run.a = -20;
  cfg.run.b = 20;
  cfg.run.T = 2.0;
  cfg.run.profile.name = "peakon";
  cfg.run.profile.amplitudes = {1.0};
  cfg.run.profile.centers = {0.0};
  cfg.stability_grid = {0.2};
  cfg.out_dir = (fs::temp_directory_path() / "chfem_stab").string();
  fs::remove_all(cfg.out_dir);
  const StabilityResult res = stability_experiment(cfg);
  CHECK(res.max_courant == doctest::Approx(0.2));
  const std::string content = slurp(fs::path(cfg.out_dir) / "stability.csv");
  CHECK(content.find("scheme,r,profile,V,max_courant") == 0);
  CHECK(content.find("modified,2,peakon") != std::string::npos);
}

TEST_CASE("worker pool runs everything and rethrows") {
  std::atomic<int> count{0};
  std::vector<std::function<void()>> tasks;
  for (int i = 0; i < 20; ++i) tasks.push_back([&count] { count.fetch_add(1); });
  parallel_tasks(tasks);
  CHECK(count.load() == 20);

  tasks.push_back([] { throw Error("boom"); });
  CHECK_THROWS_AS(parallel_tasks(tasks), Error);
}

TEST_SUITE_END();
