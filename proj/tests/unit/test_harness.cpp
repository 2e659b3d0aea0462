#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "elastorough/errors.hpp"
#include "elastorough/harness.hpp"
#include "elastorough/parallel.hpp"
#include "elastorough/report_io.hpp"

using namespace elastorough;
using nlohmann::json;

namespace
{

RunConfig small_config()
{
  RunConfig c = default_config();
  c.N1 = c.N2 = 2;
  c.Nz = 16;
  c.perturbation = {{1, 0, 0.02, 0.01}, {0, 1, -0.01, 0.015}};
  return c;
}

RunConfig flat_config()
{
  RunConfig c = small_config();
  c.perturbation.clear();
  return c;
}

std::filesystem::path temp_dir(const std::string &name)
{
  const auto d = std::filesystem::temp_directory_path() / ("elastorough_test_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(DeterministicRun, FlatSurfaceBoundHolds)
{
  const RunReport r = deterministic_run(flat_config());
  ASSERT_TRUE(r.bound.measured_ratio.has_value());
  EXPECT_GT(*r.bound.measured_ratio, 0.0);
  EXPECT_LE(*r.bound.measured_ratio, 1.0);
  EXPECT_TRUE(r.invariant_failure.empty());
  EXPECT_EQ(r.lipschitz, 0.0);
  EXPECT_GT(r.g_h1, r.g_l2);
}

TEST(DeterministicRun, ZeroSource)
{
  RunConfig c = small_config();
  c.source.clear();
  const RunReport r = deterministic_run(c);
  EXPECT_EQ(r.u_norm, 0.0);
  EXPECT_EQ(r.bound.measured_ratio.value(), 0.0);
}

TEST(DeterministicRun, RepeatableAndRoughBoundHolds)
{
  const RunConfig c = small_config();
  const RunReport a = deterministic_run(c), b = deterministic_run(c);
  EXPECT_EQ(a.u_norm, b.u_norm);
  EXPECT_EQ(runs_csv({a}), runs_csv({b}));
  EXPECT_GT(a.lipschitz, 0.0);
  EXPECT_LE(*a.bound.measured_ratio, 1.0);
  EXPECT_GT(a.solve.iterations, 1);
}

TEST(Sweep, OmegaFiniteAndBoundMonotoneInH)
{
  const SweepTable t = parameter_sweep(flat_config(), SweepAxis::Omega, {0.5, 1.0, 2.0, 4.0});
  ASSERT_EQ(t.points.size(), 4u);
  for (const auto &p : t.points)
  {
    ASSERT_TRUE(p.report.has_value()) << p.error;
    EXPECT_TRUE(std::isfinite(p.report->u_norm / p.report->g_h1));
    EXPECT_GT(p.report->u_norm, 0.0);
  }
  const SweepTable h = parameter_sweep(flat_config(), SweepAxis::H, {1.2, 1.25, 1.4, 1.6});
  for (std::size_t i = 1; i < h.points.size(); ++i)
  {
    ASSERT_TRUE(h.points[i].report.has_value()) << h.points[i].error;
    EXPECT_GT(h.points[i].report->bound.total_bound, h.points[i - 1].report->bound.total_bound);
  }
}

TEST(Sweep, ZeroAmplitudeReproducesFlatRunAndFailuresAreRecorded)
{
  const SweepTable t = parameter_sweep(small_config(), SweepAxis::LAmplitude, {0.0, 1.0, 100.0});
  ASSERT_TRUE(t.points[0].report.has_value());
  const RunReport flat = deterministic_run(flat_config());
  EXPECT_EQ(t.points[0].report->u_norm, flat.u_norm);
  EXPECT_EQ(t.points[0].report->bound.total_bound, flat.bound.total_bound);
  EXPECT_TRUE(t.points[1].report.has_value());
  EXPECT_GT(t.points[1].report->bound.total_bound, flat.bound.total_bound);
  EXPECT_FALSE(t.points[2].report.has_value());  // leaves the slab
  EXPECT_FALSE(t.points[2].error.empty());
  EXPECT_THROW(parse_sweep_axis("lambda"), ConfigError);
}

TEST(MonteCarlo, ZeroAmplitudeReducesToFlatRun)
{
  RunConfig c = flat_config();
  for (auto &m : c.ensemble)
  {
    m.scale = 0.0;
  }
  const McReport mc = monte_carlo(c, 1, 5);
  ASSERT_EQ(mc.n_completed, 1);
  // Same source, fixed flat surface, solved directly.
  const auto f0 = make_profile(c.f0, c.geometry, {5, 5});
  const RandomSample s = sample_one(5, 0, configured_law(c), c.geometry, f0, {5, 5});
  RunConfig d = c;
  d.source = s.source.bumps;
  const RunReport r = deterministic_run(d);
  EXPECT_NEAR(mc.mean_u_sq, r.u_norm * r.u_norm, 1e-12 * mc.mean_u_sq);
  EXPECT_NEAR(mc.mean_g_sq, r.g_h1 * r.g_h1, 1e-12 * mc.mean_g_sq);
}

TEST(MonteCarlo, DeterministicAcrossRunsAndThreads)
{
  const RunConfig c = small_config();
  set_thread_limit(1);
  const McReport a = monte_carlo(c, 4, 11);
  set_thread_limit(3);
  const McReport b = monte_carlo(c, 4, 11);
  set_thread_limit(1);
  EXPECT_EQ(mc_csv(a), mc_csv(b));
  EXPECT_EQ(a.mean_u_sq, b.mean_u_sq);
  EXPECT_EQ(a.completeness, 1.0);
  EXPECT_GT(a.ratio, 0.0);
  EXPECT_LE(a.ratio, 1.0);
  EXPECT_GT(a.stderr_u_sq, 0.0);
  EXPECT_THROW(monte_carlo(c, 0, 1), ConstraintViolation);
}

TEST(Pushforward, IdenticalSurfacesAgree)
{
  RunConfig c = flat_config();
  for (auto &m : c.ensemble)
  {
    m.scale = 0.0;
  }
  const auto f0 = make_profile(c.f0, c.geometry, {5, 5});
  const RandomSample s = sample_one(3, 0, configured_law(c), c.geometry, f0, {5, 5});
  EXPECT_LE(pushforward_check(s, c), 1e-10);
}

TEST(Pushforward, DifferenceShrinksUnderRefinement)
{
  const RunConfig c = small_config();
  const auto f0 = make_profile(c.f0, c.geometry, {5, 5});
  const RandomSample s = sample_one(3, 1, configured_law(c), c.geometry, f0, {5, 5});
  const PushforwardReport r = pushforward_study(s, c, {8, 16});
  ASSERT_EQ(r.orders.size(), 1u);
  EXPECT_GT(r.levels[0].difference, r.levels[1].difference);
  EXPECT_GE(r.orders[0], 1.5);
}

TEST(Config, RoundTripAndStrictKeys)
{
  RunConfig c = small_config();
  c.seed = 18446744073709551615ull;
  const json j = config_to_json(c);
  EXPECT_EQ(config_from_json(j), c);
  EXPECT_EQ(config_to_json(config_from_json(j)), j);

  json bad = j;
  bad["physics"]["omgea"] = 1.0;
  try
  {
    config_from_json(bad);
    FAIL();
  }
  catch (const ConfigError &e)
  {
    EXPECT_NE(std::string(e.what()).find("physics.omgea"), std::string::npos);
  }
  json missing = j;
  missing["physics"].erase("omega");
  try
  {
    config_from_json(missing);
    FAIL();
  }
  catch (const ConfigError &e)
  {
    EXPECT_NE(std::string(e.what()).find("physics.omega"), std::string::npos);
  }
  json invalid = j;
  invalid["physics"]["mu"] = -1.0;
  EXPECT_THROW(config_from_json(invalid), ConfigError);
  json high = j;
  high["surface"]["f0"]["offset"] = 0.6;
  EXPECT_THROW(config_from_json(high), ConfigError);
}

TEST(Reports, EchoedConfigReloads)
{
  const RunReport r = deterministic_run(flat_config());
  const json j = to_json(r);
  EXPECT_EQ(config_from_json(j.at("config")), r.config);
  EXPECT_TRUE(j.contains("wall_seconds"));
  EXPECT_EQ(runs_csv({r}).find("wall"), std::string::npos);
}

TEST(Reports, TraceCsvRoundTrip)
{
  const SpectralGrid g(1, 2, {4.0, 4.0});
  std::vector<Vec3c> v(g.size());
  for (int i = 0; i < g.size(); ++i)
  {
    v[i] = Vec3c(cplx(i, 0.1 * i), cplx(-0.5, 1.0 / (i + 1)), cplx(1e-17 * i, 3.0));
  }
  const auto d = temp_dir("trace");
  write_text((d / "t.csv").string(), trace_csv(g, v));
  const auto back = read_trace_csv((d / "t.csv").string(), g);
  for (int i = 0; i < g.size(); ++i)
  {
    EXPECT_EQ(back[i], v[i]);
  }
}

#ifdef ELASTOROUGH_CLI_PATH
namespace
{

int run_cli(const std::string &args)
{
  const int status = std::system((std::string(ELASTOROUGH_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST(Cli, ExitCodesAndErrorRecord)
{
  const auto d = temp_dir("cli");
  json j = config_to_json(flat_config());
  j["physics"].erase("omega");
  std::ofstream((d / "bad.json").string()) << j.dump();
  EXPECT_EQ(run_cli("solve --config " + (d / "bad.json").string() + " --out " + (d / "bad").string()), 1);
  std::ifstream err((d / "bad" / "error.json").string());
  ASSERT_TRUE(err.good());
  const json e = json::parse(err);
  EXPECT_EQ(e.at("exit_code"), 1);
  EXPECT_NE(e.at("message").get<std::string>().find("physics.omega"), std::string::npos);

  EXPECT_EQ(run_cli("constants --out " + (d / "c").string()), 0);
  EXPECT_EQ(run_cli("verify-dtn --out " + (d / "v").string()), 0);
  EXPECT_EQ(run_cli("nonsense"), 1);

  j = config_to_json(flat_config());
  j["discretization"]["rtol"] = 1e-30;
  j["discretization"]["iteration_cap_factor"] = 0.01;
  j["surface"]["perturbation"] = json::array({{{"j1", 1}, {"j2", 0}, {"a", 0.05}, {"b", 0.0}}});
  std::ofstream((d / "stall.json").string()) << j.dump();
  EXPECT_EQ(run_cli("solve --config " + (d / "stall.json").string() + " --out " + (d / "stall").string()), 2);
}

TEST(Cli, ConstantsTable)
{
  const auto d = temp_dir("cli_constants");
  json j = config_to_json(flat_config());
  j["geometry"]["h"] = 1.0;
  j["source"]["bumps"] = json::array();
  std::ofstream((d / "c.json").string()) << j.dump();
  ASSERT_EQ(run_cli("constants --config " + (d / "c.json").string() + " --out " + d.string()), 0);
  std::ifstream rep((d / "report.json").string());
  const json r = json::parse(rep);
  EXPECT_NEAR(r.at("bound").at("total_bound").get<double>(), 2166.0, 1e-9);
  EXPECT_NEAR(r.at("stability").at("K").get<double>(), 3.0 / std::sqrt(2.0), 1e-12);
}
#endif
